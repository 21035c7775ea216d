#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bethe/analysis.hpp"
#include "bethe/evolution.hpp"
#include "bethe/records.hpp"

namespace bethe {

/// Library version string, e.g. "0.1.0".
const char* version() noexcept;

/// Invalid run parameters (command line or configuration file).
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class SweepDirection { Up, Down };

/// Everything a point, a sweep or a Trotter study needs.
struct RunConfig {
  Index q = 3;
  double J = 1.0;

  double h = 0.0;             ///< single point
  double h_min = 0.0;         ///< sweep grid: h_min + i (h_max - h_min) / (h_steps - 1)
  double h_max = 0.0;
  std::size_t h_steps = 0;

  Index D = 8;
  double T_max = 20.0;
  std::optional<std::size_t> steps;  ///< overrides N = ceil(c T^2)
  double schedule_c = 2.0;

  double tol_obs = 1e-7;
  double window = 1.0;
  bool early_stop = true;
  std::size_t record_every = 10;

  double env_tol = 1e-12;
  std::size_t env_max_iter = 10000;
  std::size_t anderson_depth = 8;

  double theta = std::numbers::pi / 2;  ///< initial product state angle from +z
  double pad_noise = 0.0;
  std::uint64_t seed = 0;

  bool warm_start = false;  ///< sweep: start each point from the previous final state
  SweepDirection direction = SweepDirection::Up;
  double mx_threshold = 1e-2;
  std::size_t workers = 1;    ///< cold-start sweeps only
  bool record_timing = true;  ///< false writes 0 to wall_time_seconds

  /// Throws ConfigError on the first invalid field. `sweep` also checks the grid.
  void validate(bool sweep) const;
  /// Sweep grid in increasing order.
  std::vector<double> h_grid() const;
  EvolveConfig evolve_config(double field) const;
};

struct PointOutcome {
  ResultRecord record;
  std::optional<ITTNState> state;  ///< final state, empty when the point failed
  std::vector<StepRecord> trajectory;
};

/// Evolves from `initial` at field h and summarizes the final state.
/// Numerical failures are caught and reported through record.failed.
PointOutcome run_point_from(const RunConfig& config, double h, const ITTNState& initial);

/// Cold start from the product state at config.theta and field config.h.
PointOutcome run_point(const RunConfig& config);

struct SweepResult {
  std::vector<ResultRecord> records;  ///< ordered by h
  std::optional<double> h_c;
  std::size_t failed = 0;
};

using ProgressCallback = std::function<void(const ResultRecord&)>;

/// One point per grid value. Failed points stay in the list with failed set.
/// The callback runs on the calling thread in completion order.
SweepResult run_sweep(const RunConfig& config, const ProgressCallback& progress = {});

struct TrotterCurve {
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<StepRecord> trajectory;
  double final_m_x = 0.0;
};

/// Fixed total time T, one run per entry of `step_counts`, early stopping off
/// and every step recorded.
std::vector<TrotterCurve> convergence_study(const RunConfig& config, double T,
                                            std::span<const std::size_t> step_counts);

/// Long format: N,step,time,m_x.
void write_trotter_csv(std::ostream& out, std::span<const TrotterCurve> curves);

/// JSON summary of a sweep: software version, config echo, h_c estimate,
/// per-point |m_x|, failed points and the optional fit.
std::string sweep_summary_json(const RunConfig& config, const SweepResult& sweep,
                               const std::optional<FitResult>& fit,
                               const std::string& fit_error = {});

std::string fit_json(const FitResult& fit);

}  // namespace bethe
