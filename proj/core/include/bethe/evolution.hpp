#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "bethe/environment.hpp"
#include "bethe/gates.hpp"
#include "bethe/state.hpp"

namespace bethe {

/// A_new^s[(a_1, g_1), .., (a_q, g_q)] = sum_{s'} A^{s'}[a_1..a_q] Q[s', s, g_1..g_q]
/// with every fused bond index ordered (old index, gate index). D -> 2 D.
ITTNState apply_gate(const ITTNState& state, const GateSet& gates);

struct TruncationReport {
  double kept_weight = 0.0;
  double discarded_weight = 0.0;  ///< relative, in [0, 1]
  std::vector<double> spectrum;   ///< descending, negatives clamped to 0
  bool degenerate_cut = false;    ///< kept and first discarded eigenvalue coincide
};

struct TruncateOptions {
  EnvironmentOptions environment;  ///< for the input state (seed may be set)
  /// Relative gap below which the eigenvalues on either side of the cut are
  /// reported as degenerate.
  double degeneracy_tol = 1e-9;
};

struct TruncationResult {
  ITTNState state;
  TruncationReport report;
  Environment input_environment;  ///< leading environment of the untruncated input
  Environment environment;        ///< of the truncated, rescaled state (lambda1 == 1)
};

/// Projects every bond onto the top-D_target eigenvectors of the input's
/// environment matrix (A -> A x_1 U x_2 U .. x_q U) and rescales the result so
/// that its environment has unit dominant scale.
TruncationResult truncate(const ITTNState& state, Index target_bond_dim,
                          const TruncateOptions& options = {});

/// Observables of a state with a converged environment.
struct Observables {
  double m_x = 0.0;
  double m_z = 0.0;
  double bond_xx = 0.0;
  double energy_per_site = 0.0;  ///< -(q/2) J <sx sx> - h <sz>
};

Observables measure(const ITTNState& state, const Environment& env, double J, double h);

struct StepRecord {
  std::size_t step = 0;
  double time = 0.0;
  double m_x = 0.0;
  double m_z = 0.0;
  double energy_per_site = 0.0;
  double lambda2_over_lambda1 = 0.0;  ///< NaN when correlations are not tracked
  double xi = 0.0;                    ///< NaN when correlations are not tracked
  double discarded_weight = 0.0;
  bool degenerate_cut = false;
  std::size_t environment_iterations = 0;  ///< for the 2D environment of this step
  /// Filled only with EvolveConfig::check_invariants, NaN otherwise.
  double symmetry_defect = 0.0;
  /// min over the two environments of this step of min_eig / max_eig.
  double environment_min_ratio = 0.0;
};

struct EvolveConfig {
  double J = 1.0;
  double h = 0.0;
  Index bond_dim = 2;
  double total_time = 10.0;
  /// Explicit number of Trotter steps; when empty N = ceil(c T^2).
  std::optional<std::size_t> steps;
  double schedule_c = 2.0;

  /// Early stop once m_x, m_z and the energy stay within tol_obs of the
  /// current values over the last `window` units of imaginary time.
  bool early_stop = true;
  double tol_obs = 1e-7;
  double window = 1.0;

  std::size_t record_every = 1;
  bool track_correlation = true;
  bool check_invariants = false;

  EnvironmentOptions environment;
  /// Symmetric noise added to padded entries when the initial state has a
  /// smaller bond dimension than bond_dim.
  double pad_noise = 0.0;
  std::uint64_t seed = 0;

  std::size_t resolved_steps() const;
};

struct EvolveResult {
  ITTNState state;
  Environment environment;
  std::vector<StepRecord> trajectory;
  std::size_t steps_used = 0;
  std::size_t steps_planned = 0;
  double dt = 0.0;
  double discarded_weight_max = 0.0;
  bool stopped_early = false;
};

class EvolutionError : public Error {
 public:
  EvolutionError(const std::string& what, std::size_t step, std::vector<StepRecord> partial)
      : Error(what), step_(step), partial_(std::move(partial)) {}
  std::size_t step() const noexcept { return step_; }
  const std::vector<StepRecord>& partial_trajectory() const noexcept { return partial_; }

 private:
  std::size_t step_;
  std::vector<StepRecord> partial_;
};

/// Called after every recorded step; returning false stops the run.
using StepObserver = std::function<bool(const StepRecord&)>;

/// Runs N steps of apply_gate(dt = T / N) followed by truncate(bond_dim).
/// The initial state is zero-padded to bond_dim when smaller.
EvolveResult evolve(const ITTNState& initial, const EvolveConfig& config,
                    const StepObserver& observer = {});

}  // namespace bethe
