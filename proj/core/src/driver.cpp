#include "bethe/driver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "bethe/environment.hpp"
#include "bethe/state.hpp"

#ifndef BETHE_VERSION
#define BETHE_VERSION "unknown"
#endif

namespace bethe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

ResultRecord failed_record(const RunConfig& config, double h, std::size_t steps,
                           const std::string& error) {
  ResultRecord r;
  r.h = h;
  r.D = config.D;
  r.q = config.q;
  r.m_x = r.m_z = r.energy_per_site = kNaN;
  r.lambda2_over_lambda1 = r.xi = r.discarded_weight_max = kNaN;
  r.steps_used = steps;
  r.failed = true;
  r.error = error;
  return r;
}

nlohmann::json number_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j;
  j["q"] = c.q;
  j["J"] = c.J;
  j["h"] = c.h;
  j["h_min"] = c.h_min;
  j["h_max"] = c.h_max;
  j["h_steps"] = c.h_steps;
  j["D"] = c.D;
  j["T_max"] = c.T_max;
  j["steps"] = c.steps ? nlohmann::json(*c.steps) : nlohmann::json(nullptr);
  j["schedule_c"] = c.schedule_c;
  j["tol_obs"] = c.tol_obs;
  j["window"] = c.window;
  j["early_stop"] = c.early_stop;
  j["record_every"] = c.record_every;
  j["env_tol"] = c.env_tol;
  j["env_max_iter"] = c.env_max_iter;
  j["anderson_depth"] = c.anderson_depth;
  j["theta"] = c.theta;
  j["pad_noise"] = c.pad_noise;
  j["seed"] = c.seed;
  j["warm_start"] = c.warm_start;
  j["direction"] = c.direction == SweepDirection::Up ? "up" : "down";
  j["mx_threshold"] = c.mx_threshold;
  j["workers"] = c.workers;
  j["record_timing"] = c.record_timing;
  return j;
}

nlohmann::json fit_object(const FitResult& f) {
  return {{"beta", f.beta},       {"beta_stderr", f.beta_stderr}, {"amplitude", f.amplitude},
          {"rms_residual", f.rms_residual}, {"h_c", f.h_c},        {"h_lo", f.h_lo},
          {"h_hi", f.h_hi},       {"points", f.points}, {"h_c_refined", f.h_c_refined}};
}

}  // namespace

const char* version() noexcept { return BETHE_VERSION; }

void RunConfig::validate(bool sweep) const {
  require(q >= 2, "q must be at least 2");
  require(std::isfinite(J) && J > 0.0, "J must be positive (antiferromagnetic coupling unsupported)");
  require(D >= 1, "D must be at least 1");
  require(std::isfinite(T_max) && T_max > 0.0, "T_max must be positive");
  require(!steps || *steps >= 1, "steps must be at least 1");
  require(steps || (std::isfinite(schedule_c) && schedule_c > 0.0), "schedule c must be positive");
  require(tol_obs > 0.0, "tol_obs must be positive");
  require(window > 0.0, "window must be positive");
  require(record_every >= 1, "record_every must be at least 1");
  require(env_tol > 0.0, "env_tol must be positive");
  require(env_max_iter >= 1, "env_max_iter must be at least 1");
  require(std::isfinite(theta), "theta must be finite");
  require(pad_noise >= 0.0, "pad_noise must be non-negative");
  require(mx_threshold > 0.0, "mx_threshold must be positive");
  require(workers >= 1, "workers must be at least 1");
  if (sweep) {
    require(h_steps >= 2, "a sweep needs h_steps >= 2");
    require(std::isfinite(h_min) && std::isfinite(h_max) && h_max > h_min,
            "a sweep needs h_max > h_min");
    require(h_min >= 0.0, "negative fields are unsupported");
  } else {
    require(std::isfinite(h) && h >= 0.0, "h must be non-negative");
  }
}

std::vector<double> RunConfig::h_grid() const {
  std::vector<double> grid(h_steps);
  const double span = h_max - h_min;
  for (std::size_t i = 0; i < h_steps; ++i) {
    grid[i] = h_min + span * static_cast<double>(i) / static_cast<double>(h_steps - 1);
  }
  return grid;
}

EvolveConfig RunConfig::evolve_config(double field) const {
  EvolveConfig e;
  e.J = J;
  e.h = field;
  e.bond_dim = D;
  e.total_time = T_max;
  e.steps = steps;
  e.schedule_c = schedule_c;
  e.early_stop = early_stop;
  e.tol_obs = tol_obs;
  e.window = window;
  e.record_every = record_every;
  e.track_correlation = false;
  e.check_invariants = false;
  e.environment.tol = env_tol;
  e.environment.max_iter = env_max_iter;
  e.environment.anderson_depth = anderson_depth;
  e.pad_noise = pad_noise;
  e.seed = seed;
  return e;
}

PointOutcome run_point_from(const RunConfig& config, double h, const ITTNState& initial) {
  const auto start = std::chrono::steady_clock::now();
  PointOutcome out;
  try {
    EvolveResult run = evolve(initial, config.evolve_config(h));
    const StepRecord& last = run.trajectory.back();
    ResultRecord& r = out.record;
    r.h = h;
    r.D = config.D;
    r.q = config.q;
    r.m_x = last.m_x;
    r.m_z = last.m_z;
    r.energy_per_site = last.energy_per_site;
    if (config.D <= kMaxSpectrumBondDim) {
      const CorrelationSpectrum cs = correlation_spectrum(run.state, run.environment);
      r.lambda2_over_lambda1 = cs.lambda2;
      r.xi = cs.xi;
    } else {
      r.lambda2_over_lambda1 = r.xi = kNaN;
    }
    r.discarded_weight_max = run.discarded_weight_max;
    r.steps_used = run.steps_used;
    r.validate();
    out.state = std::move(run.state);
    out.trajectory = std::move(run.trajectory);
  } catch (const EvolutionError& e) {
    out.record = failed_record(config, h, e.step(), e.what());
    out.trajectory = e.partial_trajectory();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.record = failed_record(config, h, 0, e.what());
  }
  if (config.record_timing) {
    out.record.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return out;
}

PointOutcome run_point(const RunConfig& config) {
  config.validate(false);
  return run_point_from(config, config.h, init_product(config.q, config.theta));
}

SweepResult run_sweep(const RunConfig& config, const ProgressCallback& progress) {
  config.validate(true);
  const std::vector<double> grid = config.h_grid();
  const ITTNState cold = init_product(config.q, config.theta);
  SweepResult sweep;
  sweep.records.resize(grid.size());

  if (config.warm_start) {
    std::vector<std::size_t> order(grid.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
      order[i] = config.direction == SweepDirection::Up ? i : order.size() - 1 - i;
    }
    std::optional<ITTNState> previous;
    for (std::size_t i : order) {
      PointOutcome point = run_point_from(config, grid[i], previous ? *previous : cold);
      if (point.state) previous = std::move(point.state);
      sweep.records[i] = std::move(point.record);
      if (progress) progress(sweep.records[i]);
    }
  } else if (config.workers <= 1) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sweep.records[i] = run_point_from(config, grid[i], cold).record;
      if (progress) progress(sweep.records[i]);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;
    std::vector<std::size_t> done;
    std::vector<std::jthread> pool;
    const std::size_t n_workers = std::min(config.workers, grid.size());
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
          sweep.records[i] = run_point_from(config, grid[i], cold).record;
          const std::lock_guard lock(done_mutex);
          done.push_back(i);
        }
      });
    }
    pool.clear();
    if (progress) {
      for (std::size_t i : done) progress(sweep.records[i]);
    }
  }

  for (const auto& r : sweep.records) sweep.failed += r.failed ? 1 : 0;
  sweep.h_c = estimate_critical_field(sweep.records, config.mx_threshold);
  return sweep;
}

std::vector<TrotterCurve> convergence_study(const RunConfig& config, double T,
                                            std::span<const std::size_t> step_counts) {
  config.validate(false);
  if (!(T > 0.0)) throw ConfigError("Trotter study time must be positive");
  if (step_counts.empty()) throw ConfigError("Trotter study needs at least one step count");
  const ITTNState initial = init_product(config.q, config.theta);
  std::vector<TrotterCurve> curves;
  for (std::size_t n : step_counts) {
    if (n < 1) throw ConfigError("Trotter step counts must be positive");
    EvolveConfig e = config.evolve_config(config.h);
    e.total_time = T;
    e.steps = n;
    e.early_stop = false;
    e.record_every = 1;
    EvolveResult run = evolve(initial, e);
    TrotterCurve curve;
    curve.steps = n;
    curve.dt = run.dt;
    curve.final_m_x = run.trajectory.back().m_x;
    curve.trajectory = std::move(run.trajectory);
    curves.push_back(std::move(curve));
  }
  return curves;
}

void write_trotter_csv(std::ostream& out, std::span<const TrotterCurve> curves) {
  out << "N,step,time,m_x\n";
  for (const auto& c : curves) {
    for (const auto& s : c.trajectory) {
      out << c.steps << ',' << s.step << ',' << format_double(s.time) << ','
          << format_double(s.m_x) << '\n';
    }
  }
}

std::string sweep_summary_json(const RunConfig& config, const SweepResult& sweep,
                               const std::optional<FitResult>& fit, const std::string& fit_error) {
  nlohmann::json j;
  j["software"] = {{"name", "bethe"}, {"version", version()}};
  j["config"] = config_json(config);
  j["h_c"] = sweep.h_c ? nlohmann::json(*sweep.h_c) : nlohmann::json(nullptr);
  j["mx_threshold"] = config.mx_threshold;
  nlohmann::json points = nlohmann::json::array();
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& r : sweep.records) {
    if (r.failed) {
      failed.push_back({{"h", r.h}, {"error", r.error}});
      continue;
    }
    points.push_back({{"h", r.h},
                      {"abs_m_x", std::abs(r.m_x)},
                      {"energy_per_site", r.energy_per_site},
                      {"lambda2_over_lambda1", number_or_null(r.lambda2_over_lambda1)}});
  }
  j["points"] = std::move(points);
  j["failed_points"] = std::move(failed);
  if (fit) {
    j["fit"] = fit_object(*fit);
  } else {
    j["fit"] = nullptr;
    if (!fit_error.empty()) j["fit_error"] = fit_error;
  }
  return j.dump(2);
}

std::string fit_json(const FitResult& fit) { return fit_object(fit).dump(2); }

}  // namespace bethe
