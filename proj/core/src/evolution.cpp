#include "bethe/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace bethe {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Index ipow(Index base, Index exp) {
  Index r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

// Warm start for the doubled bond (old index major, gate index minor).
Matrix doubled_seed(const Matrix& R, const GateSet& gates) {
  Matrix w = Matrix::Zero(2, 2);
  w(0, 0) = gates.v(0) * gates.v(0);
  w(1, 1) = gates.v(1) * gates.v(1);
  Matrix seed = Eigen::kroneckerProduct(R, w).eval();
  seed /= seed.norm();
  seed += 1e-3 * Matrix::Identity(seed.rows(), seed.cols()) / std::sqrt(static_cast<double>(seed.rows()));
  return seed;
}

double min_ratio(const Environment& env) {
  const auto h = environment_health(env);
  return h.min_eigenvalue / h.max_eigenvalue;
}

}  // namespace

ITTNState apply_gate(const ITTNState& state, const GateSet& gates) {
  if (state.q() != gates.q) {
    throw DimensionError("gate set built for q = " + std::to_string(gates.q) +
                         " applied to a state with q = " + std::to_string(state.q()));
  }
  const Index q = state.q();
  const Index D = state.bond_dim();
  const Index Dn = 2 * D;
  const Index d = state.phys_dim();
  const Index n_gate = ipow(2, q);

  // Gate values Q[s', s, g] for every fused gate multi-index g.
  std::vector<double> gate(d * d * n_gate);
  for (Index sp = 0; sp < d; ++sp) {
    for (Index s = 0; s < d; ++s) {
      for (Index g = 0; g < n_gate; ++g) {
        gate[(sp * d + s) * n_gate + g] = gates.Q[(sp * d + s) * n_gate + g];
      }
    }
  }

  // Position of the old / gate digits inside the fused row-major index.
  std::vector<Index> old_offset(ipow(D, q)), gate_offset(n_gate);
  std::vector<Index> idx(q);
  const DenseTensor& a0 = state.tensor(0);
  for (Index flat = 0; flat < old_offset.size(); ++flat) {
    a0.unravel(flat, idx);
    Index off = 0;
    for (Index k = 0; k < q; ++k) off = off * Dn + 2 * idx[k];
    old_offset[flat] = off;
  }
  for (Index g = 0; g < n_gate; ++g) {
    Index off = 0;
    for (Index k = 0; k < q; ++k) off = off * Dn + ((g >> (q - 1 - k)) & 1U);
    gate_offset[g] = off;
  }

  std::vector<DenseTensor> out;
  for (Index s = 0; s < d; ++s) {
    DenseTensor a = DenseTensor::cube(q, Dn);
    for (Index sp = 0; sp < d; ++sp) {
      const DenseTensor& src = state.tensor(sp);
      const double* g = gate.data() + (sp * d + s) * n_gate;
      for (Index flat = 0; flat < src.size(); ++flat) {
        const double x = src[flat];
        if (x == 0.0) continue;
        for (Index k = 0; k < n_gate; ++k) {
          if (g[k] != 0.0) a[old_offset[flat] + gate_offset[k]] += x * g[k];
        }
      }
    }
    out.push_back(std::move(a));
  }
  return ITTNState(q, Dn, std::move(out));
}

TruncationResult truncate(const ITTNState& state, Index target_bond_dim,
                          const TruncateOptions& options) {
  const Index D = state.bond_dim();
  if (target_bond_dim < 1 || target_bond_dim > D) {
    throw InvalidArgument("cannot truncate bond dimension " + std::to_string(D) + " to " +
                          std::to_string(target_bond_dim));
  }
  Environment input_env = leading_environment(state, options.environment);

  const Matrix sym = 0.5 * (input_env.R + input_env.R.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const auto n = static_cast<Eigen::Index>(D);

  TruncationReport report;
  report.spectrum.resize(D);
  for (Eigen::Index i = 0; i < n; ++i) {
    report.spectrum[static_cast<Index>(i)] = std::max(0.0, es.eigenvalues()(n - 1 - i));
  }
  double total = 0.0;
  for (double w : report.spectrum) total += w;
  for (Index i = 0; i < target_bond_dim; ++i) report.kept_weight += report.spectrum[i];
  report.discarded_weight =
      total > 0.0 ? std::clamp((total - report.kept_weight) / total, 0.0, 1.0) : 0.0;
  if (target_bond_dim < D) {
    const double last_kept = report.spectrum[target_bond_dim - 1];
    const double first_cut = report.spectrum[target_bond_dim];
    report.degenerate_cut =
        last_kept > 0.0 && last_kept - first_cut <= options.degeneracy_tol * report.spectrum[0];
  }

  const auto kept = static_cast<Eigen::Index>(target_bond_dim);
  Matrix isometry(kept, n);
  for (Eigen::Index i = 0; i < kept; ++i) {
    isometry.row(i) = es.eigenvectors().col(n - 1 - i).transpose();
  }

  std::vector<DenseTensor> tensors;
  for (const auto& a : state.tensors()) {
    DenseTensor t = a;
    for (Index k = 0; k < state.q(); ++k) t = mode_mul_matrix(t, k, isometry);
    tensors.push_back(std::move(t));
  }
  ITTNState cut(state.q(), target_bond_dim, std::move(tensors));

  EnvironmentOptions cut_options = options.environment;
  Matrix projected = isometry * sym * isometry.transpose();
  if (projected.norm() > 0.0) {
    cut_options.seed = projected;
  } else {
    cut_options.seed.reset();
  }
  Environment env = leading_environment(cut, cut_options);

  // f is homogeneous of degree 2 in the tensors.
  const double factor = 1.0 / std::sqrt(env.lambda1);
  cut = cut.scaled(factor);
  env.lambda1 *= factor * factor;

  return TruncationResult{std::move(cut), std::move(report), std::move(input_env), std::move(env)};
}

Observables measure(const ITTNState& state, const Environment& env, double J, double h) {
  Observables o;
  o.m_x = expect_site(state, env, pauli::x());
  o.m_z = expect_site(state, env, pauli::z());
  o.bond_xx = expect_bond(state, env, pauli::x(), pauli::x());
  o.energy_per_site = -0.5 * static_cast<double>(state.q()) * J * o.bond_xx - h * o.m_z;
  return o;
}

std::size_t EvolveConfig::resolved_steps() const {
  if (steps) return *steps;
  return static_cast<std::size_t>(std::ceil(schedule_c * total_time * total_time - 1e-9));
}

EvolveResult evolve(const ITTNState& initial, const EvolveConfig& config,
                    const StepObserver& observer) {
  if (!(config.total_time > 0.0)) throw InvalidArgument("total imaginary time must be positive");
  if (config.bond_dim < 1) throw InvalidArgument("bond dimension must be at least 1");
  if (initial.bond_dim() > config.bond_dim) {
    throw InvalidArgument("initial state bond dimension exceeds the target bond dimension");
  }
  if (config.record_every == 0) throw InvalidArgument("record_every must be positive");
  if (!config.steps && !(config.schedule_c > 0.0)) {
    throw InvalidArgument("schedule constant must be positive");
  }
  const std::size_t n_steps = config.resolved_steps();
  if (n_steps == 0) throw InvalidArgument("number of Trotter steps must be at least 1");

  EvolveResult result{
      initial.bond_dim() < config.bond_dim
          ? embed_pad(initial, config.bond_dim, config.pad_noise, config.seed)
          : initial,
      {}, {}, 0, n_steps, config.total_time / static_cast<double>(n_steps), 0.0, false};

  const GateSet gates = build_gate_set(config.J, config.h, result.dt, initial.q());
  std::size_t step = 0;
  try {
    result.environment = leading_environment(result.state, config.environment);
    for (step = 1; step <= n_steps; ++step) {
      const ITTNState grown = apply_gate(result.state, gates);
      TruncateOptions options;
      options.environment = config.environment;
      options.environment.seed = doubled_seed(result.environment.R, gates);
      TruncationResult cut = truncate(grown, config.bond_dim, options);

      result.discarded_weight_max =
          std::max(result.discarded_weight_max, cut.report.discarded_weight);
      result.steps_used = step;

      const bool record = step % config.record_every == 0 || step == n_steps;
      if (record) {
        StepRecord rec;
        rec.step = step;
        rec.time = static_cast<double>(step) * result.dt;
        const Observables obs = measure(cut.state, cut.environment, config.J, config.h);
        rec.m_x = obs.m_x;
        rec.m_z = obs.m_z;
        rec.energy_per_site = obs.energy_per_site;
        if (config.track_correlation) {
          const auto cs = correlation_spectrum(cut.state, cut.environment);
          rec.lambda2_over_lambda1 = cs.lambda2;
          rec.xi = cs.xi;
        } else {
          rec.lambda2_over_lambda1 = kNaN;
          rec.xi = kNaN;
        }
        rec.discarded_weight = cut.report.discarded_weight;
        rec.degenerate_cut = cut.report.degenerate_cut;
        rec.environment_iterations = cut.input_environment.iterations;
        if (config.check_invariants) {
          rec.symmetry_defect = cut.state.symmetry_defect();
          rec.environment_min_ratio =
              std::min(min_ratio(cut.input_environment), min_ratio(cut.environment));
        } else {
          rec.symmetry_defect = kNaN;
          rec.environment_min_ratio = kNaN;
        }
        result.trajectory.push_back(rec);
      }

      result.state = std::move(cut.state);
      result.environment = std::move(cut.environment);

      if (record) {
        const StepRecord& now = result.trajectory.back();
        if (observer && !observer(now)) {
          result.stopped_early = step < n_steps;
          break;
        }
        if (config.early_stop && now.time >= config.window) {
          double deviation = 0.0;
          bool covered = false;
          for (auto it = result.trajectory.rbegin(); it != result.trajectory.rend(); ++it) {
            deviation = std::max({deviation, std::abs(it->m_x - now.m_x),
                                  std::abs(it->m_z - now.m_z),
                                  std::abs(it->energy_per_site - now.energy_per_site)});
            if (it->time <= now.time - config.window + 1e-12) {
              covered = true;
              break;
            }
          }
          if (covered && deviation < config.tol_obs) {
            result.stopped_early = step < n_steps;
            break;
          }
        }
      }
    }
  } catch (const EvolutionError&) {
    throw;
  } catch (const Error& e) {
    throw EvolutionError("step " + std::to_string(step) + ": " + e.what(), step,
                         std::move(result.trajectory));
  }
  return result;
}

}  // namespace bethe
