// bethe: command-line front end for the tree tensor network engine.
//
// Run parameters are shared by every subcommand and may come from a
// key = value file given with --config; flags on the command line win.
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure,
// 3 sweep finished with some failed points.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bethe/analysis.hpp"
#include "bethe/canonical.hpp"
#include "bethe/driver.hpp"
#include "bethe/environment.hpp"
#include "bethe/gates.hpp"
#include "bethe/oracle.hpp"
#include "bethe/state.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitPartial = 3;

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw bethe::ConfigError("cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw bethe::ConfigError("cannot open '" + path + "'");
  return in;
}

void print_progress(const bethe::ResultRecord& r) {
  if (r.failed) {
    std::fprintf(stderr, "h = %-10.6g FAILED: %s\n", r.h, r.error.c_str());
  } else {
    std::fprintf(stderr, "h = %-10.6g m_x = %-12.6g E = %-14.10g steps = %zu\n", r.h, r.m_x,
                 r.energy_per_site, r.steps_used);
  }
}

void add_run_options(CLI::App& app, bethe::RunConfig& c, std::string& direction) {
  app.add_option("--q", c.q, "Coordination number of the tree")->capture_default_str();
  app.add_option("--J", c.J, "Ising coupling (positive)")->capture_default_str();
  app.add_option("--h", c.h, "Transverse field for a single point")->capture_default_str();
  app.add_option("--h-min", c.h_min, "Sweep: smallest field")->capture_default_str();
  app.add_option("--h-max", c.h_max, "Sweep: largest field")->capture_default_str();
  app.add_option("--h-steps", c.h_steps, "Sweep: number of grid points")->capture_default_str();
  app.add_option("--D", c.D, "Bond dimension")->capture_default_str();
  app.add_option("--T", c.T_max, "Total imaginary time")->capture_default_str();
  app.add_option("--steps", c.steps, "Trotter steps (default ceil(c T^2))");
  app.add_option("--schedule-c", c.schedule_c, "Constant c in N = ceil(c T^2)")
      ->capture_default_str();
  app.add_option("--tol-obs", c.tol_obs, "Early-stop tolerance on m_x, m_z, E")
      ->capture_default_str();
  app.add_option("--window", c.window, "Early-stop window in imaginary time")
      ->capture_default_str();
  app.add_flag("!--no-early-stop", c.early_stop, "Always run all Trotter steps");
  app.add_option("--record-every", c.record_every, "Measure every n-th step")
      ->capture_default_str();
  app.add_option("--env-tol", c.env_tol, "Environment fixed-point tolerance")
      ->capture_default_str();
  app.add_option("--env-max-iter", c.env_max_iter, "Environment iteration cap")
      ->capture_default_str();
  app.add_option("--anderson", c.anderson_depth, "Anderson mixing depth, 0 = power method")
      ->capture_default_str();
  app.add_option("--theta", c.theta, "Initial product-state angle from +z")
      ->capture_default_str();
  app.add_option("--pad-noise", c.pad_noise, "Noise on padded bond entries")
      ->capture_default_str();
  app.add_option("--seed", c.seed, "Random seed for padding noise")->capture_default_str();
  app.add_flag("--warm-start", c.warm_start, "Sweep: start from the previous point's state");
  app.add_option("--direction", direction, "Sweep direction for warm starts")
      ->check(CLI::IsMember({"up", "down"}))
      ->capture_default_str();
  app.add_option("--mx-threshold", c.mx_threshold, "m_x threshold for the h_c estimate")
      ->capture_default_str();
  app.add_option("--workers", c.workers, "Worker threads for cold-start sweeps")
      ->capture_default_str();
  app.add_flag("!--no-timing", c.record_timing, "Write 0 to wall_time_seconds");
}

struct FitWindow {
  double lo = 0.15;      ///< window starts at h_c - lo
  double hi = 0.01;      ///< window ends at h_c - hi
  double refine = 0.0;   ///< h_c search halfwidth, 0 keeps the estimate
};

bethe::FitResult fit_window(std::span<const double> h, std::span<const double> m, double h_c,
                            const FitWindow& w) {
  if (w.refine > 0.0) return bethe::fit_beta_refined(h, m, h_c, h_c - w.lo, h_c - w.hi, w.refine);
  return bethe::fit_beta(h, m, h_c, h_c - w.lo, h_c - w.hi);
}

void add_fit_options(CLI::App& cmd, FitWindow& w) {
  cmd.add_option("--fit-lo", w.lo, "Fit window starts at h_c - fit_lo")->capture_default_str();
  cmd.add_option("--fit-hi", w.hi, "Fit window ends at h_c - fit_hi")->capture_default_str();
  cmd.add_option("--refine-h-c", w.refine,
                 "Treat h_c as free within +- this halfwidth (0 = keep the estimate)")
      ->capture_default_str();
}

int cmd_point(const bethe::RunConfig& c, const std::string& out_path,
              const std::string& trajectory_path, const std::string& state_path) {
  const bethe::PointOutcome point = bethe::run_point(c);
  Output out(out_path);
  bethe::write_results_csv(out.stream(), std::span(&point.record, 1));
  if (!trajectory_path.empty()) {
    Output traj(trajectory_path);
    traj.stream() << "step,time,m_x,m_z,energy_per_site,discarded_weight\n";
    for (const auto& s : point.trajectory) {
      traj.stream() << s.step << ',' << bethe::format_double(s.time) << ','
                    << bethe::format_double(s.m_x) << ',' << bethe::format_double(s.m_z) << ','
                    << bethe::format_double(s.energy_per_site) << ','
                    << bethe::format_double(s.discarded_weight) << '\n';
    }
  }
  if (point.record.failed) {
    std::cerr << "numerical failure: " << point.record.error << '\n';
    return kExitNumerical;
  }
  if (!state_path.empty()) bethe::save_state(state_path, *point.state);
  return kExitOk;
}

int cmd_sweep(const bethe::RunConfig& c, const std::string& out_path,
              const std::string& summary_path, const FitWindow& window) {
  const bethe::SweepResult sweep = bethe::run_sweep(c, print_progress);
  {
    Output out(out_path);
    bethe::write_results_csv(out.stream(), sweep.records);
  }
  std::optional<bethe::FitResult> fit;
  std::string fit_error;
  if (sweep.h_c) {
    std::vector<double> h, m;
    for (const auto& r : sweep.records) {
      if (r.failed) continue;
      h.push_back(r.h);
      m.push_back(std::abs(r.m_x));
    }
    try {
      fit = fit_window(h, m, *sweep.h_c, window);
    } catch (const bethe::Error& e) {
      fit_error = e.what();
    }
  } else {
    fit_error = "no m_x threshold crossing inside the sweep";
  }
  const std::string summary = bethe::sweep_summary_json(c, sweep, fit, fit_error);
  if (!summary_path.empty()) {
    Output out(summary_path);
    out.stream() << summary << '\n';
  } else {
    std::cerr << summary << '\n';
  }
  if (sweep.failed == sweep.records.size()) return kExitNumerical;
  return sweep.failed > 0 ? kExitPartial : kExitOk;
}

int cmd_derivatives(const std::string& in_path, const std::string& out_path) {
  auto in = open_input(in_path);
  const auto records = bethe::read_results_csv(in);
  std::vector<double> h, e;
  for (const auto& r : records) {
    if (r.failed) throw bethe::ConfigError("input contains failed points; derivatives need a complete grid");
    h.push_back(r.h);
    e.push_back(r.energy_per_site);
  }
  const auto rows = bethe::analyze_derivatives(h, e);
  Output out(out_path);
  bethe::write_derivatives_csv(out.stream(), rows);
  return kExitOk;
}

int cmd_fit_beta(const std::string& in_path, std::optional<double> h_c, double threshold,
                 const FitWindow& window) {
  auto in = open_input(in_path);
  const auto records = bethe::read_results_csv(in);
  if (!h_c) h_c = bethe::estimate_critical_field(records, threshold);
  if (!h_c) throw bethe::ConfigError("no m_x threshold crossing in the input; pass --h-c");
  std::vector<double> h, m;
  for (const auto& r : records) {
    if (r.failed) continue;
    h.push_back(r.h);
    m.push_back(std::abs(r.m_x));
  }
  const auto fit = fit_window(h, m, *h_c, window);
  std::cout << bethe::fit_json(fit) << '\n';
  return kExitOk;
}

int cmd_trotter(const bethe::RunConfig& c, const std::vector<std::size_t>& counts,
                const std::string& out_path) {
  const auto curves = bethe::convergence_study(c, c.T_max, counts);
  Output out(out_path);
  bethe::write_trotter_csv(out.stream(), curves);
  for (const auto& curve : curves) {
    std::fprintf(stderr, "N = %-6zu dt = %-10.6g m_x(T) = %.17g\n", curve.steps, curve.dt,
                 curve.final_m_x);
  }
  for (std::size_t i = 0; i + 2 < curves.size(); ++i) {
    std::fprintf(stderr, "richardson ratio (N = %zu, %zu, %zu): %.6g\n", curves[i].steps,
                 curves[i + 1].steps, curves[i + 2].steps,
                 bethe::richardson_ratio(curves[i].final_m_x, curves[i + 1].final_m_x,
                                         curves[i + 2].final_m_x));
  }
  return kExitOk;
}

int cmd_verify_canonical(const std::string& in_path, double tol) {
  const bethe::CanonicalState cs = bethe::load_canonical(in_path);
  const bethe::CanonicalReport rep = bethe::verify_canonical(cs, tol);
  std::printf("{\n  \"norm_defect\": %.17g,\n  \"ortho_defect\": %.17g,\n  \"pass\": %s\n}\n",
              rep.norm_defect, rep.ortho_defect, rep.pass ? "true" : "false");
  return rep.pass ? kExitOk : kExitNumerical;
}

int cmd_selftest() {
  bool all = true;
  auto line = [&](const char* name, double value, double tol) {
    const bool ok = value < tol;
    all = all && ok;
    std::printf("%-4s %-44s %.3e (tol %.0e)\n", ok ? "PASS" : "FAIL", name, value, tol);
  };

  double mpo = 0.0;
  const double cases[3][3] = {{1.0, 0.0, 0.1}, {1.0, 2.0, 0.05}, {1.0, 3.0, 0.02}};
  for (bethe::Index n = 2; n <= 4; ++n) {
    for (const auto& c : cases) mpo = std::max(mpo, bethe::mpo_oracle_check(c[0], c[1], c[2], n));
  }
  line("MPO vs dense propagator", mpo, 1e-12);

  double rank2 = 0.0;
  for (bethe::Index q = 2; q <= 4; ++q) {
    const auto g = bethe::build_gate_set(1.0, 1.3, 0.07, q);
    rank2 = std::max(rank2, bethe::max_abs_difference(g.Q, bethe::rank_two_transfer_tensor(g)));
  }
  line("rank-two transfer identity", rank2, 1e-14);

  double env_err = 0.0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto s = bethe::random_symmetric_state(3, 2, seed);
    bethe::EnvironmentOptions tight;
    tight.tol = 1e-14;
    const auto env = bethe::leading_environment(s, tight);
    const auto dense = bethe::oracle::dense_leading_environment(s, 1e-14, 100000);
    env_err = std::max(env_err, std::abs(bethe::expect_site(s, env, bethe::pauli::x()) -
                                         bethe::oracle::dense_expect_site(s, dense, bethe::pauli::x())));
  }
  line("staged vs dense environment <sx>", env_err, 1e-12);

  bethe::RunConfig c;
  c.q = 3;
  c.D = 1;
  c.h = 0.0;
  c.T_max = 2.0;
  const auto point = bethe::run_point(c);
  line("q=3, h=0 energy per site vs -3/2",
       point.record.failed ? 1.0 : std::abs(point.record.energy_per_site + 1.5), 1e-10);

  return all ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Imaginary-time evolution of the transverse-field Ising model on the Bethe lattice"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(bethe::version()));
  app.set_config("--config", "", "key = value configuration file (flags take precedence)");
  app.require_subcommand(1);
  app.fallthrough();

  bethe::RunConfig config;
  std::string direction = "up";
  add_run_options(app, config, direction);

  std::string out_path, in_path, summary_path, trajectory_path, state_path;
  FitWindow window;
  double canonical_tol = 1e-12;
  std::optional<double> h_c;
  std::vector<std::size_t> counts{72, 144, 288};

  auto* point = app.add_subcommand("point", "Evolve at a single field and print one CSV row");
  point->add_option("--out", out_path, "CSV output (default stdout)");
  point->add_option("--trajectory", trajectory_path, "Per-step observables CSV");
  point->add_option("--state-out", state_path, "Write the final state snapshot");

  auto* sweep = app.add_subcommand("sweep", "Evolve on a grid of fields");
  sweep->add_option("--out", out_path, "CSV output (default stdout)");
  sweep->add_option("--summary", summary_path, "JSON summary (default stderr)");
  add_fit_options(*sweep, window);

  auto* deriv = app.add_subcommand("derivatives", "dE/dh and d2E/dh2 of a sweep CSV");
  deriv->add_option("--in", in_path, "Sweep CSV")->required();
  deriv->add_option("--out", out_path, "CSV output (default stdout)");

  auto* fit = app.add_subcommand("fit-beta", "Fit m_x ~ (h_c - h)^beta to a sweep CSV");
  fit->add_option("--in", in_path, "Sweep CSV")->required();
  fit->add_option("--h-c", h_c, "Critical field (default: estimated from the CSV)");
  add_fit_options(*fit, window);

  auto* trotter = app.add_subcommand("trotter-study", "m_x(T) for several Trotter step counts");
  trotter->add_option("--N", counts, "Step counts, comma separated")->delimiter(',');
  trotter->add_option("--out", out_path, "Long-format CSV output (default stdout)");

  auto* canon = app.add_subcommand("verify-canonical", "Check a Gamma/lambda snapshot");
  canon->add_option("--in", in_path, "Canonical snapshot")->required();
  canon->add_option("--tol", canonical_tol, "Tolerance")->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Compare kernels with brute-force oracles");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  config.direction = direction == "down" ? bethe::SweepDirection::Down : bethe::SweepDirection::Up;

  try {
    if (point->parsed()) return cmd_point(config, out_path, trajectory_path, state_path);
    if (sweep->parsed()) return cmd_sweep(config, out_path, summary_path, window);
    if (deriv->parsed()) return cmd_derivatives(in_path, out_path);
    if (fit->parsed()) return cmd_fit_beta(in_path, h_c, config.mx_threshold, window);
    if (trotter->parsed()) {
      config.validate(false);
      return cmd_trotter(config, counts, out_path);
    }
    if (canon->parsed()) return cmd_verify_canonical(in_path, canonical_tol);
    if (selftest->parsed()) return cmd_selftest();
  } catch (const bethe::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bethe::InvalidArgument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const bethe::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
