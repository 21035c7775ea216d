#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "bethe/driver.hpp"

namespace bethe {
namespace {

RunConfig small_sweep() {
  RunConfig c;
  c.q = 3;
  c.D = 2;
  c.T_max = 4.0;
  c.h_min = 1.5;
  c.h_max = 3.5;
  c.h_steps = 5;
  c.record_timing = false;
  return c;
}

std::string csv_of(const SweepResult& s) {
  std::ostringstream out;
  write_results_csv(out, s.records);
  return out.str();
}

TEST(RunConfig, ValidationNamesTheField) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate(false));
  c.q = 1;
  EXPECT_THROW(c.validate(false), ConfigError);
  c = RunConfig{};
  c.J = -1.0;
  EXPECT_THROW(c.validate(false), ConfigError);
  c = RunConfig{};
  c.h = -0.1;
  EXPECT_THROW(c.validate(false), ConfigError);
  c = RunConfig{};
  EXPECT_THROW(c.validate(true), ConfigError);  // no grid
  c.h_min = 1.0;
  c.h_max = 2.0;
  c.h_steps = 11;
  EXPECT_NO_THROW(c.validate(true));
  const auto grid = c.h_grid();
  EXPECT_DOUBLE_EQ(grid.front(), 1.0);
  EXPECT_DOUBLE_EQ(grid.back(), 2.0);
  EXPECT_NEAR(grid[5], 1.5, 1e-15);
}

TEST(Sweep, IsDeterministicAndOrdered) {
  const RunConfig c = small_sweep();
  const SweepResult a = run_sweep(c);
  const SweepResult b = run_sweep(c);
  EXPECT_EQ(csv_of(a), csv_of(b));
  for (std::size_t i = 1; i < a.records.size(); ++i) EXPECT_LT(a.records[i - 1].h, a.records[i].h);
  EXPECT_EQ(a.failed, 0u);
  ASSERT_TRUE(a.h_c.has_value());
  EXPECT_GT(*a.h_c, 2.0);
  EXPECT_LT(*a.h_c, 3.5);

  RunConfig threaded = c;
  threaded.workers = 3;
  EXPECT_EQ(csv_of(run_sweep(threaded)), csv_of(a));
}

TEST(Sweep, WarmStartRunsInBothDirections) {
  RunConfig c = small_sweep();
  c.warm_start = true;
  std::vector<double> seen;
  const SweepResult up = run_sweep(c, [&](const ResultRecord& r) { seen.push_back(r.h); });
  EXPECT_LT(seen.front(), seen.back());
  c.direction = SweepDirection::Down;
  seen.clear();
  const SweepResult down = run_sweep(c, [&](const ResultRecord& r) { seen.push_back(r.h); });
  EXPECT_GT(seen.front(), seen.back());
  EXPECT_LT(down.records.front().h, down.records.back().h);
  EXPECT_EQ(up.records.size(), down.records.size());
}

TEST(Sweep, NumericalFailuresBecomeMarkerRows) {
  RunConfig c = small_sweep();
  c.env_max_iter = 1;
  c.env_tol = 1e-300;
  const SweepResult s = run_sweep(c);
  EXPECT_EQ(s.failed, s.records.size());
  EXPECT_FALSE(s.records[0].error.empty());
  EXPECT_NE(csv_of(s).find("nan"), std::string::npos);
}

TEST(Point, ZeroFieldIsExact) {
  RunConfig c;
  c.q = 3;
  c.D = 2;
  c.h = 0.0;
  c.T_max = 2.0;
  const PointOutcome p = run_point(c);
  ASSERT_FALSE(p.record.failed);
  EXPECT_NEAR(p.record.m_x, 1.0, 1e-12);
  EXPECT_NEAR(p.record.energy_per_site, -1.5, 1e-12);
  ASSERT_TRUE(p.state.has_value());
}

// q = 2 is the infinite chain, where m_x = (1 - h^2)^(1/8) for h < 1 and the
// critical energy per site is -4/pi (J = 1). Tolerances cover D = 4 and the
// O(dt) truncation bias of the schedule.
TEST(Point, ChainMatchesExactSolution) {
  RunConfig c;
  c.q = 2;
  c.D = 4;
  c.T_max = 8.0;
  c.record_timing = false;
  c.h = 0.5;
  const ResultRecord ordered = run_point(c).record;
  ASSERT_FALSE(ordered.failed);
  EXPECT_NEAR(std::abs(ordered.m_x), std::pow(1.0 - 0.25, 0.125), 2e-3);
  c.h = 1.0;
  const ResultRecord critical = run_point(c).record;
  ASSERT_FALSE(critical.failed);
  EXPECT_NEAR(critical.energy_per_site, -4.0 / std::numbers::pi, 1e-3);
}

TEST(TrotterStudy, RecordsEveryStep) {
  RunConfig c;
  c.q = 3;
  c.D = 2;
  c.h = 2.0;
  const std::vector<std::size_t> counts{8, 16};
  const auto curves = convergence_study(c, 1.0, counts);
  ASSERT_EQ(curves.size(), 2u);
  EXPECT_EQ(curves[0].trajectory.size(), 8u);
  EXPECT_EQ(curves[1].trajectory.size(), 16u);
  std::ostringstream out;
  write_trotter_csv(out, curves);
  EXPECT_EQ(out.str().substr(0, 15), "N,step,time,m_x");
  EXPECT_THROW(convergence_study(c, 0.0, counts), ConfigError);
}

TEST(Summary, CarriesEstimateConfigAndVersion) {
  const RunConfig c = small_sweep();
  const SweepResult s = run_sweep(c);
  const auto j = nlohmann::json::parse(sweep_summary_json(c, s, std::nullopt, "no fit"));
  EXPECT_EQ(j["software"]["version"], version());
  EXPECT_EQ(j["config"]["D"], 2);
  EXPECT_DOUBLE_EQ(j["h_c"].get<double>(), *s.h_c);
  EXPECT_EQ(j["points"].size(), 5u);
  EXPECT_TRUE(j["fit"].is_null());
  EXPECT_EQ(j["fit_error"], "no fit");
}

}  // namespace
}  // namespace bethe
