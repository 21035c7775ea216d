#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "bethe/analysis.hpp"
#include "bethe/records.hpp"
#include "support/generators.hpp"

namespace bethe {
namespace {

std::vector<double> grid(double lo, double step, std::size_t n) {
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = lo + step * static_cast<double>(i);
  return h;
}

TEST(Derivatives, ExactOnCubics) {
  const auto h = grid(1.0, 0.1, 9);
  std::vector<double> e;
  for (double x : h) e.push_back(2.0 * x * x * x - x * x + 3.0);
  const auto rows = analyze_derivatives(h, e);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double x = h[i];
    // Truncation errors of the stencils for f''' = 12: dh^2 f'''/6 in the
    // interior and dh^2 f'''/3 at the ends; the second derivative is exact.
    const bool end = i == 0 || i + 1 == rows.size();
    EXPECT_NEAR(rows[i].d_energy, 6.0 * x * x - 2.0 * x, (end ? 0.04 : 0.02) + 1e-9) << i;
    EXPECT_NEAR(rows[i].d2_energy, 12.0 * x - 2.0, 1e-9) << i;
  }
  std::vector<double> quad;
  for (double x : h) quad.push_back(x * x);
  for (const auto& r : analyze_derivatives(h, quad)) {
    EXPECT_NEAR(r.d_energy, 2.0 * r.h, 1e-10);
    EXPECT_NEAR(r.d2_energy, 2.0, 1e-9);
  }
}

TEST(Derivatives, RejectsShortOrIrregularGrids) {
  EXPECT_THROW(analyze_derivatives(grid(0, 1, 4), std::vector<double>(4)), InvalidArgument);
  auto h = grid(0, 1, 6);
  h[3] += 0.1;
  EXPECT_THROW(analyze_derivatives(h, std::vector<double>(6)), InvalidArgument);
  EXPECT_THROW(analyze_derivatives(grid(0, 1, 6), std::vector<double>(5)), InvalidArgument);
}

TEST(FitBeta, RecoversSyntheticExponent) {
  for (std::uint64_t c = 0; c < 10; ++c) {
    testing::Generator g(800 + c);
    const double beta = g.uniform(0.2, 0.8), amp = g.uniform(0.5, 2.0), hc = g.uniform(2.0, 4.0);
    const auto h = grid(hc - 0.3, 0.01, 40);
    std::vector<double> m;
    for (double x : h) m.push_back(x < hc ? amp * std::pow(hc - x, beta) : 0.0);
    const FitResult f = fit_beta(h, m, hc, hc - 0.15, hc - 0.01);
    EXPECT_NEAR(f.beta, beta, 1e-10);
    EXPECT_NEAR(f.amplitude, amp, 1e-9);
    EXPECT_LT(f.rms_residual, 1e-10);
    EXPECT_GE(f.points, 14u);

    const FitResult r = fit_beta_refined(h, m, hc + 0.004, hc + 0.004 - 0.15, hc + 0.004 - 0.01, 0.01);
    EXPECT_TRUE(r.h_c_refined);
    EXPECT_NEAR(r.h_c, hc, 2e-5);
    EXPECT_NEAR(r.beta, beta, 2e-3);
  }
}

TEST(FitBeta, NeedsEnoughPoints) {
  const auto h = grid(1.0, 0.1, 3);
  EXPECT_THROW(fit_beta(h, {{0.3, 0.2, 0.1}}, 1.5, 0.0, 2.0), InvalidArgument);
}

TEST(CriticalField, MidpointOfTheThresholdCrossing) {
  std::vector<ResultRecord> rs(5);
  const double mx[] = {0.5, 0.3, 0.02, 0.001, 0.0};
  for (std::size_t i = 0; i < rs.size(); ++i) {
    rs[i].h = 1.0 + 0.1 * static_cast<double>(i);
    rs[i].m_x = mx[i];
  }
  EXPECT_NEAR(*estimate_critical_field(rs, 1e-2), 1.25, 1e-15);
  rs[3].failed = true;  // skipped, so the crossing moves to the next valid point
  EXPECT_NEAR(*estimate_critical_field(rs, 1e-2), 1.3, 1e-15);
  EXPECT_FALSE(estimate_critical_field(rs, 1.0).has_value());  // never ordered
  rs[4].m_x = 1e-6;
  EXPECT_FALSE(estimate_critical_field(rs, 1e-9).has_value());  // never disordered
}

TEST(Richardson, SecondOrderGivesFour) {
  auto f = [](double dt) { return 1.0 + 0.3 * dt * dt; };
  EXPECT_NEAR(richardson_ratio(f(0.4), f(0.2), f(0.1)), 4.0, 1e-12);
  EXPECT_THROW(richardson_ratio(1.0, 2.0, 2.0), InvalidArgument);
}

TEST(Records, FormatDoubleRoundTrips) {
  testing::Generator g(1);
  for (int i = 0; i < 2000; ++i) {
    const double x = g.uniform(-1.0, 1.0) * std::pow(10.0, g.uniform(-300.0, 300.0));
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(Records, CsvRoundTripAndFailedRows) {
  std::vector<ResultRecord> rs(2);
  rs[0] = {2.0, 8, 3, 0.5, 0.7, -2.2, 0.4, 1.1, 1e-9, 120, 0.25, false, {}};
  rs[1].h = 2.1;
  rs[1].D = 8;
  rs[1].q = 3;
  rs[1].failed = true;
  std::stringstream ss;
  write_results_csv(ss, rs);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "h,D,q,m_x,m_z,energy_per_site,lambda2_over_lambda1,xi,discarded_weight_max,"
            "steps_used,wall_time_seconds");
  const auto back = read_results_csv(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].m_x, 0.5);
  EXPECT_EQ(back[0].steps_used, 120u);
  EXPECT_FALSE(back[0].failed);
  EXPECT_TRUE(back[1].failed);

  std::stringstream bad("h,D\n1,2\n");
  EXPECT_THROW(read_results_csv(bad), InvalidArgument);
}

TEST(Records, ValidateCatchesUnphysicalValues) {
  ResultRecord r;
  r.m_x = 1.2;
  EXPECT_THROW(r.validate(), InvalidArgument);
  r.m_x = 0.3;
  r.xi = -1.0;
  EXPECT_THROW(r.validate(), InvalidArgument);
  r.xi = std::numeric_limits<double>::quiet_NaN();
  EXPECT_NO_THROW(r.validate());
}

}  // namespace
}  // namespace bethe
