#include "bethe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace bethe {

std::optional<double> estimate_critical_field(std::span<const ResultRecord> records,
                                              double threshold) {
  std::vector<const ResultRecord*> ok;
  for (const auto& r : records) {
    if (!r.failed) ok.push_back(&r);
  }
  for (std::size_t i = 1; i < ok.size(); ++i) {
    if (!(ok[i]->h > ok[i - 1]->h)) throw InvalidArgument("records are not sorted by h");
  }
  std::optional<std::size_t> last;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (std::abs(ok[i]->m_x) > threshold) last = i;
  }
  if (!last || *last + 1 >= ok.size()) return std::nullopt;
  return 0.5 * (ok[*last]->h + ok[*last + 1]->h);
}

std::vector<DerivativeRow> analyze_derivatives(std::span<const double> h,
                                               std::span<const double> energy) {
  if (h.size() != energy.size()) throw InvalidArgument("h and energy have different lengths");
  const std::size_t n = h.size();
  if (n < kMinDerivativePoints) {
    throw InvalidArgument("derivatives need at least " + std::to_string(kMinDerivativePoints) +
                          " points, got " + std::to_string(n));
  }
  const double dh = (h[n - 1] - h[0]) / static_cast<double>(n - 1);
  if (!(dh > 0.0)) throw InvalidArgument("h grid must be increasing");
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs((h[i] - h[i - 1]) - dh) > 1e-6 * dh) {
      throw InvalidArgument("h grid is not uniform");
    }
  }
  const auto& E = energy;
  std::vector<DerivativeRow> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i].h = h[i];
    rows[i].energy = E[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    rows[i].d_energy = (E[i + 1] - E[i - 1]) / (2.0 * dh);
    rows[i].d2_energy = (E[i + 1] - 2.0 * E[i] + E[i - 1]) / (dh * dh);
  }
  rows[0].d_energy = (-3.0 * E[0] + 4.0 * E[1] - E[2]) / (2.0 * dh);
  rows[0].d2_energy = (2.0 * E[0] - 5.0 * E[1] + 4.0 * E[2] - E[3]) / (dh * dh);
  const std::size_t m = n - 1;
  rows[m].d_energy = (3.0 * E[m] - 4.0 * E[m - 1] + E[m - 2]) / (2.0 * dh);
  rows[m].d2_energy = (2.0 * E[m] - 5.0 * E[m - 1] + 4.0 * E[m - 2] - E[m - 3]) / (dh * dh);
  return rows;
}

FitResult fit_beta(std::span<const double> h, std::span<const double> m_x, double h_c, double h_lo,
                   double h_hi) {
  if (h.size() != m_x.size()) throw InvalidArgument("h and m_x have different lengths");
  constexpr double kEdge = 1e-9;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (h[i] < h_lo - kEdge || h[i] > h_hi + kEdge || !(h[i] < h_c) || !(m_x[i] > 0.0)) continue;
    xs.push_back(std::log(h_c - h[i]));
    ys.push_back(std::log(m_x[i]));
  }
  const std::size_t n = xs.size();
  if (n < kMinFitPoints) {
    throw InvalidArgument("fit window holds " + std::to_string(n) + " usable points, need " +
                          std::to_string(kMinFitPoints));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit window has no spread in h");

  FitResult fit;
  fit.beta = sxy / sxx;
  const double intercept = my - fit.beta * mx;
  fit.amplitude = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ys[i] - (intercept + fit.beta * xs[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
  fit.beta_stderr = n > 2 ? std::sqrt(ss / static_cast<double>(n - 2) / sxx) : 0.0;
  fit.h_c = h_c;
  fit.h_lo = h_lo;
  fit.h_hi = h_hi;
  fit.points = n;
  return fit;
}

FitResult fit_beta_refined(std::span<const double> h, std::span<const double> m_x,
                           double h_c_guess, double h_lo, double h_hi, double halfwidth) {
  if (!(halfwidth > 0.0)) throw InvalidArgument("h_c search halfwidth must be positive");
  constexpr double kEdge = 1e-9;
  double h_top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < h.size() && i < m_x.size(); ++i) {
    if (h[i] >= h_lo - kEdge && h[i] <= h_hi + kEdge && m_x[i] > 0.0) h_top = std::max(h_top, h[i]);
  }
  const double lo = std::max(h_c_guess - halfwidth, h_top + 1e-6 * halfwidth);
  const double hi = h_c_guess + halfwidth;
  if (!(hi > lo)) throw InvalidArgument("h_c search interval is empty");

  constexpr int kScan = 2000;
  std::optional<FitResult> best;
  for (int k = 0; k <= kScan; ++k) {
    const double hc = lo + (hi - lo) * static_cast<double>(k) / kScan;
    FitResult f = fit_beta(h, m_x, hc, h_lo, h_hi);
    if (!best || f.rms_residual < best->rms_residual) best = f;
  }
  best->h_c_refined = true;
  return *best;
}

double richardson_ratio(double coarse, double mid, double fine) {
  const double denom = mid - fine;
  if (denom == 0.0) throw InvalidArgument("Richardson ratio undefined: identical mid and fine values");
  return (coarse - mid) / denom;
}

}  // namespace bethe
