#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "bethe/records.hpp"

namespace bethe {

/// Midpoint between the largest h with |m_x| > threshold and the next grid
/// point. Failed records are skipped; records must be sorted by h.
/// Empty when no point is ordered, or when the last point still is.
std::optional<double> estimate_critical_field(std::span<const ResultRecord> records,
                                              double threshold);

/// Smallest number of grid points accepted by analyze_derivatives.
inline constexpr std::size_t kMinDerivativePoints = 5;

/// dE/dh and d^2E/dh^2 on a uniform grid: central differences in the
/// interior, second-order one-sided formulas at the two ends.
/// Throws InvalidArgument for fewer than kMinDerivativePoints points, unequal
/// lengths or a grid whose spacing varies by more than 1e-6 relative.
std::vector<DerivativeRow> analyze_derivatives(std::span<const double> h,
                                               std::span<const double> energy);

/// Smallest number of points accepted by fit_beta.
inline constexpr std::size_t kMinFitPoints = 4;

struct FitResult {
  double beta = 0.0;       ///< slope of ln m_x against ln(h_c - h)
  double amplitude = 0.0;  ///< m_x ~ amplitude (h_c - h)^beta
  double beta_stderr = 0.0;
  double rms_residual = 0.0;  ///< in ln m_x
  double h_c = 0.0;
  double h_lo = 0.0;
  double h_hi = 0.0;
  std::size_t points = 0;
  bool h_c_refined = false;
};

/// Least-squares power law through the points with h_lo <= h <= h_hi,
/// h < h_c and m_x > 0. Throws InvalidArgument with fewer than kMinFitPoints
/// usable points.
FitResult fit_beta(std::span<const double> h, std::span<const double> m_x, double h_c, double h_lo,
                   double h_hi);

/// fit_beta with h_c treated as a free parameter: h_c is scanned over
/// [h_c_guess - halfwidth, h_c_guess + halfwidth] (and above every h in the
/// window) and the value with the smallest rms residual is kept. The window
/// [h_lo, h_hi] stays fixed, so the points entering the fit do not move.
FitResult fit_beta_refined(std::span<const double> h, std::span<const double> m_x,
                           double h_c_guess, double h_lo, double h_hi, double halfwidth);

/// (f_coarse - f_mid) / (f_mid - f_fine) for three runs whose step sizes halve
/// successively; 4 for a method with O(dt^2) error.
double richardson_ratio(double coarse, double mid, double fine);

}  // namespace bethe
