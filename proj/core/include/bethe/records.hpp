#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bethe/tensor.hpp"

namespace bethe {

/// One point of a field sweep.
struct ResultRecord {
  double h = 0.0;
  Index D = 0;
  Index q = 0;
  double m_x = 0.0;
  double m_z = 0.0;
  double energy_per_site = 0.0;
  double lambda2_over_lambda1 = 0.0;
  double xi = 0.0;
  double discarded_weight_max = 0.0;
  std::size_t steps_used = 0;
  double wall_time_seconds = 0.0;

  bool failed = false;
  std::string error;  ///< set when failed; not part of the CSV row

  /// Throws InvalidArgument unless |m_x|, |m_z| <= 1 + 1e-9 and xi is not
  /// negative. xi may be NaN when the spectrum was not computed.
  void validate() const;
};

inline constexpr std::array<std::string_view, 11> kResultColumns = {
    "h",  "D",  "q", "m_x", "m_z", "energy_per_site", "lambda2_over_lambda1",
    "xi", "discarded_weight_max", "steps_used", "wall_time_seconds"};

/// Shortest decimal form that reads back to the same double ("%.17g").
std::string format_double(double x);

/// Header plus one row per record, comma separated, '.' decimal point.
/// Failed points are written with "nan" in every measured column.
void write_results_csv(std::ostream& out, std::span<const ResultRecord> records);
/// Parses a file produced by write_results_csv; rows with nan m_x come back
/// with failed = true.
std::vector<ResultRecord> read_results_csv(std::istream& in);

struct DerivativeRow {
  double h = 0.0;
  double energy = 0.0;
  double d_energy = 0.0;
  double d2_energy = 0.0;
};

void write_derivatives_csv(std::ostream& out, std::span<const DerivativeRow> rows);

}  // namespace bethe
