#include "bethe/records.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bethe {

namespace {

double parse_double(const std::string& token) {
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (token == "inf") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InvalidArgument("cannot parse number '" + token + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void ResultRecord::validate() const {
  constexpr double kSlack = 1e-9;
  if (!(std::abs(m_x) <= 1.0 + kSlack) || !(std::abs(m_z) <= 1.0 + kSlack)) {
    throw InvalidArgument("magnetization outside [-1, 1] at h = " + format_double(h) +
                          " (m_x = " + format_double(m_x) + ", m_z = " + format_double(m_z) + ")");
  }
  if (xi < 0.0) {
    throw InvalidArgument("negative or undefined correlation length at h = " + format_double(h));
  }
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_results_csv(std::ostream& out, std::span<const ResultRecord> records) {
  for (std::size_t i = 0; i < kResultColumns.size(); ++i) {
    out << kResultColumns[i] << (i + 1 < kResultColumns.size() ? ',' : '\n');
  }
  for (const auto& r : records) {
    out << format_double(r.h) << ',' << r.D << ',' << r.q << ',';
    if (r.failed) {
      out << "nan,nan,nan,nan,nan,nan," << r.steps_used << ',' << format_double(r.wall_time_seconds)
          << '\n';
      continue;
    }
    out << format_double(r.m_x) << ',' << format_double(r.m_z) << ','
        << format_double(r.energy_per_site) << ',' << format_double(r.lambda2_over_lambda1) << ','
        << format_double(r.xi) << ',' << format_double(r.discarded_weight_max) << ','
        << r.steps_used << ',' << format_double(r.wall_time_seconds) << '\n';
  }
}

std::vector<ResultRecord> read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("empty results file");
  const auto header = split(line);
  if (header.size() != kResultColumns.size()) throw InvalidArgument("unexpected CSV header");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kResultColumns[i]) {
      throw InvalidArgument("unexpected CSV column '" + header[i] + "'");
    }
  }
  std::vector<ResultRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != kResultColumns.size()) {
      throw InvalidArgument("malformed CSV row: " + line);
    }
    ResultRecord r;
    r.h = parse_double(cells[0]);
    r.D = static_cast<Index>(std::stoull(cells[1]));
    r.q = static_cast<Index>(std::stoull(cells[2]));
    r.m_x = parse_double(cells[3]);
    r.m_z = parse_double(cells[4]);
    r.energy_per_site = parse_double(cells[5]);
    r.lambda2_over_lambda1 = parse_double(cells[6]);
    r.xi = parse_double(cells[7]);
    r.discarded_weight_max = parse_double(cells[8]);
    r.steps_used = static_cast<std::size_t>(std::stoull(cells[9]));
    r.wall_time_seconds = parse_double(cells[10]);
    r.failed = std::isnan(r.m_x);
    records.push_back(r);
  }
  return records;
}

void write_derivatives_csv(std::ostream& out, std::span<const DerivativeRow> rows) {
  out << "h,energy_per_site,d_energy_dh,d2_energy_dh2\n";
  for (const auto& r : rows) {
    out << format_double(r.h) << ',' << format_double(r.energy) << ',' << format_double(r.d_energy)
        << ',' << format_double(r.d2_energy) << '\n';
  }
}

}  // namespace bethe
