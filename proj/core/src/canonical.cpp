#include "bethe/canonical.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "bethe/environment.hpp"
#include "bethe/state.hpp"
#include "serialization.hpp"

namespace bethe {

void CanonicalState::validate() const {
  if (q < 2) throw InvalidArgument("coordination number must be at least 2");
  if (bond_dim < 1) throw InvalidArgument("bond dimension must be at least 1");
  if (gamma.size() != ITTNState::kPhysicalDim) {
    throw DimensionError("expected " + std::to_string(ITTNState::kPhysicalDim) + " Gamma tensors");
  }
  const std::vector<Index> expected(q, bond_dim);
  for (const auto& g : gamma) {
    if (g.dims() != expected) throw DimensionError("Gamma tensor has the wrong shape");
  }
  if (static_cast<Index>(lambda.size()) != bond_dim) {
    throw DimensionError("lambda has " + std::to_string(lambda.size()) + " entries, expected " +
                         std::to_string(bond_dim));
  }
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (!(lambda(i) >= 0.0)) throw InvalidArgument("Schmidt coefficients must be non-negative");
    if (i > 0 && lambda(i) > lambda(i - 1)) {
      throw InvalidArgument("Schmidt coefficients must be sorted in descending order");
    }
  }
}

CanonicalReport verify_canonical(const CanonicalState& cs, double tol) {
  cs.validate();
  CanonicalReport report;
  report.norm_defect = std::abs(cs.lambda.squaredNorm() - 1.0);

  // The contraction is the branch recursion evaluated at R = diag(lambda^2).
  const ITTNState as_state(cs.q, cs.bond_dim, cs.gamma);
  const Matrix weights = cs.lambda.cwiseAbs2().asDiagonal();
  const Matrix x = environment_map(as_state, weights);
  const auto n = static_cast<Eigen::Index>(cs.bond_dim);
  report.ortho_defect = (x - Matrix::Identity(n, n)).norm();
  report.pass = report.norm_defect < tol && report.ortho_defect < tol;
  return report;
}

void write_canonical(std::ostream& out, const CanonicalState& cs) {
  cs.validate();
  detail::write_header(out, "bethe-canonical",
                       {kStateFormatVersion, cs.q, cs.bond_dim, cs.gamma.size()});
  detail::write_tensors(out, cs.gamma);
  out << "lambda\n";
  detail::write_values(out, std::span<const double>(cs.lambda.data(),
                                                     static_cast<std::size_t>(cs.lambda.size())));
}

CanonicalState read_canonical(std::istream& in) {
  const auto header = detail::read_header(in, "bethe-canonical");
  CanonicalState cs;
  cs.q = header.q;
  cs.bond_dim = header.bond_dim;
  cs.gamma = detail::read_tensors(in, header);
  detail::expect_token(in, "lambda");
  const auto values = detail::read_values(in, header.bond_dim);
  cs.lambda = Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
  cs.validate();
  return cs;
}

CanonicalState load_canonical(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  return read_canonical(in);
}

void save_canonical(const std::filesystem::path& path, const CanonicalState& cs) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_canonical(out, cs);
}

}  // namespace bethe
