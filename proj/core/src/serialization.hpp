#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bethe/tensor.hpp"

namespace bethe::detail {

struct SnapshotHeader {
  int version = 0;
  Index q = 0;
  Index bond_dim = 0;
  Index phys_dim = 0;
};

void write_header(std::ostream& out, const std::string& magic, const SnapshotHeader& header);
SnapshotHeader read_header(std::istream& in, const std::string& magic);

void write_values(std::ostream& out, std::span<const double> values);
std::vector<double> read_values(std::istream& in, Index count);

void write_tensors(std::ostream& out, std::span<const DenseTensor> tensors);
std::vector<DenseTensor> read_tensors(std::istream& in, const SnapshotHeader& header);

void expect_token(std::istream& in, const std::string& token);

}  // namespace bethe::detail
