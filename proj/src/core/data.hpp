#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace rpnb {

// Dense labeled instances. Immutable after load; class indices are assigned
// by order of first appearance in the source.
struct Dataset {
  std::string name;
  Matrix X;                             // n x p
  std::vector<int> y;                   // n class indices in [0, num_classes)
  std::size_t num_classes = 0;          // M
  std::vector<std::string> label_names; // original label strings, index order

  std::size_t n() const { return X.rows; }
  std::size_t p() const { return X.cols; }
};

// CSV: comma-separated, UTF-8, optional single header row, last column is
// the label (arbitrary string), every other column a finite decimal real.
// Parse failures report the offending row and column.
Dataset load_csv(const std::string& path, bool has_header);

// load_csv with header detection: if any feature cell of the first row fails
// to parse as a number, that row is treated as a header.
Dataset load_csv_auto(const std::string& path);

// Writes the same CSV dialect (no header); reloading is a fixed point on
// (X, y). Floating-point cells use the shortest round-trip representation.
void save_csv(const Dataset& dataset, const std::string& path);

// Synthetic 3-component Gaussian mixture: 1000 observations in 1000
// dimensions, component sizes 334/333/333 emitted in order, coordinate
// means {+1/2, 0, -1/2} and standard deviations {1, 2, 3} per component.
Dataset generate_gm(std::uint64_t seed);

// Down-space dimension heuristic: p itself when p < 5, otherwise
// ceil(2*log2(p)) computed in exact integer arithmetic.
std::size_t down_dim(std::size_t p);

// Uniform random permutation of 0..n-1 via Fisher-Yates with an unbiased
// bounded sampler; deterministic in seed.
std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed);

}  // namespace rpnb
