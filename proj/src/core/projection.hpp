#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace rpnb {

enum class ProjectionScheme { Bernoulli, Achlioptas, Gaussian };

const char* to_string(ProjectionScheme scheme);
ProjectionScheme projection_scheme_from_string(const std::string& name);

// A seeded p x q random matrix realizing one down-space. Entries are stored
// unscaled with zero mean and unit variance; the 1/sqrt(q) factor is applied
// exactly once, at projection time. Immutable after generation.
struct ProjectionMatrix {
  std::size_t p = 0;
  std::size_t q = 0;
  ProjectionScheme scheme = ProjectionScheme::Gaussian;
  std::uint64_t seed = 0;
  std::vector<double> entries;  // row-major p x q

  double entry(std::size_t i, std::size_t j) const { return entries[i * q + j]; }
};

// Entry distributions:
//   Bernoulli:  -1 or +1 with probability 1/2 each
//   Achlioptas: +sqrt(3), -sqrt(3) with probability 1/6 each, 0 otherwise
//   Gaussian:   standard normal
// Regenerating with the same (p, q, scheme, seed) yields identical entries.
ProjectionMatrix generate_matrix(std::size_t p, std::size_t q, ProjectionScheme scheme,
                                 std::uint64_t seed);

// z_j = (1/sqrt(q)) * sum_i x_i * r_ij, accumulated in ascending i.
void project_into(const ProjectionMatrix& matrix, std::span<const double> x,
                  std::span<double> out);
std::vector<double> project(const ProjectionMatrix& matrix, std::span<const double> x);

// Row i of the result is project(matrix, row i of X).
Matrix project_batch(const ProjectionMatrix& matrix, const Matrix& X);

}  // namespace rpnb
