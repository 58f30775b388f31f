#include "core/projection.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace rpnb {

const char* to_string(ProjectionScheme scheme) {
  switch (scheme) {
    case ProjectionScheme::Bernoulli:
      return "bernoulli";
    case ProjectionScheme::Achlioptas:
      return "achlioptas";
    case ProjectionScheme::Gaussian:
      return "gaussian";
  }
  return "unknown";
}

ProjectionScheme projection_scheme_from_string(const std::string& name) {
  if (name == "bernoulli") return ProjectionScheme::Bernoulli;
  if (name == "achlioptas") return ProjectionScheme::Achlioptas;
  if (name == "gaussian") return ProjectionScheme::Gaussian;
  fail(Status::InvalidArgument, "unknown projection scheme: '" + name + "'");
}

ProjectionMatrix generate_matrix(std::size_t p, std::size_t q, ProjectionScheme scheme,
                                 std::uint64_t seed) {
  if (p == 0 || q == 0) fail(Status::InvalidArgument, "projection dimensions must be positive");

  ProjectionMatrix matrix;
  matrix.p = p;
  matrix.q = q;
  matrix.scheme = scheme;
  matrix.seed = seed;
  matrix.entries.resize(p * q);

  Rng rng(seed);
  switch (scheme) {
    case ProjectionScheme::Bernoulli:
      for (double& e : matrix.entries) e = rng.uniform01() < 0.5 ? -1.0 : 1.0;
      break;
    case ProjectionScheme::Achlioptas: {
      const double root3 = std::sqrt(3.0);
      for (double& e : matrix.entries) {
        const double u = rng.uniform01();
        e = u < 1.0 / 6.0 ? root3 : (u < 1.0 / 3.0 ? -root3 : 0.0);
      }
      break;
    }
    case ProjectionScheme::Gaussian:
      for (double& e : matrix.entries) e = rng.normal();
      break;
  }
  return matrix;
}

void project_into(const ProjectionMatrix& matrix, std::span<const double> x,
                  std::span<double> out) {
  if (x.size() != matrix.p)
    fail(Status::DimensionMismatch, "project: vector length " + std::to_string(x.size()) +
                                        " does not match up-space dimension " +
                                        std::to_string(matrix.p));
  if (out.size() != matrix.q)
    fail(Status::DimensionMismatch, "project: output length does not match down-space dimension");

  std::fill(out.begin(), out.end(), 0.0);
  const double* entries = matrix.entries.data();
  for (std::size_t i = 0; i < matrix.p; ++i) {
    const double xi = x[i];
    const double* row = entries + i * matrix.q;
    for (std::size_t j = 0; j < matrix.q; ++j) out[j] += xi * row[j];
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(matrix.q));
  for (std::size_t j = 0; j < matrix.q; ++j) out[j] *= scale;
}

std::vector<double> project(const ProjectionMatrix& matrix, std::span<const double> x) {
  std::vector<double> z(matrix.q);
  project_into(matrix, x, z);
  return z;
}

Matrix project_batch(const ProjectionMatrix& matrix, const Matrix& X) {
  if (X.cols != matrix.p)
    fail(Status::DimensionMismatch, "project_batch: column count " + std::to_string(X.cols) +
                                        " does not match up-space dimension " +
                                        std::to_string(matrix.p));
  Matrix Z(X.rows, matrix.q);
  for (std::size_t r = 0; r < X.rows; ++r) project_into(matrix, X.row(r), Z.row(r));
  return Z;
}

}  // namespace rpnb
