#include "core/gnb.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace rpnb {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

const char* to_string(PriorMode mode) {
  return mode == PriorMode::Uniform ? "uniform" : "empirical";
}

PriorMode prior_mode_from_string(const std::string& name) {
  if (name == "uniform") return PriorMode::Uniform;
  if (name == "empirical") return PriorMode::Empirical;
  fail(Status::InvalidArgument, "unknown prior mode: '" + name + "'");
}

GnbModel init_gnb(std::size_t num_classes, std::size_t dim, double mu0, double sigma2_0,
                  PriorMode prior_mode, double variance_floor) {
  if (num_classes < 2) fail(Status::InvalidArgument, "a classifier needs at least two classes");
  if (dim == 0) fail(Status::InvalidArgument, "feature dimension must be positive");
  if (!(sigma2_0 > 0.0) || !std::isfinite(sigma2_0))
    fail(Status::InvalidArgument, "initial variance must be positive and finite");
  if (!std::isfinite(mu0)) fail(Status::InvalidArgument, "initial mean must be finite");
  if (!(variance_floor > 0.0) || !std::isfinite(variance_floor))
    fail(Status::InvalidArgument, "variance floor must be positive and finite");

  GnbModel model;
  model.num_classes = num_classes;
  model.dim = dim;
  model.prior_mode = prior_mode;
  model.variance_floor = variance_floor;
  model.class_counts.assign(num_classes, 0);
  model.stats.assign(num_classes * dim, ClassFeatureStat{mu0, sigma2_0});
  return model;
}

double GnbModel::log_prior(std::size_t m) const {
  if (prior_mode == PriorMode::Uniform) return -std::log(static_cast<double>(num_classes));
  std::uint64_t total = 0;
  for (std::uint64_t c : class_counts) total += c;
  return std::log((static_cast<double>(class_counts[m]) + 1.0) /
                  (static_cast<double>(total) + static_cast<double>(num_classes)));
}

double GnbModel::log_posterior(std::span<const double> z, std::size_t m) const {
  if (m >= num_classes)
    fail(Status::InvalidClass, "class index " + std::to_string(m) + " out of range");
  if (z.size() != dim)
    fail(Status::DimensionMismatch, "log_posterior: vector length does not match model dimension");

  double acc = log_prior(m);
  const ClassFeatureStat* row = &stats[m * dim];
  for (std::size_t j = 0; j < dim; ++j) {
    const double s2 = std::max(row[j].sigma2, variance_floor);
    const double d = z[j] - row[j].mu;
    acc -= 0.5 * std::log(kTwoPi * s2) + 0.5 * d * d / s2;
  }
  return acc;
}

void GnbModel::update_batch(std::size_t m, const Matrix& Z) {
  if (m >= num_classes)
    fail(Status::InvalidClass, "class index " + std::to_string(m) + " out of range");
  if (Z.rows == 0) fail(Status::InvalidBatch, "update_batch: empty batch (callers must filter)");
  if (Z.cols != dim)
    fail(Status::DimensionMismatch, "update_batch: column count does not match model dimension");

  const double n_prev = static_cast<double>(class_counts[m]);
  const double n_next = n_prev + static_cast<double>(Z.rows);
  ClassFeatureStat* row = &stats[m * dim];
  for (std::size_t j = 0; j < dim; ++j) {
    double sum = 0.0;
    for (std::size_t r = 0; r < Z.rows; ++r) sum += Z.at(r, j);
    const double mu_prev = row[j].mu;
    const double mu_next = (n_prev * mu_prev + sum) / n_next;
    double ssd = 0.0;
    for (std::size_t r = 0; r < Z.rows; ++r) {
      const double d = Z.at(r, j) - mu_next;
      ssd += d * d;
    }
    const double shift = mu_prev - mu_next;
    row[j].sigma2 = (n_prev * (row[j].sigma2 + shift * shift) + ssd) / n_next;
    row[j].mu = mu_next;
  }
  class_counts[m] += Z.rows;
}

void GnbModel::update_one(std::size_t m, std::span<const double> z) {
  if (m >= num_classes)
    fail(Status::InvalidClass, "class index " + std::to_string(m) + " out of range");
  if (z.size() != dim)
    fail(Status::DimensionMismatch, "update_one: vector length does not match model dimension");

  const double t_prev = static_cast<double>(class_counts[m]);
  const double t = t_prev + 1.0;
  ClassFeatureStat* row = &stats[m * dim];
  for (std::size_t j = 0; j < dim; ++j) {
    const double mu_prev = row[j].mu;
    const double mu_next = (t_prev * mu_prev + z[j]) / t;
    const double d = z[j] - mu_next;
    const double shift = mu_prev - mu_next;
    row[j].sigma2 = (t_prev * (row[j].sigma2 + shift * shift) + d * d) / t;
    row[j].mu = mu_next;
  }
  class_counts[m] += 1;
}

}  // namespace rpnb
