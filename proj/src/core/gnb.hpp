#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/matrix.hpp"

namespace rpnb {

enum class PriorMode { Uniform, Empirical };

const char* to_string(PriorMode mode);
PriorMode prior_mode_from_string(const std::string& name);

// Running per-class, per-feature Gaussian moments. sigma2 is the population
// variance (divisor N) and is stored exactly; the variance floor is applied
// only when scoring.
struct ClassFeatureStat {
  double mu = 0.0;
  double sigma2 = 0.0;
};

// Gaussian naive Bayes over one down-space with exact streaming moment
// updates. Single-writer: callers serialize update calls; concurrent
// read-only scoring between updates is safe.
struct GnbModel {
  std::size_t num_classes = 0;  // M
  std::size_t dim = 0;          // q
  PriorMode prior_mode = PriorMode::Uniform;
  double variance_floor = 1e-9;
  std::vector<std::uint64_t> class_counts;  // cumulative update observations per class
  std::vector<ClassFeatureStat> stats;      // M x q row-major

  ClassFeatureStat& stat(std::size_t m, std::size_t j) { return stats[m * dim + j]; }
  const ClassFeatureStat& stat(std::size_t m, std::size_t j) const { return stats[m * dim + j]; }

  // Uniform: -log(M). Empirical: add-one smoothed log of the class share of
  // update observations.
  double log_prior(std::size_t m) const;

  // log P(y_m) - sum_j [ log(sqrt(2*pi)*sigma_mj) + ((z_j - mu_mj)/sigma_mj)^2 / 2 ]
  // with sigma_mj = sqrt(max(sigma2, variance_floor)). Finite for every
  // finite input.
  double log_posterior(std::span<const double> z, std::size_t m) const;

  // Folds a non-empty batch of down-space rows into class m's moments. The
  // new mean is computed first; the variance recurrence needs both the old
  // and the new mean. With a prior count of 0 the result is exactly the
  // batch's mean and population variance (initialization carries no weight).
  void update_batch(std::size_t m, const Matrix& Z);

  // Single-observation form of the same recurrence; value-identical to
  // update_batch on a one-row batch.
  void update_one(std::size_t m, std::span<const double> z);
};

// All stats start at (mu0, sigma2_0) with zero class counts. Requires
// num_classes >= 2, dim >= 1, sigma2_0 > 0, variance_floor > 0.
GnbModel init_gnb(std::size_t num_classes, std::size_t dim, double mu0, double sigma2_0,
                  PriorMode prior_mode, double variance_floor);

}  // namespace rpnb
