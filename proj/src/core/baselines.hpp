#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/prediction.hpp"

namespace rpnb {

enum class LinearAlgorithm { Perceptron, PassiveAggressive, Ogd };

const char* to_string(LinearAlgorithm algorithm);
LinearAlgorithm linear_algorithm_from_string(const std::string& name);

// Multiclass linear online learners used as comparison points. One weight
// row per class; updates move the true class's row toward x and the
// offending class's row away from it.
//
//   Perceptron: on a mistake, W_y += x and W_yhat -= x.
//   PA:         hinge loss against the highest-scoring wrong class r,
//               l = max(0, 1 - (s_y - s_r)); if l > 0, step tau = l/(2|x|^2)
//               (0 when x = 0). Basic variant, no slack parameter.
//   OGD:        same hinge; step eta0/sqrt(t) with t counting observations.
//
// RNG-free: a fixed data order gives fixed results.
struct LinearModel {
  LinearAlgorithm algorithm = LinearAlgorithm::Perceptron;
  std::size_t p = 0;
  std::size_t num_classes = 0;
  double eta0 = 1.0;               // OGD base rate
  std::vector<double> weights;     // M x p row-major
  std::uint64_t step_counter = 0;  // OGD's t
  std::uint64_t update_count = 0;
  std::uint64_t seen_count = 0;

  std::span<double> weight_row(std::size_t m) { return {weights.data() + m * p, p}; }
  std::span<const double> weight_row(std::size_t m) const { return {weights.data() + m * p, p}; }

  // scores = W * x; ties break to the smallest class index.
  Prediction predict(std::span<const double> x) const;

  // Second phase of a test-then-train step; pred must be the prediction made
  // on x with the current weights.
  void absorb(std::span<const double> x, int y, const Prediction& pred);

  // predict, then absorb.
  Prediction learn(std::span<const double> x, int y);
};

LinearModel make_linear(LinearAlgorithm algorithm, std::size_t p, std::size_t num_classes,
                        double eta0 = 1.0);

}  // namespace rpnb
