#include "core/baselines.hpp"

#include <cmath>

#include "core/error.hpp"

namespace rpnb {

const char* to_string(LinearAlgorithm algorithm) {
  switch (algorithm) {
    case LinearAlgorithm::Perceptron:
      return "perceptron";
    case LinearAlgorithm::PassiveAggressive:
      return "pa";
    case LinearAlgorithm::Ogd:
      return "ogd";
  }
  return "unknown";
}

LinearAlgorithm linear_algorithm_from_string(const std::string& name) {
  if (name == "perceptron") return LinearAlgorithm::Perceptron;
  if (name == "pa") return LinearAlgorithm::PassiveAggressive;
  if (name == "ogd") return LinearAlgorithm::Ogd;
  fail(Status::InvalidArgument, "unknown linear algorithm: '" + name + "'");
}

LinearModel make_linear(LinearAlgorithm algorithm, std::size_t p, std::size_t num_classes,
                        double eta0) {
  if (p == 0) fail(Status::InvalidArgument, "feature dimension must be positive");
  if (num_classes < 2) fail(Status::InvalidArgument, "a classifier needs at least two classes");
  if (!(eta0 > 0.0)) fail(Status::InvalidArgument, "learning rate must be positive");

  LinearModel model;
  model.algorithm = algorithm;
  model.p = p;
  model.num_classes = num_classes;
  model.eta0 = eta0;
  model.weights.assign(num_classes * p, 0.0);
  return model;
}

Prediction LinearModel::predict(std::span<const double> x) const {
  if (x.size() != p)
    fail(Status::DimensionMismatch, "predict: vector length " + std::to_string(x.size()) +
                                        " does not match feature dimension " + std::to_string(p));
  Prediction pred;
  pred.scores.assign(num_classes, 0.0);
  for (std::size_t m = 0; m < num_classes; ++m) {
    const double* w = weights.data() + m * p;
    double s = 0.0;
    for (std::size_t j = 0; j < p; ++j) s += w[j] * x[j];
    pred.scores[m] = s;
  }
  pred.label = argmax_smallest_index(pred.scores);
  return pred;
}

void LinearModel::absorb(std::span<const double> x, int y, const Prediction& pred) {
  if (x.size() != p) fail(Status::DimensionMismatch, "absorb: vector length mismatch");
  if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
    fail(Status::InvalidClass, "absorb: class index " + std::to_string(y) + " out of range");

  seen_count += 1;
  const std::size_t yu = static_cast<std::size_t>(y);

  if (algorithm == LinearAlgorithm::Perceptron) {
    if (pred.label == y) return;
    std::span<double> wy = weight_row(yu);
    std::span<double> wp = weight_row(static_cast<std::size_t>(pred.label));
    for (std::size_t j = 0; j < p; ++j) {
      wy[j] += x[j];
      wp[j] -= x[j];
    }
    update_count += 1;
    return;
  }

  // PA and OGD: hinge against the highest-scoring wrong class.
  if (algorithm == LinearAlgorithm::Ogd) step_counter += 1;
  std::size_t rival = yu == 0 ? 1 : 0;
  for (std::size_t m = 0; m < num_classes; ++m) {
    if (m != yu && pred.scores[m] > pred.scores[rival]) rival = m;
  }
  const double loss = std::max(0.0, 1.0 - (pred.scores[yu] - pred.scores[rival]));
  if (loss <= 0.0) return;

  double step = 0.0;
  if (algorithm == LinearAlgorithm::PassiveAggressive) {
    double norm2 = 0.0;
    for (double v : x) norm2 += v * v;
    step = norm2 > 0.0 ? loss / (2.0 * norm2) : 0.0;
  } else {
    step = eta0 / std::sqrt(static_cast<double>(step_counter));
  }

  std::span<double> wy = weight_row(yu);
  std::span<double> wr = weight_row(rival);
  for (std::size_t j = 0; j < p; ++j) {
    wy[j] += step * x[j];
    wr[j] -= step * x[j];
  }
  update_count += 1;
}

Prediction LinearModel::learn(std::span<const double> x, int y) {
  Prediction pred = predict(x);
  absorb(x, y, pred);
  return pred;
}

}  // namespace rpnb
