#include "core/ensemble.hpp"

#include <cmath>

#include "core/error.hpp"

namespace rpnb {

const char* to_string(Combiner combiner) {
  return combiner == Combiner::SumRule ? "sum" : "vote";
}

Combiner combiner_from_string(const std::string& name) {
  if (name == "sum") return Combiner::SumRule;
  if (name == "vote") return Combiner::MajorityVote;
  fail(Status::InvalidArgument, "unknown combiner: '" + name + "'");
}

const char* to_string(LearnMode mode) {
  return mode == LearnMode::OneByOne ? "1b1" : "minibatch";
}

LearnMode learn_mode_from_string(const std::string& name) {
  if (name == "1b1") return LearnMode::OneByOne;
  if (name == "minibatch") return LearnMode::MiniBatch;
  fail(Status::InvalidArgument, "unknown learn mode: '" + name + "'");
}

RpnbModel new_rpnb(const RpnbConfig& config, std::size_t p, std::size_t num_classes) {
  if (p == 0) fail(Status::InvalidArgument, "up-space dimension must be positive");
  if (num_classes < 2) fail(Status::InvalidArgument, "a classifier needs at least two classes");
  if (config.k == 0) fail(Status::InvalidArgument, "ensemble size must be positive");
  if (config.q == 0) fail(Status::InvalidArgument, "down-space dimension must be positive");
  if (config.batch_size == 0) fail(Status::InvalidArgument, "batch size must be positive");

  RpnbModel model;
  model.config = config;
  model.p = p;
  model.num_classes = num_classes;
  model.matrices.reserve(config.k);
  model.bases.reserve(config.k);
  for (std::size_t k = 0; k < config.k; ++k) {
    model.matrices.push_back(
        generate_matrix(p, config.q, config.scheme, config.seed + static_cast<std::uint64_t>(k)));
    model.bases.push_back(init_gnb(num_classes, config.q, config.mu0, config.sigma2_0,
                                   config.prior_mode, config.variance_floor));
  }
  return model;
}

Prediction RpnbModel::predict(std::span<const double> x) const {
  if (x.size() != p)
    fail(Status::DimensionMismatch, "predict: vector length " + std::to_string(x.size()) +
                                        " does not match up-space dimension " + std::to_string(p));

  Prediction pred;
  std::vector<double> z(config.q);
  if (config.combiner == Combiner::SumRule) {
    pred.scores.assign(num_classes, 0.0);
    for (std::size_t k = 0; k < matrices.size(); ++k) {
      project_into(matrices[k], x, z);
      for (std::size_t m = 0; m < num_classes; ++m) pred.scores[m] += bases[k].log_posterior(z, m);
    }
  } else {
    pred.scores.assign(num_classes, 0.0);
    std::vector<double> local(num_classes);
    for (std::size_t k = 0; k < matrices.size(); ++k) {
      project_into(matrices[k], x, z);
      for (std::size_t m = 0; m < num_classes; ++m) local[m] = bases[k].log_posterior(z, m);
      pred.scores[static_cast<std::size_t>(argmax_smallest_index(local))] += 1.0;
    }
  }
  pred.label = argmax_smallest_index(pred.scores);
  return pred;
}

std::vector<Prediction> RpnbModel::predict_rows(const Matrix& X) const {
  std::vector<Prediction> preds;
  preds.reserve(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) preds.push_back(predict(X.row(r)));
  return preds;
}

void RpnbModel::absorb(const Matrix& X, std::span<const int> y,
                       std::span<const Prediction> preds) {
  if (X.rows != y.size() || X.rows != preds.size())
    fail(Status::InvalidBatch, "absorb: rows, labels, and predictions must have equal counts");
  if (X.cols != p) fail(Status::DimensionMismatch, "absorb: column count mismatch");
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes)
      fail(Status::InvalidClass, "absorb: class index " + std::to_string(label) + " out of range");
  }

  seen_count += X.rows;

  // Partition rows needing updates by true label, preserving arrival order.
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  std::size_t selected = 0;
  for (std::size_t i = 0; i < X.rows; ++i) {
    if (config.update_always || preds[i].label != y[i]) {
      by_class[static_cast<std::size_t>(y[i])].push_back(i);
      ++selected;
    }
  }
  if (selected == 0) return;

  for (std::size_t k = 0; k < matrices.size(); ++k) {
    for (std::size_t m = 0; m < num_classes; ++m) {
      if (by_class[m].empty()) continue;
      Matrix Z(by_class[m].size(), config.q);
      for (std::size_t idx = 0; idx < by_class[m].size(); ++idx)
        project_into(matrices[k], X.row(by_class[m][idx]), Z.row(idx));
      bases[k].update_batch(m, Z);
    }
  }
  update_count += selected;
}

Prediction RpnbModel::learn_one(std::span<const double> x, int y) {
  if (config.mode != LearnMode::OneByOne)
    fail(Status::InvalidState, "learn_one requires 1b1 mode");
  if (y < 0 || static_cast<std::size_t>(y) >= num_classes)
    fail(Status::InvalidClass, "learn_one: class index " + std::to_string(y) + " out of range");

  Prediction pred = predict(x);
  seen_count += 1;
  if (config.update_always || pred.label != y) {
    std::vector<double> z(config.q);
    for (std::size_t k = 0; k < matrices.size(); ++k) {
      project_into(matrices[k], x, z);
      bases[k].update_one(static_cast<std::size_t>(y), z);
    }
    update_count += 1;
  }
  return pred;
}

std::vector<Prediction> RpnbModel::learn_batch(const Matrix& X, std::span<const int> y) {
  if (config.mode != LearnMode::MiniBatch)
    fail(Status::InvalidState, "learn_batch requires minibatch mode");
  if (X.rows == 0) fail(Status::InvalidBatch, "learn_batch: empty chunk");
  if (X.rows != y.size())
    fail(Status::InvalidBatch, "learn_batch: row count " + std::to_string(X.rows) +
                                   " does not match label count " + std::to_string(y.size()));

  std::vector<Prediction> preds = predict_rows(X);
  absorb(X, y, preds);
  return preds;
}

}  // namespace rpnb
