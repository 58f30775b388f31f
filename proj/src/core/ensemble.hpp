#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core/gnb.hpp"
#include "core/matrix.hpp"
#include "core/prediction.hpp"
#include "core/projection.hpp"

namespace rpnb {

enum class Combiner { SumRule, MajorityVote };
enum class LearnMode { OneByOne, MiniBatch };

const char* to_string(Combiner combiner);
Combiner combiner_from_string(const std::string& name);
const char* to_string(LearnMode mode);
LearnMode learn_mode_from_string(const std::string& name);

struct RpnbConfig {
  std::size_t k = 200;      // ensemble size
  std::size_t q = 0;        // down-space dimension (required)
  ProjectionScheme scheme = ProjectionScheme::Gaussian;
  Combiner combiner = Combiner::SumRule;
  LearnMode mode = LearnMode::OneByOne;
  std::size_t batch_size = 1;  // MiniBatch only
  std::uint64_t seed = 0;
  double mu0 = 0.0;
  double sigma2_0 = 1.0;
  PriorMode prior_mode = PriorMode::Uniform;
  double variance_floor = 1e-9;
  // Debug switch: update on every observation instead of misclassified ones
  // only. Exists so convergence to whole-stream statistics can be tested;
  // not a normal training mode.
  bool update_always = false;
};

// Random-projection naive Bayes ensemble: k projection/GNB pairs combined by
// the sum rule (summed log-posteriors) or majority vote, with updates gated
// on misclassification. Projection matrix k is seeded with seed + k.
//
// Score summation order is fixed (ascending k, then class, then feature) so
// runs are reproducible bit-for-bit on one platform.
struct RpnbModel {
  RpnbConfig config;
  std::size_t p = 0;            // up-space dimension
  std::size_t num_classes = 0;  // M
  std::vector<ProjectionMatrix> matrices;
  std::vector<GnbModel> bases;
  std::uint64_t update_count = 0;  // misclassified observations consumed by updates
  std::uint64_t seen_count = 0;

  // Pure: scores x with the current parameters. Label ties break to the
  // smallest class index.
  Prediction predict(std::span<const double> x) const;
  std::vector<Prediction> predict_rows(const Matrix& X) const;

  // Second phase of a test-then-train step: consumes labels for rows that
  // were already predicted (preds must be the predictions made on X).
  // Misclassified rows are partitioned by true label and folded into every
  // base; correctly classified rows change nothing. Advances counters.
  void absorb(const Matrix& X, std::span<const int> y, std::span<const Prediction> preds);

  // Test-then-train on a single observation (OneByOne mode only): predicts
  // with the pre-update state, then updates every base's class-y moments iff
  // the prediction was wrong.
  Prediction learn_one(std::span<const double> x, int y);

  // Test-then-train on a chunk (MiniBatch mode only): all rows are predicted
  // with the pre-chunk state (no intra-batch adaptation), then misclassified
  // rows are folded in per true class.
  std::vector<Prediction> learn_batch(const Matrix& X, std::span<const int> y);
};

RpnbModel new_rpnb(const RpnbConfig& config, std::size_t p, std::size_t num_classes);

}  // namespace rpnb
