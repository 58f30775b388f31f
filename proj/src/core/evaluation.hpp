#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/data.hpp"
#include "core/matrix.hpp"
#include "core/prediction.hpp"

namespace rpnb {

// Learner interface consumed by the prequential harness. The harness always
// calls predict() before it reveals labels, and scores only those
// predictions, so no prediction can depend on its own observation's label.
// reveal() receives the predictions the harness recorded for the chunk, so
// update gating operates on exactly what was scored.
class OnlineLearner {
 public:
  virtual ~OnlineLearner() = default;

  virtual std::string name() const = 0;

  // Rows per reveal() call; 1 for one-by-one learners.
  virtual std::size_t chunk_size() const { return 1; }

  virtual Prediction predict(std::span<const double> x) = 0;

  virtual void reveal(const Matrix& X, std::span<const int> y,
                      std::span<const Prediction> preds) = 0;

  virtual std::uint64_t update_count() const = 0;
};

// One permutation's prequential results.
struct RunSummary {
  std::string dataset_name;
  std::string learner_name;
  std::uint64_t permutation_seed = 0;
  double error_rate = 0.0;
  double macro_f1 = 0.0;
  std::uint64_t update_count = 0;
  std::size_t n_observations = 0;
};

struct Aggregate {
  double mean = 0.0;
  double var = 0.0;  // population variance (divisor N)
};

struct AggregateSummary {
  std::string dataset_name;
  std::string learner_name;
  std::size_t n_perms = 0;
  Aggregate error_rate;
  Aggregate macro_f1;
  Aggregate update_count;
  std::vector<RunSummary> per_perm;
};

// Feeds the dataset in the given order, predicting each observation before
// its label is revealed. Mini-batch learners receive consecutive chunks of
// their chunk size; the final chunk may be short.
RunSummary prequential_run(OnlineLearner& learner, const Dataset& dataset,
                           std::span<const std::size_t> order);

using LearnerFactory = std::function<std::unique_ptr<OnlineLearner>(std::uint64_t seed)>;

// Permutation i uses seed base_seed + i and a fresh learner built with the
// same seed. Aggregates use the population variance convention.
AggregateSummary averaged_eval(const LearnerFactory& factory, const Dataset& dataset,
                               std::size_t n_perms, std::uint64_t base_seed);

// Unweighted mean of per-class F1 over an M x M count matrix indexed
// [true * M + predicted]; any 0/0 contributes 0.
double macro_f1(std::span<const std::uint64_t> confusion, std::size_t num_classes);

struct WilcoxonResult {
  std::size_t n_effective = 0;  // non-zero differences
  double w_plus = 0.0;
  double w_minus = 0.0;
  double statistic = 0.0;  // min(w_plus, w_minus)
  double p_value = 1.0;
  bool reject = false;
  bool exact = false;  // exact enumeration vs normal approximation
};

// Signed-rank decomposition of paired samples: zero differences dropped,
// absolute differences ranked ascending with average ranks for ties. Ranks
// are kept doubled so they stay integral.
struct SignedRankData {
  std::size_t n_effective = 0;
  std::vector<std::uint64_t> doubled_ranks;    // per effective difference
  std::vector<std::size_t> tie_group_sizes;
  std::uint64_t doubled_w_plus = 0;
  std::uint64_t doubled_w_minus = 0;

  double w_plus() const { return static_cast<double>(doubled_w_plus) / 2.0; }
  double w_minus() const { return static_cast<double>(doubled_w_minus) / 2.0; }
};

SignedRankData signed_ranks(std::span<const double> a, std::span<const double> b);

// Exact two-sided p over all 2^n sign assignments (computed by dynamic
// programming over the rank-sum distribution, which enumerates the same
// space).
double wilcoxon_exact_p(const SignedRankData& ranks);

// Two-sided normal approximation with continuity and tie corrections.
double wilcoxon_normal_p(const SignedRankData& ranks);

// Paired two-sided test of a vs b: exact for up to 25 effective differences,
// normal approximation beyond. Requires at least 3 non-zero differences.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.05);

// Counts wins and losses for side a over datasets where the test rejected;
// lower error wins.
std::pair<std::size_t, std::size_t> win_loss_count(std::span<const double> errors_a,
                                                   std::span<const double> errors_b,
                                                   const std::vector<bool>& rejected);

}  // namespace rpnb
