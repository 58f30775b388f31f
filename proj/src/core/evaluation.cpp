#include "core/evaluation.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace rpnb {

RunSummary prequential_run(OnlineLearner& learner, const Dataset& dataset,
                           std::span<const std::size_t> order) {
  const std::size_t n = dataset.n();
  if (n == 0) fail(Status::InvalidDataset, "prequential_run: empty dataset");
  if (order.size() != n)
    fail(Status::InvalidArgument, "prequential_run: order length does not match dataset size");
  {
    std::vector<bool> seen(n, false);
    for (std::size_t i : order) {
      if (i >= n || seen[i])
        fail(Status::InvalidArgument, "prequential_run: order is not a permutation");
      seen[i] = true;
    }
  }

  const std::size_t M = dataset.num_classes;
  const std::size_t chunk = std::max<std::size_t>(1, learner.chunk_size());
  std::vector<std::uint64_t> confusion(M * M, 0);
  std::uint64_t mistakes = 0;

  for (std::size_t start = 0; start < n; start += chunk) {
    const std::size_t len = std::min(chunk, n - start);
    Matrix X(len, dataset.p());
    std::vector<int> labels(len);
    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t r = order[start + i];
      std::copy_n(dataset.X.row(r).data(), dataset.p(), X.row(i).data());
      labels[i] = dataset.y[r];
    }

    // Predict the whole chunk before any label is revealed.
    std::vector<Prediction> preds;
    preds.reserve(len);
    for (std::size_t i = 0; i < len; ++i) preds.push_back(learner.predict(X.row(i)));

    for (std::size_t i = 0; i < len; ++i) {
      const std::size_t truth = static_cast<std::size_t>(labels[i]);
      const std::size_t guess = static_cast<std::size_t>(preds[i].label);
      confusion[truth * M + guess] += 1;
      if (truth != guess) ++mistakes;
    }

    learner.reveal(X, labels, preds);
  }

  RunSummary summary;
  summary.dataset_name = dataset.name;
  summary.learner_name = learner.name();
  summary.error_rate = static_cast<double>(mistakes) / static_cast<double>(n);
  summary.macro_f1 = macro_f1(confusion, M);
  summary.update_count = learner.update_count();
  summary.n_observations = n;
  return summary;
}

namespace {

Aggregate aggregate_of(const std::vector<double>& xs) {
  Aggregate a;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) a.mean += x;
  a.mean /= n;
  for (double x : xs) a.var += (x - a.mean) * (x - a.mean);
  a.var /= n;
  return a;
}

}  // namespace

AggregateSummary averaged_eval(const LearnerFactory& factory, const Dataset& dataset,
                               std::size_t n_perms, std::uint64_t base_seed) {
  if (n_perms == 0) fail(Status::InvalidArgument, "averaged_eval: need at least one permutation");

  AggregateSummary agg;
  agg.dataset_name = dataset.name;
  agg.n_perms = n_perms;
  std::vector<double> errors, f1s, updates;
  for (std::size_t i = 0; i < n_perms; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    const std::vector<std::size_t> order = permutation(dataset.n(), seed);
    std::unique_ptr<OnlineLearner> learner = factory(seed);
    RunSummary run = prequential_run(*learner, dataset, order);
    run.permutation_seed = seed;
    errors.push_back(run.error_rate);
    f1s.push_back(run.macro_f1);
    updates.push_back(static_cast<double>(run.update_count));
    agg.learner_name = run.learner_name;
    agg.per_perm.push_back(std::move(run));
  }
  agg.error_rate = aggregate_of(errors);
  agg.macro_f1 = aggregate_of(f1s);
  agg.update_count = aggregate_of(updates);
  return agg;
}

double macro_f1(std::span<const std::uint64_t> confusion, std::size_t num_classes) {
  if (confusion.size() != num_classes * num_classes)
    fail(Status::InvalidArgument, "macro_f1: confusion matrix shape mismatch");
  std::uint64_t total = 0;
  for (std::uint64_t c : confusion) total += c;
  if (total == 0) fail(Status::InvalidArgument, "macro_f1: all-zero confusion matrix");

  double sum = 0.0;
  for (std::size_t m = 0; m < num_classes; ++m) {
    const double tp = static_cast<double>(confusion[m * num_classes + m]);
    double fp = 0.0, fn = 0.0;
    for (std::size_t o = 0; o < num_classes; ++o) {
      if (o == m) continue;
      fp += static_cast<double>(confusion[o * num_classes + m]);
      fn += static_cast<double>(confusion[m * num_classes + o]);
    }
    const double precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    const double recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
    sum += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return sum / static_cast<double>(num_classes);
}

SignedRankData signed_ranks(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(Status::InvalidArgument, "signed_ranks: paired samples must have equal length");

  struct Item {
    double abs_diff;
    bool positive;
  };
  std::vector<Item> items;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) items.push_back({std::abs(d), d > 0.0});
  }
  if (items.size() < 3)
    fail(Status::InsufficientData, "signed_ranks: fewer than 3 non-zero differences");

  std::sort(items.begin(), items.end(),
            [](const Item& x, const Item& y) { return x.abs_diff < y.abs_diff; });

  SignedRankData out;
  out.n_effective = items.size();
  out.doubled_ranks.resize(items.size());

  // A tie run spanning 1-based ranks f..l gets the average rank (f + l) / 2,
  // i.e. doubled rank f + l, an integer.
  std::size_t i = 0;
  while (i < items.size()) {
    std::size_t j = i;
    while (j + 1 < items.size() && items[j + 1].abs_diff == items[i].abs_diff) ++j;
    const std::uint64_t doubled = static_cast<std::uint64_t>(i + 1 + j + 1);
    for (std::size_t t = i; t <= j; ++t) {
      out.doubled_ranks[t] = doubled;
      if (items[t].positive)
        out.doubled_w_plus += doubled;
      else
        out.doubled_w_minus += doubled;
    }
    out.tie_group_sizes.push_back(j - i + 1);
    i = j + 1;
  }
  return out;
}

double wilcoxon_exact_p(const SignedRankData& ranks) {
  std::uint64_t total = 0;
  for (std::uint64_t r : ranks.doubled_ranks) total += r;

  // ways[s] = number of sign assignments whose positive doubled-rank sum is s.
  std::vector<double> ways(total + 1, 0.0);
  ways[0] = 1.0;
  for (std::uint64_t r : ranks.doubled_ranks) {
    for (std::uint64_t s = total; s >= r; --s) ways[s] += ways[s - r];
  }

  const std::uint64_t lo = std::min(ranks.doubled_w_plus, ranks.doubled_w_minus);
  const std::uint64_t hi = std::max(ranks.doubled_w_plus, ranks.doubled_w_minus);
  double tail_low = 0.0, tail_high = 0.0;
  for (std::uint64_t s = 0; s <= total; ++s) {
    if (s <= lo) tail_low += ways[s];
    if (s >= hi) tail_high += ways[s];
  }
  const double p = (tail_low + tail_high) / std::ldexp(1.0, static_cast<int>(ranks.n_effective));
  return std::min(1.0, p);
}

double wilcoxon_normal_p(const SignedRankData& ranks) {
  const double n = static_cast<double>(ranks.n_effective);
  const double mean = n * (n + 1.0) / 4.0;
  double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0;
  for (std::size_t t : ranks.tie_group_sizes) {
    const double td = static_cast<double>(t);
    var -= (td * td * td - td) / 48.0;
  }
  if (var <= 0.0) return 1.0;

  const double w = std::min(ranks.w_plus(), ranks.w_minus());
  const double z = (w - mean + 0.5) / std::sqrt(var);  // continuity correction
  const double p = std::erfc(-z / std::sqrt(2.0));     // 2 * Phi(z)
  return std::min(1.0, p);
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    double alpha) {
  const SignedRankData ranks = signed_ranks(a, b);
  WilcoxonResult result;
  result.n_effective = ranks.n_effective;
  result.w_plus = ranks.w_plus();
  result.w_minus = ranks.w_minus();
  result.statistic = std::min(result.w_plus, result.w_minus);
  result.exact = ranks.n_effective <= 25;
  result.p_value = result.exact ? wilcoxon_exact_p(ranks) : wilcoxon_normal_p(ranks);
  result.reject = result.p_value < alpha;
  return result;
}

std::pair<std::size_t, std::size_t> win_loss_count(std::span<const double> errors_a,
                                                   std::span<const double> errors_b,
                                                   const std::vector<bool>& rejected) {
  if (errors_a.size() != errors_b.size() || errors_a.size() != rejected.size())
    fail(Status::InvalidArgument, "win_loss_count: input lengths differ");
  std::size_t wins = 0, losses = 0;
  for (std::size_t i = 0; i < errors_a.size(); ++i) {
    if (!rejected[i]) continue;
    if (errors_a[i] < errors_b[i])
      ++wins;
    else if (errors_b[i] < errors_a[i])
      ++losses;
  }
  return {wins, losses};
}

}  // namespace rpnb
