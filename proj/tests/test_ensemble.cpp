#include <doctest.h>

#include <cmath>

#include <json.hpp>

#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/serialize.hpp"
#include "test_util.hpp"

using namespace rpnb;
using testutil::approx_rel;

namespace {

RpnbConfig small_config(std::size_t k, std::size_t q, std::uint64_t seed) {
  RpnbConfig c;
  c.k = k;
  c.q = q;
  c.seed = seed;
  return c;
}

// Independent triple-loop oracle over classifiers, classes, and features.
Prediction predict_oracle(const RpnbModel& model, const std::vector<double>& x) {
  const std::size_t M = model.num_classes;
  Prediction pred;
  pred.scores.assign(M, 0.0);
  for (std::size_t k = 0; k < model.config.k; ++k) {
    const ProjectionMatrix& R = model.matrices[k];
    std::vector<double> z(R.q, 0.0);
    for (std::size_t j = 0; j < R.q; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < R.p; ++i) acc += x[i] * R.entry(i, j);
      z[j] = acc / std::sqrt(static_cast<double>(R.q));
    }
    const GnbModel& base = model.bases[k];
    for (std::size_t m = 0; m < M; ++m) {
      double score = -std::log(static_cast<double>(M));
      for (std::size_t j = 0; j < R.q; ++j) {
        const double sigma = std::sqrt(std::max(base.stat(m, j).sigma2, base.variance_floor));
        const double u = (z[j] - base.stat(m, j).mu) / sigma;
        score -= std::log(std::sqrt(2.0 * 3.14159265358979323846) * sigma) + 0.5 * u * u;
      }
      pred.scores[m] += score;
    }
  }
  std::size_t best = 0;
  for (std::size_t m = 1; m < M; ++m)
    if (pred.scores[m] > pred.scores[best]) best = m;
  pred.label = static_cast<int>(best);
  return pred;
}

bool stats_equal(const GnbModel& a, const GnbModel& b) {
  if (a.class_counts != b.class_counts) return false;
  for (std::size_t i = 0; i < a.stats.size(); ++i) {
    if (a.stats[i].mu != b.stats[i].mu || a.stats[i].sigma2 != b.stats[i].sigma2) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("construction generates seeded matrices and fresh bases") {
  RpnbConfig c = small_config(200, 7, 0);
  const RpnbModel model = new_rpnb(c, 9, 2);
  REQUIRE(model.matrices.size() == 200);
  REQUIRE(model.bases.size() == 200);
  for (std::size_t k = 0; k < 200; ++k) {
    CHECK(model.matrices[k].p == 9);
    CHECK(model.matrices[k].q == 7);
    CHECK(model.matrices[k].seed == k);
    for (const ClassFeatureStat& s : model.bases[k].stats) {
      CHECK(s.mu == 0.0);
      CHECK(s.sigma2 == 1.0);
    }
  }
  CHECK(model.update_count == 0);
  CHECK(model.seen_count == 0);
}

TEST_CASE("invalid construction parameters are rejected") {
  CHECK_THROWS_AS(new_rpnb(small_config(0, 2, 0), 4, 2), Error);
  CHECK_THROWS_AS(new_rpnb(small_config(3, 0, 0), 4, 2), Error);
  CHECK_THROWS_AS(new_rpnb(small_config(3, 2, 0), 0, 2), Error);
  CHECK_THROWS_AS(new_rpnb(small_config(3, 2, 0), 4, 1), Error);
  RpnbConfig bad = small_config(3, 2, 0);
  bad.batch_size = 0;
  CHECK_THROWS_AS(new_rpnb(bad, 4, 2), Error);
}

TEST_CASE("a single-member ensemble is one projected naive Bayes classifier") {
  RpnbModel model = new_rpnb(small_config(1, 3, 5), 6, 2);
  Rng rng(2);
  std::vector<double> x(6);
  for (double& v : x) v = rng.normal();
  const Prediction pred = model.predict(x);
  const std::vector<double> z = project(model.matrices[0], x);
  for (std::size_t m = 0; m < 2; ++m)
    CHECK(pred.scores[m] == model.bases[0].log_posterior(z, m));
}

TEST_CASE("same config and seed give identical predictions") {
  const RpnbModel a = new_rpnb(small_config(7, 3, 123), 5, 3);
  const RpnbModel b = new_rpnb(small_config(7, 3, 123), 5, 3);
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = 3.0 * rng.normal();
    const Prediction pa = a.predict(x);
    const Prediction pb = b.predict(x);
    CHECK(pa.label == pb.label);
    CHECK(pa.scores == pb.scores);
  }
}

TEST_CASE("nearest mean wins under equal variance") {
  RpnbModel model = new_rpnb(small_config(1, 1, 0), 1, 2);
  model.matrices[0].entries = {1.0};
  model.bases[0].stat(1, 0).mu = 10.0;  // class 0 keeps mu = 0 from initialization
  const Prediction pred = model.predict(std::vector<double>{0.1});
  CHECK(pred.label == 0);
}

TEST_CASE("exact score ties break to the smallest class index") {
  RpnbModel model = new_rpnb(small_config(1, 1, 0), 1, 2);
  model.matrices[0].entries = {1.0};
  model.bases[0].stat(0, 0).mu = -1.0;
  model.bases[0].stat(1, 0).mu = 1.0;
  // x = 0 is equidistant from both class means with equal variances
  const Prediction pred = model.predict(std::vector<double>{0.0});
  CHECK(pred.scores[0] == pred.scores[1]);
  CHECK(pred.label == 0);
}

TEST_CASE("predict matches the brute-force triple-loop oracle") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 1 + rng.below(5);
    const std::size_t m_classes = 2 + rng.below(3);
    const std::size_t q = 1 + rng.below(3);
    const std::size_t p = 1 + rng.below(6);
    RpnbModel model = new_rpnb(small_config(k, q, trial), p, m_classes);
    for (GnbModel& base : model.bases) {
      for (ClassFeatureStat& s : base.stats) {
        s.mu = 2.0 * rng.normal();
        s.sigma2 = rng.uniform01() < 0.1 ? 0.0 : 0.05 + 2.0 * rng.uniform01();
      }
    }
    std::vector<double> x(p);
    for (double& v : x) v = 3.0 * rng.normal();

    const Prediction got = model.predict(x);
    const Prediction want = predict_oracle(model, x);
    CHECK(got.label == want.label);
    for (std::size_t m = 0; m < m_classes; ++m)
      CHECK(approx_rel(got.scores[m], want.scores[m], 1e-10));
  }
}

TEST_CASE("predict rejects mismatched dimensions") {
  const RpnbModel model = new_rpnb(small_config(2, 2, 0), 4, 2);
  std::vector<double> bad(5, 0.0);
  CHECK_THROWS_AS(model.predict(bad), Error);
}

TEST_CASE("majority vote counts per-classifier argmaxes, ties to smallest index") {
  RpnbConfig c = small_config(3, 1, 0);
  c.combiner = Combiner::MajorityVote;
  RpnbModel model = new_rpnb(c, 1, 2);
  for (std::size_t k = 0; k < 3; ++k) model.matrices[k].entries = {1.0};
  // two members prefer class 1 at x = 1, one prefers class 0
  model.bases[0].stat(1, 0).mu = 1.0;
  model.bases[1].stat(1, 0).mu = 1.0;
  model.bases[2].stat(0, 0).mu = 1.0;
  const Prediction pred = model.predict(std::vector<double>{1.0});
  CHECK(pred.scores == std::vector<double>{1.0, 2.0});
  CHECK(pred.label == 1);

  // all members split? with 3 members and 2 classes a tie needs even votes;
  // force one by making every member prefer its own class deterministically
  RpnbConfig c2 = small_config(2, 1, 0);
  c2.combiner = Combiner::MajorityVote;
  RpnbModel tied = new_rpnb(c2, 1, 2);
  tied.matrices[0].entries = {1.0};
  tied.matrices[1].entries = {1.0};
  tied.bases[0].stat(0, 0).mu = 1.0;
  tied.bases[1].stat(1, 0).mu = 1.0;
  const Prediction tie_pred = tied.predict(std::vector<double>{1.0});
  CHECK(tie_pred.scores == std::vector<double>{1.0, 1.0});
  CHECK(tie_pred.label == 0);
}

TEST_CASE("correct predictions leave every parameter untouched") {
  RpnbModel model = new_rpnb(small_config(4, 2, 3), 5, 2);
  // make class 0 an easy win at x
  for (GnbModel& base : model.bases) {
    for (std::size_t j = 0; j < 2; ++j) base.stat(1, j).mu = 100.0;
  }
  std::vector<double> x(5, 0.1);
  const RpnbModel before = model;
  const Prediction pred = model.learn_one(x, 0);
  CHECK(pred.label == 0);
  CHECK(model.seen_count == 1);
  CHECK(model.update_count == 0);
  for (std::size_t k = 0; k < 4; ++k) CHECK(stats_equal(model.bases[k], before.bases[k]));
}

TEST_CASE("a misclassified observation updates only the true class, in every base") {
  RpnbModel model = new_rpnb(small_config(4, 2, 3), 5, 3);
  for (GnbModel& base : model.bases) {
    for (std::size_t j = 0; j < 2; ++j) base.stat(2, j).mu = 100.0;
  }
  std::vector<double> x(5, 0.1);
  const RpnbModel before = model;
  const Prediction pred = model.learn_one(x, 2);  // class 2 cannot win at x
  CHECK(pred.label != 2);
  CHECK(model.update_count == 1);
  CHECK(model.seen_count == 1);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(model.bases[k].class_counts[2] == 1);
    const std::vector<double> z = project(model.matrices[k], x);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(model.bases[k].stat(2, j).mu == z[j]);
      CHECK(model.bases[k].stat(2, j).sigma2 == 0.0);
      // other classes bit-identical
      CHECK(model.bases[k].stat(0, j).mu == before.bases[k].stat(0, j).mu);
      CHECK(model.bases[k].stat(1, j).mu == before.bases[k].stat(1, j).mu);
    }
  }
}

TEST_CASE("second update on the same class advances the streaming step") {
  // hand-stepped single-observation recurrence, k = q = 1
  RpnbModel model = new_rpnb(small_config(1, 1, 0), 1, 2);
  model.matrices[0].entries = {1.0};

  Prediction p1 = model.learn_one(std::vector<double>{10.0}, 1);
  CHECK(p1.label == 0);  // tie at init breaks to class 0, so this was a mistake
  CHECK(model.bases[0].stat(1, 0).mu == 10.0);
  CHECK(model.bases[0].stat(1, 0).sigma2 == 0.0);

  Prediction p2 = model.learn_one(std::vector<double>{-10.0}, 1);
  CHECK(p2.label == 0);  // z = -10 is far from class 1's mean of 10
  // t = 2: mu = (10 + -10)/2 = 0, sigma2 = (1*(0 + 10^2) + (-10)^2)/2 = 100
  CHECK(model.bases[0].stat(1, 0).mu == 0.0);
  CHECK(model.bases[0].stat(1, 0).sigma2 == 100.0);
  CHECK(model.bases[0].class_counts[1] == 2);
  CHECK(model.update_count == 2);
}

TEST_CASE("learn_one enforces mode and class bounds") {
  RpnbConfig c = small_config(1, 1, 0);
  c.mode = LearnMode::MiniBatch;
  RpnbModel mb = new_rpnb(c, 1, 2);
  CHECK_THROWS_AS(mb.learn_one(std::vector<double>{1.0}, 0), Error);

  RpnbModel obo = new_rpnb(small_config(1, 1, 0), 1, 2);
  CHECK_THROWS_AS(obo.learn_one(std::vector<double>{1.0}, 2), Error);
  CHECK_THROWS_AS(obo.learn_one(std::vector<double>{1.0}, -1), Error);
  Matrix X(1, 1);
  std::vector<int> y = {0};
  CHECK_THROWS_AS(obo.learn_batch(X, y), Error);
}

TEST_CASE("absorb partitions misclassified rows by true class") {
  RpnbModel model = new_rpnb(small_config(3, 2, 1), 4, 3);
  Matrix X(4, 4);
  Rng rng(4);
  for (double& v : X.data) v = rng.normal();
  const std::vector<int> y = {0, 0, 2, 1};
  // crafted predictions: first three wrong, last one right
  std::vector<Prediction> preds(4);
  preds[0].label = 1;
  preds[1].label = 2;
  preds[2].label = 0;
  preds[3].label = 1;
  model.absorb(X, y, preds);

  CHECK(model.seen_count == 4);
  CHECK(model.update_count == 3);
  for (const GnbModel& base : model.bases) {
    CHECK(base.class_counts == std::vector<std::uint64_t>{2, 0, 1});
    // class 1 stats still at initialization
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(base.stat(1, j).mu == 0.0);
      CHECK(base.stat(1, j).sigma2 == 1.0);
    }
  }
}

TEST_CASE("learn_batch with every row correct changes nothing") {
  RpnbConfig c = small_config(2, 2, 3);
  c.mode = LearnMode::MiniBatch;
  c.batch_size = 4;
  RpnbModel model = new_rpnb(c, 5, 2);
  for (GnbModel& base : model.bases) {
    for (std::size_t j = 0; j < 2; ++j) base.stat(1, j).mu = 100.0;
  }
  Matrix X(3, 5);
  for (double& v : X.data) v = 0.1;
  const std::vector<int> y = {0, 0, 0};
  const RpnbModel before = model;
  model.learn_batch(X, y);
  CHECK(model.update_count == 0);
  CHECK(model.seen_count == 3);
  for (std::size_t k = 0; k < 2; ++k) CHECK(stats_equal(model.bases[k], before.bases[k]));

  std::vector<int> bad = {0, 0};
  CHECK_THROWS_AS(model.learn_batch(X, bad), Error);
}

TEST_CASE("minibatch with chunk size one reproduces one-by-one learning") {
  Rng rng(55);
  const std::size_t n = 80, p = 5, M = 3;
  Matrix X(n, p);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = static_cast<int>(rng.below(M));
    for (std::size_t j = 0; j < p; ++j) X.at(i, j) = rng.normal() + static_cast<double>(y[i]);
  }

  RpnbConfig c1 = small_config(5, 3, 7);
  RpnbConfig c2 = c1;
  c2.mode = LearnMode::MiniBatch;
  c2.batch_size = 1;
  RpnbModel one_by_one = new_rpnb(c1, p, M);
  RpnbModel minibatch = new_rpnb(c2, p, M);

  for (std::size_t i = 0; i < n; ++i) {
    const Prediction pa = one_by_one.learn_one(X.row(i), y[i]);
    Matrix chunk(1, p);
    std::copy_n(X.row(i).data(), p, chunk.row(0).data());
    const std::vector<int> ly = {y[i]};
    const std::vector<Prediction> pb = minibatch.learn_batch(chunk, ly);
    CHECK(pa.label == pb[0].label);
  }
  CHECK(one_by_one.update_count == minibatch.update_count);
  CHECK(one_by_one.seen_count == minibatch.seen_count);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(one_by_one.bases[k].class_counts == minibatch.bases[k].class_counts);
    for (std::size_t i = 0; i < one_by_one.bases[k].stats.size(); ++i) {
      CHECK(approx_rel(one_by_one.bases[k].stats[i].mu, minibatch.bases[k].stats[i].mu, 1e-9));
      CHECK(approx_rel(one_by_one.bases[k].stats[i].sigma2, minibatch.bases[k].stats[i].sigma2,
                       1e-9));
    }
  }
}

TEST_CASE("the prediction from a learn step never depends on the label passed") {
  RpnbModel model = new_rpnb(small_config(3, 2, 11), 4, 3);
  Rng rng(6);
  for (int step = 0; step < 20; ++step) {
    std::vector<double> x(4);
    for (double& v : x) v = rng.normal();
    const int y = static_cast<int>(rng.below(3));

    // every label choice yields the same prediction from the same state
    const Prediction plain = model.predict(x);
    for (int alt = 0; alt < 3; ++alt) {
      RpnbModel fork = model;
      const Prediction learned = fork.learn_one(x, alt);
      CHECK(learned.label == plain.label);
      CHECK(learned.scores == plain.scores);
    }
    model.learn_one(x, y);
  }
}

TEST_CASE("update gating: update count equals misclassified observations") {
  RpnbModel model = new_rpnb(small_config(3, 2, 21), 4, 2);
  Rng rng(31);
  std::uint64_t mistakes = 0;
  for (int step = 0; step < 60; ++step) {
    std::vector<double> x(4);
    const int y = static_cast<int>(rng.below(2));
    for (double& v : x) v = rng.normal() + 2.0 * y;
    const Prediction pred = model.learn_one(x, y);
    if (pred.label != y) ++mistakes;
  }
  CHECK(model.update_count == mistakes);
  CHECK(model.seen_count == 60);
}

TEST_CASE("adding a constant to every class score leaves the label unchanged") {
  RpnbModel model = new_rpnb(small_config(4, 2, 2), 5, 3);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(5);
    for (double& v : x) v = 2.0 * rng.normal();
    Prediction pred = model.predict(x);
    for (double c : {-7.5, 0.25, 100.0}) {
      std::vector<double> shifted = pred.scores;
      for (double& s : shifted) s += c;
      CHECK(argmax_smallest_index(shifted) == pred.label);
    }
  }
}

TEST_CASE("update_always consumes every observation and converges to column stats") {
  RpnbConfig c = small_config(2, 2, 9);
  c.update_always = true;
  RpnbModel model = new_rpnb(c, 3, 2);
  Rng rng(12);
  const std::size_t n = 200;
  Matrix X(n, 3);
  for (double& v : X.data) v = rng.normal() * 1.5 + 0.3;
  for (std::size_t i = 0; i < n; ++i) model.learn_one(X.row(i), 0);

  CHECK(model.update_count == n);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(model.bases[k].class_counts[0] == n);
    const Matrix Z = project_batch(model.matrices[k], X);
    for (std::size_t j = 0; j < 2; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += Z.at(i, j);
      mean /= static_cast<double>(n);
      double var = 0.0;
      for (std::size_t i = 0; i < n; ++i) var += (Z.at(i, j) - mean) * (Z.at(i, j) - mean);
      var /= static_cast<double>(n);
      CHECK(approx_rel(model.bases[k].stat(0, j).mu, mean, 1e-9));
      CHECK(approx_rel(model.bases[k].stat(0, j).sigma2, var, 1e-9));
    }
  }
}

TEST_CASE("snapshot round-trips to an equivalent model") {
  RpnbConfig c = small_config(3, 2, 17);
  c.prior_mode = PriorMode::Empirical;
  RpnbModel model = new_rpnb(c, 4, 2);
  Rng rng(14);
  for (int step = 0; step < 30; ++step) {
    std::vector<double> x(4);
    const int y = static_cast<int>(rng.below(2));
    for (double& v : x) v = rng.normal() + y;
    model.learn_one(x, y);
  }

  const nlohmann::json j = rpnb_to_json(model);
  const RpnbModel back = rpnb_from_json(j);
  CHECK(back.update_count == model.update_count);
  CHECK(back.seen_count == model.seen_count);
  CHECK(back.p == model.p);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.matrices[k].entries == model.matrices[k].entries);
    CHECK(stats_equal(back.bases[k], model.bases[k]));
  }
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(4);
    for (double& v : x) v = 2.0 * rng.normal();
    const Prediction pa = model.predict(x);
    const Prediction pb = back.predict(x);
    CHECK(pa.label == pb.label);
    CHECK(pa.scores == pb.scores);
  }
  CHECK(rpnb_to_json(back).dump() == j.dump());
}

}  // TEST_SUITE
