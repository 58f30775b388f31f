#include "core/experiment.hpp"

#include <algorithm>
#include <map>

#include "core/baselines.hpp"
#include "core/error.hpp"
#include "core/evaluation.hpp"
#include "core/text.hpp"

namespace rpnb {

namespace {

using nlohmann::json;

const std::vector<std::string> kKnownLearners = {"rpnb", "perceptron", "pa", "ogd"};

class RpnbLearner final : public OnlineLearner {
 public:
  RpnbLearner(const RpnbConfig& config, std::size_t p, std::size_t num_classes)
      : model_(new_rpnb(config, p, num_classes)) {}

  std::string name() const override { return "rpnb"; }
  std::size_t chunk_size() const override {
    return model_.config.mode == LearnMode::MiniBatch ? model_.config.batch_size : 1;
  }
  Prediction predict(std::span<const double> x) override { return model_.predict(x); }
  void reveal(const Matrix& X, std::span<const int> y,
              std::span<const Prediction> preds) override {
    model_.absorb(X, y, preds);
  }
  std::uint64_t update_count() const override { return model_.update_count; }

 private:
  RpnbModel model_;
};

class LinearLearner final : public OnlineLearner {
 public:
  LinearLearner(LinearAlgorithm algorithm, std::size_t p, std::size_t num_classes, double eta0)
      : model_(make_linear(algorithm, p, num_classes, eta0)) {}

  std::string name() const override { return to_string(model_.algorithm); }
  Prediction predict(std::span<const double> x) override { return model_.predict(x); }
  void reveal(const Matrix& X, std::span<const int> y,
              std::span<const Prediction> preds) override {
    for (std::size_t i = 0; i < X.rows; ++i) model_.absorb(X.row(i), y[i], preds[i]);
  }
  std::uint64_t update_count() const override { return model_.update_count; }

 private:
  LinearModel model_;
};

template <typename T>
T scalar_field(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(Status::InvalidArgument, std::string("config: field '") + key + "' has the wrong type");
  }
}

std::vector<std::string> string_list_field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) return {};
  if (it->is_string()) return {it->get<std::string>()};
  if (it->is_array()) {
    std::vector<std::string> out;
    for (const json& v : *it) {
      if (!v.is_string())
        fail(Status::InvalidArgument, std::string("config: '") + key + "' entries must be strings");
      out.push_back(v.get<std::string>());
    }
    return out;
  }
  fail(Status::InvalidArgument, std::string("config: '") + key + "' must be a string or array");
}

json aggregate_to_json(const Aggregate& a) { return json{{"mean", a.mean}, {"var", a.var}}; }

json run_summary_to_json(const RunSummary& r) {
  return json{{"dataset", r.dataset_name},
              {"learner", r.learner_name},
              {"permutation_seed", r.permutation_seed},
              {"error_rate", r.error_rate},
              {"macro_f1", r.macro_f1},
              {"update_count", r.update_count},
              {"n_observations", r.n_observations}};
}

// Per-learner view of one report: dataset order plus aggregates and raw rows.
struct LearnerRuns {
  std::vector<std::string> datasets;
  std::map<std::string, double> mean_error;
  std::map<std::string, std::vector<double>> per_perm_error;
};

LearnerRuns extract_runs(const json& report, const std::optional<std::string>& learner,
                         std::string& resolved_name) {
  if (!report.is_object() || !report.contains("runs") || !report.at("runs").is_array())
    fail(Status::InvalidArgument, "compare: not a run report (missing 'runs')");

  std::vector<std::string> learners_present;
  for (const json& run : report.at("runs")) {
    const std::string name = run.at("learner").get<std::string>();
    if (std::find(learners_present.begin(), learners_present.end(), name) ==
        learners_present.end())
      learners_present.push_back(name);
  }
  if (learners_present.empty()) fail(Status::InvalidArgument, "compare: report has no runs");

  if (learner.has_value()) {
    if (std::find(learners_present.begin(), learners_present.end(), *learner) ==
        learners_present.end())
      fail(Status::InvalidArgument, "compare: learner '" + *learner + "' not found in report");
    resolved_name = *learner;
  } else if (learners_present.size() == 1) {
    resolved_name = learners_present.front();
  } else {
    fail(Status::InvalidArgument,
         "compare: report covers several learners; pick one with --learner-a/--learner-b");
  }

  LearnerRuns out;
  for (const json& run : report.at("runs")) {
    if (run.at("learner").get<std::string>() != resolved_name) continue;
    const std::string dataset = run.at("dataset").get<std::string>();
    if (out.mean_error.count(dataset))
      fail(Status::InvalidArgument, "compare: duplicate dataset '" + dataset + "' in report");
    out.datasets.push_back(dataset);
    out.mean_error[dataset] = run.at("error_rate").at("mean").get<double>();
    std::vector<double> errors;
    for (const json& perm : run.at("per_perm")) errors.push_back(perm.at("error_rate").get<double>());
    out.per_perm_error[dataset] = std::move(errors);
  }
  return out;
}

}  // namespace

std::unique_ptr<OnlineLearner> make_learner(const std::string& name,
                                            const ExperimentConfig& config, std::size_t p,
                                            std::size_t num_classes, std::uint64_t seed) {
  if (name == "rpnb") {
    RpnbConfig rc;
    rc.k = config.k;
    rc.q = down_dim(p);
    rc.scheme = config.scheme;
    rc.combiner = config.combiner;
    rc.mode = config.mode;
    rc.batch_size = config.batch_size;
    rc.seed = seed;
    return std::make_unique<RpnbLearner>(rc, p, num_classes);
  }
  return std::make_unique<LinearLearner>(linear_algorithm_from_string(name), p, num_classes,
                                         config.eta0);
}

ExperimentConfig experiment_config_from_json(const json& j) {
  if (!j.is_object()) fail(Status::InvalidArgument, "config must be a JSON object");
  static const std::vector<std::string> known = {"dataset", "learner",    "perms", "seed",
                                                 "k",       "scheme",     "combiner", "mode",
                                                 "batch_size", "eta0",    "out",   "format"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(Status::InvalidArgument, "config: unknown key '" + key + "'");
  }

  ExperimentConfig config;
  config.datasets = string_list_field(j, "dataset");
  config.learners = string_list_field(j, "learner");
  config.n_perms = scalar_field<std::size_t>(j, "perms", config.n_perms);
  config.base_seed = scalar_field<std::uint64_t>(j, "seed", config.base_seed);
  config.k = scalar_field<std::size_t>(j, "k", config.k);
  config.scheme =
      projection_scheme_from_string(scalar_field<std::string>(j, "scheme", "gaussian"));
  config.combiner = combiner_from_string(scalar_field<std::string>(j, "combiner", "sum"));
  config.mode = learn_mode_from_string(scalar_field<std::string>(j, "mode", "1b1"));
  config.batch_size = scalar_field<std::size_t>(j, "batch_size", config.batch_size);
  config.eta0 = scalar_field<double>(j, "eta0", config.eta0);

  if (config.datasets.empty()) fail(Status::InvalidArgument, "config: at least one dataset required");
  if (config.learners.empty()) fail(Status::InvalidArgument, "config: at least one learner required");
  for (const std::string& learner : config.learners) {
    if (std::find(kKnownLearners.begin(), kKnownLearners.end(), learner) == kKnownLearners.end())
      fail(Status::InvalidArgument, "config: unknown learner '" + learner + "'");
  }
  if (config.n_perms == 0) fail(Status::InvalidArgument, "config: perms must be positive");
  if (config.k == 0) fail(Status::InvalidArgument, "config: k must be positive");
  if (config.batch_size == 0) fail(Status::InvalidArgument, "config: batch_size must be positive");
  if (!(config.eta0 > 0.0)) fail(Status::InvalidArgument, "config: eta0 must be positive");
  return config;
}

json experiment_config_to_json(const ExperimentConfig& config) {
  return json{{"dataset", config.datasets},
              {"learner", config.learners},
              {"perms", config.n_perms},
              {"seed", config.base_seed},
              {"k", config.k},
              {"scheme", to_string(config.scheme)},
              {"combiner", to_string(config.combiner)},
              {"mode", to_string(config.mode)},
              {"batch_size", config.batch_size},
              {"eta0", config.eta0}};
}

json run_experiment(const ExperimentConfig& config) {
  if (config.datasets.empty() || config.learners.empty())
    fail(Status::InvalidArgument, "experiment needs at least one dataset and one learner");

  json runs = json::array();
  for (const std::string& ref : config.datasets) {
    // The built-in synthetic set is regenerated from the experiment seed.
    const Dataset dataset = ref == "gm" ? generate_gm(config.base_seed) : load_csv_auto(ref);
    for (const std::string& learner_name : config.learners) {
      const LearnerFactory factory = [&](std::uint64_t seed) {
        return make_learner(learner_name, config, dataset.p(), dataset.num_classes, seed);
      };
      const AggregateSummary agg =
          averaged_eval(factory, dataset, config.n_perms, config.base_seed);
      json per_perm = json::array();
      for (const RunSummary& run : agg.per_perm) per_perm.push_back(run_summary_to_json(run));
      runs.push_back(json{{"dataset", agg.dataset_name},
                          {"learner", agg.learner_name},
                          {"n_perms", agg.n_perms},
                          {"error_rate", aggregate_to_json(agg.error_rate)},
                          {"macro_f1", aggregate_to_json(agg.macro_f1)},
                          {"update_count", aggregate_to_json(agg.update_count)},
                          {"per_perm", std::move(per_perm)}});
    }
  }
  return json{{"runs", std::move(runs)}, {"config_echo", experiment_config_to_json(config)}};
}

std::string report_to_csv(const json& report) {
  if (!report.contains("runs")) fail(Status::InvalidArgument, "not a run report (missing 'runs')");
  std::string out =
      "dataset,learner,n_perms,permutation_seed,error_rate,macro_f1,update_count,n_observations\n";
  for (const json& run : report.at("runs")) {
    for (const json& perm : run.at("per_perm")) {
      out += perm.at("dataset").get<std::string>();
      out += ',';
      out += perm.at("learner").get<std::string>();
      out += ',';
      out += std::to_string(run.at("n_perms").get<std::uint64_t>());
      out += ',';
      out += std::to_string(perm.at("permutation_seed").get<std::uint64_t>());
      out += ',';
      out += shortest_double(perm.at("error_rate").get<double>());
      out += ',';
      out += shortest_double(perm.at("macro_f1").get<double>());
      out += ',';
      out += std::to_string(perm.at("update_count").get<std::uint64_t>());
      out += ',';
      out += std::to_string(perm.at("n_observations").get<std::uint64_t>());
      out += '\n';
    }
  }
  return out;
}

json compare_reports(const json& report_a, const json& report_b,
                     const std::optional<std::string>& learner_a,
                     const std::optional<std::string>& learner_b, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(Status::InvalidArgument, "compare: alpha must lie in (0, 1)");

  std::string name_a, name_b;
  const LearnerRuns runs_a = extract_runs(report_a, learner_a, name_a);
  const LearnerRuns runs_b = extract_runs(report_b, learner_b, name_b);

  std::vector<std::string> sorted_a = runs_a.datasets, sorted_b = runs_b.datasets;
  std::sort(sorted_a.begin(), sorted_a.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  if (sorted_a != sorted_b)
    fail(Status::InvalidArgument, "compare: reports do not cover the same datasets");

  json per_dataset = json::array();
  std::vector<double> means_a, means_b;
  std::vector<bool> rejected;
  for (const std::string& dataset : runs_a.datasets) {
    const double mean_a = runs_a.mean_error.at(dataset);
    const double mean_b = runs_b.mean_error.at(dataset);
    const std::vector<double>& errs_a = runs_a.per_perm_error.at(dataset);
    const std::vector<double>& errs_b = runs_b.per_perm_error.at(dataset);
    if (errs_a.size() != errs_b.size())
      fail(Status::InvalidArgument,
           "compare: permutation counts differ on dataset '" + dataset + "'");

    json row{{"dataset", dataset}, {"error_a", mean_a}, {"error_b", mean_b},
             {"diff", mean_a - mean_b}};
    bool reject = false;
    try {
      const WilcoxonResult test = wilcoxon_signed_rank(errs_a, errs_b, alpha);
      reject = test.reject;
      row["p_value"] = test.p_value;
      row["reject"] = test.reject;
    } catch (const Error& e) {
      if (e.status() != Status::InsufficientData) throw;
      row["p_value"] = nullptr;
      row["reject"] = false;
      row["note"] = "insufficient non-zero differences";
    }
    row["winner"] = !reject ? "none" : (mean_a < mean_b ? "a" : (mean_b < mean_a ? "b" : "none"));
    per_dataset.push_back(std::move(row));
    means_a.push_back(mean_a);
    means_b.push_back(mean_b);
    rejected.push_back(reject);
  }

  const WilcoxonResult overall = wilcoxon_signed_rank(means_a, means_b, alpha);
  const auto [wins, losses] = win_loss_count(means_a, means_b, rejected);

  return json{{"test", "wilcoxon"},
              {"alpha", alpha},
              {"learner_a", name_a},
              {"learner_b", name_b},
              {"n_datasets", runs_a.datasets.size()},
              {"n_effective", overall.n_effective},
              {"statistic", overall.statistic},
              {"w_plus", overall.w_plus},
              {"w_minus", overall.w_minus},
              {"p_value", overall.p_value},
              {"exact", overall.exact},
              {"reject", overall.reject},
              {"wins", wins},
              {"losses", losses},
              {"per_dataset", std::move(per_dataset)}};
}

RpnbConfig rpnb_config_from_spec(const json& spec, std::size_t p, std::uint64_t default_seed) {
  static const std::vector<std::string> known = {
      "learner", "k",    "q",        "scheme",     "combiner",       "mode",         "batch_size",
      "seed",    "mu0",  "sigma2_0", "prior_mode", "variance_floor", "update_always"};
  for (const auto& [key, value] : spec.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail(Status::InvalidArgument, "model spec: unknown key '" + key + "'");
  }
  RpnbConfig config;
  config.k = scalar_field<std::size_t>(spec, "k", config.k);
  config.q = scalar_field<std::size_t>(spec, "q", down_dim(p));
  config.scheme = projection_scheme_from_string(scalar_field<std::string>(spec, "scheme", "gaussian"));
  config.combiner = combiner_from_string(scalar_field<std::string>(spec, "combiner", "sum"));
  config.mode = learn_mode_from_string(scalar_field<std::string>(spec, "mode", "1b1"));
  config.batch_size = scalar_field<std::size_t>(spec, "batch_size", config.batch_size);
  config.seed = scalar_field<std::uint64_t>(spec, "seed", default_seed);
  config.mu0 = scalar_field<double>(spec, "mu0", config.mu0);
  config.sigma2_0 = scalar_field<double>(spec, "sigma2_0", config.sigma2_0);
  config.prior_mode = prior_mode_from_string(scalar_field<std::string>(spec, "prior_mode", "uniform"));
  config.variance_floor = scalar_field<double>(spec, "variance_floor", config.variance_floor);
  config.update_always = scalar_field<bool>(spec, "update_always", false);
  return config;
}

}  // namespace rpnb
