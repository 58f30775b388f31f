#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/ensemble.hpp"
#include "core/evaluation.hpp"

namespace rpnb {

// Effective settings for one experiment invocation. Mirrors the flat config
// accepted on the command line and in config files; learner-specific knobs
// apply to the learners that use them and are ignored by the rest.
struct ExperimentConfig {
  std::vector<std::string> datasets;  // CSV paths or the built-in "gm"
  std::vector<std::string> learners;  // rpnb | perceptron | pa | ogd
  std::size_t n_perms = 10;
  std::uint64_t base_seed = 0;
  std::size_t k = 200;
  ProjectionScheme scheme = ProjectionScheme::Gaussian;
  Combiner combiner = Combiner::SumRule;
  LearnMode mode = LearnMode::OneByOne;
  std::size_t batch_size = 1;
  double eta0 = 1.0;  // OGD base rate
};

// Builds a harness-ready learner. "rpnb" takes its ensemble settings from
// the config, with q = down_dim(p) and projection matrices seeded from
// `seed`; the linear baselines are seed-free.
std::unique_ptr<OnlineLearner> make_learner(const std::string& name,
                                            const ExperimentConfig& config, std::size_t p,
                                            std::size_t num_classes, std::uint64_t seed);

// Parses the flat JSON config ("dataset" and "learner" accept a string or an
// array of strings; remaining keys are scalars). Unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

// Runs every (dataset, learner) pair over n_perms permutations and returns
// the report: {"runs": [...], "config_echo": {...}}. Each runs entry carries
// mean/variance aggregates and the per-permutation rows. Reports contain no
// timestamps; identical configs produce identical reports.
nlohmann::json run_experiment(const ExperimentConfig& config);

// Long-format CSV rendering of a report (one line per permutation).
std::string report_to_csv(const nlohmann::json& report);

// Paired comparison of two learners across the datasets of two reports (or
// one report passed twice with two learner names). Per dataset, a Wilcoxon
// signed-rank test over the aligned per-permutation error rates decides
// significance and the lower mean error decides the winner; the headline
// test runs over the per-dataset mean error rates.
nlohmann::json compare_reports(const nlohmann::json& report_a, const nlohmann::json& report_b,
                               const std::optional<std::string>& learner_a,
                               const std::optional<std::string>& learner_b, double alpha);

// Builds the down-space dimension from the dataset unless the spec carries
// an explicit "q". Exposed for the C API's model factory; spec_json is
// {"learner": name, ...optional settings...}.
RpnbConfig rpnb_config_from_spec(const nlohmann::json& spec, std::size_t p,
                                 std::uint64_t default_seed);

}  // namespace rpnb
