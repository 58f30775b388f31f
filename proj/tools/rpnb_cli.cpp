// Command-line front end. Everything goes through the shared library's C
// API; this file only parses flags, assembles config JSON, and moves bytes
// between files and the library.
//
// Exit codes: 0 success, 1 usage/config error, 2 I/O or data error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rpnb/rpnb.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

int exit_code_for(rpnb_status status) {
  switch (status) {
    case RPNB_OK:
      return kExitOk;
    case RPNB_E_PARSE:
    case RPNB_E_IO:
    case RPNB_E_DATASET:
      return kExitData;
    default:
      return kExitUsage;
  }
}

int report_failure(rpnb_status status) {
  std::cerr << "error: " << rpnb_last_error() << "\n";
  return exit_code_for(status);
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return static_cast<bool>(in);
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  out.flush();
  return static_cast<bool>(out);
}

// Owns a string allocated by the library.
struct LibString {
  char* ptr = nullptr;
  ~LibString() { rpnb_string_free(ptr); }
  std::string str() const { return ptr == nullptr ? std::string() : std::string(ptr); }
};

struct RunOptions {
  std::vector<std::string> datasets;
  std::vector<std::string> learners;
  std::string config_path;
  std::uint64_t perms = 10;
  std::uint64_t seed = 0;
  std::uint64_t k = 200;
  std::uint64_t batch_size = 1;
  double eta0 = 1.0;
  std::string mode = "1b1";
  std::string scheme = "gaussian";
  std::string combiner = "sum";
  std::string out_path;
  std::string format = "json";
};

// Flat config: file values first, then flags that were actually given.
int build_run_config(const RunOptions& opt, const CLI::App& cmd, json& config,
                     std::string& out_path, std::string& format) {
  config = json::object();
  if (!opt.config_path.empty()) {
    std::string text;
    if (!read_file(opt.config_path, text)) {
      std::cerr << "error: cannot read config file '" << opt.config_path << "'\n";
      return kExitData;
    }
    config = json::parse(text, nullptr, false);
    if (config.is_discarded() || !config.is_object()) {
      std::cerr << "error: config file '" << opt.config_path << "' is not a JSON object\n";
      return kExitData;
    }
  }

  const auto given = [&](const std::string& flag) { return cmd.count(flag) > 0; };
  if (given("--dataset")) config["dataset"] = opt.datasets;
  if (given("--learner")) config["learner"] = opt.learners;
  if (given("--perms")) config["perms"] = opt.perms;
  if (given("--seed")) config["seed"] = opt.seed;
  if (given("--k")) config["k"] = opt.k;
  if (given("--batch-size")) config["batch_size"] = opt.batch_size;
  if (given("--eta0")) config["eta0"] = opt.eta0;
  if (given("--mode")) config["mode"] = opt.mode;
  if (given("--scheme")) config["scheme"] = opt.scheme;
  if (given("--combiner")) config["combiner"] = opt.combiner;
  if (given("--out")) config["out"] = opt.out_path;
  if (given("--format")) config["format"] = opt.format;

  out_path = config.value("out", std::string());
  format = config.value("format", std::string("json"));
  if (format != "json" && format != "csv") {
    std::cerr << "error: format must be json or csv\n";
    return kExitUsage;
  }
  return kExitOk;
}

int emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << content;
    return kExitOk;
  }
  if (!write_file(out_path, content)) {
    std::cerr << "error: cannot write '" << out_path << "'\n";
    return kExitData;
  }
  return kExitOk;
}

int cmd_gen_gm(std::uint64_t seed, const std::string& out_path) {
  rpnb_dataset* dataset = nullptr;
  rpnb_status status = rpnb_dataset_generate_gm(seed, &dataset);
  if (status != RPNB_OK) return report_failure(status);
  status = rpnb_dataset_save_csv(dataset, out_path.c_str());
  rpnb_dataset_free(dataset);
  if (status != RPNB_OK) return report_failure(status);
  return kExitOk;
}

int cmd_run(const RunOptions& opt, const CLI::App& cmd) {
  json config;
  std::string out_path, format;
  const int rc = build_run_config(opt, cmd, config, out_path, format);
  if (rc != kExitOk) return rc;

  LibString report;
  rpnb_status status = rpnb_experiment_run(config.dump().c_str(), &report.ptr);
  if (status != RPNB_OK) return report_failure(status);

  if (format == "csv") {
    LibString csv;
    status = rpnb_report_to_csv(report.ptr, &csv.ptr);
    if (status != RPNB_OK) return report_failure(status);
    return emit(csv.str(), out_path);
  }
  return emit(report.str(), out_path);
}

int cmd_compare(const std::string& report_a_path, const std::string& report_b_path,
                const std::optional<std::string>& learner_a,
                const std::optional<std::string>& learner_b, double alpha,
                const std::string& out_path) {
  std::string text_a, text_b;
  if (!read_file(report_a_path, text_a)) {
    std::cerr << "error: cannot read report '" << report_a_path << "'\n";
    return kExitData;
  }
  if (!report_b_path.empty() && !read_file(report_b_path, text_b)) {
    std::cerr << "error: cannot read report '" << report_b_path << "'\n";
    return kExitData;
  }

  LibString result;
  const rpnb_status status = rpnb_compare_reports(
      text_a.c_str(), report_b_path.empty() ? nullptr : text_b.c_str(),
      learner_a ? learner_a->c_str() : nullptr, learner_b ? learner_b->c_str() : nullptr, alpha,
      &result.ptr);
  if (status != RPNB_OK) return report_failure(status);
  return emit(result.str(), out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming random-projection naive Bayes ensemble"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rpnb_version()));

  // gen-gm
  std::uint64_t gm_seed = 0;
  std::string gm_out;
  CLI::App* gen_gm = app.add_subcommand("gen-gm", "Write the synthetic Gaussian mixture as CSV");
  gen_gm->add_option("--seed", gm_seed, "Generator seed")->capture_default_str();
  gen_gm->add_option("--out", gm_out, "Output CSV path")->required();

  // run
  RunOptions run_opt;
  CLI::App* run = app.add_subcommand("run", "Run a prequential experiment");
  run->add_option("--dataset", run_opt.datasets, "CSV path or 'gm' (repeatable)");
  run->add_option("--learner", run_opt.learners, "rpnb|perceptron|pa|ogd (repeatable)");
  run->add_option("--config", run_opt.config_path, "Flat JSON config file (flags override)");
  run->add_option("--perms", run_opt.perms, "Permutations per dataset")->capture_default_str();
  run->add_option("--seed", run_opt.seed, "Base seed")->capture_default_str();
  run->add_option("--k", run_opt.k, "Ensemble size")->capture_default_str();
  run->add_option("--mode", run_opt.mode, "1b1|minibatch")->capture_default_str();
  run->add_option("--batch-size", run_opt.batch_size, "Chunk size in minibatch mode")
      ->capture_default_str();
  run->add_option("--scheme", run_opt.scheme, "bernoulli|achlioptas|gaussian")
      ->capture_default_str();
  run->add_option("--combiner", run_opt.combiner, "sum|vote")->capture_default_str();
  run->add_option("--eta0", run_opt.eta0, "OGD base learning rate")->capture_default_str();
  run->add_option("--out", run_opt.out_path, "Report path (stdout if omitted)");
  run->add_option("--format", run_opt.format, "json|csv")->capture_default_str();

  // compare
  std::string cmp_a, cmp_b, cmp_out;
  std::string cmp_learner_a, cmp_learner_b;
  double alpha = 0.05;
  CLI::App* compare = app.add_subcommand("compare", "Wilcoxon comparison of two report columns");
  compare->add_option("report_a", cmp_a, "First JSON report")->required();
  compare->add_option("report_b", cmp_b, "Second JSON report (omit to compare within the first)");
  compare->add_option("--learner-a", cmp_learner_a, "Learner name inside report A");
  compare->add_option("--learner-b", cmp_learner_b, "Learner name inside report B");
  compare->add_option("--alpha", alpha, "Significance level")->capture_default_str();
  compare->add_option("--out", cmp_out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (gen_gm->parsed()) return cmd_gen_gm(gm_seed, gm_out);
  if (run->parsed()) return cmd_run(run_opt, *run);
  if (compare->parsed()) {
    const auto opt_name = [](const std::string& s) {
      return s.empty() ? std::optional<std::string>() : std::optional<std::string>(s);
    };
    return cmd_compare(cmp_a, cmp_b, opt_name(cmp_learner_a), opt_name(cmp_learner_b), alpha,
                       cmp_out);
  }
  return kExitUsage;
}
