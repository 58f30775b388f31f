#include "rpnb/rpnb.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>

#include <json.hpp>

#include "core/baselines.hpp"
#include "core/data.hpp"
#include "core/ensemble.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/serialize.hpp"

using nlohmann::json;

struct rpnb_dataset {
  rpnb::Dataset ds;
};

// Exactly one of the two models is engaged.
struct rpnb_model {
  std::optional<rpnb::RpnbModel> ensemble;
  std::optional<rpnb::LinearModel> linear;
};

namespace {

thread_local std::string g_last_error;

rpnb_status map_status(rpnb::Status status) {
  switch (status) {
    case rpnb::Status::Ok:
      return RPNB_OK;
    case rpnb::Status::InvalidArgument:
      return RPNB_E_INVALID_ARGUMENT;
    case rpnb::Status::DimensionMismatch:
      return RPNB_E_DIMENSION;
    case rpnb::Status::InvalidClass:
      return RPNB_E_CLASS;
    case rpnb::Status::InvalidBatch:
      return RPNB_E_BATCH;
    case rpnb::Status::InvalidDataset:
      return RPNB_E_DATASET;
    case rpnb::Status::ParseError:
      return RPNB_E_PARSE;
    case rpnb::Status::IoError:
      return RPNB_E_IO;
    case rpnb::Status::InsufficientData:
      return RPNB_E_INSUFFICIENT_DATA;
    case rpnb::Status::InvalidState:
      return RPNB_E_STATE;
    case rpnb::Status::Internal:
      return RPNB_E_INTERNAL;
  }
  return RPNB_E_INTERNAL;
}

template <typename Fn>
rpnb_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    g_last_error.clear();
    return RPNB_OK;
  } catch (const rpnb::Error& e) {
    g_last_error = e.what();
    return map_status(e.status());
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return RPNB_E_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RPNB_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return RPNB_E_INTERNAL;
  }
}

void require_arg(bool ok, const char* what) {
  if (!ok) rpnb::fail(rpnb::Status::InvalidArgument, std::string("null argument: ") + what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) rpnb::fail(rpnb::Status::Internal, "out of memory");
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

json parse_json(const char* text, const char* what) {
  require_arg(text != nullptr, what);
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded())
    rpnb::fail(rpnb::Status::ParseError, std::string("invalid JSON in ") + what);
  return j;
}

rpnb::Prediction model_predict(const rpnb_model& model, const double* x, uint64_t n_features) {
  const std::span<const double> xs{x, static_cast<std::size_t>(n_features)};
  return model.ensemble ? model.ensemble->predict(xs) : model.linear->predict(xs);
}

std::size_t model_num_classes(const rpnb_model& model) {
  return model.ensemble ? model.ensemble->num_classes : model.linear->num_classes;
}

}  // namespace

extern "C" {

const char* rpnb_version(void) { return "0.1.0"; }

const char* rpnb_last_error(void) { return g_last_error.c_str(); }

rpnb_status rpnb_dataset_load_csv(const char* path, int has_header, rpnb_dataset** out) {
  return guarded([&] {
    require_arg(path != nullptr, "path");
    require_arg(out != nullptr, "out");
    *out = new rpnb_dataset{rpnb::load_csv(path, has_header != 0)};
  });
}

rpnb_status rpnb_dataset_load_csv_auto(const char* path, rpnb_dataset** out) {
  return guarded([&] {
    require_arg(path != nullptr, "path");
    require_arg(out != nullptr, "out");
    *out = new rpnb_dataset{rpnb::load_csv_auto(path)};
  });
}

rpnb_status rpnb_dataset_generate_gm(uint64_t seed, rpnb_dataset** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out");
    *out = new rpnb_dataset{rpnb::generate_gm(seed)};
  });
}

rpnb_status rpnb_dataset_save_csv(const rpnb_dataset* dataset, const char* path) {
  return guarded([&] {
    require_arg(dataset != nullptr, "dataset");
    require_arg(path != nullptr, "path");
    rpnb::save_csv(dataset->ds, path);
  });
}

rpnb_status rpnb_dataset_info(const rpnb_dataset* dataset, uint64_t* n_rows, uint64_t* n_features,
                              uint32_t* n_classes) {
  return guarded([&] {
    require_arg(dataset != nullptr, "dataset");
    if (n_rows != nullptr) *n_rows = dataset->ds.n();
    if (n_features != nullptr) *n_features = dataset->ds.p();
    if (n_classes != nullptr) *n_classes = static_cast<uint32_t>(dataset->ds.num_classes);
  });
}

void rpnb_dataset_free(rpnb_dataset* dataset) { delete dataset; }

rpnb_status rpnb_model_create(const char* spec_json, uint64_t n_features, uint32_t n_classes,
                              rpnb_model** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out");
    const json spec = parse_json(spec_json, "model spec");
    if (!spec.is_object() || !spec.contains("learner") || !spec.at("learner").is_string())
      rpnb::fail(rpnb::Status::InvalidArgument, "model spec needs a string 'learner' field");
    const std::string learner = spec.at("learner").get<std::string>();
    const std::size_t p = static_cast<std::size_t>(n_features);
    const std::size_t M = static_cast<std::size_t>(n_classes);

    auto model = std::make_unique<rpnb_model>();
    if (learner == "rpnb") {
      model->ensemble = rpnb::new_rpnb(rpnb::rpnb_config_from_spec(spec, p, 0), p, M);
    } else {
      for (const auto& [key, value] : spec.items()) {
        if (key != "learner" && key != "eta0")
          rpnb::fail(rpnb::Status::InvalidArgument, "model spec: unknown key '" + key + "'");
      }
      double eta0 = 1.0;
      if (spec.contains("eta0")) eta0 = spec.at("eta0").get<double>();
      model->linear = rpnb::make_linear(rpnb::linear_algorithm_from_string(learner), p, M, eta0);
    }
    *out = model.release();
  });
}

rpnb_status rpnb_model_predict(const rpnb_model* model, const double* x, uint64_t n_features,
                               int32_t* label_out, double* scores_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model");
    require_arg(x != nullptr, "x");
    const rpnb::Prediction pred = model_predict(*model, x, n_features);
    if (label_out != nullptr) *label_out = pred.label;
    if (scores_out != nullptr)
      std::memcpy(scores_out, pred.scores.data(), pred.scores.size() * sizeof(double));
  });
}

rpnb_status rpnb_model_learn_one(rpnb_model* model, const double* x, uint64_t n_features,
                                 int32_t label, int32_t* predicted_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model");
    require_arg(x != nullptr, "x");
    const std::span<const double> xs{x, static_cast<std::size_t>(n_features)};
    const rpnb::Prediction pred =
        model->ensemble ? model->ensemble->learn_one(xs, label) : model->linear->learn(xs, label);
    if (predicted_out != nullptr) *predicted_out = pred.label;
  });
}

rpnb_status rpnb_model_learn_batch(rpnb_model* model, const double* x, uint64_t n_rows,
                                   uint64_t n_features, const int32_t* labels,
                                   int32_t* predicted_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model");
    require_arg(x != nullptr, "x");
    require_arg(labels != nullptr, "labels");
    if (!model->ensemble)
      rpnb::fail(rpnb::Status::InvalidState, "learn_batch is only available on rpnb models");

    rpnb::Matrix X(static_cast<std::size_t>(n_rows), static_cast<std::size_t>(n_features));
    std::memcpy(X.data.data(), x, X.data.size() * sizeof(double));
    std::vector<int> y(labels, labels + n_rows);
    const std::vector<rpnb::Prediction> preds = model->ensemble->learn_batch(X, y);
    if (predicted_out != nullptr) {
      for (std::size_t i = 0; i < preds.size(); ++i) predicted_out[i] = preds[i].label;
    }
  });
}

rpnb_status rpnb_model_counts(const rpnb_model* model, uint64_t* update_count,
                              uint64_t* seen_count) {
  return guarded([&] {
    require_arg(model != nullptr, "model");
    const uint64_t updates =
        model->ensemble ? model->ensemble->update_count : model->linear->update_count;
    const uint64_t seen = model->ensemble ? model->ensemble->seen_count : model->linear->seen_count;
    if (update_count != nullptr) *update_count = updates;
    if (seen_count != nullptr) *seen_count = seen;
  });
}

rpnb_status rpnb_model_save_json(const rpnb_model* model, char** json_out) {
  return guarded([&] {
    require_arg(model != nullptr, "model");
    require_arg(json_out != nullptr, "json_out");
    if (!model->ensemble)
      rpnb::fail(rpnb::Status::InvalidState, "snapshots are only supported for rpnb models");
    *json_out = copy_string(rpnb::rpnb_to_json(*model->ensemble).dump());
  });
}

rpnb_status rpnb_model_load_json(const char* json_text, rpnb_model** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out");
    const json j = parse_json(json_text, "model snapshot");
    auto model = std::make_unique<rpnb_model>();
    model->ensemble = rpnb::rpnb_from_json(j);
    *out = model.release();
  });
}

void rpnb_model_free(rpnb_model* model) { delete model; }

rpnb_status rpnb_experiment_run(const char* config_json, char** report_json_out) {
  return guarded([&] {
    require_arg(report_json_out != nullptr, "report_json_out");
    const json config = parse_json(config_json, "experiment config");
    const json report = rpnb::run_experiment(rpnb::experiment_config_from_json(config));
    *report_json_out = copy_string(report.dump(2) + "\n");
  });
}

rpnb_status rpnb_report_to_csv(const char* report_json, char** csv_out) {
  return guarded([&] {
    require_arg(csv_out != nullptr, "csv_out");
    const json report = parse_json(report_json, "report");
    *csv_out = copy_string(rpnb::report_to_csv(report));
  });
}

rpnb_status rpnb_compare_reports(const char* report_a_json, const char* report_b_json,
                                 const char* learner_a, const char* learner_b, double alpha,
                                 char** result_json_out) {
  return guarded([&] {
    require_arg(result_json_out != nullptr, "result_json_out");
    const json report_a = parse_json(report_a_json, "report A");
    const json report_b = report_b_json == nullptr ? report_a : parse_json(report_b_json, "report B");
    const std::optional<std::string> name_a =
        learner_a == nullptr ? std::nullopt : std::optional<std::string>(learner_a);
    const std::optional<std::string> name_b =
        learner_b == nullptr ? std::nullopt : std::optional<std::string>(learner_b);
    const json result = rpnb::compare_reports(report_a, report_b, name_a, name_b, alpha);
    *result_json_out = copy_string(result.dump(2) + "\n");
  });
}

void rpnb_string_free(char* s) { std::free(s); }

}  // extern "C"
