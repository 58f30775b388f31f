#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpnb/rpnb.h"
#include "test_util.hpp"

using nlohmann::json;
using testutil::TempFile;

namespace {

// RAII for handles so failing CHECKs cannot leak.
struct DatasetHandle {
  rpnb_dataset* ptr = nullptr;
  ~DatasetHandle() { rpnb_dataset_free(ptr); }
};
struct ModelHandle {
  rpnb_model* ptr = nullptr;
  ~ModelHandle() { rpnb_model_free(ptr); }
};
struct StringHandle {
  char* ptr = nullptr;
  ~StringHandle() { rpnb_string_free(ptr); }
  std::string str() const { return ptr == nullptr ? "" : ptr; }
};

std::string toy_csv() {
  return "0.5,1.0,a\n-0.5,2.0,b\n0.7,1.1,a\n-0.7,2.2,b\n0.6,0.9,a\n-0.6,2.1,b\n";
}

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(std::string(rpnb_version()) == "0.1.0");
  CHECK(rpnb_last_error() != nullptr);
}

TEST_CASE("dataset lifecycle through the C API") {
  TempFile f("capi_csv");
  f.write(toy_csv());

  DatasetHandle ds;
  REQUIRE(rpnb_dataset_load_csv(f.path().c_str(), 0, &ds.ptr) == RPNB_OK);
  uint64_t n = 0, p = 0;
  uint32_t classes = 0;
  REQUIRE(rpnb_dataset_info(ds.ptr, &n, &p, &classes) == RPNB_OK);
  CHECK(n == 6);
  CHECK(p == 2);
  CHECK(classes == 2);

  TempFile out("capi_save");
  REQUIRE(rpnb_dataset_save_csv(ds.ptr, out.path().c_str()) == RPNB_OK);
  DatasetHandle again;
  REQUIRE(rpnb_dataset_load_csv_auto(out.path().c_str(), &again.ptr) == RPNB_OK);
  uint64_t n2 = 0;
  REQUIRE(rpnb_dataset_info(again.ptr, &n2, nullptr, nullptr) == RPNB_OK);
  CHECK(n2 == 6);
}

TEST_CASE("dataset errors map to status codes and messages") {
  DatasetHandle ds;
  CHECK(rpnb_dataset_load_csv("/no/such/file.csv", 0, &ds.ptr) == RPNB_E_IO);
  CHECK(std::string(rpnb_last_error()).find("no/such/file") != std::string::npos);

  TempFile bad("capi_bad");
  bad.write("1,x,a\n2,3,b\n");
  CHECK(rpnb_dataset_load_csv(bad.path().c_str(), 0, &ds.ptr) == RPNB_E_PARSE);

  TempFile single("capi_single");
  single.write("1,a\n2,a\n");
  CHECK(rpnb_dataset_load_csv(single.path().c_str(), 0, &ds.ptr) == RPNB_E_DATASET);

  CHECK(rpnb_dataset_load_csv(nullptr, 0, &ds.ptr) == RPNB_E_INVALID_ARGUMENT);
  CHECK(rpnb_dataset_info(nullptr, nullptr, nullptr, nullptr) == RPNB_E_INVALID_ARGUMENT);
}

TEST_CASE("the synthetic mixture is available as a handle") {
  DatasetHandle gm;
  REQUIRE(rpnb_dataset_generate_gm(1, &gm.ptr) == RPNB_OK);
  uint64_t n = 0, p = 0;
  uint32_t classes = 0;
  REQUIRE(rpnb_dataset_info(gm.ptr, &n, &p, &classes) == RPNB_OK);
  CHECK(n == 1000);
  CHECK(p == 1000);
  CHECK(classes == 3);
}

TEST_CASE("model creation, prediction, and learning") {
  ModelHandle model;
  REQUIRE(rpnb_model_create(R"({"learner":"rpnb","k":5,"q":2,"seed":3})", 3, 2, &model.ptr) ==
          RPNB_OK);

  const std::vector<double> x = {0.5, 1.0, -0.5};
  int32_t label = -1;
  std::vector<double> scores(2, 0.0);
  REQUIRE(rpnb_model_predict(model.ptr, x.data(), 3, &label, scores.data()) == RPNB_OK);
  CHECK((label == 0 || label == 1));
  CHECK(scores[0] != 0.0);

  int32_t predicted = -1;
  REQUIRE(rpnb_model_learn_one(model.ptr, x.data(), 3, 1, &predicted) == RPNB_OK);
  CHECK(predicted == label);  // same state, same prediction

  uint64_t updates = 99, seen = 99;
  REQUIRE(rpnb_model_counts(model.ptr, &updates, &seen) == RPNB_OK);
  CHECK(seen == 1);
  CHECK(updates == (predicted == 1 ? 0u : 1u));

  CHECK(rpnb_model_learn_one(model.ptr, x.data(), 3, 7, nullptr) == RPNB_E_CLASS);
  CHECK(rpnb_model_predict(model.ptr, x.data(), 2, &label, nullptr) == RPNB_E_DIMENSION);
}

TEST_CASE("model spec validation") {
  ModelHandle model;
  CHECK(rpnb_model_create("not json", 3, 2, &model.ptr) == RPNB_E_PARSE);
  CHECK(rpnb_model_create(R"({"k":5})", 3, 2, &model.ptr) == RPNB_E_INVALID_ARGUMENT);
  CHECK(rpnb_model_create(R"({"learner":"svm"})", 3, 2, &model.ptr) == RPNB_E_INVALID_ARGUMENT);
  CHECK(rpnb_model_create(R"({"learner":"rpnb","nope":1})", 3, 2, &model.ptr) ==
        RPNB_E_INVALID_ARGUMENT);
  CHECK(rpnb_model_create(nullptr, 3, 2, &model.ptr) == RPNB_E_INVALID_ARGUMENT);
}

TEST_CASE("baseline learners ride the same handle") {
  for (const char* spec : {R"({"learner":"perceptron"})", R"({"learner":"pa"})",
                           R"({"learner":"ogd","eta0":0.5})"}) {
    ModelHandle model;
    REQUIRE(rpnb_model_create(spec, 2, 2, &model.ptr) == RPNB_OK);
    const std::vector<double> x = {1.0, -1.0};
    int32_t predicted = -1;
    REQUIRE(rpnb_model_learn_one(model.ptr, x.data(), 2, 1, &predicted) == RPNB_OK);
    CHECK(predicted == 0);  // zero weights predict 0
    uint64_t updates = 0;
    REQUIRE(rpnb_model_counts(model.ptr, &updates, nullptr) == RPNB_OK);
    CHECK(updates == 1);

    // snapshots and chunked learning are ensemble-only
    StringHandle snapshot;
    CHECK(rpnb_model_save_json(model.ptr, &snapshot.ptr) == RPNB_E_STATE);
    const std::vector<int32_t> y = {1};
    CHECK(rpnb_model_learn_batch(model.ptr, x.data(), 1, 2, y.data(), nullptr) == RPNB_E_STATE);
  }
}

TEST_CASE("minibatch models take chunks, one-by-one models refuse them") {
  ModelHandle mb;
  REQUIRE(rpnb_model_create(R"({"learner":"rpnb","k":3,"q":2,"mode":"minibatch","batch_size":2})",
                            2, 2, &mb.ptr) == RPNB_OK);
  const std::vector<double> X = {0.1, 0.2, -0.1, 0.4, 0.5, -0.2, 0.3, 0.3};
  const std::vector<int32_t> y = {0, 1, 0, 1};
  std::vector<int32_t> predicted(4, -1);
  REQUIRE(rpnb_model_learn_batch(mb.ptr, X.data(), 4, 2, y.data(), predicted.data()) == RPNB_OK);
  for (int32_t v : predicted) CHECK((v == 0 || v == 1));
  CHECK(rpnb_model_learn_one(mb.ptr, X.data(), 2, 0, nullptr) == RPNB_E_STATE);

  ModelHandle obo;
  REQUIRE(rpnb_model_create(R"({"learner":"rpnb","k":3,"q":2})", 2, 2, &obo.ptr) == RPNB_OK);
  CHECK(rpnb_model_learn_batch(obo.ptr, X.data(), 4, 2, y.data(), nullptr) == RPNB_E_STATE);
}

TEST_CASE("snapshots round-trip through text") {
  ModelHandle model;
  REQUIRE(rpnb_model_create(R"({"learner":"rpnb","k":4,"q":2,"seed":9})", 3, 2, &model.ptr) ==
          RPNB_OK);
  const std::vector<double> xs = {0.5, 1.0, -0.5, 1.5, -1.0, 0.25};
  for (int i = 0; i < 10; ++i)
    REQUIRE(rpnb_model_learn_one(model.ptr, xs.data() + (i % 2) * 3, 3, i % 2, nullptr) == RPNB_OK);

  StringHandle snapshot;
  REQUIRE(rpnb_model_save_json(model.ptr, &snapshot.ptr) == RPNB_OK);
  ModelHandle back;
  REQUIRE(rpnb_model_load_json(snapshot.ptr, &back.ptr) == RPNB_OK);

  uint64_t u1 = 0, s1 = 0, u2 = 0, s2 = 0;
  REQUIRE(rpnb_model_counts(model.ptr, &u1, &s1) == RPNB_OK);
  REQUIRE(rpnb_model_counts(back.ptr, &u2, &s2) == RPNB_OK);
  CHECK(u1 == u2);
  CHECK(s1 == s2);

  const std::vector<double> probe = {0.3, -0.4, 0.8};
  std::vector<double> scores_a(2), scores_b(2);
  int32_t la = -1, lb = -1;
  REQUIRE(rpnb_model_predict(model.ptr, probe.data(), 3, &la, scores_a.data()) == RPNB_OK);
  REQUIRE(rpnb_model_predict(back.ptr, probe.data(), 3, &lb, scores_b.data()) == RPNB_OK);
  CHECK(la == lb);
  CHECK(scores_a == scores_b);

  StringHandle again;
  REQUIRE(rpnb_model_save_json(back.ptr, &again.ptr) == RPNB_OK);
  CHECK(snapshot.str() == again.str());

  ModelHandle broken;
  CHECK(rpnb_model_load_json("{}", &broken.ptr) == RPNB_E_PARSE);
}

TEST_CASE("experiments and comparisons run through the C API") {
  TempFile d1("capi_d1"), d2("capi_d2"), d3("capi_d3");
  const char* rows[] = {"0.4,1.2,a\n-0.4,2.1,b\n0.55,1.05,a\n-0.5,2.2,b\n0.45,0.95,a\n-0.45,2.0,b\n",
                        "1.4,0.2,a\n-1.2,1.1,b\n1.55,0.05,a\n-1.5,1.2,b\n1.45,-0.05,a\n-1.45,1.0,b\n",
                        "0.4,-1.2,x\n-0.4,1.1,y\n0.55,-1.05,x\n-0.5,1.2,y\n0.45,-0.95,x\n-0.45,1.0,y\n"};
  d1.write(rows[0]);
  d2.write(rows[1]);
  d3.write(rows[2]);

  const json config = {{"dataset", {d1.path(), d2.path(), d3.path()}},
                       {"learner", {"rpnb", "perceptron"}},
                       {"perms", 4},
                       {"seed", 1},
                       {"k", 4}};
  StringHandle report;
  REQUIRE(rpnb_experiment_run(config.dump().c_str(), &report.ptr) == RPNB_OK);
  const json parsed = json::parse(report.str());
  CHECK(parsed.at("runs").size() == 6);

  StringHandle csv;
  REQUIRE(rpnb_report_to_csv(report.ptr, &csv.ptr) == RPNB_OK);
  CHECK(csv.str().rfind("dataset,learner,", 0) == 0);

  StringHandle cmp;
  const rpnb_status cmp_status =
      rpnb_compare_reports(report.ptr, nullptr, "rpnb", "perceptron", 0.05, &cmp.ptr);
  if (cmp_status == RPNB_OK) {
    const json result = json::parse(cmp.str());
    CHECK(result.at("test") == "wilcoxon");
    CHECK(result.at("n_datasets") == 3);
  } else {
    // all three datasets could in principle tie; that surfaces as
    // insufficient data, not as a crash
    CHECK(cmp_status == RPNB_E_INSUFFICIENT_DATA);
  }

  StringHandle bad;
  CHECK(rpnb_experiment_run("{\"learner\":\"rpnb\"}", &bad.ptr) == RPNB_E_INVALID_ARGUMENT);
  CHECK(rpnb_experiment_run("nope", &bad.ptr) == RPNB_E_PARSE);
  CHECK(rpnb_compare_reports("nope", nullptr, nullptr, nullptr, 0.05, &bad.ptr) == RPNB_E_PARSE);
}
