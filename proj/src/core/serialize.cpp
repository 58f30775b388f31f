#include "core/serialize.hpp"

#include "core/error.hpp"

namespace rpnb {

namespace {

using nlohmann::json;

template <typename T>
T require(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(Status::ParseError, std::string("snapshot: missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    fail(Status::ParseError, std::string("snapshot: field '") + key + "' has the wrong type");
  }
}

}  // namespace

json gnb_to_json(const GnbModel& model) {
  json stats = json::array();
  for (std::size_t m = 0; m < model.num_classes; ++m) {
    json row = json::array();
    for (std::size_t j = 0; j < model.dim; ++j) {
      const ClassFeatureStat& s = model.stat(m, j);
      row.push_back(json::array({s.mu, s.sigma2}));
    }
    stats.push_back(std::move(row));
  }
  return json{{"M", model.num_classes},
              {"q", model.dim},
              {"prior_mode", to_string(model.prior_mode)},
              {"variance_floor", model.variance_floor},
              {"class_counts", model.class_counts},
              {"stats", std::move(stats)}};
}

GnbModel gnb_from_json(const json& j) {
  GnbModel model;
  model.num_classes = require<std::size_t>(j, "M");
  model.dim = require<std::size_t>(j, "q");
  model.prior_mode = prior_mode_from_string(require<std::string>(j, "prior_mode"));
  model.variance_floor = require<double>(j, "variance_floor");
  model.class_counts = require<std::vector<std::uint64_t>>(j, "class_counts");
  if (model.num_classes < 2 || model.dim == 0)
    fail(Status::ParseError, "snapshot: invalid model dimensions");
  if (model.class_counts.size() != model.num_classes)
    fail(Status::ParseError, "snapshot: class_counts length mismatch");

  if (!j.contains("stats")) fail(Status::ParseError, "snapshot: missing field 'stats'");
  const json& stats = j.at("stats");
  if (!stats.is_array() || stats.size() != model.num_classes)
    fail(Status::ParseError, "snapshot: stats must have one row per class");
  model.stats.reserve(model.num_classes * model.dim);
  for (const json& row : stats) {
    if (!row.is_array() || row.size() != model.dim)
      fail(Status::ParseError, "snapshot: stats row length mismatch");
    for (const json& cell : row) {
      if (!cell.is_array() || cell.size() != 2)
        fail(Status::ParseError, "snapshot: each stat must be [mu, sigma2]");
      model.stats.push_back(ClassFeatureStat{cell[0].get<double>(), cell[1].get<double>()});
    }
  }
  return model;
}

json rpnb_to_json(const RpnbModel& model) {
  const RpnbConfig& c = model.config;
  json config{{"k", c.k},
              {"q", c.q},
              {"scheme", to_string(c.scheme)},
              {"combiner", to_string(c.combiner)},
              {"mode", to_string(c.mode)},
              {"batch_size", c.batch_size},
              {"seed", c.seed},
              {"mu0", c.mu0},
              {"sigma2_0", c.sigma2_0},
              {"prior_mode", to_string(c.prior_mode)},
              {"variance_floor", c.variance_floor},
              {"update_always", c.update_always}};
  json bases = json::array();
  for (const GnbModel& base : model.bases) bases.push_back(gnb_to_json(base));
  return json{{"config", std::move(config)}, {"p", model.p},
              {"M", model.num_classes},      {"seed", c.seed},
              {"update_count", model.update_count}, {"seen_count", model.seen_count},
              {"bases", std::move(bases)}};
}

RpnbModel rpnb_from_json(const json& j) {
  if (!j.contains("config")) fail(Status::ParseError, "snapshot: missing field 'config'");
  const json& jc = j.at("config");
  RpnbConfig config;
  config.k = require<std::size_t>(jc, "k");
  config.q = require<std::size_t>(jc, "q");
  config.scheme = projection_scheme_from_string(require<std::string>(jc, "scheme"));
  config.combiner = combiner_from_string(require<std::string>(jc, "combiner"));
  config.mode = learn_mode_from_string(require<std::string>(jc, "mode"));
  config.batch_size = require<std::size_t>(jc, "batch_size");
  config.seed = require<std::uint64_t>(jc, "seed");
  config.mu0 = require<double>(jc, "mu0");
  config.sigma2_0 = require<double>(jc, "sigma2_0");
  config.prior_mode = prior_mode_from_string(require<std::string>(jc, "prior_mode"));
  config.variance_floor = require<double>(jc, "variance_floor");
  config.update_always = require<bool>(jc, "update_always");

  RpnbModel model = new_rpnb(config, require<std::size_t>(j, "p"), require<std::size_t>(j, "M"));
  model.update_count = require<std::uint64_t>(j, "update_count");
  model.seen_count = require<std::uint64_t>(j, "seen_count");

  if (!j.contains("bases")) fail(Status::ParseError, "snapshot: missing field 'bases'");
  const json& bases = j.at("bases");
  if (!bases.is_array() || bases.size() != config.k)
    fail(Status::ParseError, "snapshot: expected one base per ensemble member");
  for (std::size_t k = 0; k < config.k; ++k) {
    GnbModel base = gnb_from_json(bases[k]);
    if (base.num_classes != model.num_classes || base.dim != config.q)
      fail(Status::ParseError, "snapshot: base dimensions disagree with envelope");
    model.bases[k] = std::move(base);
  }
  return model;
}

}  // namespace rpnb
