#include "fgtsallis/config.hpp"

#include <fstream>

#include "fgtsallis/errors.hpp"

namespace fgt {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return get_or<T>(j, key, T{});
}

template <class T>
std::optional<T> optional_key(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_or<T>(j, key, T{});
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

std::vector<std::uint64_t> parse_seeds(const json& j) {
  if (!j.contains("seeds")) throw ConfigError("missing key 'seeds'");
  const json& s = j.at("seeds");
  if (s.is_number_unsigned() || s.is_number_integer()) {
    const long n = s.get<long>();
    if (n < 1) throw ConfigError("seed count must be positive");
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = i + 1;
    return seeds;
  }
  return get_or<std::vector<std::uint64_t>>(j, "seeds", {});
}

}  // namespace

GraphSpec parse_graph_spec(const json& j) {
  require_object(j, "graph spec");
  GraphSpec g;
  const auto kind = require<std::string>(j, "kind");
  if (kind == "bandit") {
    g.kind = GraphSpec::Kind::bandit;
  } else if (kind == "experts") {
    g.kind = GraphSpec::Kind::experts;
  } else if (kind == "disjoint_cliques") {
    g.kind = GraphSpec::Kind::disjoint_cliques;
  } else if (kind == "erdos_renyi") {
    g.kind = GraphSpec::Kind::erdos_renyi;
  } else if (kind == "no_selfloop_star") {
    g.kind = GraphSpec::Kind::no_selfloop_star;
  } else {
    throw ConfigError("unknown graph kind '" + kind + "'");
  }
  g.k = get_or<std::size_t>(j, "K", 0);
  g.sizes = get_or<std::vector<std::size_t>>(j, "sizes", {});
  g.prob = get_or<double>(j, "prob", 0.0);
  g.seed = get_or<std::uint64_t>(j, "seed", 0);
  g.hubs = get_or<std::size_t>(j, "hubs", 0);
  return g;
}

LossSpec parse_loss_spec(const json& j) {
  require_object(j, "loss spec");
  LossSpec l;
  const auto kind = get_or<std::string>(j, "kind", "bernoulli");
  if (kind == "bernoulli") {
    l.kind = LossSpec::Kind::bernoulli;
  } else if (kind == "piecewise_best") {
    l.kind = LossSpec::Kind::piecewise_best;
  } else if (kind == "shifting") {
    l.kind = LossSpec::Kind::shifting;
  } else if (kind == "constant") {
    l.kind = LossSpec::Kind::constant;
  } else {
    throw ConfigError("unknown loss kind '" + kind + "'");
  }
  l.mean = get_or(j, "mean", l.mean);
  l.gap = get_or(j, "gap", l.gap);
  l.best = get_or(j, "best", l.best);
  l.means = get_or(j, "means", l.means);
  l.segment = get_or(j, "segment", l.segment);
  l.period = get_or(j, "period", l.period);
  l.amplitude = get_or(j, "amplitude", l.amplitude);
  l.values = get_or(j, "values", l.values);
  return l;
}

EnvironmentSpec parse_environment_spec(const json& j, long horizon) {
  require_object(j, "environment");
  EnvironmentSpec e;
  const auto kind = require<std::string>(j, "kind");
  if (kind == "fixed_adversarial") {
    e.kind = EnvironmentSpec::Kind::fixed_adversarial;
  } else if (kind == "time_varying") {
    e.kind = EnvironmentSpec::Kind::time_varying;
  } else if (kind == "mtb_lower_bound") {
    e.kind = EnvironmentSpec::Kind::mtb_lower_bound;
  } else {
    throw ConfigError("unknown environment kind '" + kind + "'");
  }
  e.k = require<std::size_t>(j, "K");
  e.horizon = horizon;
  e.seed = get_or<std::uint64_t>(j, "seed", 0);
  if (j.contains("graphs")) {
    if (!j.at("graphs").is_array()) throw ConfigError("'graphs' must be an array");
    for (const auto& g : j.at("graphs")) e.graphs.push_back(parse_graph_spec(g));
  }
  const auto schedule = get_or<std::string>(j, "schedule", "fixed");
  if (schedule == "fixed") {
    e.schedule = GraphSchedule::fixed;
  } else if (schedule == "periodic") {
    e.schedule = GraphSchedule::periodic;
  } else if (schedule == "uniform_random") {
    e.schedule = GraphSchedule::uniform_random;
  } else {
    throw ConfigError("unknown schedule '" + schedule + "'");
  }
  e.pattern = get_or(j, "pattern", e.pattern);
  if (j.contains("losses")) e.losses = parse_loss_spec(j.at("losses"));
  if (j.contains("mtb")) {
    const json& m = j.at("mtb");
    require_object(m, "mtb");
    e.mtb.alpha = get_or(m, "alpha", e.mtb.alpha);
    e.mtb.target = optional_key<NodeId>(m, "target");
    e.mtb.c = get_or(m, "c", e.mtb.c);
    e.mtb.epsilon = optional_key<double>(m, "epsilon");
  }
  if (e.kind != EnvironmentSpec::Kind::mtb_lower_bound && e.graphs.empty()) {
    throw ConfigError("environment needs a 'graphs' list");
  }
  return e;
}

RunConfig parse_run_config(const json& j) {
  require_object(j, "run config");
  RunConfig c;
  c.learner = parse_learner_kind(require<std::string>(j, "learner"));
  c.horizon = require<long>(j, "T");
  c.seeds = parse_seeds(j);
  c.output_dir = get_or<std::string>(j, "output", "");
  c.replay_path = get_or<std::string>(j, "replay", "");
  c.vary_environment = get_or(j, "vary_environment", true);
  if (j.contains("tuning")) {
    const json& t = j.at("tuning");
    require_object(t, "tuning");
    c.tuning.q = optional_key<double>(t, "q");
    c.tuning.eta = optional_key<double>(t, "eta");
    c.tuning.alpha = optional_key<double>(t, "alpha");
  }
  if (c.replay_path.empty()) {
    if (!j.contains("environment")) throw ConfigError("missing key 'environment'");
    c.environment = parse_environment_spec(j.at("environment"), c.horizon);
  }
  c.validate();
  return c;
}

SweepConfig parse_sweep_config(const json& j) {
  require_object(j, "sweep config");
  SweepConfig s;
  s.ks = require<std::vector<std::size_t>>(j, "K");
  s.alphas = require<std::vector<std::size_t>>(j, "alpha");
  s.horizons = require<std::vector<long>>(j, "T");
  for (const auto& name : require<std::vector<std::string>>(j, "learners")) {
    s.learners.push_back(parse_learner_kind(name));
  }
  s.seeds = parse_seeds(j);
  if (j.contains("losses")) s.losses = parse_loss_spec(j.at("losses"));
  s.environment_seed = get_or<std::uint64_t>(j, "environment_seed", 0);
  s.validate();
  return s;
}

VerifyBudget parse_verify_budget(const json& j) {
  require_object(j, "verify budget");
  VerifyBudget b;
  b.lemma1_max_k = get_or(j, "lemma1_max_k", b.lemma1_max_k);
  b.lemma1_samples = get_or(j, "lemma1_samples", b.lemma1_samples);
  b.estimator_instances = get_or(j, "estimator_instances", b.estimator_instances);
  b.estimator_max_k = get_or(j, "estimator_max_k", b.estimator_max_k);
  b.solver_instances = get_or(j, "solver_instances", b.solver_instances);
  b.solver_max_k = get_or(j, "solver_max_k", b.solver_max_k);
  b.doubling_seeds = get_or(j, "doubling_seeds", b.doubling_seeds);
  b.doubling_horizon = get_or(j, "doubling_horizon", b.doubling_horizon);
  b.seed = get_or(j, "seed", b.seed);
  if (b.lemma1_max_k < 1 || b.lemma1_max_k > 8) throw ConfigError("lemma1_max_k must be in 1..8");
  if (b.estimator_max_k < 1 || b.solver_max_k < 2 || b.doubling_horizon < 1) {
    throw ConfigError("verify budget sizes out of range");
  }
  return b;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
}

}  // namespace fgt
