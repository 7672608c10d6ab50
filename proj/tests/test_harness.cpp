#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fgtsallis/config.hpp"
#include "fgtsallis/errors.hpp"
#include "fgtsallis/harness.hpp"
#include "fgtsallis/verify.hpp"

using namespace fgt;
using nlohmann::json;

namespace {

RunConfig fixed_graph_run(LearnerKind learner, GraphSpec graph, std::size_t k, long horizon,
                          std::vector<std::uint64_t> seeds) {
  RunConfig c;
  c.learner = learner;
  c.horizon = horizon;
  c.seeds = std::move(seeds);
  c.environment.kind = EnvironmentSpec::Kind::fixed_adversarial;
  c.environment.k = k;
  c.environment.horizon = horizon;
  graph.k = k;
  c.environment.graphs = {graph};
  c.environment.seed = 7;
  return c;
}

std::vector<std::uint64_t> first_seeds(std::uint64_t n) {
  std::vector<std::uint64_t> s(n);
  for (std::uint64_t i = 0; i < n; ++i) s[i] = i + 1;
  return s;
}

}  // namespace

TEST_CASE("bound constants") {
  // Evaluated independently of the implementation.
  CHECK(doubling_constant() == doctest::Approx(78.98564253103969).epsilon(1e-12));
  CHECK(bound_self_loops(4, 1.0, 10000) == doctest::Approx(606.7916422511282).epsilon(1e-12));
  CHECK(bound_general(4, 1.0, 10000) == doctest::Approx(3.0 * 606.7916422511282).epsilon(1e-12));
  CHECK(lower_bound_constant_value(8, 2.0, 10000) ==
        doctest::Approx(9.622504486493762).epsilon(1e-12));
}

TEST_CASE("q-FTRL on the experts graph stays under its bound") {
  auto c = fixed_graph_run(LearnerKind::qftrl_thm1, {GraphSpec::Kind::experts}, 4, 10000,
                           first_seeds(20));
  const auto result = run(c);
  const double bound = 606.7916422511282;
  CHECK(result.summary.average_alpha == 1.0);
  REQUIRE(result.summary.bound.has_value());
  CHECK(*result.summary.bound == doctest::Approx(bound));
  CHECK(result.summary.mean_regret <= bound);
  CHECK(result.summary.mean_pseudo_regret <= bound);
}

TEST_CASE("uniform play against constant losses") {
  const std::size_t k = 4;
  const long horizon = 2000;
  auto c = fixed_graph_run(LearnerKind::uniform_baseline, {GraphSpec::Kind::experts}, k, horizon,
                           {3});
  c.environment.losses.kind = LossSpec::Kind::constant;
  c.environment.losses.values = {0.0, 0.25, 0.5, 0.75};
  const auto r = run(c).summary.seeds.front();
  // avg - min = 0.375 per round.
  CHECK(r.best_action == 0);
  CHECK(r.best_loss == 0.0);
  CHECK(r.pseudo_regret == doctest::Approx(horizon * 0.375).epsilon(1e-12));
  const double sigma = std::sqrt(horizon * 0.078125);  // variance of i/4 under uniform i
  CHECK(std::abs(r.regret - horizon * 0.375) <= 4.0 * sigma);
}

TEST_CASE("average independence number of an alternating schedule") {
  RunConfig c;
  c.learner = LearnerKind::uniform_baseline;
  c.horizon = 100;
  c.seeds = {1, 2};
  c.environment.kind = EnvironmentSpec::Kind::time_varying;
  c.environment.k = 4;
  c.environment.horizon = 100;
  c.environment.graphs = {{GraphSpec::Kind::experts}, {GraphSpec::Kind::bandit}};
  c.environment.schedule = GraphSchedule::periodic;
  c.environment.pattern = {0, 1};
  const auto summary = run(c).summary;
  CHECK(summary.average_alpha == doctest::Approx(2.5).epsilon(1e-15));
  for (const auto& s : summary.seeds) CHECK(s.alpha_sum == 250.0);
}

TEST_CASE("horizon guards") {
  auto c = fixed_graph_run(LearnerKind::qftrl_thm1, {GraphSpec::Kind::bandit}, 3, 1,
                           first_seeds(30));
  const auto summary = run(c).summary;
  for (const auto& s : summary.seeds) {
    CHECK(s.regret >= -1.0);
    CHECK(s.regret <= 1.0);
  }
  auto zero = fixed_graph_run(LearnerKind::qftrl_thm1, {GraphSpec::Kind::bandit}, 3, 0, {1});
  CHECK_THROWS_AS(zero.validate(), ConfigError);
  CHECK_THROWS_AS(run(zero), ConfigError);
  auto none = fixed_graph_run(LearnerKind::qftrl_thm1, {GraphSpec::Kind::bandit}, 3, 5, {});
  CHECK_THROWS_AS(run(none), ConfigError);
}

TEST_CASE("records: accounting identity and determinism") {
  RunConfig c;
  c.learner = LearnerKind::doubling;
  c.horizon = 1500;
  c.seeds = {4, 5};
  c.environment.kind = EnvironmentSpec::Kind::time_varying;
  c.environment.k = 6;
  c.environment.horizon = 1500;
  c.environment.graphs = {{GraphSpec::Kind::experts}, {GraphSpec::Kind::bandit}};
  c.environment.schedule = GraphSchedule::uniform_random;
  c.environment.seed = 11;

  auto stream = [](const RunResult& r, std::size_t i) {
    std::ostringstream out;
    write_records_jsonl(r.records[i], r.summary.seeds[i], out);
    return out.str();
  };
  const auto a = run(c, true);
  const auto b = run(c, true);
  REQUIRE(a.records.size() == 2);
  CHECK(stream(a, 0) == stream(b, 0));
  CHECK(stream(a, 1) == stream(b, 1));
  CHECK(stream(a, 0) != stream(a, 1));

  // Regret recomputed from the JSONL stream alone.
  std::istringstream in(stream(a, 0));
  std::string line;
  double learner_loss = 0.0;
  long rounds = 0;
  long last_t = 0;
  json trailer;
  while (std::getline(in, line)) {
    const auto j = json::parse(line);
    if (j.contains("type")) {
      trailer = j;
      continue;
    }
    CHECK(j.at("t").get<long>() == last_t + 1);
    last_t = j.at("t").get<long>();
    learner_loss += j.at("loss").get<double>();
    ++rounds;
  }
  CHECK(rounds == 1500);
  const auto losses = trailer.at("action_losses").get<std::vector<double>>();
  const double best = *std::min_element(losses.begin(), losses.end());
  CHECK(learner_loss - best == doctest::Approx(trailer.at("regret").get<double>()).epsilon(1e-12));
  CHECK(trailer.at("regret").get<double>() == doctest::Approx(a.summary.seeds[0].regret));

  // Distinct epochs in the stream stay within ceil(log2 of the average alpha).
  for (std::size_t i = 0; i < 2; ++i) {
    std::vector<int> epochs;
    for (const auto& rec : a.records[i]) epochs.push_back(rec.epoch);
    std::sort(epochs.begin(), epochs.end());
    const auto distinct = std::unique(epochs.begin(), epochs.end()) - epochs.begin();
    const double avg = a.summary.seeds[i].alpha_sum / 1500.0;
    CHECK(distinct - 1 <= static_cast<long>(std::ceil(std::log2(avg))));
  }

  std::ostringstream csv;
  write_records_csv(a.records[0], csv);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1501);
}

TEST_CASE("module errors abort with the round index") {
  GraphSpec star;
  star.kind = GraphSpec::Kind::no_selfloop_star;
  star.hubs = 2;
  auto c = fixed_graph_run(LearnerKind::qftrl_thm1, star, 2, 50, {1});
  try {
    run(c);
    FAIL("expected RunAborted");
  } catch (const RunAborted& e) {
    CHECK(e.round() == 1);
  }
  c.learner = LearnerKind::qftrl_thm2;
  CHECK_NOTHROW(run(c));
}

TEST_CASE("parallel_for covers every index and propagates failures") {
  std::vector<int> hits(100, 0);
  parallel_for(100, [&](std::size_t i) { ++hits[i]; }, 4);
  CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  CHECK_THROWS_AS(parallel_for(
                      10, [](std::size_t i) {
                        if (i == 7) throw InvalidParams("boom");
                      },
                      3),
                  InvalidParams);
}

TEST_CASE("config parsing") {
  const json good = json::parse(R"({
    "learner": "doubling", "T": 100, "seeds": 3,
    "environment": {"kind": "time_varying", "K": 4,
                    "graphs": [{"kind": "experts"}, {"kind": "bandit"}],
                    "schedule": "periodic", "pattern": [0, 1]}})");
  const auto c = parse_run_config(good);
  CHECK(c.learner == LearnerKind::doubling);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.environment.horizon == 100);
  CHECK(c.environment.pattern == std::vector<std::size_t>{0, 1});
  CHECK_NOTHROW(run(c));

  auto broken = [&](auto&& edit) {
    json j = good;
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(parse_run_config(broken([](json& j) { j["learner"] = "exp3"; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(broken([](json& j) { j.erase("seeds"); })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(broken([](json& j) { j["seeds"] = 0; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(broken([](json& j) { j["T"] = "ten"; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(broken([](json& j) { j["T"] = 0; })), ConfigError);
  CHECK_THROWS_AS(parse_run_config(json::array()), ConfigError);
  CHECK_THROWS_AS(
      parse_run_config(broken([](json& j) { j["environment"]["graphs"][0]["kind"] = "torus"; })),
      ConfigError);
  CHECK_THROWS_AS(parse_learner_kind("nope"), ConfigError);
  CHECK_THROWS_AS(parse_verify_suite("nope"), ConfigError);
  CHECK_THROWS_AS(load_json_file("/nonexistent/config.json"), ConfigError);

  const auto sweep_config = parse_sweep_config(json::parse(
      R"({"K": [16], "alpha": [1, 4], "T": [100], "learners": ["qftrl_thm1"], "seeds": 2})"));
  CHECK(sweep_config.alphas == std::vector<std::size_t>{1, 4});
  CHECK_THROWS_AS(parse_sweep_config(json::parse(R"({"K": [], "alpha": [1], "T": [10],
      "learners": ["qftrl_thm1"], "seeds": 1})")),
                  ConfigError);
}

TEST_CASE("sweep over the clique family") {
  SweepConfig c;
  c.ks = {16};
  c.alphas = {1, 2, 4, 8, 16};
  c.horizons = {200};
  c.learners = {LearnerKind::qftrl_thm1};
  c.seeds = {1, 2};
  const auto rows = sweep(c);
  REQUIRE(rows.size() == 10);
  for (const auto& row : rows) {
    CHECK(row.exact_alpha == row.alpha);
    REQUIRE(row.q.has_value());
    CHECK(*row.q == tuned_q(16, static_cast<double>(row.alpha)));
    const auto params = tune({16, static_cast<double>(row.alpha), 200, TuningVariant::self_loops});
    CHECK(*row.eta == params.eta);
  }
  CHECK(*rows.back().q == 0.5);
  CHECK(balanced_cliques(10, 3) == std::vector<std::size_t>{4, 3, 3});

  std::ostringstream csv;
  write_sweep_csv(rows, csv);
  const std::string text = csv.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);

  c.alphas = {32};
  CHECK_THROWS_AS(sweep(c), ConfigError);
}

TEST_CASE("sweep regret grows with the horizon") {
  SweepConfig c;
  c.ks = {16};
  c.alphas = {4};
  c.horizons = {500, 2000, 8000};
  c.learners = {LearnerKind::qftrl_thm1};
  for (std::uint64_t s = 1; s <= 20; ++s) c.seeds.push_back(s);
  const auto rows = sweep(c);
  std::vector<double> means(3, 0.0);
  for (const auto& row : rows) {
    const auto h = std::find(c.horizons.begin(), c.horizons.end(), row.horizon) - c.horizons.begin();
    means[h] += row.regret / 20.0;
  }
  CHECK(means[0] <= means[1]);
  CHECK(means[1] <= means[2]);
}

TEST_CASE("verify suites pass on a small budget") {
  VerifyBudget budget;
  budget.lemma1_max_k = 4;
  budget.lemma1_samples = 20;
  budget.estimator_instances = 100;
  budget.solver_instances = 100;
  budget.doubling_seeds = 2;
  budget.doubling_horizon = 800;
  const auto report = verify(VerifySuite::all, budget);
  for (const auto& e : report.entries) {
    INFO(e.suite << ": " << e.invariant << " " << e.detail);
    CHECK(e.passed);
    CHECK(e.cases > 0);
  }
  CHECK(report.passed());
  const auto j = report.to_json();
  CHECK(j.at("passed").get<bool>());
  CHECK(j.at("entries").size() == report.entries.size());
}
