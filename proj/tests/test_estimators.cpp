#include <doctest.h>

#include <algorithm>
#include <optional>
#include <vector>

#include "fgtsallis/errors.hpp"
#include "fgtsallis/estimators.hpp"
#include "fgtsallis/oracles.hpp"
#include "fgtsallis/random.hpp"

using namespace fgt;

namespace {

FeedbackGraph loopless_edge() {
  const Edge e[] = {{0, 1}};
  return FeedbackGraph::from_edges(2, e);
}

// K=3, self-loops plus the edge {1,2} (0-based {0,1}).
FeedbackGraph pair_plus_singleton() {
  const Edge e[] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}};
  return FeedbackGraph::from_edges(3, e);
}

}  // namespace

TEST_CASE("neighborhood probability") {
  const ActionDistribution p({0.2, 0.3, 0.5});
  for (NodeId i = 0; i < 3; ++i) {
    CHECK(neighborhood_prob(experts_graph(3), p, i) == doctest::Approx(1.0));
    CHECK(neighborhood_prob(bandit_graph(3), p, i) == p[i]);
  }
  CHECK(neighborhood_prob(pair_plus_singleton(), p, 0) == doctest::Approx(0.5));
}

TEST_CASE("round observation reveals the played neighborhood") {
  const auto g = pair_plus_singleton();
  const std::vector<double> losses{0.1, 0.2, 0.3};
  const RoundObservation obs(g, 1, losses);
  CHECK(obs.observed()[0] == 0.1);
  CHECK(obs.observed()[1] == 0.2);
  CHECK_FALSE(obs.observed()[2].has_value());

  CHECK_THROWS_AS(RoundObservation(g, 3, losses), InvalidParams);
  const std::vector<double> bad{0.1, 1.5, 0.3};
  CHECK_THROWS_AS(RoundObservation(g, 0, bad), InvalidParams);
  std::vector<std::optional<double>> extra{0.1, 0.2, 0.3};
  CHECK_THROWS_AS(RoundObservation(g, 0, extra), InvalidParams);
  std::vector<std::optional<double>> missing{0.1, std::nullopt, std::nullopt};
  CHECK_THROWS_AS(RoundObservation(g, 0, missing), InvalidParams);
}

TEST_CASE("basic estimator") {
  SUBCASE("complete graph returns the true losses") {
    const auto g = experts_graph(3);
    const ActionDistribution p({0.2, 0.3, 0.5});
    const std::vector<double> losses{0.4, 0.9, 0.0};
    for (NodeId played = 0; played < 3; ++played) {
      const auto est = estimate_basic(RoundObservation(g, played, losses), p);
      for (NodeId i = 0; i < 3; ++i) CHECK(est.values[i] == doctest::Approx(losses[i]));
    }
  }
  SUBCASE("bandit graph") {
    const std::vector<double> losses{0.3, 0.8};
    const auto est =
        estimate_basic(RoundObservation(bandit_graph(2), 1, losses), ActionDistribution({0.5, 0.5}));
    CHECK(est.values[0] == 0.0);
    CHECK(est.values[1] == doctest::Approx(1.6));
  }
  SUBCASE("pair plus singleton") {
    const std::vector<double> losses{1.0, 1.0, 1.0};
    const auto est = estimate_basic(RoundObservation(pair_plus_singleton(), 0, losses),
                                    ActionDistribution({0.2, 0.3, 0.5}));
    CHECK(est.values[0] == doctest::Approx(2.0));
    CHECK(est.values[1] == doctest::Approx(2.0));
    CHECK(est.values[2] == 0.0);
  }
  SUBCASE("errors") {
    const std::vector<double> losses{0.5, 0.5};
    CHECK_THROWS_AS(
        estimate_basic(RoundObservation(loopless_edge(), 0, losses), ActionDistribution::uniform(2)),
        MissingSelfLoop);
    CHECK_THROWS_AS(
        estimate_basic(RoundObservation(bandit_graph(2), 1, losses), ActionDistribution({1.0, 0.0})),
        DegenerateProbability);
    CHECK_THROWS_AS(
        estimate_basic(RoundObservation(bandit_graph(2), 1, losses), ActionDistribution::uniform(3)),
        InvalidDistribution);
  }
}

TEST_CASE("shifted estimator") {
  SUBCASE("matches the basic estimator when every action has a self-loop") {
    Rng rng(3);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto g = erdos_renyi(6, 0.4, seed);
      std::vector<double> probs(6), losses(6);
      double total = 0.0;
      for (double& x : probs) total += x = uniform01(rng) + 0.01;
      for (double& x : probs) x /= total;
      for (double& x : losses) x = uniform01(rng);
      const ActionDistribution p(probs);
      const RoundObservation obs(g, seed % 6, losses);
      CHECK(estimate_shifted(obs, p).values == estimate_basic(obs, p).values);
    }
  }
  SUBCASE("loopless edge, heavy action not played") {
    const ActionDistribution p({0.6, 0.4});
    const std::vector<double> losses{0.5, 0.5};
    CHECK(high_mass_loopless(loopless_edge(), p) == std::vector<NodeId>{0});
    const auto est = estimate_shifted(RoundObservation(loopless_edge(), 1, losses), p);
    CHECK(est.values[0] == doctest::Approx(-0.25));
    CHECK(est.values[1] == 0.0);
  }
  SUBCASE("loopless edge, heavy action played") {
    const ActionDistribution p({0.6, 0.4});
    const std::vector<double> losses{0.5, 0.5};
    const auto est = estimate_shifted(RoundObservation(loopless_edge(), 0, losses), p);
    CHECK(est.values[0] == doctest::Approx(1.0));
    CHECK(est.values[1] == doctest::Approx(0.5 / 0.6));
  }
  SUBCASE("exactly one half is not shifted") {
    CHECK(high_mass_loopless(loopless_edge(), ActionDistribution({0.5, 0.5})).empty());
  }
  SUBCASE("needs strong observability") {
    const Edge e[] = {{0, 0}, {1, 1}, {1, 2}};
    const auto g = FeedbackGraph::from_edges(3, e);
    const std::vector<double> losses{0.5, 0.5, 0.5};
    CHECK_THROWS_AS(estimate_shifted(RoundObservation(g, 0, losses), ActionDistribution::uniform(3)),
                    NotStronglyObservable);
  }
}

TEST_CASE("estimators are unbiased with bounded second moment") {
  Rng rng(17);
  const std::vector<std::size_t> leaves{2, 3};
  const FeedbackGraph graphs[] = {loopless_edge(), pair_plus_singleton(),
                                  no_selfloop_star(1, leaves), erdos_renyi(7, 0.3, 2)};
  for (const auto& g : graphs) {
    for (int n = 0; n < 30; ++n) {
      const std::size_t k = g.size();
      std::vector<double> probs(k), losses(k);
      double total = 0.0;
      for (double& x : probs) total += x = uniform01(rng) + 1e-3;
      if (n % 3 == 0) {
        // Heavy first action so the shifted branch is taken.
        probs[0] += 2.0 * static_cast<double>(k);
        total += 2.0 * static_cast<double>(k);
      }
      for (double& x : probs) x /= total;
      for (double& x : losses) x = uniform01(rng);
      const ActionDistribution p(probs);
      const auto jt = high_mass_loopless(g, p);
      for (auto kind : {EstimatorKind::basic, EstimatorKind::shifted}) {
        if (kind == EstimatorKind::basic && !g.all_self_loops()) continue;
        const auto m = oracle::estimator_moments(kind, g, p, losses);
        for (NodeId i = 0; i < k; ++i) {
          CHECK(m.mean[i] == doctest::Approx(losses[i]).epsilon(1e-12));
          if (std::find(jt.begin(), jt.end(), i) == jt.end()) {
            CHECK(m.second[i] <= 1.0 / neighborhood_prob(g, p, i) + 1e-10);
          }
        }
      }
    }
  }
}
