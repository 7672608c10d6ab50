#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "fgtsallis/environments.hpp"
#include "fgtsallis/errors.hpp"
#include "fgtsallis/oracles.hpp"
#include "fgtsallis/replay.hpp"

using namespace fgt;

TEST_CASE("multitask bandit topology") {
  const auto env = MtbEnvironment::build(8, 2, 1000, std::nullopt, 5);
  CHECK(env.games() == 3);
  REQUIRE(env.graphs().size() == 3);
  for (const auto& g : env.graphs()) {
    CHECK(g.all_self_loops());
    CHECK(oracle::brute_force_alpha(g) == 2);
    CHECK(independence_number(g, IndependenceMode::exact).alpha == 2);
    for (NodeId a = 0; a < 8; ++a) CHECK(g.neighborhood(a).count() == 4);
  }
  // Graph i links actions whose i-th binary digit agrees.
  CHECK(env.graphs()[0].adjacent(0, 2));
  CHECK_FALSE(env.graphs()[0].adjacent(0, 1));
  CHECK(env.graphs()[2].adjacent(1, 3));
  CHECK_FALSE(env.graphs()[2].adjacent(3, 4));

  const auto single = MtbEnvironment::build(5, 5, 100, std::nullopt, 1);
  CHECK(single.games() == 1);
  CHECK(single.graphs().front() == bandit_graph(5));
}

TEST_CASE("multitask bandit games and gap") {
  CHECK(mtb_games(8, 2) == 3);
  CHECK(mtb_games(9, 3) == 2);
  CHECK(mtb_games(10, 3) == 2);
  CHECK(mtb_games(26, 3) == 2);
  CHECK(mtb_games(27, 3) == 3);
  CHECK_THROWS_AS(mtb_games(8, 1), InvalidParams);
  CHECK_THROWS_AS(mtb_games(8, 9), InvalidParams);

  const double c = 8.0 * std::log(4.0 / 3.0);
  // Independently evaluated: 0.25 * sqrt(12 / (c T)).
  CHECK(mtb_epsilon(2, 3, 10000, c) == doctest::Approx(0.005708595079556195).epsilon(1e-12));
  CHECK(mtb_epsilon(2, 3, 1000, c) == doctest::Approx(0.018052162691027687).epsilon(1e-12));
  CHECK(mtb_epsilon(3, 2, 1, c) == 0.25);
  CHECK(MtbEnvironment::build(9, 3, 10000, std::nullopt, 0).epsilon() ==
        doctest::Approx(0.005708595079556195).epsilon(1e-12));
}

TEST_CASE("multitask bandit losses") {
  SUBCASE("clique-constant losses and excess actions") {
    auto env = MtbEnvironment::build(11, 3, 2000, 4, 8);
    CHECK(env.games() == 2);
    for (int t = 0; t < 2000; ++t) {
      const auto round = env.next();
      const auto& g = env.graphs()[round.graph_id];
      for (NodeId a = 0; a < 11; ++a) {
        for (NodeId b = 0; b < 11; ++b) {
          if (g.adjacent(a, b)) CHECK(round.losses[a] == round.losses[b]);
        }
      }
      // Actions beyond 3^2 behave like action 0.
      CHECK(round.losses[9] == round.losses[0]);
      CHECK(round.losses[10] == round.losses[0]);
    }
  }
  SUBCASE("zero gap makes every mean one half") {
    const auto env = MtbEnvironment::build(8, 2, 100, 3, 1, 2.3, 0.0);
    for (NodeId a = 0; a < 8; ++a) {
      for (std::size_t i = 0; i < 3; ++i) CHECK(env.mean_loss(a, i) == 0.5);
    }
  }
  SUBCASE("target action's empirical mean") {
    const long rounds = 100000;
    const double eps = 0.05;
    auto env = MtbEnvironment::build(8, 2, rounds, 5, 21, 2.3, eps);
    double total = 0.0;
    for (long t = 0; t < rounds; ++t) total += env.next().losses[5];
    const double mean = total / static_cast<double>(rounds);
    const double sigma = std::sqrt((0.5 - eps) * (0.5 + eps) / static_cast<double>(rounds));
    CHECK(std::abs(mean - (0.5 - eps)) <= 3.0 * sigma);
  }
  SUBCASE("closed-form regret of uniform play") {
    // A uniformly drawn digit matches the target's with probability 1/alpha.
    const auto nine = MtbEnvironment::build(9, 3, 1000, 0, 2, 2.3, 0.1);
    CHECK(nine.expected_regret(ActionDistribution::uniform(9)) ==
          doctest::Approx(0.1 * (1.0 - 1.0 / 3.0)));
    const auto env = MtbEnvironment::build(8, 2, 1000, 6, 2, 2.3, 0.1);
    CHECK(env.expected_regret(ActionDistribution::uniform(8)) == doctest::Approx(0.05));
    std::vector<double> point(8, 0.0);
    point[6] = 1.0;
    CHECK(env.expected_regret(ActionDistribution(point)) == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(MtbEnvironment::build(8, 2, 100, 8, 0), InvalidParams);
    CHECK_THROWS_AS(MtbEnvironment::build(8, 2, 0, 1, 0), InvalidParams);
    CHECK_THROWS_AS(MtbEnvironment::build(8, 2, 10, 1, 0, 2.3, 0.3), InvalidParams);
    auto env = MtbEnvironment::build(4, 2, 1, 1, 0);
    env.next();
    CHECK_THROWS_AS(env.next(), InvalidParams);
  }
}

TEST_CASE("sequence environments") {
  SUBCASE("same seed, same stream") {
    EnvironmentSpec spec;
    spec.kind = EnvironmentSpec::Kind::time_varying;
    spec.k = 6;
    spec.horizon = 500;
    spec.graphs = {{GraphSpec::Kind::bandit}, {GraphSpec::Kind::experts}};
    spec.schedule = GraphSchedule::uniform_random;
    spec.seed = 99;
    auto a = make_environment(spec);
    auto b = make_environment(spec);
    spec.seed = 100;
    auto c = make_environment(spec);
    bool differs = false;
    for (int t = 0; t < 500; ++t) {
      const auto ra = a->next();
      const auto rb = b->next();
      const auto rc = c->next();
      CHECK(ra.graph_id == rb.graph_id);
      CHECK(ra.losses == rb.losses);
      differs = differs || ra.losses != rc.losses;
    }
    CHECK(differs);
  }
  SUBCASE("periodic schedule") {
    SequenceEnvironment env({experts_graph(4), bandit_graph(4)}, GraphSchedule::periodic, {0, 1},
                            LossSpec{}, 6, 1);
    for (int t = 0; t < 6; ++t) CHECK(env.next().graph_id == static_cast<std::size_t>(t % 2));
  }
  SUBCASE("loss means") {
    LossSpec spec;
    spec.kind = LossSpec::Kind::piecewise_best;
    spec.segment = 10;
    SequenceEnvironment env({bandit_graph(3)}, GraphSchedule::fixed, {}, spec, 100, 1);
    CHECK(env.means_at(1) == std::vector<double>{0.4, 0.5, 0.5});
    CHECK(env.means_at(11) == std::vector<double>{0.5, 0.4, 0.5});
    CHECK(env.means_at(31) == std::vector<double>{0.4, 0.5, 0.5});

    LossSpec constant;
    constant.kind = LossSpec::Kind::constant;
    constant.values = {0.0, 0.25, 1.0};
    SequenceEnvironment fixed({bandit_graph(3)}, GraphSchedule::fixed, {}, constant, 5, 1);
    CHECK(fixed.next().losses == constant.values);
  }
  SUBCASE("errors") {
    EnvironmentSpec spec;
    spec.k = 4;
    spec.horizon = 10;
    spec.graphs = {{GraphSpec::Kind::bandit}, {GraphSpec::Kind::experts}};
    CHECK_THROWS_AS(make_environment(spec), InvalidParams);
    spec.graphs.clear();
    CHECK_THROWS_AS(make_environment(spec), InvalidParams);
    LossSpec bad;
    bad.mean = 0.05;
    bad.gap = 0.1;
    CHECK_THROWS_AS(SequenceEnvironment({bandit_graph(2)}, GraphSchedule::fixed, {}, bad, 10, 0),
                    InvalidParams);
    const Edge broken[] = {{0, 0}, {1, 1}, {1, 2}};
    CHECK_THROWS_AS(SequenceEnvironment({FeedbackGraph::from_edges(3, broken)},
                                        GraphSchedule::fixed, {}, LossSpec{}, 10, 0),
                    InvalidParams);
  }
}

TEST_CASE("replay round trip") {
  SequenceEnvironment source({experts_graph(4), no_selfloop_star(1, std::vector<std::size_t>{3})},
                             GraphSchedule::periodic, {0, 1, 1}, LossSpec{}, 50, 3);
  SequenceEnvironment copy({experts_graph(4), no_selfloop_star(1, std::vector<std::size_t>{3})},
                           GraphSchedule::periodic, {0, 1, 1}, LossSpec{}, 50, 3);
  std::stringstream file;
  write_replay(source, file);
  auto replay = ReplayEnvironment::load(file);
  CHECK(replay.num_actions() == 4);
  CHECK(replay.horizon() == 50);
  CHECK(replay.graphs() == copy.graphs());
  for (int t = 0; t < 50; ++t) {
    const auto a = replay.next();
    const auto b = copy.next();
    CHECK(a.t == b.t);
    CHECK(a.graph_id == b.graph_id);
    CHECK(a.losses == b.losses);
  }
  CHECK_THROWS_AS(replay.next(), InvalidParams);
  replay.rewind();
  CHECK(replay.next().t == 1);
}

TEST_CASE("replay parse errors") {
  auto load = [](const std::string& text) {
    std::istringstream in(text);
    return ReplayEnvironment::load(in);
  };
  const std::string header =
      R"({"type":"header","K":2,"T":1,"graphs":[{"id":0,"edge_list":"K 2\n1 1\n2 2\n"}]})";
  CHECK_NOTHROW(load(header + "\n" + R"({"t":1,"graph_id":0,"losses":[0,1]})" + "\n"));
  CHECK_THROWS_AS(load(""), ParseError);
  CHECK_THROWS_AS(load("not json\n"), ParseError);
  CHECK_THROWS_AS(load(header + "\n"), ParseError);
  CHECK_THROWS_AS(load(header + "\n" + R"({"t":2,"graph_id":0,"losses":[0,1]})"), ParseError);
  CHECK_THROWS_AS(load(header + "\n" + R"({"t":1,"graph_id":3,"losses":[0,1]})"), ParseError);
  CHECK_THROWS_AS(load(header + "\n" + R"({"t":1,"graph_id":0,"losses":[0,2]})"), ParseError);
  CHECK_THROWS_AS(load(header + "\n" + R"({"t":1,"graph_id":0,"losses":[0]})"), ParseError);
  CHECK_THROWS_AS(
      load(R"({"type":"header","K":3,"T":0,"graphs":[{"id":0,"edge_list":"K 3\n1 1\n2 2\n2 3\n"}]})"),
      ParseError);
}
