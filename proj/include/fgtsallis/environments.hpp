#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "fgtsallis/distribution.hpp"
#include "fgtsallis/graph.hpp"
#include "fgtsallis/random.hpp"

namespace fgt {

struct EnvRound {
  long t = 0;
  std::size_t graph_id = 0;
  std::vector<double> losses;
};

// Environment side of the protocol: an oblivious stream of (graph, losses)
// pairs for rounds 1..T. Graphs are referenced by id into a fixed dictionary.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t num_actions() const = 0;
  virtual long horizon() const = 0;
  virtual const std::vector<FeedbackGraph>& graphs() const = 0;
  // Throws InvalidParams past the horizon.
  virtual EnvRound next() = 0;
};

// ---------------------------------------------------------------------------
// Loss sources and schedules for the adversarial sequences

struct LossSpec {
  enum class Kind {
    bernoulli,       // i.i.d. Bernoulli(mean), action `best` gets mean - gap
    piecewise_best,  // like bernoulli, the favoured action advances every `segment` rounds
    shifting,        // Bernoulli with means mean + amplitude * sin(2 pi (t / period + i / K))
    constant,        // the fixed vector `values` every round
  };

  Kind kind = Kind::bernoulli;
  double mean = 0.5;
  double gap = 0.1;
  NodeId best = 0;
  std::vector<double> means;  // per-action means; overrides mean/gap/best
  long segment = 1000;
  long period = 1000;
  double amplitude = 0.4;
  std::vector<double> values;
};

enum class GraphSchedule {
  fixed,           // always graph 0
  periodic,        // cycle through `pattern`
  uniform_random,  // i.i.d. uniform over the dictionary
};

struct MtbParams {
  std::size_t alpha = 2;
  std::optional<NodeId> target;  // drawn from the seed when absent
  double c = 8.0 * std::log(4.0 / 3.0);
  std::optional<double> epsilon;  // overrides the default gap
};

struct EnvironmentSpec {
  enum class Kind { fixed_adversarial, time_varying, mtb_lower_bound };

  Kind kind = Kind::fixed_adversarial;
  std::size_t k = 0;
  long horizon = 1;
  std::vector<GraphSpec> graphs;
  GraphSchedule schedule = GraphSchedule::fixed;
  std::vector<std::size_t> pattern;  // graph ids for the periodic schedule
  LossSpec losses;
  MtbParams mtb;
  std::uint64_t seed = 0;
};

class SequenceEnvironment : public Environment {
 public:
  SequenceEnvironment(std::vector<FeedbackGraph> graphs, GraphSchedule schedule,
                      std::vector<std::size_t> pattern, LossSpec losses, long horizon,
                      std::uint64_t seed);

  std::size_t num_actions() const override { return k_; }
  long horizon() const override { return horizon_; }
  const std::vector<FeedbackGraph>& graphs() const override { return graphs_; }
  EnvRound next() override;

  // Loss means of round t (1-based), before the Bernoulli draw.
  std::vector<double> means_at(long t) const;

 private:
  std::vector<FeedbackGraph> graphs_;
  GraphSchedule schedule_;
  std::vector<std::size_t> pattern_;
  LossSpec losses_;
  long horizon_;
  std::size_t k_;
  long t_ = 0;
  Rng graph_rng_;
  Rng loss_rng_;
};

// Multitask-bandit adversary. The first alpha^M actions are digit vectors in
// [alpha]^M; graph i links actions whose i-th digits agree, giving alpha
// disjoint self-looped cliques. Each round one game i is drawn uniformly and
// base action j of that game suffers Bernoulli(1/2 - eps [target(i) = j]),
// shared by its whole clique. Actions beyond alpha^M clone action 0 (all
// digits zero) in every graph and loss vector.
class MtbEnvironment : public Environment {
 public:
  static MtbEnvironment build(std::size_t k, std::size_t alpha, long horizon,
                              std::optional<NodeId> target, std::uint64_t seed,
                              double c = 8.0 * std::log(4.0 / 3.0),
                              std::optional<double> epsilon = std::nullopt);

  std::size_t num_actions() const override { return k_; }
  long horizon() const override { return horizon_; }
  const std::vector<FeedbackGraph>& graphs() const override { return graphs_; }
  EnvRound next() override;

  std::size_t alpha() const { return alpha_; }
  std::size_t games() const { return games_; }
  double epsilon() const { return epsilon_; }
  NodeId target() const { return target_; }
  // Base action of `a` in game i (0-based digits).
  std::size_t digit(NodeId a, std::size_t game) const;
  // Mean loss of action a when graph `game` is drawn.
  double mean_loss(NodeId a, std::size_t game) const;
  // Expected per-round regret against the target of playing p.
  double expected_regret(const ActionDistribution& p) const;

 private:
  MtbEnvironment() = default;

  std::size_t k_ = 0;
  std::size_t alpha_ = 2;
  std::size_t games_ = 1;
  std::size_t base_actions_ = 0;
  long horizon_ = 1;
  double epsilon_ = 0.0;
  NodeId target_ = 0;
  std::vector<FeedbackGraph> graphs_;
  long t_ = 0;
  Rng rng_;
};

// eps = min(1/4, (1/4) sqrt(2 M alpha / (c T))).
double mtb_epsilon(std::size_t games, std::size_t alpha, long horizon, double c);

// Largest M with alpha^M <= K.
std::size_t mtb_games(std::size_t k, std::size_t alpha);

std::unique_ptr<Environment> make_environment(const EnvironmentSpec& spec);

}  // namespace fgt
