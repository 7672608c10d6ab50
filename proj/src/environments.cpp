#include "fgtsallis/environments.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include "fgtsallis/errors.hpp"

namespace fgt {

namespace {

constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kLossStream = 2;
constexpr std::uint64_t kTargetStream = 3;

void check_losses(const LossSpec& spec, std::size_t k) {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  switch (spec.kind) {
    case LossSpec::Kind::bernoulli:
    case LossSpec::Kind::piecewise_best:
      if (!spec.means.empty()) {
        if (spec.means.size() != k) throw InvalidParams("loss means need one entry per action");
        if (!std::all_of(spec.means.begin(), spec.means.end(), in_unit)) {
          throw InvalidParams("loss means must lie in [0, 1]");
        }
      } else {
        if (!in_unit(spec.mean) || !in_unit(spec.mean - spec.gap)) {
          throw InvalidParams("loss mean and gap must keep means in [0, 1]");
        }
        if (spec.best >= k) throw InvalidParams("best action out of range");
      }
      if (spec.kind == LossSpec::Kind::piecewise_best && spec.segment < 1) {
        throw InvalidParams("segment length must be positive");
      }
      break;
    case LossSpec::Kind::shifting:
      if (spec.period < 1) throw InvalidParams("period must be positive");
      if (!in_unit(spec.mean)) throw InvalidParams("mean must lie in [0, 1]");
      break;
    case LossSpec::Kind::constant:
      if (spec.values.size() != k) throw InvalidParams("constant losses need one entry per action");
      if (!std::all_of(spec.values.begin(), spec.values.end(), in_unit)) {
        throw InvalidParams("losses must lie in [0, 1]");
      }
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SequenceEnvironment

SequenceEnvironment::SequenceEnvironment(std::vector<FeedbackGraph> graphs, GraphSchedule schedule,
                                         std::vector<std::size_t> pattern, LossSpec losses,
                                         long horizon, std::uint64_t seed)
    : graphs_(std::move(graphs)),
      schedule_(schedule),
      pattern_(std::move(pattern)),
      losses_(std::move(losses)),
      horizon_(horizon),
      graph_rng_(derive_seed(seed, kGraphStream)),
      loss_rng_(derive_seed(seed, kLossStream)) {
  if (graphs_.empty()) throw InvalidParams("environment needs at least one graph");
  if (horizon_ < 1) throw InvalidParams("horizon must be at least 1");
  k_ = graphs_.front().size();
  for (const auto& g : graphs_) {
    if (g.size() != k_) throw InvalidParams("all graphs must share the action set");
    if (!validate_strong_observability(g)) {
      throw InvalidParams("environment graphs must be strongly observable");
    }
  }
  if (schedule_ == GraphSchedule::periodic) {
    if (pattern_.empty()) {
      pattern_.resize(graphs_.size());
      std::iota(pattern_.begin(), pattern_.end(), std::size_t{0});
    }
    for (std::size_t id : pattern_) {
      if (id >= graphs_.size()) throw InvalidParams("schedule pattern refers to a missing graph");
    }
  }
  check_losses(losses_, k_);
}

std::vector<double> SequenceEnvironment::means_at(long t) const {
  std::vector<double> means(k_, losses_.mean);
  switch (losses_.kind) {
    case LossSpec::Kind::bernoulli:
    case LossSpec::Kind::piecewise_best: {
      if (!losses_.means.empty()) {
        means = losses_.means;
        if (losses_.kind == LossSpec::Kind::piecewise_best) {
          const auto shift = static_cast<std::size_t>((t - 1) / losses_.segment) % k_;
          std::rotate(means.rbegin(), means.rbegin() + static_cast<long>(shift), means.rend());
        }
        break;
      }
      NodeId best = losses_.best;
      if (losses_.kind == LossSpec::Kind::piecewise_best) {
        best = (best + static_cast<std::size_t>((t - 1) / losses_.segment)) % k_;
      }
      means[best] = losses_.mean - losses_.gap;
      break;
    }
    case LossSpec::Kind::shifting:
      for (std::size_t i = 0; i < k_; ++i) {
        const double phase = static_cast<double>(t) / static_cast<double>(losses_.period) +
                             static_cast<double>(i) / static_cast<double>(k_);
        means[i] = std::clamp(
            losses_.mean + losses_.amplitude * std::sin(2.0 * std::numbers::pi * phase), 0.0, 1.0);
      }
      break;
    case LossSpec::Kind::constant:
      means = losses_.values;
      break;
  }
  return means;
}

EnvRound SequenceEnvironment::next() {
  if (t_ >= horizon_) throw InvalidParams("environment exhausted its horizon");
  ++t_;
  EnvRound round;
  round.t = t_;
  switch (schedule_) {
    case GraphSchedule::fixed:
      round.graph_id = 0;
      break;
    case GraphSchedule::periodic:
      round.graph_id = pattern_[static_cast<std::size_t>(t_ - 1) % pattern_.size()];
      break;
    case GraphSchedule::uniform_random:
      round.graph_id = static_cast<std::size_t>(uniform01(graph_rng_) *
                                                static_cast<double>(graphs_.size()));
      break;
  }
  round.losses = means_at(t_);
  if (losses_.kind != LossSpec::Kind::constant) {
    for (double& x : round.losses) x = bernoulli(loss_rng_, x) ? 1.0 : 0.0;
  }
  return round;
}

// ---------------------------------------------------------------------------
// MtbEnvironment

std::size_t mtb_games(std::size_t k, std::size_t alpha) {
  if (alpha < 2 || alpha > k) throw InvalidParams("multitask bandit needs 2 <= alpha <= K");
  std::size_t games = 0;
  std::size_t power = 1;
  while (power <= k / alpha) {
    power *= alpha;
    ++games;
  }
  return games;
}

double mtb_epsilon(std::size_t games, std::size_t alpha, long horizon, double c) {
  if (horizon < 1 || !(c > 0.0)) throw InvalidParams("epsilon needs T >= 1 and c > 0");
  const double eps = 0.25 * std::sqrt(2.0 * static_cast<double>(games) *
                                      static_cast<double>(alpha) /
                                      (c * static_cast<double>(horizon)));
  return std::min(0.25, eps);
}

MtbEnvironment MtbEnvironment::build(std::size_t k, std::size_t alpha, long horizon,
                                     std::optional<NodeId> target, std::uint64_t seed, double c,
                                     std::optional<double> epsilon) {
  MtbEnvironment env;
  env.k_ = k;
  env.alpha_ = alpha;
  env.games_ = mtb_games(k, alpha);
  env.horizon_ = horizon;
  if (horizon < 1) throw InvalidParams("horizon must be at least 1");
  env.base_actions_ = 1;
  for (std::size_t i = 0; i < env.games_; ++i) env.base_actions_ *= alpha;

  if (epsilon) {
    if (!(*epsilon >= 0.0 && *epsilon <= 0.25)) throw InvalidParams("epsilon must lie in [0, 1/4]");
    env.epsilon_ = *epsilon;
  } else {
    env.epsilon_ = mtb_epsilon(env.games_, alpha, horizon, c);
  }

  if (target) {
    if (*target >= env.base_actions_) {
      throw InvalidParams("target must be one of the first alpha^M actions");
    }
    env.target_ = *target;
  } else {
    Rng pick(derive_seed(seed, kTargetStream));
    env.target_ = static_cast<NodeId>(uniform01(pick) * static_cast<double>(env.base_actions_));
  }

  for (std::size_t game = 0; game < env.games_; ++game) {
    std::vector<std::vector<NodeId>> cliques(alpha);
    for (NodeId a = 0; a < k; ++a) cliques[env.digit(a, game)].push_back(a);
    GraphBuilder builder(k);
    for (const auto& clique : cliques) builder.add_clique(clique);
    env.graphs_.push_back(builder.build());
  }
  env.rng_.seed(derive_seed(seed, kLossStream));
  return env;
}

std::size_t MtbEnvironment::digit(NodeId a, std::size_t game) const {
  if (a >= base_actions_) return 0;
  for (std::size_t i = 0; i < game; ++i) a /= alpha_;
  return a % alpha_;
}

double MtbEnvironment::mean_loss(NodeId a, std::size_t game) const {
  return digit(a, game) == digit(target_, game) ? 0.5 - epsilon_ : 0.5;
}

double MtbEnvironment::expected_regret(const ActionDistribution& p) const {
  double regret = 0.0;
  for (NodeId a = 0; a < k_; ++a) {
    double mismatch = 0.0;
    for (std::size_t i = 0; i < games_; ++i) {
      if (digit(a, i) != digit(target_, i)) mismatch += 1.0;
    }
    regret += p[a] * epsilon_ * mismatch / static_cast<double>(games_);
  }
  return regret;
}

EnvRound MtbEnvironment::next() {
  if (t_ >= horizon_) throw InvalidParams("environment exhausted its horizon");
  ++t_;
  EnvRound round;
  round.t = t_;
  const auto game = static_cast<std::size_t>(uniform01(rng_) * static_cast<double>(games_));
  round.graph_id = game;
  const std::size_t favoured = digit(target_, game);
  std::vector<double> base(alpha_);
  for (std::size_t j = 0; j < alpha_; ++j) {
    const double mean = j == favoured ? 0.5 - epsilon_ : 0.5;
    base[j] = bernoulli(rng_, mean) ? 1.0 : 0.0;
  }
  round.losses.resize(k_);
  for (NodeId a = 0; a < k_; ++a) round.losses[a] = base[digit(a, game)];
  return round;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Environment> make_environment(const EnvironmentSpec& spec) {
  if (spec.kind == EnvironmentSpec::Kind::mtb_lower_bound) {
    return std::make_unique<MtbEnvironment>(MtbEnvironment::build(
        spec.k, spec.mtb.alpha, spec.horizon, spec.mtb.target, spec.seed, spec.mtb.c,
        spec.mtb.epsilon));
  }
  if (spec.graphs.empty()) throw InvalidParams("environment needs at least one graph spec");
  std::vector<FeedbackGraph> graphs;
  for (GraphSpec g : spec.graphs) {
    if (g.k == 0) g.k = spec.k;
    graphs.push_back(generate_graph(g));
  }
  if (spec.k != 0 && graphs.front().size() != spec.k) {
    throw InvalidParams("graph size does not match K");
  }
  GraphSchedule schedule = spec.schedule;
  if (spec.kind == EnvironmentSpec::Kind::fixed_adversarial) {
    if (graphs.size() != 1) throw InvalidParams("fixed adversary takes exactly one graph");
    schedule = GraphSchedule::fixed;
  }
  return std::make_unique<SequenceEnvironment>(std::move(graphs), schedule, spec.pattern,
                                               spec.losses, spec.horizon, spec.seed);
}

}  // namespace fgt
