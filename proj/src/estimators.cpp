#include "fgtsallis/estimators.hpp"

#include <string>

#include "fgtsallis/errors.hpp"

namespace fgt {

RoundObservation::RoundObservation(const FeedbackGraph& graph, NodeId chosen,
                                   std::span<const double> true_losses)
    : graph_(&graph), chosen_(chosen), observed_(graph.size()) {
  if (chosen >= graph.size()) throw InvalidParams("chosen action out of range");
  if (true_losses.size() != graph.size()) throw InvalidParams("loss vector has the wrong size");
  const NodeSet& revealed = graph.neighborhood(chosen);
  for (NodeId i = revealed.find_first(); i != NodeSet::npos; i = revealed.find_next(i)) {
    observed_[i] = true_losses[i];
  }
  validate();
}

RoundObservation::RoundObservation(const FeedbackGraph& graph, NodeId chosen,
                                   std::vector<std::optional<double>> observed)
    : graph_(&graph), chosen_(chosen), observed_(std::move(observed)) {
  if (chosen >= graph.size()) throw InvalidParams("chosen action out of range");
  if (observed_.size() != graph.size()) throw InvalidParams("observation has the wrong size");
  validate();
}

void RoundObservation::validate() const {
  const NodeSet& revealed = graph_->neighborhood(chosen_);
  for (NodeId i = 0; i < observed_.size(); ++i) {
    if (observed_[i].has_value() != revealed.test(i)) {
      throw InvalidParams("observed losses must cover exactly the neighborhood of the played action");
    }
    if (observed_[i] && !(*observed_[i] >= 0.0 && *observed_[i] <= 1.0)) {
      throw InvalidParams("observed loss of action " + std::to_string(i) + " outside [0, 1]");
    }
  }
}

double neighborhood_prob(const FeedbackGraph& g, const ActionDistribution& p, NodeId i) {
  const NodeSet& nbrs = g.neighborhood(i);
  double mass = 0.0;
  for (NodeId j = nbrs.find_first(); j != NodeSet::npos; j = nbrs.find_next(j)) mass += p[j];
  return mass;
}

std::vector<NodeId> high_mass_loopless(const FeedbackGraph& g, const ActionDistribution& p) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (!g.has_self_loop(i) && p[i] > 0.5) out.push_back(i);
  }
  return out;
}

namespace {

void check_inputs(const RoundObservation& obs, const ActionDistribution& p) {
  if (p.size() != obs.graph().size()) {
    throw InvalidDistribution("distribution size does not match graph");
  }
}

double checked_prob(const FeedbackGraph& g, const ActionDistribution& p, NodeId i) {
  const double mass = neighborhood_prob(g, p, i);
  if (mass < kMinObservationProb) {
    throw DegenerateProbability("observation probability of action " + std::to_string(i) +
                                " is zero");
  }
  return mass;
}

}  // namespace

EstimatedLoss estimate_basic(const RoundObservation& obs, const ActionDistribution& p) {
  check_inputs(obs, p);
  const FeedbackGraph& g = obs.graph();
  if (!g.all_self_loops()) {
    throw MissingSelfLoop("importance-weighted estimator needs a self-loop on every action");
  }
  EstimatedLoss out{std::vector<double>(g.size(), 0.0), EstimatorKind::basic};
  for (NodeId i = 0; i < g.size(); ++i) {
    if (const auto& loss = obs.observed()[i]) out.values[i] = *loss / checked_prob(g, p, i);
  }
  return out;
}

EstimatedLoss estimate_shifted(const RoundObservation& obs, const ActionDistribution& p) {
  check_inputs(obs, p);
  const FeedbackGraph& g = obs.graph();
  if (!validate_strong_observability(g)) {
    throw NotStronglyObservable("shifted estimator needs a strongly observable graph");
  }
  EstimatedLoss out{std::vector<double>(g.size(), 0.0), EstimatorKind::shifted};
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto& loss = obs.observed()[i];
    const bool shifted = !g.has_self_loop(i) && p[i] > 0.5;
    if (shifted) {
      out.values[i] = 1.0;
      if (loss) out.values[i] += (*loss - 1.0) / checked_prob(g, p, i);
    } else if (loss) {
      out.values[i] = *loss / checked_prob(g, p, i);
    }
  }
  return out;
}

EstimatedLoss estimate(EstimatorKind kind, const RoundObservation& obs, const ActionDistribution& p) {
  return kind == EstimatorKind::basic ? estimate_basic(obs, p) : estimate_shifted(obs, p);
}

}  // namespace fgt
