#pragma once

#include <optional>
#include <span>
#include <vector>

#include "fgtsallis/distribution.hpp"
#include "fgtsallis/graph.hpp"

namespace fgt {

// Feedback of one protocol round: the played action, the round's graph and
// the losses revealed on the played action's neighborhood.
class RoundObservation {
 public:
  // Reveals true_losses on N(chosen). Losses must lie in [0, 1].
  RoundObservation(const FeedbackGraph& graph, NodeId chosen, std::span<const double> true_losses);

  // `observed` has one slot per action; slots are engaged exactly on N(chosen).
  RoundObservation(const FeedbackGraph& graph, NodeId chosen,
                   std::vector<std::optional<double>> observed);

  const FeedbackGraph& graph() const { return *graph_; }
  NodeId chosen() const { return chosen_; }
  const std::vector<std::optional<double>>& observed() const { return observed_; }

 private:
  void validate() const;

  const FeedbackGraph* graph_;
  NodeId chosen_;
  std::vector<std::optional<double>> observed_;
};

enum class EstimatorKind { basic, shifted };

struct EstimatedLoss {
  std::vector<double> values;
  EstimatorKind kind = EstimatorKind::basic;
};

// Below this an observation probability counts as zero.
inline constexpr double kMinObservationProb = 1e-300;

// P(i): probability under p that the played action reveals the loss of i.
double neighborhood_prob(const FeedbackGraph& g, const ActionDistribution& p, NodeId i);

// Loopless actions played with probability above 1/2 (at most one).
std::vector<NodeId> high_mass_loopless(const FeedbackGraph& g, const ActionDistribution& p);

// Importance weighting: loss(i) / P(i) when the loss of i was revealed, else 0.
// Requires every self-loop.
EstimatedLoss estimate_basic(const RoundObservation& obs, const ActionDistribution& p);

// Same as estimate_basic except at a loopless action j with p(j) > 1/2, which
// gets (loss(j) - 1) / P(j) when revealed, plus 1. Requires strong observability.
EstimatedLoss estimate_shifted(const RoundObservation& obs, const ActionDistribution& p);

EstimatedLoss estimate(EstimatorKind kind, const RoundObservation& obs, const ActionDistribution& p);

}  // namespace fgt
