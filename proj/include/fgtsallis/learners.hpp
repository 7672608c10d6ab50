#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fgtsallis/distribution.hpp"
#include "fgtsallis/estimators.hpp"
#include "fgtsallis/graph.hpp"
#include "fgtsallis/random.hpp"
#include "fgtsallis/tsallis_ftrl.hpp"

namespace fgt {

// ---------------------------------------------------------------------------
// Tuning

enum class TuningVariant {
  self_loops,  // all self-loops, importance-weighted estimates
  general,     // strongly observable graphs, shifted estimates: eta / 3
  doubling,    // epoch r of the doubling learner: alpha = 2^r, 11 T in eta
};

struct TuningInputs {
  std::size_t k = 1;
  double alpha_guess = 1.0;
  long horizon = 1;
  TuningVariant variant = TuningVariant::self_loops;
};

// q = (1 + ln(K/a) / (sqrt(ln(K/a)^2 + 4) + 2)) / 2, in [1/2, 1).
double tuned_q(std::size_t k, double alpha);

// Throws InvalidParams unless 1 <= alpha_guess <= K and horizon >= 1.
TsallisParams tune(const TuningInputs& inputs);

// Sum over self-looped i of p(i)^(2-q) / P(i). Loopless actions are skipped.
double variance_quantity(const FeedbackGraph& g, const ActionDistribution& p, double q);

// ---------------------------------------------------------------------------
// Learners

// A learner of the feedback-graph protocol. It owns the random stream used
// to draw actions from its current distribution.
class Learner {
 public:
  explicit Learner(std::uint64_t seed) : rng_(seed) {}
  virtual ~Learner() = default;

  virtual const ActionDistribution& distribution() const = 0;
  virtual void update(const RoundObservation& obs) = 0;
  virtual std::string name() const = 0;

  // q of the regularizer in force, if any; used for diagnostics.
  virtual std::optional<double> regularizer_q() const { return std::nullopt; }
  // Epoch index of a restarting learner; 0 otherwise.
  virtual int epoch() const { return 0; }

  NodeId select_action() { return distribution().sample(uniform01(rng_)); }

 private:
  Rng rng_;
};

// FTRL with q-Tsallis entropy on cumulative loss estimates, starting uniform.
class QFtrl : public Learner {
 public:
  QFtrl(std::size_t k, TsallisParams params, EstimatorKind estimator, std::uint64_t seed = 0);

  const ActionDistribution& distribution() const override { return current_; }
  void update(const RoundObservation& obs) override;
  std::string name() const override { return "qftrl"; }
  std::optional<double> regularizer_q() const override { return params_.q; }

  // One round: estimate, accumulate, re-solve. Returns the next distribution.
  const ActionDistribution& step(const RoundObservation& obs);

  const TsallisParams& params() const { return params_; }
  EstimatorKind estimator() const { return estimator_; }
  const std::vector<double>& cumulative_loss() const { return cumulative_; }

 private:
  TsallisParams params_;
  EstimatorKind estimator_;
  std::vector<double> cumulative_;
  ActionDistribution current_;
};

struct EpochInfo {
  int r = 0;
  long start_round = 1;
  TsallisParams params;
};

// Doubling trick over the guess 2^r of the average independence number.
// Restarts a fresh shifted-estimate QFtrl tuned for 2^(r+1) once
// (1/T) * sum_{s >= T_r} Bbar_s(q_r)^(1/q_r) exceeds 2^(r+1).
class DoublingQFtrl : public Learner {
 public:
  DoublingQFtrl(std::size_t k, long horizon, std::uint64_t seed = 0);

  const ActionDistribution& distribution() const override { return inner_.distribution(); }
  void update(const RoundObservation& obs) override;
  std::string name() const override { return "doubling"; }
  std::optional<double> regularizer_q() const override { return inner_.params().q; }
  int epoch() const override { return r_; }

  long rounds_played() const { return round_; }
  long epoch_start() const { return epoch_start_; }
  double accumulator() const { return accumulator_; }
  // Bbar of the last played round, under the q of that round's epoch.
  double last_variance() const { return last_variance_; }
  int max_epoch() const { return max_r_; }
  int restarts() const { return static_cast<int>(epochs_.size()) - 1; }
  const std::vector<EpochInfo>& epochs() const { return epochs_; }
  const QFtrl& inner() const { return inner_; }

 private:
  TsallisParams epoch_params(int r) const;

  std::size_t k_;
  long horizon_;
  int r_ = 0;
  int max_r_ = 0;
  long round_ = 0;
  long epoch_start_ = 1;
  double accumulator_ = 0.0;
  double last_variance_ = 0.0;
  QFtrl inner_;
  std::vector<EpochInfo> epochs_;
};

class UniformLearner : public Learner {
 public:
  UniformLearner(std::size_t k, std::uint64_t seed = 0)
      : Learner(seed), p_(ActionDistribution::uniform(k)) {}

  const ActionDistribution& distribution() const override { return p_; }
  void update(const RoundObservation&) override {}
  std::string name() const override { return "uniform_baseline"; }

 private:
  ActionDistribution p_;
};

}  // namespace fgt
