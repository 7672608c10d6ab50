#include "fgtsallis/learners.hpp"

#include <cmath>

#include "fgtsallis/errors.hpp"

namespace fgt {

double tuned_q(std::size_t k, double alpha) {
  const double log_ratio = std::log(static_cast<double>(k) / alpha);
  return 0.5 * (1.0 + log_ratio / (std::sqrt(log_ratio * log_ratio + 4.0) + 2.0));
}

TsallisParams tune(const TuningInputs& in) {
  if (in.k == 0) throw InvalidParams("K must be positive");
  if (!(in.alpha_guess >= 1.0 && in.alpha_guess <= static_cast<double>(in.k))) {
    throw InvalidParams("alpha guess must lie in [1, K]");
  }
  if (in.horizon < 1) throw InvalidParams("horizon must be at least 1");

  const double k = static_cast<double>(in.k);
  const double t = static_cast<double>(in.horizon);
  const double q = tuned_q(in.k, in.alpha_guess);
  const double scale = in.variant == TuningVariant::doubling ? 11.0 * t : t;
  double eta = std::sqrt(2.0 * q * std::pow(k, 1.0 - q) /
                         (scale * (1.0 - q) * std::pow(in.alpha_guess, q)));
  if (in.variant == TuningVariant::general) eta /= 3.0;

  TsallisParams params{q, eta};
  params.validate();
  return params;
}

double variance_quantity(const FeedbackGraph& g, const ActionDistribution& p, double q) {
  double total = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) {
    if (!g.has_self_loop(i) || p[i] == 0.0) continue;
    total += std::pow(p[i], 2.0 - q) / neighborhood_prob(g, p, i);
  }
  return total;
}

// ---------------------------------------------------------------------------

QFtrl::QFtrl(std::size_t k, TsallisParams params, EstimatorKind estimator, std::uint64_t seed)
    : Learner(seed),
      params_(params),
      estimator_(estimator),
      cumulative_(k, 0.0),
      current_(ActionDistribution::uniform(k)) {
  params_.validate();
}

const ActionDistribution& QFtrl::step(const RoundObservation& obs) {
  if (obs.graph().size() != cumulative_.size()) {
    throw InvalidParams("observation graph size does not match the learner");
  }
  const EstimatedLoss est = estimate(estimator_, obs, current_);
  for (std::size_t i = 0; i < cumulative_.size(); ++i) cumulative_[i] += est.values[i];
  current_ = ftrl_update(cumulative_, params_);
  return current_;
}

void QFtrl::update(const RoundObservation& obs) { step(obs); }

// ---------------------------------------------------------------------------

DoublingQFtrl::DoublingQFtrl(std::size_t k, long horizon, std::uint64_t seed)
    : Learner(seed),
      k_(k),
      horizon_(horizon),
      max_r_(static_cast<int>(std::floor(std::log2(static_cast<double>(k))))),
      inner_(k, tune({k, 1.0, horizon, TuningVariant::doubling}), EstimatorKind::shifted) {
  // Guard against log2 rounding for exact powers of two.
  while ((std::size_t{1} << (max_r_ + 1)) <= k) ++max_r_;
  while (max_r_ > 0 && (std::size_t{1} << max_r_) > k) --max_r_;
  epochs_.push_back({0, 1, inner_.params()});
}

TsallisParams DoublingQFtrl::epoch_params(int r) const {
  return tune({k_, std::ldexp(1.0, r), horizon_, TuningVariant::doubling});
}

void DoublingQFtrl::update(const RoundObservation& obs) {
  if (round_ >= horizon_) throw InvalidParams("doubling learner played past its horizon");
  ++round_;
  const double q = inner_.params().q;
  last_variance_ = variance_quantity(obs.graph(), inner_.distribution(), q);
  inner_.step(obs);
  accumulator_ += std::pow(last_variance_, 1.0 / q);

  const double threshold = std::ldexp(1.0, r_ + 1);
  if (r_ < max_r_ && accumulator_ / static_cast<double>(horizon_) > threshold) {
    ++r_;
    epoch_start_ = round_ + 1;
    accumulator_ = 0.0;
    inner_ = QFtrl(k_, epoch_params(r_), EstimatorKind::shifted);
    epochs_.push_back({r_, epoch_start_, inner_.params()});
  }
}

}  // namespace fgt
