#include "fgtsallis/tsallis_ftrl.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fgtsallis/errors.hpp"

namespace fgt {

void TsallisParams::validate() const {
  if (!(q > 0.0 && q <= kMaxTsallisQ)) {
    throw DomainError("Tsallis q must lie in (0, 1 - 1e-6], got " + std::to_string(q));
  }
  if (!(eta > 0.0 && std::isfinite(eta))) {
    throw DomainError("learning rate must be positive and finite");
  }
}

double tsallis_entropy(const ActionDistribution& p, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("Tsallis q must lie in (0, 1)");
  double power_sum = 0.0;
  for (double x : p.probs()) power_sum += std::pow(x, q);
  return (1.0 - power_sum) / (1.0 - q);
}

namespace {

constexpr int kMaxBisection = 400;
constexpr int kNewtonSteps = 3;
constexpr double kBracketWidth = 1e-13;
constexpr double kSumTolerance = 1e-10;

// Evaluates the candidate distribution for a multiplier on shifted losses.
class DualFunction {
 public:
  DualFunction(std::span<const double> shifted, const TsallisParams& params)
      : scaled_(shifted.size()),
        log_c_(std::log(params.q / (1.0 - params.q))),
        exponent_(1.0 / (1.0 - params.q)) {
    for (std::size_t i = 0; i < shifted.size(); ++i) scaled_[i] = params.eta * shifted[i];
  }

  double prob(std::size_t i, double lambda) const {
    return std::exp(exponent_ * (log_c_ - std::log(scaled_[i] + lambda)));
  }

  double sum(double lambda) const {
    double s = 0.0;
    for (std::size_t i = 0; i < scaled_.size(); ++i) s += prob(i, lambda);
    return s;
  }

  // d/dlambda of sum(lambda); strictly negative.
  double slope(double lambda) const {
    double d = 0.0;
    for (std::size_t i = 0; i < scaled_.size(); ++i) {
      d -= exponent_ * prob(i, lambda) / (scaled_[i] + lambda);
    }
    return d;
  }

  std::size_t size() const { return scaled_.size(); }

 private:
  std::vector<double> scaled_;
  double log_c_;
  double exponent_;
};

}  // namespace

FtrlSolution ftrl_solve(std::span<const double> cumulative_loss, const TsallisParams& params) {
  params.validate();
  const std::size_t k = cumulative_loss.size();
  if (k == 0) throw InvalidParams("empty loss vector");
  for (double x : cumulative_loss) {
    if (!std::isfinite(x)) throw NonFiniteInput("cumulative loss contains a non-finite entry");
  }

  const double min_loss = *std::min_element(cumulative_loss.begin(), cumulative_loss.end());
  std::vector<double> shifted(k);
  for (std::size_t i = 0; i < k; ++i) shifted[i] = cumulative_loss[i] - min_loss;

  const DualFunction dual(shifted, params);
  const double c = params.q / (1.0 - params.q);

  // At lambda = c the minimal-loss coordinate alone has mass 1; at
  // c * K^(1-q) every coordinate has mass at most 1/K.
  double lo = c;
  double hi = c * std::pow(static_cast<double>(k), 1.0 - params.q);
  int iterations = 0;
  while (dual.sum(lo) < 1.0 && iterations < kMaxBisection) {
    lo *= 0.5;
    ++iterations;
  }
  while (dual.sum(hi) > 1.0 && iterations < kMaxBisection) {
    hi *= 2.0;
    ++iterations;
  }

  while (hi - lo > kBracketWidth * hi && iterations < kMaxBisection) {
    const double mid = 0.5 * (lo + hi);
    if (dual.sum(mid) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++iterations;
  }
  if (iterations >= kMaxBisection) {
    throw ConvergenceFailure("FTRL root finder exceeded its iteration budget",
                             std::abs(dual.sum(0.5 * (lo + hi)) - 1.0));
  }

  double lambda = 0.5 * (lo + hi);
  for (int step = 0; step < kNewtonSteps; ++step) {
    const double residual = dual.sum(lambda) - 1.0;
    if (residual == 0.0) break;
    const double next = lambda - residual / dual.slope(lambda);
    if (!(next > 0.0) || !std::isfinite(next)) break;
    lambda = next;
    ++iterations;
  }

  std::vector<double> probs(k);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    probs[i] = dual.prob(i, lambda);
    total += probs[i];
  }
  if (!(std::abs(total - 1.0) <= kSumTolerance)) {
    throw ConvergenceFailure("FTRL solution misses the simplex", std::abs(total - 1.0));
  }
  for (double& x : probs) x /= total;

  FtrlSolution solution;
  solution.distribution = ActionDistribution(std::move(probs));
  solution.lambda = lambda - params.eta * min_loss;
  solution.iterations = iterations;
  return solution;
}

double kkt_residual(std::span<const double> cumulative_loss, const TsallisParams& params,
                    const FtrlSolution& solution) {
  const double c = params.q / (1.0 - params.q);
  double worst = 0.0;
  for (std::size_t i = 0; i < cumulative_loss.size(); ++i) {
    const double p = solution.distribution[i];
    const double r =
        params.eta * cumulative_loss[i] - c * std::pow(p, params.q - 1.0) + solution.lambda;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace fgt
