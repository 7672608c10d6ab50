#pragma once

#include <span>

#include "fgtsallis/distribution.hpp"

namespace fgt {

// Largest admissible q; keeps 1/(1-q) finite.
inline constexpr double kMaxTsallisQ = 1.0 - 1e-6;

struct TsallisParams {
  double q = 0.5;
  double eta = 1.0;

  // Throws DomainError unless 0 < q <= kMaxTsallisQ and eta is positive and finite.
  void validate() const;
};

// psi_q(p) = (1 - sum_i p(i)^q) / (1 - q).
double tsallis_entropy(const ActionDistribution& p, double q);

struct FtrlSolution {
  ActionDistribution distribution;
  // Multiplier of the simplex constraint for the unshifted losses.
  double lambda = 0.0;
  int iterations = 0;
};

// Minimizer over the simplex of eta * <L, p> + psi_q(p). Every coordinate is
//   p(i) = [ q / ((1 - q) (eta L(i) + lambda)) ]^(1 / (1 - q))
// with lambda the root of sum_i p(i) = 1 above -eta * min_i L(i). The root is
// bracketed, bisected down to a 1e-13 relative width and polished with Newton.
FtrlSolution ftrl_solve(std::span<const double> cumulative_loss, const TsallisParams& params);

inline ActionDistribution ftrl_update(std::span<const double> cumulative_loss,
                                      const TsallisParams& params) {
  return ftrl_solve(cumulative_loss, params).distribution;
}

// max_i | eta L(i) - q/(1-q) p(i)^(q-1) + lambda |, the stationarity residual.
double kkt_residual(std::span<const double> cumulative_loss, const TsallisParams& params,
                    const FtrlSolution& solution);

}  // namespace fgt
