#pragma once

// Slow reference computations used by the verification suites and tests.
// Each one takes a different route from the production code it checks.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fgtsallis/distribution.hpp"
#include "fgtsallis/estimators.hpp"
#include "fgtsallis/graph.hpp"
#include "fgtsallis/tsallis_ftrl.hpp"

namespace fgt::oracle {

// Largest independent set size by enumerating all 2^K subsets. K <= 24.
inline std::size_t brute_force_alpha(const FeedbackGraph& g) {
  const std::size_t k = g.size();
  std::size_t best = 0;
  for (unsigned long mask = 0; mask < (1ul << k); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountl(mask));
    if (size <= best) continue;
    bool independent = true;
    for (std::size_t i = 0; i < k && independent; ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t j = i + 1; j < k; ++j) {
        if ((mask >> j & 1) && g.adjacent(i, j)) {
          independent = false;
          break;
        }
      }
    }
    if (independent) best = size;
  }
  return best;
}

// eta <L, p> + (1 - sum p^q) / (1 - q).
inline double ftrl_objective(std::span<const double> cumulative, std::span<const double> p,
                             const TsallisParams& params) {
  double linear = 0.0;
  double power = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    linear += cumulative[i] * p[i];
    power += std::pow(p[i], params.q);
  }
  return params.eta * linear + (1.0 - power) / (1.0 - params.q);
}

// Ternary search of a convex function on [lo, hi].
inline double ternary_argmin(const std::function<double(double)>& f, double lo, double hi,
                             int iterations = 200) {
  for (int it = 0; it < iterations && hi - lo > 1e-15; ++it) {
    const double a = lo + (hi - lo) / 3.0;
    const double b = hi - (hi - lo) / 3.0;
    if (f(a) <= f(b)) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return 0.5 * (lo + hi);
}

// Minimizer of the regularized objective over the simplex for K = 2 or 3 by
// direct (nested) search on the objective, no optimality conditions.
inline std::vector<double> direct_ftrl_minimizer(std::span<const double> cumulative,
                                                 const TsallisParams& params) {
  auto value = [&](const std::vector<double>& p) { return ftrl_objective(cumulative, p, params); };
  if (cumulative.size() == 2) {
    const double x =
        ternary_argmin([&](double a) { return value({a, 1.0 - a}); }, 0.0, 1.0);
    return {x, 1.0 - x};
  }
  // Inner minimum over the split of the remaining mass is convex in the outer
  // coordinate, so nested ternary search converges.
  auto inner = [&](double a) {
    const double rest = 1.0 - a;
    const double b =
        ternary_argmin([&](double s) { return value({a, s * rest, (1.0 - s) * rest}); }, 0.0, 1.0,
                       120);
    return b;
  };
  const double a = ternary_argmin(
      [&](double x) {
        const double s = inner(x);
        return value({x, s * (1.0 - x), (1.0 - s) * (1.0 - x)});
      },
      0.0, 1.0, 120);
  const double s = inner(a);
  return {a, s * (1.0 - a), (1.0 - s) * (1.0 - a)};
}

struct EstimatorMoments {
  std::vector<double> mean;
  std::vector<double> second;
};

// First and second moments of an estimator, averaging the estimate produced
// for every possible played action by its probability.
inline EstimatorMoments estimator_moments(EstimatorKind kind, const FeedbackGraph& g,
                                          const ActionDistribution& p,
                                          std::span<const double> losses) {
  const std::size_t k = g.size();
  EstimatorMoments m{std::vector<double>(k, 0.0), std::vector<double>(k, 0.0)};
  for (NodeId played = 0; played < k; ++played) {
    if (p[played] == 0.0) continue;
    const EstimatedLoss est = estimate(kind, RoundObservation(g, played, losses), p);
    for (NodeId i = 0; i < k; ++i) {
      m.mean[i] += p[played] * est.values[i];
      m.second[i] += p[played] * est.values[i] * est.values[i];
    }
  }
  return m;
}

}  // namespace fgt::oracle
