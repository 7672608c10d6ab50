#include "fgtsallis/distribution.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fgtsallis/errors.hpp"

namespace fgt {

void check_simplex(std::span<const double> probs, double tolerance) {
  if (probs.empty()) throw InvalidDistribution("empty distribution");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw InvalidDistribution("entry " + std::to_string(i) + " is negative or not finite");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > tolerance) {
    throw InvalidDistribution("entries sum to " + std::to_string(total));
  }
}

ActionDistribution::ActionDistribution(std::vector<double> probs) : probs_(std::move(probs)) {
  check_simplex(probs_);
}

ActionDistribution ActionDistribution::uniform(std::size_t k) {
  if (k == 0) throw InvalidDistribution("empty distribution");
  return ActionDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

std::size_t ActionDistribution::sample(double u) const {
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    cumulative += probs_[i];
    if (u < cumulative) return i;
  }
  // Rounding left u above the total: fall back to the last action with mass.
  for (std::size_t i = probs_.size(); i-- > 0;) {
    if (probs_[i] > 0.0) return i;
  }
  return probs_.size() - 1;
}

double ActionDistribution::shannon_entropy() const {
  double h = 0.0;
  for (double x : probs_) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

}  // namespace fgt
