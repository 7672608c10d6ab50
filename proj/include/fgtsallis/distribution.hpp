#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fgt {

inline constexpr double kSimplexTolerance = 1e-9;

// Throws InvalidDistribution unless every entry is finite and nonnegative and
// the entries sum to one within `tolerance`.
void check_simplex(std::span<const double> probs, double tolerance = kSimplexTolerance);

// A point of the probability simplex over K actions.
class ActionDistribution {
 public:
  ActionDistribution() = default;

  // Validates simplex membership.
  explicit ActionDistribution(std::vector<double> probs);

  static ActionDistribution uniform(std::size_t k);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  // Inverse-CDF lookup: smallest i with p(0) + ... + p(i) > u, for u in [0,1).
  std::size_t sample(double u) const;

  // Shannon entropy in nats.
  double shannon_entropy() const;

  bool operator==(const ActionDistribution&) const = default;

 private:
  std::vector<double> probs_;
};

}  // namespace fgt
