#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace fgt {

enum class VerifySuite { lemma1, estimators, solver, doubling, all };

VerifySuite parse_verify_suite(const std::string& name);

struct VerifyBudget {
  std::size_t lemma1_max_k = 6;
  std::size_t lemma1_samples = 200;  // random simplex points per graph
  std::size_t estimator_instances = 1000;
  std::size_t estimator_max_k = 12;
  std::size_t solver_instances = 1000;
  std::size_t solver_max_k = 16;
  std::size_t doubling_seeds = 4;
  long doubling_horizon = 4000;
  std::uint64_t seed = 20240601;
};

// One invariant. slack = tolerance-adjusted bound minus observed quantity,
// minimized over all cases; a negative slack is a violation.
struct VerifyEntry {
  std::string suite;
  std::string invariant;
  bool passed = true;
  double worst_slack = 0.0;
  double tolerance = 0.0;
  long cases = 0;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  double seconds = 0.0;

  bool passed() const;
  nlohmann::json to_json() const;
};

// Never throws on a failed invariant; failures are report entries.
VerifyReport verify(VerifySuite suite, const VerifyBudget& budget = {});

}  // namespace fgt
