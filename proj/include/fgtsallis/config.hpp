#pragma once

#include <string>

#include <json.hpp>

#include "fgtsallis/harness.hpp"
#include "fgtsallis/verify.hpp"

namespace fgt {

// JSON configuration. Every parser throws ConfigError with the offending key.
//
// Run:
//   {"learner": "qftrl_thm1", "T": 10000, "seeds": [1, 2] | 20, "output": "dir",
//    "tuning": {"q": .., "eta": .., "alpha": ..}, "replay": "file.jsonl",
//    "vary_environment": true, "environment": {...}}
// Environment:
//   {"kind": "fixed_adversarial" | "time_varying" | "mtb_lower_bound", "K": 8, "seed": 0,
//    "graphs": [{"kind": "disjoint_cliques", "sizes": [4, 4]}, ...],
//    "schedule": "fixed" | "periodic" | "uniform_random", "pattern": [0, 1],
//    "losses": {"kind": "bernoulli", "mean": 0.5, "gap": 0.1, "best": 0, ...},
//    "mtb": {"alpha": 2, "target": 3, "c": 2.30, "epsilon": 0.01}}
// Sweep:
//   {"K": [16], "alpha": [1, 2, 4], "T": [1000], "learners": ["qftrl_thm1"],
//    "seeds": 20, "losses": {...}, "environment_seed": 0}

GraphSpec parse_graph_spec(const nlohmann::json& j);
LossSpec parse_loss_spec(const nlohmann::json& j);
EnvironmentSpec parse_environment_spec(const nlohmann::json& j, long horizon);
RunConfig parse_run_config(const nlohmann::json& j);
SweepConfig parse_sweep_config(const nlohmann::json& j);
VerifyBudget parse_verify_budget(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

}  // namespace fgt
