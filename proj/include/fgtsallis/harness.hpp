#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fgtsallis/environments.hpp"
#include "fgtsallis/learners.hpp"

namespace fgt {

enum class LearnerKind { qftrl_thm1, qftrl_thm2, doubling, uniform_baseline };

std::string to_string(LearnerKind kind);
LearnerKind parse_learner_kind(const std::string& name);

struct TuningOverrides {
  std::optional<double> q;
  std::optional<double> eta;
  std::optional<double> alpha;
};

struct RunConfig {
  LearnerKind learner = LearnerKind::qftrl_thm1;
  EnvironmentSpec environment;
  long horizon = 1;
  std::vector<std::uint64_t> seeds;
  std::string output_dir;
  TuningOverrides tuning;
  // When set, rounds come from this replay file instead of `environment`.
  std::string replay_path;
  // Draw a fresh environment stream per run seed; otherwise every seed faces
  // the stream of environment.seed.
  bool vary_environment = true;

  // Throws ConfigError.
  void validate() const;
};

struct RoundRecord {
  long t = 0;
  NodeId action = 0;
  std::size_t graph_id = 0;
  double loss = 0.0;
  std::optional<double> variance;  // Bbar_t(q) of the regularizer in force
  int epoch = 0;
  double entropy = 0.0;  // Shannon entropy of p_t
};

struct SeedResult {
  std::uint64_t seed = 0;
  double learner_loss = 0.0;
  // Sum over rounds of <p_t, loss_t>.
  double expected_learner_loss = 0.0;
  std::vector<double> action_losses;
  double best_loss = 0.0;
  NodeId best_action = 0;
  double regret = 0.0;         // realized
  double pseudo_regret = 0.0;  // expected over the learner's draws, this loss sequence
  double alpha_sum = 0.0;      // sum over rounds of alpha(G_t)
  std::optional<TsallisParams> params;  // final epoch for the doubling learner
  std::vector<EpochInfo> epochs;
  int restarts = 0;
};

struct RegretSummary {
  std::string learner;
  std::size_t k = 0;
  long horizon = 0;
  double average_alpha = 0.0;  // over rounds, seed-averaged
  double tuning_alpha = 0.0;   // alpha handed to the fixed-graph tunings
  std::vector<SeedResult> seeds;
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_pseudo_regret = 0.0;
  std::optional<double> bound;
  std::optional<double> ratio;  // mean_regret / bound
};

struct RunResult {
  RegretSummary summary;
  // Per seed, in config order; empty unless requested.
  std::vector<std::vector<RoundRecord>> records;
};

// Regret bounds: self-loop tuning, general tuning, doubling. alpha_sum = sum_t alpha_t.
double bound_self_loops(std::size_t k, double alpha, long horizon);
double bound_general(std::size_t k, double alpha, long horizon);
double bound_doubling(std::size_t k, double alpha_sum, long horizon);
// 4 sqrt(6e) (sqrt(pi) + sqrt(4 - 2 ln 2)) / ln 2.
double doubling_constant();
// sqrt(alpha T log_alpha K) / (18 sqrt 2).
double lower_bound_constant_value(std::size_t k, double alpha, long horizon);

// Exact independence numbers of an environment's graphs (greedy lower bound
// when K exceeds the exact limit).
std::vector<std::size_t> graph_alphas(const Environment& env);

std::unique_ptr<Environment> make_run_environment(const RunConfig& config, std::uint64_t seed);
std::unique_ptr<Learner> make_learner(const RunConfig& config, std::size_t k, double tuning_alpha,
                                      std::uint64_t seed);

// One protocol run for one seed. Throws RunAborted on module errors.
SeedResult run_seed(const RunConfig& config, std::uint64_t seed,
                    std::vector<RoundRecord>* records = nullptr);

RunResult run(const RunConfig& config, bool keep_records = false);

// Runs fn(0..n-1) on a pool of worker threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t workers = 0);

// ---------------------------------------------------------------------------
// Output

void write_records_jsonl(const std::vector<RoundRecord>& records, const SeedResult& result,
                         std::ostream& out);
void write_records_csv(const std::vector<RoundRecord>& records, std::ostream& out);
void write_summary_csv(const RegretSummary& summary, std::ostream& out);

// ---------------------------------------------------------------------------
// Sweep over the disjoint-clique family

struct SweepConfig {
  std::vector<std::size_t> ks;
  std::vector<std::size_t> alphas;
  std::vector<long> horizons;
  std::vector<LearnerKind> learners;
  std::vector<std::uint64_t> seeds;
  LossSpec losses;
  std::uint64_t environment_seed = 0;

  void validate() const;
};

struct SweepRow {
  std::size_t k = 0;
  std::size_t alpha = 0;        // requested
  std::size_t exact_alpha = 0;  // computed from the generated graph
  long horizon = 0;
  LearnerKind learner = LearnerKind::qftrl_thm1;
  std::uint64_t seed = 0;
  std::optional<double> q;
  std::optional<double> eta;
  double regret = 0.0;
  double pseudo_regret = 0.0;
  std::optional<double> bound;
};

// Clique sizes for alpha near-equal cliques over K actions.
std::vector<std::size_t> balanced_cliques(std::size_t k, std::size_t alpha);

std::vector<SweepRow> sweep(const SweepConfig& config);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);

}  // namespace fgt
