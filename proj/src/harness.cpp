#include "fgtsallis/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fgtsallis/errors.hpp"
#include "fgtsallis/replay.hpp"

namespace fgt {

using nlohmann::json;

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::qftrl_thm1: return "qftrl_thm1";
    case LearnerKind::qftrl_thm2: return "qftrl_thm2";
    case LearnerKind::doubling: return "doubling";
    case LearnerKind::uniform_baseline: return "uniform_baseline";
  }
  return "unknown";
}

LearnerKind parse_learner_kind(const std::string& name) {
  for (auto kind : {LearnerKind::qftrl_thm1, LearnerKind::qftrl_thm2, LearnerKind::doubling,
                    LearnerKind::uniform_baseline}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConfigError("unknown learner '" + name + "'");
}

void RunConfig::validate() const {
  if (horizon < 1) throw ConfigError("T must be at least 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (replay_path.empty() && environment.horizon != horizon) {
    throw ConfigError("environment horizon must equal T");
  }
  if (tuning.q && !(*tuning.q >= 0.5 && *tuning.q <= kMaxTsallisQ)) {
    throw ConfigError("q override must lie in [1/2, 1)");
  }
  if (tuning.eta && !(*tuning.eta > 0.0 && std::isfinite(*tuning.eta))) {
    throw ConfigError("eta override must be positive");
  }
  if (tuning.alpha && !(*tuning.alpha >= 1.0)) throw ConfigError("alpha override must be >= 1");
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

double log_factor(std::size_t k, double alpha) {
  return 2.0 + std::log(static_cast<double>(k) / alpha);
}

}  // namespace

double bound_self_loops(std::size_t k, double alpha, long horizon) {
  return 2.0 * std::sqrt(std::numbers::e * alpha * static_cast<double>(horizon) *
                         log_factor(k, alpha));
}

double bound_general(std::size_t k, double alpha, long horizon) {
  return 3.0 * bound_self_loops(k, alpha, horizon);
}

double doubling_constant() {
  return 4.0 * std::sqrt(6.0 * std::numbers::e) *
         (std::sqrt(std::numbers::pi) + std::sqrt(4.0 - 2.0 * std::numbers::ln2)) /
         std::numbers::ln2;
}

double bound_doubling(std::size_t k, double alpha_sum, long horizon) {
  const double alpha_bar = alpha_sum / static_cast<double>(horizon);
  return doubling_constant() * std::sqrt(alpha_sum * log_factor(k, alpha_bar)) +
         std::log2(alpha_bar);
}

double lower_bound_constant_value(std::size_t k, double alpha, long horizon) {
  if (!(alpha > 1.0)) throw InvalidParams("lower bound needs alpha > 1");
  const double games = std::log(static_cast<double>(k)) / std::log(alpha);
  return std::sqrt(alpha * static_cast<double>(horizon) * games) / (18.0 * std::numbers::sqrt2);
}

// ---------------------------------------------------------------------------
// Runs

std::vector<std::size_t> graph_alphas(const Environment& env) {
  std::vector<std::size_t> alphas;
  for (const auto& g : env.graphs()) {
    const auto mode =
        g.size() <= kDefaultExactLimit ? IndependenceMode::exact : IndependenceMode::greedy;
    alphas.push_back(independence_number(g, mode).alpha);
  }
  return alphas;
}

std::unique_ptr<Environment> make_run_environment(const RunConfig& config, std::uint64_t seed) {
  if (!config.replay_path.empty()) {
    std::ifstream in(config.replay_path);
    if (!in) throw ConfigError("cannot open replay file " + config.replay_path);
    return std::make_unique<ReplayEnvironment>(ReplayEnvironment::load(in));
  }
  EnvironmentSpec spec = config.environment;
  if (config.vary_environment) spec.seed = derive_seed(spec.seed, seed);
  return make_environment(spec);
}

std::unique_ptr<Learner> make_learner(const RunConfig& config, std::size_t k, double tuning_alpha,
                                      std::uint64_t seed) {
  const long horizon = config.horizon;
  auto tuned = [&](TuningVariant variant) {
    const double alpha = std::clamp(config.tuning.alpha.value_or(tuning_alpha), 1.0,
                                    static_cast<double>(k));
    TsallisParams params = tune({k, alpha, horizon, variant});
    if (config.tuning.q) params.q = *config.tuning.q;
    if (config.tuning.eta) params.eta = *config.tuning.eta;
    params.validate();
    return params;
  };
  switch (config.learner) {
    case LearnerKind::qftrl_thm1:
      return std::make_unique<QFtrl>(k, tuned(TuningVariant::self_loops), EstimatorKind::basic,
                                     seed);
    case LearnerKind::qftrl_thm2:
      return std::make_unique<QFtrl>(k, tuned(TuningVariant::general), EstimatorKind::shifted,
                                     seed);
    case LearnerKind::doubling:
      return std::make_unique<DoublingQFtrl>(k, horizon, seed);
    case LearnerKind::uniform_baseline:
      return std::make_unique<UniformLearner>(k, seed);
  }
  throw ConfigError("unknown learner");
}

namespace {

// Average of alpha(G_t) over the rounds of an environment copy.
double scan_average_alpha(Environment& env, const std::vector<std::size_t>& alphas) {
  if (alphas.size() == 1) return static_cast<double>(alphas.front());
  double sum = 0.0;
  for (long t = 0; t < env.horizon(); ++t) sum += static_cast<double>(alphas[env.next().graph_id]);
  return sum / static_cast<double>(env.horizon());
}

struct PreparedRun {
  std::unique_ptr<Environment> env;
  std::vector<std::size_t> alphas;
  double tuning_alpha = 1.0;
};

PreparedRun prepare(const RunConfig& config, std::uint64_t seed) {
  PreparedRun run;
  run.env = make_run_environment(config, seed);
  if (run.env->horizon() < config.horizon) {
    throw ConfigError("environment supplies fewer than T rounds");
  }
  run.alphas = graph_alphas(*run.env);
  if (config.learner == LearnerKind::qftrl_thm1 || config.learner == LearnerKind::qftrl_thm2) {
    auto copy = make_run_environment(config, seed);
    run.tuning_alpha = scan_average_alpha(*copy, run.alphas);
  }
  return run;
}

}  // namespace

SeedResult run_seed(const RunConfig& config, std::uint64_t seed,
                    std::vector<RoundRecord>* records) {
  PreparedRun prepared = prepare(config, seed);
  Environment& env = *prepared.env;
  const std::size_t k = env.num_actions();
  auto learner = make_learner(config, k, prepared.tuning_alpha, seed);

  SeedResult result;
  result.seed = seed;
  result.action_losses.assign(k, 0.0);
  if (records) {
    records->clear();
    records->reserve(static_cast<std::size_t>(config.horizon));
  }

  for (long t = 1; t <= config.horizon; ++t) {
    try {
      const EnvRound round = env.next();
      const FeedbackGraph& g = env.graphs()[round.graph_id];
      const ActionDistribution& p = learner->distribution();
      const NodeId action = learner->select_action();

      double expected = 0.0;
      for (NodeId i = 0; i < k; ++i) {
        expected += p[i] * round.losses[i];
        result.action_losses[i] += round.losses[i];
      }
      result.expected_learner_loss += expected;
      result.learner_loss += round.losses[action];
      result.alpha_sum += static_cast<double>(prepared.alphas[round.graph_id]);

      if (records) {
        RoundRecord rec;
        rec.t = t;
        rec.action = action;
        rec.graph_id = round.graph_id;
        rec.loss = round.losses[action];
        if (auto q = learner->regularizer_q()) rec.variance = variance_quantity(g, p, *q);
        rec.epoch = learner->epoch();
        rec.entropy = p.shannon_entropy();
        records->push_back(rec);
      }

      learner->update(RoundObservation(g, action, round.losses));
    } catch (const RunAborted&) {
      throw;
    } catch (const Error& e) {
      throw RunAborted(t, e.what());
    }
  }

  const auto best = std::min_element(result.action_losses.begin(), result.action_losses.end());
  result.best_action = static_cast<NodeId>(best - result.action_losses.begin());
  result.best_loss = *best;
  result.regret = result.learner_loss - result.best_loss;
  result.pseudo_regret = result.expected_learner_loss - result.best_loss;

  if (auto* q = dynamic_cast<QFtrl*>(learner.get())) {
    result.params = q->params();
  } else if (auto* d = dynamic_cast<DoublingQFtrl*>(learner.get())) {
    result.params = d->inner().params();
    result.epochs = d->epochs();
    result.restarts = d->restarts();
  }
  return result;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  std::size_t workers) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

RunResult run(const RunConfig& config, bool keep_records) {
  config.validate();
  RunResult result;
  RegretSummary& summary = result.summary;
  summary.learner = to_string(config.learner);
  summary.horizon = config.horizon;
  summary.seeds.resize(config.seeds.size());
  if (keep_records) result.records.resize(config.seeds.size());

  parallel_for(config.seeds.size(), [&](std::size_t i) {
    summary.seeds[i] =
        run_seed(config, config.seeds[i], keep_records ? &result.records[i] : nullptr);
  });

  summary.k = summary.seeds.front().action_losses.size();
  const double n = static_cast<double>(summary.seeds.size());
  double alpha_sum = 0.0;
  for (const auto& s : summary.seeds) {
    summary.mean_regret += s.regret / n;
    summary.mean_pseudo_regret += s.pseudo_regret / n;
    alpha_sum += s.alpha_sum / n;
  }
  if (summary.seeds.size() > 1) {
    double var = 0.0;
    for (const auto& s : summary.seeds) var += std::pow(s.regret - summary.mean_regret, 2);
    summary.stderr_regret = std::sqrt(var / (n - 1.0) / n);
  }
  summary.average_alpha = alpha_sum / static_cast<double>(config.horizon);
  summary.tuning_alpha = config.tuning.alpha.value_or(summary.average_alpha);

  switch (config.learner) {
    case LearnerKind::qftrl_thm1:
      summary.bound = bound_self_loops(summary.k, summary.average_alpha, config.horizon);
      break;
    case LearnerKind::qftrl_thm2:
      summary.bound = bound_general(summary.k, summary.average_alpha, config.horizon);
      break;
    case LearnerKind::doubling:
      summary.bound = bound_doubling(summary.k, alpha_sum, config.horizon);
      break;
    case LearnerKind::uniform_baseline:
      break;
  }
  if (summary.bound) summary.ratio = summary.mean_regret / *summary.bound;
  return result;
}

// ---------------------------------------------------------------------------
// Output

namespace {

json optional_number(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

std::string csv_number(const std::optional<double>& x) {
  if (!x) return "";
  std::ostringstream s;
  s.precision(17);
  s << *x;
  return s.str();
}

}  // namespace

void write_records_jsonl(const std::vector<RoundRecord>& records, const SeedResult& result,
                         std::ostream& out) {
  for (const auto& r : records) {
    json line;
    line["t"] = r.t;
    line["action"] = r.action;
    line["graph_id"] = r.graph_id;
    line["loss"] = r.loss;
    line["variance"] = optional_number(r.variance);
    line["epoch"] = r.epoch;
    line["entropy"] = r.entropy;
    out << line.dump() << '\n';
  }
  json trailer;
  trailer["type"] = "summary";
  trailer["seed"] = result.seed;
  trailer["action_losses"] = result.action_losses;
  trailer["learner_loss"] = result.learner_loss;
  trailer["best_action"] = result.best_action;
  trailer["best_loss"] = result.best_loss;
  trailer["regret"] = result.regret;
  trailer["pseudo_regret"] = result.pseudo_regret;
  out << trailer.dump() << '\n';
}

void write_records_csv(const std::vector<RoundRecord>& records, std::ostream& out) {
  out << "t,action,graph_id,loss,variance,epoch,entropy\n";
  for (const auto& r : records) {
    out << r.t << ',' << r.action << ',' << r.graph_id << ',' << csv_number(r.loss) << ','
        << csv_number(r.variance) << ',' << r.epoch << ',' << csv_number(r.entropy) << '\n';
  }
}

void write_summary_csv(const RegretSummary& summary, std::ostream& out) {
  out << "learner,K,T,seed,learner_loss,best_loss,regret,pseudo_regret,q,eta,restarts,"
         "average_alpha,bound\n";
  for (const auto& s : summary.seeds) {
    out << summary.learner << ',' << summary.k << ',' << summary.horizon << ',' << s.seed << ','
        << csv_number(s.learner_loss) << ',' << csv_number(s.best_loss) << ','
        << csv_number(s.regret) << ',' << csv_number(s.pseudo_regret) << ','
        << csv_number(s.params ? std::optional(s.params->q) : std::nullopt) << ','
        << csv_number(s.params ? std::optional(s.params->eta) : std::nullopt) << ','
        << s.restarts << ',' << csv_number(s.alpha_sum / static_cast<double>(summary.horizon))
        << ',' << csv_number(summary.bound) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweep

void SweepConfig::validate() const {
  if (ks.empty() || alphas.empty() || horizons.empty() || learners.empty() || seeds.empty()) {
    throw ConfigError("sweep needs non-empty K, alpha, T, learner and seed lists");
  }
  for (long t : horizons) {
    if (t < 1) throw ConfigError("sweep horizons must be positive");
  }
  for (std::size_t a : alphas) {
    if (a < 1) throw ConfigError("sweep alphas must be positive");
  }
}

std::vector<std::size_t> balanced_cliques(std::size_t k, std::size_t alpha) {
  if (alpha < 1 || alpha > k) throw InvalidParams("need 1 <= alpha <= K");
  std::vector<std::size_t> sizes(alpha, k / alpha);
  for (std::size_t i = 0; i < k % alpha; ++i) ++sizes[i];
  return sizes;
}

std::vector<SweepRow> sweep(const SweepConfig& config) {
  config.validate();
  struct Cell {
    std::size_t k, alpha;
    long horizon;
    LearnerKind learner;
  };
  std::vector<Cell> cells;
  for (std::size_t k : config.ks) {
    for (std::size_t alpha : config.alphas) {
      if (alpha > k) continue;
      for (long horizon : config.horizons) {
        for (LearnerKind learner : config.learners) cells.push_back({k, alpha, horizon, learner});
      }
    }
  }
  if (cells.empty()) throw ConfigError("sweep grid has no cell with alpha <= K");

  const std::size_t per_cell = config.seeds.size();
  std::vector<SweepRow> rows(cells.size() * per_cell);
  parallel_for(rows.size(), [&](std::size_t idx) {
    const Cell& cell = cells[idx / per_cell];
    const std::uint64_t seed = config.seeds[idx % per_cell];

    RunConfig rc;
    rc.learner = cell.learner;
    rc.horizon = cell.horizon;
    rc.seeds = {seed};
    rc.environment.kind = EnvironmentSpec::Kind::fixed_adversarial;
    rc.environment.k = cell.k;
    rc.environment.horizon = cell.horizon;
    GraphSpec gs;
    gs.kind = GraphSpec::Kind::disjoint_cliques;
    gs.k = cell.k;
    gs.sizes = balanced_cliques(cell.k, cell.alpha);
    rc.environment.graphs = {gs};
    rc.environment.losses = config.losses;
    rc.environment.seed = config.environment_seed;

    const SeedResult r = run_seed(rc, seed);
    SweepRow& row = rows[idx];
    row.k = cell.k;
    row.alpha = cell.alpha;
    row.exact_alpha = static_cast<std::size_t>(std::lround(r.alpha_sum / cell.horizon));
    row.horizon = cell.horizon;
    row.learner = cell.learner;
    row.seed = seed;
    if (r.params) {
      row.q = r.params->q;
      row.eta = r.params->eta;
    }
    row.regret = r.regret;
    row.pseudo_regret = r.pseudo_regret;
    const double a = static_cast<double>(row.exact_alpha);
    switch (cell.learner) {
      case LearnerKind::qftrl_thm1: row.bound = bound_self_loops(cell.k, a, cell.horizon); break;
      case LearnerKind::qftrl_thm2: row.bound = bound_general(cell.k, a, cell.horizon); break;
      case LearnerKind::doubling: row.bound = bound_doubling(cell.k, r.alpha_sum, cell.horizon); break;
      case LearnerKind::uniform_baseline: break;
    }
  });
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "K,alpha,exact_alpha,T,learner,seed,q,eta,regret,pseudo_regret,bound\n";
  for (const auto& r : rows) {
    out << r.k << ',' << r.alpha << ',' << r.exact_alpha << ',' << r.horizon << ','
        << to_string(r.learner) << ',' << r.seed << ',' << csv_number(r.q) << ','
        << csv_number(r.eta) << ',' << csv_number(r.regret) << ',' << csv_number(r.pseudo_regret)
        << ',' << csv_number(r.bound) << '\n';
  }
}

}  // namespace fgt
