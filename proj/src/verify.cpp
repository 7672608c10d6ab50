#include "fgtsallis/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "fgtsallis/environments.hpp"
#include "fgtsallis/errors.hpp"
#include "fgtsallis/learners.hpp"
#include "fgtsallis/oracles.hpp"
#include "fgtsallis/random.hpp"

namespace fgt {

VerifySuite parse_verify_suite(const std::string& name) {
  if (name == "lemma1") return VerifySuite::lemma1;
  if (name == "estimators") return VerifySuite::estimators;
  if (name == "solver") return VerifySuite::solver;
  if (name == "doubling") return VerifySuite::doubling;
  if (name == "all") return VerifySuite::all;
  throw ConfigError("unknown verify suite '" + name + "'");
}

bool VerifyReport::passed() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.passed; });
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json out;
  out["passed"] = passed();
  out["seconds"] = seconds;
  out["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    out["entries"].push_back({{"suite", e.suite},
                              {"invariant", e.invariant},
                              {"passed", e.passed},
                              {"worst_slack", e.worst_slack},
                              {"tolerance", e.tolerance},
                              {"cases", e.cases},
                              {"detail", e.detail}});
  }
  return out;
}

namespace {

// Tracks the smallest slack seen for one invariant.
class Check {
 public:
  Check(std::string suite, std::string invariant, double tolerance) {
    entry_.suite = std::move(suite);
    entry_.invariant = std::move(invariant);
    entry_.tolerance = tolerance;
    entry_.worst_slack = std::numeric_limits<double>::infinity();
  }

  // slack >= 0 passes; NaN fails.
  template <class Detail>
  void record(double slack, Detail&& detail) {
    ++entry_.cases;
    if (!(slack >= 0.0)) entry_.passed = false;
    if (!(slack >= entry_.worst_slack)) {
      entry_.worst_slack = slack;
      if (!(slack >= 0.0) || entry_.detail.empty()) entry_.detail = detail();
    }
  }
  void record(double slack) {
    record(slack, [] { return std::string(); });
  }
  void fail(const std::string& detail) {
    ++entry_.cases;
    entry_.passed = false;
    entry_.worst_slack = -std::numeric_limits<double>::infinity();
    entry_.detail = detail;
  }

  VerifyEntry finish() && {
    if (entry_.cases == 0) entry_.worst_slack = 0.0;
    return std::move(entry_);
  }

 private:
  VerifyEntry entry_;
};

double exp1(Rng& rng) { return -std::log(1.0 - uniform01(rng)); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

std::vector<double> normalized(std::vector<double> x) {
  const double s = std::accumulate(x.begin(), x.end(), 0.0);
  for (double& v : x) v /= s;
  return x;
}

// A mixture of flat, sparse and spiky simplex points.
std::vector<double> random_simplex(Rng& rng, std::size_t k) {
  std::vector<double> x(k);
  switch (uniform_index(rng, 4)) {
    case 0:
      for (double& v : x) v = exp1(rng);
      break;
    case 1: {
      for (double& v : x) v = uniform01(rng) < 0.5 ? exp1(rng) : 0.0;
      x[uniform_index(rng, k)] += exp1(rng) + 1e-3;
      break;
    }
    case 2:
      for (double& v : x) v = std::pow(exp1(rng), 4.0) + 1e-300;
      break;
    default:
      for (double& v : x) v = 1.0 + 0.1 * uniform01(rng);
      break;
  }
  return normalized(std::move(x));
}

std::string describe(const FeedbackGraph& g) { return to_edge_list(g); }

// ---------------------------------------------------------------------------

void lemma1_suite(const VerifyBudget& budget, std::vector<VerifyEntry>& out) {
  Check alpha_check("lemma1", "exact alpha equals subset enumeration", 0.0);
  Check bound("lemma1", "sum p^(1+b)/P <= alpha^(1-b)", 1e-9);
  Check greedy("lemma1", "value <= greedy bound <= alpha^(1-b)", 1e-9);
  Check tight("lemma1", "equality at uniform p on a maximum independent set", 1e-12);
  const double bs[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  Rng rng(derive_seed(budget.seed, 11));

  for (std::size_t k = 1; k <= budget.lemma1_max_k; ++k) {
    std::vector<Edge> pairs;
    for (NodeId i = 0; i < k; ++i) {
      for (NodeId j = i + 1; j < k; ++j) pairs.emplace_back(i, j);
    }
    std::vector<NodeId> all(k);
    std::iota(all.begin(), all.end(), NodeId{0});

    for (unsigned long mask = 0; mask < (1ul << pairs.size()); ++mask) {
      GraphBuilder builder(k);
      builder.add_self_loops();
      for (std::size_t e = 0; e < pairs.size(); ++e) {
        if (mask >> e & 1) builder.add_edge(pairs[e].first, pairs[e].second);
      }
      const FeedbackGraph g = builder.build();

      const auto cert = independence_number(g, IndependenceMode::exact);
      const std::size_t alpha = cert.alpha;
      const std::size_t reference = oracle::brute_force_alpha(g);
      const bool witness_ok =
          cert.witness_set.size() == alpha && is_independent_set(g, cert.witness_set);
      alpha_check.record(alpha == reference && witness_ok ? 0.0 : -1.0, [&] {
        return "exact " + std::to_string(alpha) + " vs " + std::to_string(reference) + "\n" +
               describe(g);
      });

      // Tightness: p uniform on the witness set.
      std::vector<double> tight_p(k, 0.0);
      for (NodeId v : cert.witness_set) tight_p[v] = 1.0 / static_cast<double>(alpha);
      const ActionDistribution tp(tight_p);
      for (double b : bs) {
        const double target = std::pow(static_cast<double>(alpha), 1.0 - b);
        const double value = variance_certificate(g, tp, b, all).value;
        tight.record(1e-12 - std::abs(value - target));
      }

      for (std::size_t s = 0; s < budget.lemma1_samples; ++s) {
        const ActionDistribution p(random_simplex(rng, k));
        for (double b : bs) {
          const double limit = std::pow(static_cast<double>(alpha), 1.0 - b);
          const auto vc = variance_certificate(g, p, b, all);
          bound.record(limit + 1e-9 - vc.value, [&] {
            return "b=" + std::to_string(b) + " value=" + std::to_string(vc.value) + "\n" +
                   describe(g);
          });
          const bool indep = is_independent_set(g, vc.greedy_set);
          const double chain = std::min(vc.greedy_bound * (1.0 + 1e-12) - vc.value,
                                        limit + 1e-9 - vc.greedy_bound);
          greedy.record(indep ? chain : -1.0);
        }
      }
    }
  }
  out.push_back(std::move(alpha_check).finish());
  out.push_back(std::move(bound).finish());
  out.push_back(std::move(greedy).finish());
  out.push_back(std::move(tight).finish());
}

// Random strongly observable graph; loopless nodes see every other node.
FeedbackGraph random_observable_graph(Rng& rng, std::size_t k, bool allow_loopless) {
  const double edge_prob = uniform01(rng);
  std::vector<bool> loopless(k, false);
  if (allow_loopless && k >= 2) {
    for (std::size_t i = 0; i < k; ++i) loopless[i] = uniform01(rng) < 0.3;
  }
  GraphBuilder builder(k);
  for (NodeId i = 0; i < k; ++i) {
    for (NodeId j = i + 1; j < k; ++j) {
      if (loopless[i] || loopless[j] || uniform01(rng) < edge_prob) builder.add_edge(i, j);
    }
    if (!loopless[i]) builder.add_edge(i, i);
  }
  return builder.build();
}

void estimator_suite(const VerifyBudget& budget, std::vector<VerifyEntry>& out) {
  Check unbiased_basic("estimators", "basic: E[estimate] = loss", 1e-10);
  Check unbiased_shifted("estimators", "shifted: E[estimate] = loss", 1e-10);
  Check second_basic("estimators", "basic: E[estimate^2] <= 1/P", 1e-10);
  Check second_shifted("estimators", "shifted: E[estimate^2] <= 1/P outside J", 1e-10);
  Check high_mass("estimators", "at most one loopless action above 1/2", 0.0);
  Rng rng(derive_seed(budget.seed, 12));

  for (std::size_t n = 0; n < budget.estimator_instances; ++n) {
    const std::size_t k = 1 + uniform_index(rng, budget.estimator_max_k);
    const bool self_looped = uniform01(rng) < 0.4;
    const FeedbackGraph g = random_observable_graph(rng, k, !self_looped);
    std::vector<double> probs(k);
    for (double& v : probs) v = exp1(rng) + 1e-6;
    probs = normalized(std::move(probs));
    if (k >= 2 && uniform01(rng) < 0.4) {
      // Push one action above 1/2 so the shifted branch gets exercised.
      const NodeId heavy = uniform_index(rng, k);
      const double mass = 0.5 + 0.49 * uniform01(rng) + 1e-9;
      const double rescale = (1.0 - mass) / (1.0 - probs[heavy]);
      for (double& v : probs) v *= rescale;
      probs[heavy] = mass;
      probs = normalized(std::move(probs));
    }
    const ActionDistribution p(probs);
    std::vector<double> losses(k);
    for (double& v : losses) v = uniform01(rng);
    if (uniform01(rng) < 0.2) losses[uniform_index(rng, k)] = 1.0;

    const auto jt = high_mass_loopless(g, p);
    high_mass.record(jt.size() <= 1 ? 0.0 : -1.0);

    auto run = [&](EstimatorKind kind, Check& mean_check, Check& second_check) {
      const auto m = oracle::estimator_moments(kind, g, p, losses);
      for (NodeId i = 0; i < k; ++i) {
        mean_check.record(1e-10 - std::abs(m.mean[i] - losses[i]), [&] {
          return "K=" + std::to_string(k) + " i=" + std::to_string(i) +
                 " mean=" + std::to_string(m.mean[i]) + " loss=" + std::to_string(losses[i]);
        });
        if (std::find(jt.begin(), jt.end(), i) != jt.end()) continue;
        const double observe = neighborhood_prob(g, p, i);
        second_check.record(1.0 / observe + 1e-10 - m.second[i]);
      }
    };
    try {
      if (g.all_self_loops()) run(EstimatorKind::basic, unbiased_basic, second_basic);
      run(EstimatorKind::shifted, unbiased_shifted, second_shifted);
    } catch (const Error& e) {
      unbiased_shifted.fail(std::string("estimator raised: ") + e.what());
    }
  }
  out.push_back(std::move(unbiased_basic).finish());
  out.push_back(std::move(unbiased_shifted).finish());
  out.push_back(std::move(second_basic).finish());
  out.push_back(std::move(second_shifted).finish());
  out.push_back(std::move(high_mass).finish());
}

void solver_suite(const VerifyBudget& budget, std::vector<VerifyEntry>& out) {
  Check kkt("solver", "KKT residual", 1e-8);
  Check shift("solver", "invariance to constant loss shifts", 1e-8);
  Check grid("solver", "agreement with direct search for K <= 3", 1e-4);
  Check simplex("solver", "output on the simplex", 1e-12);
  const double qs[] = {0.5, 0.66, 0.9};
  Rng rng(derive_seed(budget.seed, 13));

  for (std::size_t n = 0; n < budget.solver_instances; ++n) {
    const std::size_t k = 2 + uniform_index(rng, budget.solver_max_k - 1);
    const TsallisParams params{qs[n % 3], std::pow(10.0, -3.0 + 3.0 * uniform01(rng))};
    const double scale = std::pow(10.0, 3.0 * uniform01(rng));
    std::vector<double> losses(k);
    for (double& v : losses) v = scale * (2.0 * uniform01(rng) - 1.0);
    const double offset = 200.0 * uniform01(rng) - 100.0;
    if (uniform01(rng) < 0.3) {
      for (double& v : losses) v += offset;
    }
    auto label = [&] {
      return "K=" + std::to_string(k) + " q=" + std::to_string(params.q) +
             " eta=" + std::to_string(params.eta) + " scale=" + std::to_string(scale);
    };
    try {
      const FtrlSolution sol = ftrl_solve(losses, params);
      kkt.record(1e-8 - kkt_residual(losses, params, sol), label);
      const auto& pr = sol.distribution.probs();
      double total = 0.0;
      bool nonneg = true;
      for (double x : pr) {
        total += x;
        nonneg = nonneg && x >= 0.0;
      }
      simplex.record(nonneg ? 1e-12 - std::abs(total - 1.0) : -1.0, label);

      std::vector<double> shifted = losses;
      for (double& v : shifted) v += offset;
      const FtrlSolution moved = ftrl_solve(shifted, params);
      double gap = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        gap = std::max(gap, std::abs(moved.distribution[i] - sol.distribution[i]));
      }
      shift.record(1e-8 - gap, label);

      if (k <= 3) {
        const auto ref = oracle::direct_ftrl_minimizer(losses, params);
        double sup = 0.0;
        for (std::size_t i = 0; i < k; ++i) sup = std::max(sup, std::abs(ref[i] - pr[i]));
        grid.record(1e-4 - sup, label);
      }
    } catch (const Error& e) {
      kkt.fail(label() + ": " + e.what());
    }
  }
  // Small K is rare under the uniform draw; cover it on its own.
  for (std::size_t n = 0; n < budget.solver_instances / 4; ++n) {
    const std::size_t k = 2 + n % 2;
    const TsallisParams params{qs[n % 3], std::pow(10.0, -2.0 + 2.0 * uniform01(rng))};
    std::vector<double> losses(k);
    for (double& v : losses) v = 20.0 * uniform01(rng) - 10.0;
    try {
      const FtrlSolution sol = ftrl_solve(losses, params);
      const auto ref = oracle::direct_ftrl_minimizer(losses, params);
      double sup = 0.0;
      for (std::size_t i = 0; i < k; ++i) sup = std::max(sup, std::abs(ref[i] - sol.distribution[i]));
      grid.record(1e-4 - sup);
    } catch (const Error& e) {
      grid.fail(e.what());
    }
  }
  out.push_back(std::move(kkt).finish());
  out.push_back(std::move(shift).finish());
  out.push_back(std::move(grid).finish());
  out.push_back(std::move(simplex).finish());
}

void doubling_suite(const VerifyBudget& budget, std::vector<VerifyEntry>& out) {
  Check restarts("doubling", "restarts <= ceil(log2 average alpha)", 0.0);
  Check params("doubling", "epoch parameters equal the doubling tuning", 0.0);
  Check variance("doubling", "Bbar_t(q) <= alpha_t^q", 1e-9);
  Check schedule("doubling", "epochs start in order with r increasing by one", 0.0);
  const std::size_t k = 8;
  const long horizon = budget.doubling_horizon;

  for (std::size_t s = 0; s < budget.doubling_seeds; ++s) {
    const std::uint64_t seed = derive_seed(budget.seed, 100 + s);
    SequenceEnvironment env({experts_graph(k), bandit_graph(k)}, GraphSchedule::periodic, {0, 1},
                            LossSpec{}, horizon, seed);
    const double alphas[] = {1.0, static_cast<double>(k)};
    DoublingQFtrl learner(k, horizon, seed);
    double alpha_sum = 0.0;
    try {
      for (long t = 1; t <= horizon; ++t) {
        const EnvRound round = env.next();
        const FeedbackGraph& g = env.graphs()[round.graph_id];
        const double q = *learner.regularizer_q();
        const double bbar = variance_quantity(g, learner.distribution(), q);
        variance.record(std::pow(alphas[round.graph_id], q) + 1e-9 - bbar);
        alpha_sum += alphas[round.graph_id];
        const NodeId action = learner.select_action();
        learner.update(RoundObservation(g, action, round.losses));
      }
    } catch (const Error& e) {
      variance.fail(e.what());
      continue;
    }
    const double alpha_bar = alpha_sum / static_cast<double>(horizon);
    const double allowed = std::ceil(std::log2(alpha_bar));
    restarts.record(allowed - learner.restarts(), [&] {
      return "seed " + std::to_string(seed) + ": " + std::to_string(learner.restarts()) +
             " restarts";
    });
    const auto& epochs = learner.epochs();
    for (std::size_t e = 0; e < epochs.size(); ++e) {
      const TsallisParams expect =
          tune({k, std::ldexp(1.0, epochs[e].r), horizon, TuningVariant::doubling});
      params.record(expect.q == epochs[e].params.q && expect.eta == epochs[e].params.eta ? 0.0
                                                                                          : -1.0);
      const bool ordered = e == 0 ? epochs[e].r == 0 && epochs[e].start_round == 1
                                  : epochs[e].r == epochs[e - 1].r + 1 &&
                                        epochs[e].start_round > epochs[e - 1].start_round;
      schedule.record(ordered ? 0.0 : -1.0);
    }
  }
  out.push_back(std::move(restarts).finish());
  out.push_back(std::move(params).finish());
  out.push_back(std::move(variance).finish());
  out.push_back(std::move(schedule).finish());
}

}  // namespace

VerifyReport verify(VerifySuite suite, const VerifyBudget& budget) {
  const auto start = std::chrono::steady_clock::now();
  VerifyReport report;
  const bool all = suite == VerifySuite::all;
  if (all || suite == VerifySuite::lemma1) lemma1_suite(budget, report.entries);
  if (all || suite == VerifySuite::estimators) estimator_suite(budget, report.entries);
  if (all || suite == VerifySuite::solver) solver_suite(budget, report.entries);
  if (all || suite == VerifySuite::doubling) doubling_suite(budget, report.entries);
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace fgt
