// Command-line driver: run, sweep, verify, gen-env, replay.
//
// Exit codes: 0 success, 1 verification failure, 2 configuration error,
// 3 a run aborted or another runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fgtsallis/config.hpp"
#include "fgtsallis/errors.hpp"
#include "fgtsallis/harness.hpp"
#include "fgtsallis/replay.hpp"
#include "fgtsallis/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kVerifyFailed = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "jsonl";
  std::string suite = "all";
  std::string replay;
};

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw fgt::ConfigError("cannot write " + path.string());
  return out;
}

json summary_json(const fgt::RegretSummary& s) {
  json j;
  j["learner"] = s.learner;
  j["K"] = s.k;
  j["T"] = s.horizon;
  j["average_alpha"] = s.average_alpha;
  j["mean_regret"] = s.mean_regret;
  j["stderr_regret"] = s.stderr_regret;
  j["mean_pseudo_regret"] = s.mean_pseudo_regret;
  j["bound"] = s.bound ? json(*s.bound) : json(nullptr);
  j["ratio"] = s.ratio ? json(*s.ratio) : json(nullptr);
  j["seeds"] = json::array();
  for (const auto& r : s.seeds) {
    json seed = {{"seed", r.seed},           {"learner_loss", r.learner_loss},
                 {"best_loss", r.best_loss}, {"best_action", r.best_action},
                 {"regret", r.regret},       {"pseudo_regret", r.pseudo_regret},
                 {"restarts", r.restarts}};
    if (r.params) {
      seed["q"] = r.params->q;
      seed["eta"] = r.params->eta;
    }
    j["seeds"].push_back(std::move(seed));
  }
  return j;
}

fgt::RunConfig load_run_config(const Options& opt) {
  if (opt.config.empty()) throw fgt::ConfigError("--config is required");
  fgt::RunConfig config = fgt::parse_run_config(fgt::load_json_file(opt.config));
  if (opt.seed) config.seeds = {*opt.seed};
  if (!opt.out.empty()) config.output_dir = opt.out;
  if (!opt.replay.empty()) config.replay_path = opt.replay;
  if (opt.format != "jsonl" && opt.format != "csv") {
    throw fgt::ConfigError("--format must be csv or jsonl");
  }
  config.validate();
  return config;
}

int do_run(const Options& opt) {
  const fgt::RunConfig config = load_run_config(opt);
  const bool write = !config.output_dir.empty();
  const fgt::RunResult result = fgt::run(config, write);
  if (write) {
    const fs::path dir(config.output_dir);
    for (std::size_t i = 0; i < config.seeds.size(); ++i) {
      const std::string stem = "rounds_seed" + std::to_string(config.seeds[i]);
      if (opt.format == "csv") {
        auto out = open_output(dir / (stem + ".csv"));
        fgt::write_records_csv(result.records[i], out);
      } else {
        auto out = open_output(dir / (stem + ".jsonl"));
        fgt::write_records_jsonl(result.records[i], result.summary.seeds[i], out);
      }
    }
    auto summary = open_output(dir / "summary.csv");
    fgt::write_summary_csv(result.summary, summary);
  }
  std::cout << summary_json(result.summary).dump(2) << '\n';
  return 0;
}

int do_sweep(const Options& opt) {
  if (opt.config.empty()) throw fgt::ConfigError("--config is required");
  fgt::SweepConfig config = fgt::parse_sweep_config(fgt::load_json_file(opt.config));
  if (opt.seed) config.seeds = {*opt.seed};
  const auto rows = fgt::sweep(config);
  if (opt.out.empty()) {
    fgt::write_sweep_csv(rows, std::cout);
  } else {
    auto out = open_output(fs::path(opt.out) / "sweep.csv");
    fgt::write_sweep_csv(rows, out);
  }
  return 0;
}

int do_verify(const Options& opt) {
  fgt::VerifyBudget budget;
  if (!opt.config.empty()) budget = fgt::parse_verify_budget(fgt::load_json_file(opt.config));
  if (opt.seed) budget.seed = *opt.seed;
  const fgt::VerifyReport report = fgt::verify(fgt::parse_verify_suite(opt.suite), budget);
  const std::string text = report.to_json().dump(2);
  if (opt.out.empty()) {
    std::cout << text << '\n';
  } else {
    auto out = open_output(fs::path(opt.out) / "verify.json");
    out << text << '\n';
    for (const auto& e : report.entries) {
      std::cout << (e.passed ? "PASS " : "FAIL ") << e.suite << ": " << e.invariant
                << " (worst slack " << e.worst_slack << ")\n";
    }
  }
  return report.passed() ? 0 : kVerifyFailed;
}

int do_gen_env(const Options& opt) {
  if (opt.config.empty()) throw fgt::ConfigError("--config is required");
  const json j = fgt::load_json_file(opt.config);
  const long horizon = j.value("T", 0L);
  if (horizon < 1) throw fgt::ConfigError("T must be at least 1");
  if (!j.contains("environment")) throw fgt::ConfigError("missing key 'environment'");
  fgt::EnvironmentSpec spec = fgt::parse_environment_spec(j.at("environment"), horizon);
  if (opt.seed) spec.seed = *opt.seed;
  auto env = fgt::make_environment(spec);
  if (opt.out.empty()) {
    fgt::write_replay(*env, std::cout);
  } else {
    auto out = open_output(fs::path(opt.out) / "replay.jsonl");
    fgt::write_replay(*env, out);
  }
  return 0;
}

int do_replay(Options opt) {
  if (opt.replay.empty()) throw fgt::ConfigError("--replay is required");
  return do_run(opt);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback-graph online learning with Tsallis-entropy FTRL"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON configuration file");
    sub->add_option("--seed", opt.seed, "override the seed list with a single seed");
    sub->add_option("--out", opt.out, "output directory");
    sub->add_option("--format", opt.format, "round stream format: csv or jsonl");
  };
  auto* run = app.add_subcommand("run", "run a learner against an environment");
  auto* sweep = app.add_subcommand("sweep", "regret table over the disjoint-clique family");
  auto* verify = app.add_subcommand("verify", "invariant suites");
  auto* gen = app.add_subcommand("gen-env", "write an environment as a replay file");
  auto* replay = app.add_subcommand("replay", "run a learner against a replay file");
  for (auto* sub : {run, sweep, verify, gen, replay}) add_common(sub);
  verify->add_option("--suite", opt.suite, "lemma1, estimators, solver, doubling or all");
  replay->add_option("--replay", opt.replay, "replay file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*run) return do_run(opt);
    if (*sweep) return do_sweep(opt);
    if (*verify) return do_verify(opt);
    if (*gen) return do_gen_env(opt);
    if (*replay) return do_replay(opt);
  } catch (const fgt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fgt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kConfigError;
  } catch (const fgt::InvalidParams& e) {
    std::cerr << "invalid parameters: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
