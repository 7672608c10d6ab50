#include "fgtsallis/replay.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "fgtsallis/errors.hpp"

namespace fgt {

using nlohmann::json;

void write_replay(Environment& env, std::ostream& out) {
  json header;
  header["type"] = "header";
  header["K"] = env.num_actions();
  header["T"] = env.horizon();
  json graphs = json::array();
  for (std::size_t id = 0; id < env.graphs().size(); ++id) {
    graphs.push_back({{"id", id}, {"edge_list", to_edge_list(env.graphs()[id])}});
  }
  header["graphs"] = std::move(graphs);
  out << header.dump() << '\n';
  for (long t = 0; t < env.horizon(); ++t) {
    const EnvRound round = env.next();
    json record;
    record["t"] = round.t;
    record["graph_id"] = round.graph_id;
    record["losses"] = round.losses;
    out << record.dump() << '\n';
  }
}

ReplayEnvironment ReplayEnvironment::load(std::istream& in) {
  ReplayEnvironment env;
  std::string line;
  long line_no = 0;
  bool have_header = false;
  long declared_t = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const json record = json::parse(line);
      if (!have_header) {
        if (record.value("type", "") != "header") throw ParseError("first record must be the header");
        env.k_ = record.at("K").get<std::size_t>();
        declared_t = record.at("T").get<long>();
        const auto& graphs = record.at("graphs");
        for (std::size_t id = 0; id < graphs.size(); ++id) {
          if (graphs[id].at("id").get<std::size_t>() != id) {
            throw ParseError("graph ids must be 0, 1, 2, ... in order");
          }
          FeedbackGraph g = parse_edge_list(graphs[id].at("edge_list").get<std::string>());
          if (g.size() != env.k_) throw ParseError("graph size does not match K");
          if (!validate_strong_observability(g)) {
            throw ParseError("replay graph " + std::to_string(id) + " is not strongly observable");
          }
          env.graphs_.push_back(std::move(g));
        }
        if (env.graphs_.empty()) throw ParseError("replay header lists no graphs");
        have_header = true;
        continue;
      }
      EnvRound round;
      round.t = record.at("t").get<long>();
      round.graph_id = record.at("graph_id").get<std::size_t>();
      round.losses = record.at("losses").get<std::vector<double>>();
      if (round.t != static_cast<long>(env.rounds_.size()) + 1) {
        throw ParseError("rounds must be numbered 1, 2, 3, ...");
      }
      if (round.graph_id >= env.graphs_.size()) throw ParseError("unknown graph id");
      if (round.losses.size() != env.k_) throw ParseError("loss vector has the wrong size");
      for (double x : round.losses) {
        if (!(x >= 0.0 && x <= 1.0)) throw ParseError("losses must lie in [0, 1]");
      }
      env.rounds_.push_back(std::move(round));
    }
  } catch (const json::exception& e) {
    throw ParseError("replay line " + std::to_string(line_no) + ": " + e.what());
  } catch (const Error& e) {
    throw ParseError("replay line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw ParseError("replay is empty");
  if (static_cast<long>(env.rounds_.size()) != declared_t) {
    throw ParseError("header declares T = " + std::to_string(declared_t) + " but file has " +
                     std::to_string(env.rounds_.size()) + " rounds");
  }
  return env;
}

EnvRound ReplayEnvironment::next() {
  if (cursor_ >= rounds_.size()) throw InvalidParams("replay exhausted");
  return rounds_[cursor_++];
}

}  // namespace fgt
