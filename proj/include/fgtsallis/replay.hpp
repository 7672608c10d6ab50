#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fgtsallis/environments.hpp"

namespace fgt {

// JSON-lines replay files. The first line is a header
//   {"type":"header","K":..,"T":..,"graphs":[{"id":0,"edge_list":"K 4\n1 1\n..."}, ...]}
// and every following line is one round
//   {"t":..,"graph_id":..,"losses":[..]}
// with t running 1..T.

// Drains `env` into `out`.
void write_replay(Environment& env, std::ostream& out);

class ReplayEnvironment : public Environment {
 public:
  // Reads and validates a complete replay; throws ParseError on malformed input.
  static ReplayEnvironment load(std::istream& in);

  std::size_t num_actions() const override { return k_; }
  long horizon() const override { return static_cast<long>(rounds_.size()); }
  const std::vector<FeedbackGraph>& graphs() const override { return graphs_; }
  EnvRound next() override;

  void rewind() { cursor_ = 0; }

 private:
  std::size_t k_ = 0;
  std::vector<FeedbackGraph> graphs_;
  std::vector<EnvRound> rounds_;
  std::size_t cursor_ = 0;
};

}  // namespace fgt
