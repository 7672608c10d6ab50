#include "fgtsallis/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "fgtsallis/errors.hpp"
#include "fgtsallis/random.hpp"

namespace fgt {

// ---------------------------------------------------------------------------
// FeedbackGraph / GraphBuilder

GraphBuilder::GraphBuilder(std::size_t k) {
  if (k == 0) throw InvalidParams("graph needs at least one node");
  adjacency_.assign(k, NodeSet(k));
}

GraphBuilder& GraphBuilder::add_edge(NodeId i, NodeId j) {
  const std::size_t k = adjacency_.size();
  if (i >= k || j >= k) {
    throw InvalidParams("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") out of range for K = " + std::to_string(k));
  }
  adjacency_[i].set(j);
  adjacency_[j].set(i);
  return *this;
}

GraphBuilder& GraphBuilder::add_self_loops() {
  for (NodeId i = 0; i < adjacency_.size(); ++i) adjacency_[i].set(i);
  return *this;
}

GraphBuilder& GraphBuilder::add_clique(std::span<const NodeId> nodes) {
  for (NodeId a : nodes) {
    for (NodeId b : nodes) add_edge(a, b);
  }
  return *this;
}

FeedbackGraph GraphBuilder::build() const {
  FeedbackGraph g;
  g.adjacency_ = adjacency_;
  return g;
}

FeedbackGraph FeedbackGraph::from_edges(std::size_t k, std::span<const Edge> edges) {
  GraphBuilder builder(k);
  for (const auto& [i, j] : edges) builder.add_edge(i, j);
  return builder.build();
}

bool FeedbackGraph::all_self_loops() const {
  for (NodeId i = 0; i < size(); ++i) {
    if (!has_self_loop(i)) return false;
  }
  return true;
}

NodeSet FeedbackGraph::loopless_nodes() const {
  NodeSet s(size());
  for (NodeId i = 0; i < size(); ++i) {
    if (!has_self_loop(i)) s.set(i);
  }
  return s;
}

std::vector<Edge> FeedbackGraph::edges() const {
  std::vector<Edge> out;
  for (NodeId i = 0; i < size(); ++i) {
    for (NodeId j = i; j < size(); ++j) {
      if (adjacent(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

bool validate_strong_observability(const FeedbackGraph& g) {
  const std::size_t k = g.size();
  for (NodeId i = 0; i < k; ++i) {
    if (g.has_self_loop(i)) continue;
    for (NodeId j = 0; j < k; ++j) {
      if (j != i && !g.adjacent(j, i)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Independence number

bool is_independent_set(const FeedbackGraph& g, std::span<const NodeId> nodes) {
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (nodes[a] == nodes[b] || g.adjacent(nodes[a], nodes[b])) return false;
    }
  }
  return true;
}

namespace {

using Mask = std::uint64_t;

constexpr Mask bit(NodeId v) { return Mask{1} << v; }

// Maximum clique of the complement graph (= maximum independent set of g),
// branch and bound with sequential greedy coloring as the upper bound.
class MaxIndependentSet {
 public:
  explicit MaxIndependentSet(const FeedbackGraph& g) : k_(g.size()), compatible_(g.size()) {
    const Mask all = k_ == 64 ? ~Mask{0} : (bit(k_) - 1);
    for (NodeId i = 0; i < k_; ++i) {
      Mask adjacent = 0;
      for (NodeId j = 0; j < k_; ++j) {
        if (g.adjacent(i, j)) adjacent |= bit(j);
      }
      compatible_[i] = all & ~adjacent & ~bit(i);
    }
  }

  std::vector<NodeId> solve() {
    std::vector<NodeId> current;
    const Mask all = k_ == 64 ? ~Mask{0} : (bit(k_) - 1);
    expand(all, current);
    return best_;
  }

 private:
  void expand(Mask candidates, std::vector<NodeId>& current) {
    std::vector<NodeId> order;
    std::vector<std::size_t> bounds;
    order.reserve(static_cast<std::size_t>(std::popcount(candidates)));
    Mask uncolored = candidates;
    std::size_t color = 0;
    while (uncolored != 0) {
      ++color;
      Mask open = uncolored;
      while (open != 0) {
        const NodeId v = static_cast<NodeId>(std::countr_zero(open));
        open &= ~bit(v);
        open &= ~compatible_[v];
        uncolored &= ~bit(v);
        order.push_back(v);
        bounds.push_back(color);
      }
    }
    for (std::size_t idx = order.size(); idx-- > 0;) {
      if (current.size() + bounds[idx] <= best_.size()) return;
      const NodeId v = order[idx];
      current.push_back(v);
      const Mask next = candidates & compatible_[v];
      if (next == 0) {
        if (current.size() > best_.size()) best_ = current;
      } else {
        expand(next, current);
      }
      current.pop_back();
      candidates &= ~bit(v);
    }
  }

  std::size_t k_;
  std::vector<Mask> compatible_;
  std::vector<NodeId> best_;
};

std::vector<NodeId> greedy_independent_set(const FeedbackGraph& g) {
  const std::size_t k = g.size();
  NodeSet remaining(k);
  remaining.set();
  std::vector<NodeId> chosen;
  while (remaining.any()) {
    NodeId pick = NodeSet::npos;
    std::size_t pick_degree = 0;
    for (NodeId v = remaining.find_first(); v != NodeSet::npos; v = remaining.find_next(v)) {
      NodeSet others = g.neighborhood(v) & remaining;
      others.reset(v);
      const std::size_t degree = others.count();
      if (pick == NodeSet::npos || degree < pick_degree) {
        pick = v;
        pick_degree = degree;
      }
    }
    chosen.push_back(pick);
    remaining -= g.neighborhood(pick);
    remaining.reset(pick);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

IndependenceCertificate independence_number(const FeedbackGraph& g, IndependenceMode mode,
                                            std::size_t exact_limit) {
  IndependenceCertificate cert;
  if (mode == IndependenceMode::greedy) {
    cert.witness_set = greedy_independent_set(g);
    cert.method = IndependenceCertificate::Method::greedy_lower_bound;
  } else {
    if (exact_limit > 64) throw InvalidParams("exact_limit above 64 is not supported");
    if (g.size() > exact_limit) {
      throw SizeLimitExceeded("exact independence number requested for K = " +
                              std::to_string(g.size()) + " > " + std::to_string(exact_limit));
    }
    cert.witness_set = MaxIndependentSet(g).solve();
    std::sort(cert.witness_set.begin(), cert.witness_set.end());
    cert.method = IndependenceCertificate::Method::exact;
  }
  cert.alpha = cert.witness_set.size();
  return cert;
}

// ---------------------------------------------------------------------------
// Variance certificate

VarianceCertificate variance_certificate(const FeedbackGraph& g, const ActionDistribution& p,
                                         double b, std::span<const NodeId> subset) {
  const std::size_t k = g.size();
  if (p.size() != k) throw InvalidDistribution("distribution size does not match graph");
  check_simplex(p.probs());
  if (!(b >= 0.0 && b <= 1.0)) throw InvalidParams("b must lie in [0, 1]");
  if (subset.empty()) throw InvalidSubset("subset is empty");

  NodeSet in_subset(k);
  for (NodeId v : subset) {
    if (v >= k) throw InvalidSubset("node " + std::to_string(v) + " out of range");
    if (!g.has_self_loop(v)) {
      throw InvalidSubset("node " + std::to_string(v) + " has no self-loop");
    }
    in_subset.set(v);
  }

  std::vector<double> mass(k, 0.0);
  for (NodeId v = in_subset.find_first(); v != NodeSet::npos; v = in_subset.find_next(v)) {
    const NodeSet& nbrs = g.neighborhood(v);
    for (NodeId u = nbrs.find_first(); u != NodeSet::npos; u = nbrs.find_next(u)) {
      mass[v] += p[u];
    }
  }

  VarianceCertificate cert;
  for (NodeId v = in_subset.find_first(); v != NodeSet::npos; v = in_subset.find_next(v)) {
    // P(v) >= p(v) thanks to the self-loop, so a zero mass means p(v) = 0.
    if (mass[v] > 0.0) cert.value += std::pow(p[v], 1.0 + b) / mass[v];
  }

  NodeSet remaining = in_subset;
  while (remaining.any()) {
    NodeId pick = NodeSet::npos;
    double pick_ratio = -1.0;
    for (NodeId v = remaining.find_first(); v != NodeSet::npos; v = remaining.find_next(v)) {
      const double ratio = mass[v] > 0.0 ? std::pow(p[v], b) / mass[v] : 0.0;
      if (ratio > pick_ratio) {
        pick = v;
        pick_ratio = ratio;
      }
    }
    cert.greedy_set.push_back(pick);
    cert.greedy_bound += std::pow(p[pick], b);
    remaining -= g.neighborhood(pick);
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Generators

FeedbackGraph bandit_graph(std::size_t k) { return GraphBuilder(k).add_self_loops().build(); }

FeedbackGraph experts_graph(std::size_t k) {
  std::vector<NodeId> all(k);
  std::iota(all.begin(), all.end(), NodeId{0});
  return GraphBuilder(k).add_clique(all).build();
}

FeedbackGraph disjoint_cliques(std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw InvalidParams("disjoint_cliques needs at least one clique");
  std::size_t k = 0;
  for (std::size_t s : sizes) {
    if (s == 0) throw InvalidParams("clique sizes must be positive");
    k += s;
  }
  GraphBuilder builder(k);
  NodeId start = 0;
  for (std::size_t s : sizes) {
    std::vector<NodeId> members(s);
    std::iota(members.begin(), members.end(), start);
    builder.add_clique(members);
    start += s;
  }
  return builder.build();
}

FeedbackGraph erdos_renyi(std::size_t k, double prob, std::uint64_t seed) {
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidParams("edge probability must lie in [0, 1]");
  GraphBuilder builder(k);
  builder.add_self_loops();
  Rng rng(seed);
  for (NodeId i = 0; i < k; ++i) {
    for (NodeId j = i + 1; j < k; ++j) {
      if (bernoulli(rng, prob)) builder.add_edge(i, j);
    }
  }
  return builder.build();
}

FeedbackGraph no_selfloop_star(std::size_t hubs, std::span<const std::size_t> leaf_cliques) {
  std::size_t leaves = 0;
  for (std::size_t s : leaf_cliques) {
    if (s == 0) throw InvalidParams("leaf clique sizes must be positive");
    leaves += s;
  }
  const std::size_t k = hubs + leaves;
  if (hubs == 0) throw InvalidParams("no_selfloop_star needs at least one hub");
  if (k < 2) throw InvalidParams("a lone loopless node observes nothing");
  GraphBuilder builder(k);
  for (NodeId h = 0; h < hubs; ++h) {
    for (NodeId j = 0; j < k; ++j) {
      if (j != h) builder.add_edge(h, j);
    }
  }
  NodeId start = hubs;
  for (std::size_t s : leaf_cliques) {
    std::vector<NodeId> members(s);
    std::iota(members.begin(), members.end(), start);
    builder.add_clique(members);
    start += s;
  }
  return builder.build();
}

FeedbackGraph generate_graph(const GraphSpec& spec) {
  using Kind = GraphSpec::Kind;
  FeedbackGraph g;
  switch (spec.kind) {
    case Kind::bandit:
      g = bandit_graph(spec.k);
      break;
    case Kind::experts:
      g = experts_graph(spec.k);
      break;
    case Kind::disjoint_cliques: {
      const std::size_t total = std::accumulate(spec.sizes.begin(), spec.sizes.end(), std::size_t{0});
      if (spec.k != 0 && total != spec.k) {
        throw InvalidParams("clique sizes sum to " + std::to_string(total) + ", expected K = " +
                            std::to_string(spec.k));
      }
      g = disjoint_cliques(spec.sizes);
      break;
    }
    case Kind::erdos_renyi:
      g = erdos_renyi(spec.k, spec.prob, spec.seed);
      break;
    case Kind::no_selfloop_star: {
      const std::size_t total =
          spec.hubs + std::accumulate(spec.sizes.begin(), spec.sizes.end(), std::size_t{0});
      if (spec.k != 0 && total != spec.k) {
        throw InvalidParams("hubs plus leaf cliques give " + std::to_string(total) +
                            " nodes, expected K = " + std::to_string(spec.k));
      }
      g = no_selfloop_star(spec.hubs, spec.sizes);
      break;
    }
  }
  if (!validate_strong_observability(g)) {
    throw InvalidParams("generated graph is not strongly observable");
  }
  return g;
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_edge_list(const FeedbackGraph& g) {
  std::ostringstream out;
  out << "K " << g.size() << '\n';
  for (const auto& [i, j] : g.edges()) out << (i + 1) << ' ' << (j + 1) << '\n';
  return out.str();
}

FeedbackGraph parse_edge_list(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<GraphBuilder> builder;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first) || first.front() == '#') continue;
    if (!builder) {
      long long declared = 0;
      if (first != "K" || !(fields >> declared) || declared <= 0) {
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'K <int>'");
      }
      k = static_cast<std::size_t>(declared);
      builder.emplace(k);
      continue;
    }
    long long i = 0;
    long long j = 0;
    std::string rest;
    try {
      i = std::stoll(first);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed edge");
    }
    if (!(fields >> j) || (fields >> rest)) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'i j'");
    }
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > k || static_cast<std::size_t>(j) > k) {
      throw ParseError("line " + std::to_string(line_no) + ": node out of range");
    }
    builder->add_edge(static_cast<NodeId>(i - 1), static_cast<NodeId>(j - 1));
  }
  if (!builder) throw ParseError("missing 'K <int>' header");
  return builder->build();
}

}  // namespace fgt
