#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "fgtsallis/distribution.hpp"

namespace fgt {

using NodeId = std::size_t;
using NodeSet = boost::dynamic_bitset<std::uint64_t>;
using Edge = std::pair<NodeId, NodeId>;

class GraphBuilder;

// Undirected feedback graph over K actions. Self-loops are explicit: playing
// action i reveals the losses of every j in neighborhood(i), which contains i
// only if i has a self-loop. Immutable once built.
class FeedbackGraph {
 public:
  FeedbackGraph() = default;

  // Node ids are 0-based; (i, i) adds a self-loop.
  static FeedbackGraph from_edges(std::size_t k, std::span<const Edge> edges);

  std::size_t size() const { return adjacency_.size(); }
  bool adjacent(NodeId i, NodeId j) const { return adjacency_[i].test(j); }
  bool has_self_loop(NodeId i) const { return adjacency_[i].test(i); }
  const NodeSet& neighborhood(NodeId i) const { return adjacency_[i]; }

  bool all_self_loops() const;
  // Nodes without a self-loop.
  NodeSet loopless_nodes() const;
  // Edges (i, j) with i <= j, in lexicographic order.
  std::vector<Edge> edges() const;

  bool operator==(const FeedbackGraph&) const = default;

 private:
  friend class GraphBuilder;
  std::vector<NodeSet> adjacency_;
};

class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t k);

  GraphBuilder& add_edge(NodeId i, NodeId j);
  GraphBuilder& add_self_loops();
  GraphBuilder& add_clique(std::span<const NodeId> nodes);

  FeedbackGraph build() const;

 private:
  std::vector<NodeSet> adjacency_;
};

bool validate_strong_observability(const FeedbackGraph& g);

// ---------------------------------------------------------------------------
// Independence number

enum class IndependenceMode { exact, greedy };

struct IndependenceCertificate {
  enum class Method { exact, greedy_lower_bound };

  std::size_t alpha = 0;
  std::vector<NodeId> witness_set;
  Method method = Method::exact;
};

inline constexpr std::size_t kDefaultExactLimit = 40;

// Only edges between distinct nodes count; self-loops never disqualify a set.
bool is_independent_set(const FeedbackGraph& g, std::span<const NodeId> nodes);

// Exact mode runs a branch and bound with greedy-coloring pruning and throws
// SizeLimitExceeded when K > exact_limit. Greedy mode returns a maximal
// independent set built by repeatedly taking a minimum-degree node.
IndependenceCertificate independence_number(const FeedbackGraph& g, IndependenceMode mode,
                                            std::size_t exact_limit = kDefaultExactLimit);

// ---------------------------------------------------------------------------
// Variance certificate

struct VarianceCertificate {
  double value = 0.0;
  std::vector<NodeId> greedy_set;
  // Sum over greedy_set of p(v)^b; always >= value.
  double greedy_bound = 0.0;
};

// value = sum over v in U of p(v)^(1+b) / P(v), where P(v) is the mass of the
// neighborhood of v. The greedy set repeatedly takes the remaining node of U
// maximising p(v)^b / P(v) (lowest id on ties) and discards its neighbors.
// Every node of U must carry a self-loop.
VarianceCertificate variance_certificate(const FeedbackGraph& g, const ActionDistribution& p,
                                         double b, std::span<const NodeId> subset);

// ---------------------------------------------------------------------------
// Generators

FeedbackGraph bandit_graph(std::size_t k);
FeedbackGraph experts_graph(std::size_t k);
// Self-looped cliques of the given sizes, laid out consecutively.
FeedbackGraph disjoint_cliques(std::span<const std::size_t> sizes);
// G(K, prob) with every self-loop present.
FeedbackGraph erdos_renyi(std::size_t k, double prob, std::uint64_t seed);
// `hubs` loopless nodes adjacent to every other node, followed by self-looped
// leaf cliques of the given sizes. With hubs = K = 2 this is the single
// loopless edge.
FeedbackGraph no_selfloop_star(std::size_t hubs, std::span<const std::size_t> leaf_cliques);

struct GraphSpec {
  enum class Kind { bandit, experts, disjoint_cliques, erdos_renyi, no_selfloop_star };

  Kind kind = Kind::bandit;
  std::size_t k = 0;
  std::vector<std::size_t> sizes;  // cliques, or leaf cliques for the star
  double prob = 0.0;
  std::uint64_t seed = 0;
  std::size_t hubs = 0;
};

// Throws InvalidParams when the parameters are inconsistent.
FeedbackGraph generate_graph(const GraphSpec& spec);

// ---------------------------------------------------------------------------
// Edge-list text format: a "K <int>" header, then one "i j" line per edge,
// 1-indexed, self-loops as "i i".

std::string to_edge_list(const FeedbackGraph& g);
FeedbackGraph parse_edge_list(std::string_view text);

}  // namespace fgt
