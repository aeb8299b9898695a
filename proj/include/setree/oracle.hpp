#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "setree/coding_tree.hpp"
#include "setree/graph.hpp"

namespace setree {

/// Set partitions of {0, ..., n-1} as restricted growth strings, in
/// lexicographic order: a[0] = 0 and a[i] <= 1 + max(a[0..i-1]).
class RestrictedGrowth {
public:
  explicit RestrictedGrowth(std::size_t n);

  /// Block index of each element in the current partition.
  const std::vector<int>& blocks() const noexcept { return a_; }
  int num_blocks() const noexcept { return n_ == 0 ? 0 : prefix_max_.back() + 1; }

  /// Advances to the next partition; false once all have been visited.
  bool next();

private:
  std::size_t n_;
  std::vector<int> a_;
  std::vector<int> prefix_max_;
};

/// Bell number B(n), for n <= 25.
std::uint64_t bell_number(int n);

/// Nested partitions, outermost first. Level i holds the blocks of vertices
/// under each node at depth i + 1; every level refines the previous one.
/// Blocks are sorted vertex lists ordered by their smallest vertex.
using Partition = std::vector<std::vector<VertexId>>;
using Hierarchy = std::vector<Partition>;

/// Coding tree of height hierarchy.size() + 1 realizing `h`. A block with a
/// single child becomes a unary node.
CodingTree hierarchy_tree(const Graph& g, const Hierarchy& h);

/// Entropy of the tree realized by `h`, evaluated from vertex sets directly.
double hierarchy_entropy(const Graph& g, const Hierarchy& h);

struct OracleResult {
  double optimal_entropy = 0.0;
  Hierarchy optimal_hierarchy;
  std::uint64_t num_candidates = 0;
  double greedy_entropy = 0.0;
  /// greedy_entropy - optimal_entropy.
  double gap = 0.0;

  /// Top-level blocks of the optimum.
  const Partition& optimal_partition() const { return optimal_hierarchy.front(); }
};

inline constexpr int kHeight2MaxVertices = 12;
inline constexpr int kHeightKMaxVertices = 8;
inline constexpr int kHeightKMaxHeight = 3;

/// Minimum entropy over every height-2 coding tree, by enumerating all set
/// partitions. Among optima within 1e-12 the first in restricted-growth order
/// is reported. The greedy result is `minimize` with default settings.
/// Throws SizeError above kHeight2MaxVertices vertices.
OracleResult optimal_height2(const Graph& g);

/// Minimum over all coding trees of height k (shorter ones padded), by
/// enumerating chains of nested partitions. Throws SizeError above
/// kHeightKMaxVertices vertices or kHeightKMaxHeight, ConfigError for k < 2.
OracleResult optimal_heightk(const Graph& g, int k);

/// Every connected simple graph on 1..max_vertices vertices, one per
/// isomorphism class, each relabelled to its lexicographically smallest
/// sorted edge list. Ordered by vertex count, then edge list.
std::vector<Graph> connected_graph_catalog(int max_vertices);

struct GapRecord {
  std::string name;
  VertexId num_vertices = 0;
  Count num_edges = 0;
  OracleResult result;
};

struct GapSummary {
  std::size_t graphs = 0;
  std::size_t nonzero = 0;
  double mean = 0.0;
  double max = 0.0;
  double p95 = 0.0;
};

/// Nearest-rank percentiles over the gaps.
GapSummary summarize_gaps(const std::vector<GapRecord>& records);

/// Canonical JSON gap report: {"graphs": [...], "summary": {...}}.
std::string gap_report_json(const std::vector<GapRecord>& records);

} // namespace setree
