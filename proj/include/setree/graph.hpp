#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace setree {

using VertexId = std::int32_t;
using Count = std::int64_t;
using Edge = std::pair<VertexId, VertexId>;

/// Sum of member degrees and number of edges leaving the set.
struct VertexSetStats {
  Count volume = 0;
  Count cut = 0;

  friend bool operator==(const VertexSetStats&, const VertexSetStats&) = default;
};

/// Immutable undirected simple graph over dense vertex ids [0, n).
///
/// Construction normalizes the input: self-loops are dropped and duplicate
/// edges collapse. Both are counted so callers can report them. Once built a
/// Graph is never mutated, so it may be shared freely between threads.
class Graph {
public:
  Graph() = default;

  /// Throws InputError when an endpoint is outside [0, num_vertices).
  Graph(VertexId num_vertices, std::span<const Edge> edge_list);

  VertexId num_vertices() const noexcept { return static_cast<VertexId>(adjacency_.size()); }
  Count num_edges() const noexcept { return static_cast<Count>(edges_.size()); }
  Count total_volume() const noexcept { return 2 * num_edges(); }

  Count degree(VertexId v) const { return static_cast<Count>(adjacency_[static_cast<std::size_t>(v)].size()); }
  std::span<const VertexId> neighbors(VertexId v) const { return adjacency_[static_cast<std::size_t>(v)]; }
  bool has_edge(VertexId u, VertexId v) const;

  /// Canonical edges: u < v, sorted lexicographically.
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  Count self_loops_dropped() const noexcept { return self_loops_dropped_; }
  Count duplicates_collapsed() const noexcept { return duplicates_collapsed_; }

  /// 64-bit FNV-1a hash over the vertex count and canonical edge list.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

private:
  std::vector<Edge> edges_;
  std::vector<std::vector<VertexId>> adjacency_;
  Count self_loops_dropped_ = 0;
  Count duplicates_collapsed_ = 0;
  std::uint64_t fingerprint_ = 0;
};

Graph build_graph(VertexId num_vertices, std::span<const Edge> edge_list);

/// Volume and boundary size of `members`. Duplicate members are ignored.
VertexSetStats set_stats(const Graph& g, std::span<const VertexId> members);

/// Edges with one endpoint in `a` and the other in `b`. The sets must be disjoint.
Count cut_between(const Graph& g, std::span<const VertexId> a, std::span<const VertexId> b);

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a(std::string_view bytes);

/// Hex rendering used in documents and CLI reports.
std::string fingerprint_hex(std::uint64_t fp);

} // namespace setree
