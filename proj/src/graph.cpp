#include "setree/graph.hpp"

#include <algorithm>
#include <cstdio>
#include <string>

#include "setree/error.hpp"

namespace setree {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}

std::vector<char> membership(const Graph& g, std::span<const VertexId> members) {
  std::vector<char> in(static_cast<std::size_t>(g.num_vertices()), 0);
  for (const VertexId v : members) {
    if (v < 0 || v >= g.num_vertices()) {
      throw InputError("vertex " + std::to_string(v) + " out of range [0, " + std::to_string(g.num_vertices()) + ")");
    }
    in[static_cast<std::size_t>(v)] = 1;
  }
  return in;
}

} // namespace

Graph::Graph(VertexId num_vertices, std::span<const Edge> edge_list) {
  if (num_vertices < 0) {
    throw InputError("negative vertex count");
  }
  edges_.reserve(edge_list.size());
  for (std::size_t i = 0; i < edge_list.size(); ++i) {
    auto [u, v] = edge_list[i];
    if (u < 0 || u >= num_vertices || v < 0 || v >= num_vertices) {
      throw InputError("edge " + std::to_string(i) + " (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") has an endpoint outside [0, " + std::to_string(num_vertices) + ")");
    }
    if (u == v) {
      ++self_loops_dropped_;
      continue;
    }
    if (u > v) {
      std::swap(u, v);
    }
    edges_.emplace_back(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  const auto last = std::unique(edges_.begin(), edges_.end());
  duplicates_collapsed_ = static_cast<Count>(std::distance(last, edges_.end()));
  edges_.erase(last, edges_.end());
  edges_.shrink_to_fit();

  adjacency_.resize(static_cast<std::size_t>(num_vertices));
  std::vector<std::size_t> deg(static_cast<std::size_t>(num_vertices), 0);
  for (const auto& [u, v] : edges_) {
    ++deg[static_cast<std::size_t>(u)];
    ++deg[static_cast<std::size_t>(v)];
  }
  for (std::size_t v = 0; v < deg.size(); ++v) {
    adjacency_[v].reserve(deg[v]);
  }
  for (const auto& [u, v] : edges_) {
    adjacency_[static_cast<std::size_t>(u)].push_back(v);
    adjacency_[static_cast<std::size_t>(v)].push_back(u);
  }
  for (auto& nbrs : adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
  }

  fingerprint_ = kFnvOffset;
  fnv_mix(fingerprint_, static_cast<std::uint64_t>(num_vertices));
  for (const auto& [u, v] : edges_) {
    fnv_mix(fingerprint_, static_cast<std::uint64_t>(u));
    fnv_mix(fingerprint_, static_cast<std::uint64_t>(v));
  }
}

bool Graph::has_edge(VertexId u, VertexId v) const {
  const auto nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph build_graph(VertexId num_vertices, std::span<const Edge> edge_list) {
  return Graph(num_vertices, edge_list);
}

VertexSetStats set_stats(const Graph& g, std::span<const VertexId> members) {
  const auto in = membership(g, members);
  VertexSetStats stats;
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (!in[static_cast<std::size_t>(v)]) {
      continue;
    }
    stats.volume += g.degree(v);
    for (const VertexId w : g.neighbors(v)) {
      if (!in[static_cast<std::size_t>(w)]) {
        ++stats.cut;
      }
    }
  }
  return stats;
}

Count cut_between(const Graph& g, std::span<const VertexId> a, std::span<const VertexId> b) {
  const auto in_a = membership(g, a);
  const auto in_b = membership(g, b);
  for (std::size_t v = 0; v < in_a.size(); ++v) {
    if (in_a[v] && in_b[v]) {
      throw InputError("vertex " + std::to_string(v) + " appears in both sets");
    }
  }
  Count crossing = 0;
  for (const auto& [u, v] : g.edges()) {
    const auto su = static_cast<std::size_t>(u);
    const auto sv = static_cast<std::size_t>(v);
    if ((in_a[su] && in_b[sv]) || (in_b[su] && in_a[sv])) {
      ++crossing;
    }
  }
  return crossing;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = kFnvOffset;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fp));
  return buf;
}

} // namespace setree
