#include "reference.hpp"

#include <cmath>
#include <set>

namespace ref {

std::vector<Edge> complete(VertexId n) {
  std::vector<Edge> e;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      e.emplace_back(u, v);
    }
  }
  return e;
}

std::vector<Edge> path(VertexId n) {
  std::vector<Edge> e;
  for (VertexId v = 0; v + 1 < n; ++v) {
    e.emplace_back(v, v + 1);
  }
  return e;
}

std::vector<Edge> random_edges(std::mt19937_64& rng, VertexId n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> e;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (coin(rng)) {
        e.emplace_back(u, v);
      }
    }
  }
  return e;
}

namespace {

std::vector<long> degrees(VertexId n, const std::vector<Edge>& edges) {
  std::vector<long> d(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : edges) {
    ++d[static_cast<std::size_t>(u)];
    ++d[static_cast<std::size_t>(v)];
  }
  return d;
}

} // namespace

double degree_entropy(VertexId n, const std::vector<Edge>& edges) {
  const auto d = degrees(n, edges);
  const double total = 2.0 * static_cast<double>(edges.size());
  double h = 0.0;
  for (const long x : d) {
    if (x > 0) {
      const double p = static_cast<double>(x) / total;
      h -= p * std::log2(p);
    }
  }
  return h;
}

double tree_entropy(VertexId n, const std::vector<Edge>& edges, const std::vector<NodeId>& parent,
                    const std::vector<VertexId>& leaf_vertex, NodeId root) {
  const auto d = degrees(n, edges);
  const std::size_t cap = parent.size();
  std::vector<std::set<VertexId>> members(cap);
  for (std::size_t id = 0; id < cap; ++id) {
    if (leaf_vertex[id] == setree::kNoVertex) {
      continue;
    }
    for (NodeId a = static_cast<NodeId>(id); a != setree::kNoNode; a = parent[static_cast<std::size_t>(a)]) {
      members[static_cast<std::size_t>(a)].insert(leaf_vertex[id]);
    }
  }
  double total = 0.0;
  for (const long x : d) {
    total += static_cast<double>(x);
  }
  if (total == 0.0) {
    return 0.0;
  }
  auto volume = [&](std::size_t id) {
    double v = 0.0;
    for (const VertexId x : members[id]) {
      v += static_cast<double>(d[static_cast<std::size_t>(x)]);
    }
    return v;
  };
  double h = 0.0;
  for (std::size_t id = 0; id < cap; ++id) {
    if (static_cast<NodeId>(id) == root || members[id].empty()) {
      continue;
    }
    double cut = 0.0;
    for (const auto& [u, v] : edges) {
      if (members[id].count(u) != members[id].count(v)) {
        cut += 1.0;
      }
    }
    const double vol = volume(id);
    const double vol_parent = volume(static_cast<std::size_t>(parent[id]));
    if (cut > 0.0 && vol > 0.0) {
      h -= (cut / total) * std::log2(vol / vol_parent);
    }
  }
  return h;
}

double tree_entropy(const std::vector<Edge>& edges, const setree::CodingTree& t) {
  const auto cap = static_cast<std::size_t>(t.capacity());
  std::vector<NodeId> parent(cap, setree::kNoNode);
  std::vector<VertexId> leaf(cap, setree::kNoVertex);
  for (const NodeId id : t.node_ids()) {
    parent[static_cast<std::size_t>(id)] = t.parent(id);
    leaf[static_cast<std::size_t>(id)] = t.is_leaf(id) ? t.leaf_vertex(id) : setree::kNoVertex;
  }
  return tree_entropy(t.graph().num_vertices(), edges, parent, leaf, t.root());
}

} // namespace ref
