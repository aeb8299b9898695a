#include "setree/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "json.hpp"

#include "setree/canonical_json.hpp"
#include "setree/error.hpp"
#include "setree/minimizer.hpp"

namespace setree {

// ---------------------------------------------------------------------------
// restricted growth strings

RestrictedGrowth::RestrictedGrowth(std::size_t n) : n_(n), a_(n, 0), prefix_max_(n, 0) {}

bool RestrictedGrowth::next() {
  // Increment the rightmost position that may grow, reset everything after it.
  for (std::size_t i = n_; i-- > 1;) {
    if (a_[i] <= prefix_max_[i - 1]) {
      ++a_[i];
      prefix_max_[i] = std::max(prefix_max_[i - 1], a_[i]);
      for (std::size_t j = i + 1; j < n_; ++j) {
        a_[j] = 0;
        prefix_max_[j] = prefix_max_[i];
      }
      return true;
    }
  }
  return false;
}

std::uint64_t bell_number(int n) {
  if (n < 0 || n > 25) {
    throw DomainError("bell_number supports 0 <= n <= 25");
  }
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<std::uint64_t> next{row.back()};
    for (const auto x : row) {
      next.push_back(next.back() + x);
    }
    row = std::move(next);
  }
  return row.front();
}

// ---------------------------------------------------------------------------
// hierarchies

namespace {

using Mask = std::uint32_t;

/// Volume and cut of every vertex subset, indexed by bitmask.
struct SubsetTable {
  std::vector<Count> volume;
  std::vector<Count> cut;
  Count total = 0;

  explicit SubsetTable(const Graph& g) : total(g.total_volume()) {
    const auto n = static_cast<unsigned>(g.num_vertices());
    std::vector<Mask> adj(n, 0);
    for (const auto& [u, v] : g.edges()) {
      adj[static_cast<std::size_t>(u)] |= Mask{1} << v;
      adj[static_cast<std::size_t>(v)] |= Mask{1} << u;
    }
    const std::size_t size = std::size_t{1} << n;
    volume.assign(size, 0);
    cut.assign(size, 0);
    for (std::size_t m = 1; m < size; ++m) {
      const auto low = static_cast<unsigned>(std::countr_zero(m));
      const std::size_t rest = m & (m - 1);
      volume[m] = volume[rest] + std::popcount(adj[low]);
      // Adding `low` to `rest`: its edges into `rest` stop crossing, the others start.
      const int inside = std::popcount(adj[low] & static_cast<Mask>(rest));
      cut[m] = cut[rest] + std::popcount(adj[low]) - 2 * inside;
    }
  }

  /// Entropy term of a node with member set `child` under parent set `parent`.
  double term(Mask child, Mask parent) const {
    const Count g = cut[child];
    const Count v = volume[child];
    const Count p = volume[parent];
    if (g == 0 || v == 0 || p == 0 || total == 0) {
      return 0.0;
    }
    return -(static_cast<double>(g) / static_cast<double>(total)) *
           std::log2(static_cast<double>(v) / static_cast<double>(p));
  }
};

Mask to_mask(const std::vector<VertexId>& block) {
  Mask m = 0;
  for (const VertexId v : block) {
    m |= Mask{1} << v;
  }
  return m;
}

std::vector<VertexId> from_mask(Mask m) {
  std::vector<VertexId> out;
  while (m != 0) {
    out.push_back(static_cast<VertexId>(std::countr_zero(m)));
    m &= m - 1;
  }
  return out;
}

Partition to_partition(const std::vector<Mask>& masks) {
  Partition p;
  p.reserve(masks.size());
  for (const Mask m : masks) {
    p.push_back(from_mask(m));
  }
  std::sort(p.begin(), p.end());
  return p;
}

void check_hierarchy(const Graph& g, const Hierarchy& h) {
  if (h.empty()) {
    throw InputError("hierarchy needs at least one level");
  }
  const auto n = static_cast<std::size_t>(g.num_vertices());
  std::vector<int> prev_block;
  for (std::size_t lvl = 0; lvl < h.size(); ++lvl) {
    std::vector<int> block_of(n, -1);
    for (std::size_t b = 0; b < h[lvl].size(); ++b) {
      if (h[lvl][b].empty()) {
        throw InputError("empty block at level " + std::to_string(lvl + 1));
      }
      for (const VertexId v : h[lvl][b]) {
        if (v < 0 || static_cast<std::size_t>(v) >= n || block_of[static_cast<std::size_t>(v)] != -1) {
          throw InputError("level " + std::to_string(lvl + 1) + " is not a partition of the vertices");
        }
        block_of[static_cast<std::size_t>(v)] = static_cast<int>(b);
      }
    }
    if (std::count(block_of.begin(), block_of.end(), -1) != 0) {
      throw InputError("level " + std::to_string(lvl + 1) + " does not cover every vertex");
    }
    if (lvl > 0) {
      for (const auto& block : h[lvl]) {
        for (const VertexId v : block) {
          if (prev_block[static_cast<std::size_t>(v)] != prev_block[static_cast<std::size_t>(block.front())]) {
            throw InputError("level " + std::to_string(lvl + 1) + " does not refine level " + std::to_string(lvl));
          }
        }
      }
    }
    prev_block = std::move(block_of);
  }
}

void require_small(const Graph& g, int cap) {
  if (g.num_vertices() == 0) {
    throw InputError("oracle needs a nonempty graph");
  }
  if (g.num_vertices() > cap) {
    throw SizeError("exhaustive oracle is capped at " + std::to_string(cap) + " vertices (graph has " +
                    std::to_string(g.num_vertices()) + ")");
  }
}

/// Candidates closer than this to the incumbent count as ties; the first one
/// enumerated is kept so the reported optimum does not depend on rounding.
constexpr double kTie = 1e-12;

/// Enumerates chains of `levels` nested partitions above the singletons.
class HierarchySearch {
public:
  HierarchySearch(const Graph& g, int levels)
      : table_(g), levels_(levels), full_((Mask{1} << g.num_vertices()) - 1), chosen_(static_cast<std::size_t>(levels)) {
    std::vector<Mask> singletons;
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      singletons.push_back(Mask{1} << v);
    }
    descend(singletons, levels_, 0.0);
  }

  double best() const { return best_; }
  std::uint64_t visited() const { return visited_; }

  Hierarchy hierarchy() const {
    Hierarchy h;
    for (const auto& level : best_chain_) {
      h.push_back(to_partition(level));
    }
    return h;
  }

private:
  /// `items` are the nodes one level down; group them into their parents.
  void descend(const std::vector<Mask>& items, int levels_left, double acc) {
    RestrictedGrowth rgs(items.size());
    std::vector<Mask> groups;
    do {
      groups.assign(static_cast<std::size_t>(rgs.num_blocks()), 0);
      for (std::size_t i = 0; i < items.size(); ++i) {
        groups[static_cast<std::size_t>(rgs.blocks()[i])] |= items[i];
      }
      double cost = acc;
      for (std::size_t i = 0; i < items.size(); ++i) {
        cost += table_.term(items[i], groups[static_cast<std::size_t>(rgs.blocks()[i])]);
      }
      chosen_[static_cast<std::size_t>(levels_left - 1)] = groups;
      if (levels_left == 1) {
        for (const Mask grp : groups) {
          cost += table_.term(grp, full_);
        }
        ++visited_;
        if (visited_ == 1 || cost < best_ - kTie) {
          best_ = cost;
          best_chain_ = chosen_;
        }
      } else {
        descend(groups, levels_left - 1, cost);
      }
    } while (rgs.next());
  }

  SubsetTable table_;
  int levels_;
  Mask full_;
  std::vector<std::vector<Mask>> chosen_;
  std::vector<std::vector<Mask>> best_chain_;
  double best_ = 0.0;
  std::uint64_t visited_ = 0;
};

OracleResult run_oracle(const Graph& g, int k) {
  HierarchySearch search(g, k - 1);
  OracleResult r;
  r.optimal_entropy = search.best();
  r.optimal_hierarchy = search.hierarchy();
  r.num_candidates = search.visited();
  MinimizeConfig cfg;
  cfg.height_k = k;
  r.greedy_entropy = minimize(g, cfg).trace.final_entropy;
  r.gap = r.greedy_entropy - r.optimal_entropy;
  return r;
}

} // namespace

CodingTree hierarchy_tree(const Graph& g, const Hierarchy& h) {
  check_hierarchy(g, h);
  const VertexId n = g.num_vertices();
  std::vector<NodeId> parent(static_cast<std::size_t>(n) + 1, kNoNode);
  std::vector<VertexId> leaf(static_cast<std::size_t>(n) + 1, kNoVertex);
  for (VertexId v = 0; v < n; ++v) {
    leaf[static_cast<std::size_t>(v)] = v;
  }
  // Node above each vertex at the previous level; starts at the root.
  std::vector<NodeId> above(static_cast<std::size_t>(n), n);
  for (const auto& level : h) {
    std::vector<NodeId> next(above.size());
    for (const auto& block : level) {
      const auto id = static_cast<NodeId>(parent.size());
      parent.push_back(above[static_cast<std::size_t>(block.front())]);
      leaf.push_back(kNoVertex);
      for (const VertexId v : block) {
        next[static_cast<std::size_t>(v)] = id;
      }
    }
    above = std::move(next);
  }
  for (VertexId v = 0; v < n; ++v) {
    parent[static_cast<std::size_t>(v)] = above[static_cast<std::size_t>(v)];
  }
  return CodingTree::from_parents(g, parent, leaf);
}

double hierarchy_entropy(const Graph& g, const Hierarchy& h) {
  check_hierarchy(g, h);
  if (g.num_vertices() > 20) {
    throw SizeError("hierarchy_entropy enumerates subsets and is capped at 20 vertices");
  }
  const SubsetTable table(g);
  const Mask full = (Mask{1} << g.num_vertices()) - 1;
  std::vector<Mask> above(static_cast<std::size_t>(g.num_vertices()), full);
  double total = 0.0;
  for (const auto& level : h) {
    for (const auto& block : level) {
      const Mask m = to_mask(block);
      total += table.term(m, above[static_cast<std::size_t>(block.front())]);
    }
    for (const auto& block : level) {
      const Mask m = to_mask(block);
      for (const VertexId v : block) {
        above[static_cast<std::size_t>(v)] = m;
      }
    }
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    total += table.term(Mask{1} << v, above[static_cast<std::size_t>(v)]);
  }
  return total;
}

OracleResult optimal_height2(const Graph& g) {
  require_small(g, kHeight2MaxVertices);
  return run_oracle(g, 2);
}

OracleResult optimal_heightk(const Graph& g, int k) {
  if (k < 2) {
    throw ConfigError("height must exceed 1 (got " + std::to_string(k) + ")");
  }
  if (k > kHeightKMaxHeight) {
    throw SizeError("nested-partition oracle is capped at height " + std::to_string(kHeightKMaxHeight));
  }
  require_small(g, kHeightKMaxVertices);
  return run_oracle(g, k);
}

// ---------------------------------------------------------------------------
// catalog

std::vector<Graph> connected_graph_catalog(int max_vertices) {
  if (max_vertices < 1 || max_vertices > 7) {
    throw SizeError("graph catalog supports 1..7 vertices");
  }
  std::vector<Graph> out;
  for (int n = 1; n <= max_vertices; ++n) {
    std::vector<Edge> pairs;
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = u + 1; v < n; ++v) {
        pairs.emplace_back(u, v);
      }
    }
    std::vector<std::vector<VertexId>> perms;
    std::vector<VertexId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<std::vector<Edge>> found;
    const std::uint64_t limit = std::uint64_t{1} << pairs.size();
    std::vector<Edge> edges;
    std::vector<Edge> image;
    for (std::uint64_t mask = 0; mask < limit; ++mask) {
      edges.clear();
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        if ((mask >> i) & 1U) {
          edges.push_back(pairs[i]);
        }
      }
      if (static_cast<int>(edges.size()) < n - 1) {
        continue;
      }
      // Connectivity by repeated relaxation over the edge list.
      std::uint32_t reach = 1;
      for (bool grew = true; grew;) {
        grew = false;
        for (const auto& [u, v] : edges) {
          const bool a = (reach >> u) & 1U;
          const bool b = (reach >> v) & 1U;
          if (a != b) {
            reach |= (1U << u) | (1U << v);
            grew = true;
          }
        }
      }
      if (reach != (1U << n) - 1) {
        continue;
      }
      std::vector<Edge> best;
      for (const auto& p : perms) {
        image.clear();
        for (const auto& [u, v] : edges) {
          const VertexId a = p[static_cast<std::size_t>(u)];
          const VertexId b = p[static_cast<std::size_t>(v)];
          image.emplace_back(std::min(a, b), std::max(a, b));
        }
        std::sort(image.begin(), image.end());
        if (best.empty() || image < best) {
          best = image;
        }
      }
      found.push_back(std::move(best));
    }
    std::sort(found.begin(), found.end());
    found.erase(std::unique(found.begin(), found.end()), found.end());
    for (const auto& e : found) {
      out.emplace_back(static_cast<VertexId>(n), e);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// reporting

GapSummary summarize_gaps(const std::vector<GapRecord>& records) {
  GapSummary s;
  s.graphs = records.size();
  if (records.empty()) {
    return s;
  }
  std::vector<double> gaps;
  gaps.reserve(records.size());
  for (const auto& r : records) {
    gaps.push_back(r.result.gap);
    s.mean += r.result.gap;
    if (r.result.gap > 1e-9) {
      ++s.nonzero;
    }
  }
  s.mean /= static_cast<double>(gaps.size());
  std::sort(gaps.begin(), gaps.end());
  s.max = gaps.back();
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(gaps.size())));
  s.p95 = gaps[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

std::string gap_report_json(const std::vector<GapRecord>& records) {
  nlohmann::json graphs = nlohmann::json::array();
  for (const auto& r : records) {
    graphs.push_back({
        {"name", r.name},
        {"num_vertices", r.num_vertices},
        {"num_edges", r.num_edges},
        {"optimal_entropy", r.result.optimal_entropy},
        {"greedy_entropy", r.result.greedy_entropy},
        {"gap", r.result.gap},
        {"num_candidates", r.result.num_candidates},
        {"optimal_partition", r.result.optimal_partition()},
    });
  }
  const GapSummary s = summarize_gaps(records);
  nlohmann::json doc{
      {"graphs", graphs},
      {"summary", {{"graphs", s.graphs}, {"nonzero", s.nonzero}, {"mean", s.mean}, {"max", s.max}, {"p95", s.p95}}},
  };
  return canonical_json(doc);
}

} // namespace setree
