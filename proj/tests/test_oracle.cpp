#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "setree/error.hpp"
#include "setree/oracle.hpp"
#include "support/reference.hpp"

using namespace setree;

namespace {

std::uint64_t count_partitions(std::size_t n) {
  RestrictedGrowth rg(n);
  std::uint64_t k = 1;
  while (rg.next()) {
    ++k;
  }
  return k;
}

} // namespace

TEST_CASE("restricted growth strings enumerate the Bell numbers") {
  const std::vector<std::uint64_t> bell{1, 1, 2, 5, 15, 52, 203, 877, 4140};
  for (std::size_t n = 1; n < bell.size(); ++n) {
    CHECK(count_partitions(n) == bell[n]);
    CHECK(bell_number(static_cast<int>(n)) == bell[n]);
  }
  CHECK(bell_number(0) == 1);
  CHECK(bell_number(12) == 4213597);
}

TEST_CASE("restricted growth strings are valid and in lexicographic order") {
  RestrictedGrowth rg(5);
  std::vector<int> prev = rg.blocks();
  CHECK(prev == std::vector<int>{0, 0, 0, 0, 0});
  while (rg.next()) {
    const auto& a = rg.blocks();
    CHECK(a[0] == 0);
    int mx = 0;
    for (std::size_t i = 1; i < a.size(); ++i) {
      CHECK(a[i] <= mx + 1);
      mx = std::max(mx, a[i]);
    }
    CHECK(rg.num_blocks() == mx + 1);
    CHECK(prev < a);
    prev = a;
  }
  CHECK(prev == std::vector<int>{0, 1, 2, 3, 4});
}

TEST_CASE("bridge optimum") {
  const Graph g(6, ref::kBridge);
  const auto r = optimal_height2(g);
  CHECK(std::abs(r.optimal_entropy - ref::kBridgeOptimum) < 1e-12);
  CHECK(r.num_candidates == 203);
  CHECK(r.optimal_partition() == Partition{{0, 1, 2}, {3, 4, 5}});
  CHECK(std::abs(r.gap) < 1e-12);
}

TEST_CASE("small-graph optima") {
  struct Case {
    VertexId n;
    std::vector<Edge> edges;
    double optimum;
    Partition partition;
  };
  const std::vector<Case> cases{
      {2, ref::complete(2), 1.0, {{0, 1}}},
      {3, ref::complete(3), 1.3899750004807707, {{0, 1}, {2}}},
      {4, ref::path(4), 1.251629167387823, {{0, 1}, {2, 3}}},
      {4, ref::complete(4), 1.6666666666666665, {{0, 1}, {2, 3}}},
      {4, {{0, 1}, {0, 2}, {0, 3}}, 1.5974937501201927, {{0, 1}, {2, 3}}},
  };
  for (const auto& c : cases) {
    const Graph g(c.n, c.edges);
    const auto r = optimal_height2(g);
    CHECK(std::abs(r.optimal_entropy - c.optimum) < 1e-12);
    INFO("n=" << c.n << " blocks=" << r.optimal_partition().size());
    CHECK(r.optimal_partition() == c.partition);
    CHECK(r.gap >= -1e-9);
    // the trivial tree is one of the candidates, so the optimum never exceeds it
    CHECK(r.optimal_entropy <= one_dim_entropy(g) + 1e-12);
  }
}

TEST_CASE("triangle: splitting off one vertex beats the single block") {
  const Graph g(3, ref::complete(3));
  const double split = hierarchy_entropy(g, Hierarchy{{{0, 1}, {2}}});
  const double single = hierarchy_entropy(g, Hierarchy{{{0, 1, 2}}});
  CHECK(std::abs(single - std::log2(3.0)) < 1e-12);
  CHECK(split < single);
}

TEST_CASE("hierarchy entropy agrees with the tree it realizes") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = static_cast<VertexId>(3 + rng() % 8);
    const Graph g(n, ref::random_edges(rng, n, 0.4));
    if (g.num_edges() == 0) {
      continue;
    }
    // random two-level hierarchy: blocks, then a split of each block
    const std::size_t nb = 1 + rng() % static_cast<std::size_t>(n);
    Partition outer(nb);
    for (VertexId v = 0; v < n; ++v) {
      outer[rng() % nb].push_back(v);
    }
    std::erase_if(outer, [](const auto& b) { return b.empty(); });
    Partition inner;
    for (const auto& b : outer) {
      const std::size_t cut = 1 + rng() % b.size();
      inner.emplace_back(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
      if (cut < b.size()) {
        inner.emplace_back(b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
      }
    }
    std::sort(outer.begin(), outer.end());
    std::sort(inner.begin(), inner.end());
    for (const Hierarchy& h : {Hierarchy{outer}, Hierarchy{outer, inner}}) {
      const CodingTree t = hierarchy_tree(g, h);
      CHECK(validate(t, g).empty());
      CHECK(t.height() == static_cast<int>(h.size()) + 1);
      const double he = hierarchy_entropy(g, h);
      CHECK(std::abs(he - tree_entropy(g, t).total) < 1e-12);
      CHECK(std::abs(he - ref::tree_entropy(g.edges(), t)) < 1e-12);
    }
  }
}

TEST_CASE("deeper optima never exceed the height-2 optimum") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const auto n = static_cast<VertexId>(3 + rng() % 4);
    const Graph g(n, ref::random_edges(rng, n, 0.6));
    if (g.num_edges() == 0) {
      continue;
    }
    const auto h2 = optimal_height2(g);
    const auto h3 = optimal_heightk(g, 3);
    CHECK(std::abs(optimal_heightk(g, 2).optimal_entropy - h2.optimal_entropy) < 1e-12);
    CHECK(h3.optimal_entropy <= h2.optimal_entropy + 1e-12);
    CHECK(h3.gap >= -1e-9);
  }
}

TEST_CASE("size caps and configuration errors") {
  CHECK_THROWS_AS(optimal_height2(Graph(13, ref::path(13))), SizeError);
  CHECK_THROWS_AS(optimal_heightk(Graph(9, ref::path(9)), 3), SizeError);
  CHECK_THROWS_AS(optimal_heightk(Graph(4, ref::path(4)), 4), SizeError);
  CHECK_THROWS_AS(optimal_heightk(Graph(4, ref::path(4)), 1), ConfigError);
  CHECK_THROWS_AS(connected_graph_catalog(8), SizeError);
}

TEST_CASE("connected graph catalog counts") {
  const auto cat = connected_graph_catalog(6);
  std::vector<std::size_t> per_n(7, 0);
  for (const Graph& g : cat) {
    ++per_n[static_cast<std::size_t>(g.num_vertices())];
  }
  CHECK(per_n == std::vector<std::size_t>{0, 1, 1, 2, 6, 21, 112});
}

TEST_CASE("catalog gap statistics stay within the frozen bound") {
  std::vector<GapRecord> records;
  for (const Graph& g : connected_graph_catalog(6)) {
    records.push_back({"", g.num_vertices(), g.num_edges(), optimal_height2(g)});
  }
  for (const auto& r : records) {
    CHECK(r.result.gap >= -1e-9);
  }
  const GapSummary s = summarize_gaps(records);
  MESSAGE("graphs=" << s.graphs << " nonzero=" << s.nonzero << " mean=" << s.mean << " max=" << s.max
                    << " p95=" << s.p95);
  CHECK(s.graphs == 143);
  CHECK(s.nonzero == 30);
  CHECK(s.max < 0.2431);
  CHECK(s.p95 < 0.1294);
  CHECK(s.p95 < 0.15);
}
