#include "setree/minimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <string>

#include "absl/container/flat_hash_map.h"

#include "setree/error.hpp"
#include "setree/random.hpp"

namespace setree {

std::string_view to_string(DropMode mode) {
  return mode == DropMode::literal ? "literal" : "height-aware";
}

DropMode parse_drop_mode(std::string_view text) {
  if (text == "literal") {
    return DropMode::literal;
  }
  if (text == "height-aware") {
    return DropMode::height_aware;
  }
  throw ConfigError("unknown drop mode '" + std::string(text) + "' (expected literal or height-aware)");
}

std::string_view to_string(StepKind kind) {
  switch (kind) {
  case StepKind::combine:
    return "combine";
  case StepKind::drop:
    return "drop";
  case StepKind::pad:
    return "pad";
  }
  return "?";
}

std::size_t MinimizeTrace::count(StepKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(steps.begin(), steps.end(), [kind](const TraceStep& s) { return s.kind == kind; }));
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

struct PairEntry {
  double reduction;
  NodeId first;
  NodeId second;
  int first_slot = -1;
  int second_slot = -1;
  std::uint64_t stamp = 0;
};

/// Orders a max-heap: larger reduction first, then smaller (first, second).
struct PairLess {
  bool operator()(const PairEntry& a, const PairEntry& b) const {
    if (a.reduction != b.reduction) {
      return a.reduction < b.reduction;
    }
    if (a.first != b.first) {
      return a.first > b.first;
    }
    return a.second > b.second;
  }
};

bool better_pair(double reduction, NodeId a, NodeId b, const CombineCandidate& best) {
  if (best.first == kNoNode) {
    return true;
  }
  return PairLess{}(PairEntry{best.reduction, best.first, best.second}, PairEntry{reduction, a, b});
}

/// Stage 1 state: root children as clusters with their pairwise cuts.
///
/// A cluster lives in a slot; merging keeps the slot with the larger
/// neighbour table, so only the smaller table's neighbours are rewritten.
///
/// Heap entries name slots. A merge pushes fresh entries only for pairs
/// whose cut changed. Every other entry of the grown slot stays put: with
/// the cut fixed the reduction only falls as volume grows, so the old key
/// bounds the new value from above. An entry whose slots have since been
/// relabelled is re-evaluated when it surfaces and pushed back. Only the
/// newest entry of a pair, by stamp, counts; the rest are swept out once
/// they outnumber the live pairs.
class MergeQueue {
public:
  explicit MergeQueue(CodingTree& tree) : tree_(tree) {
    const Graph& g = tree.graph();
    const auto n = static_cast<std::size_t>(g.num_vertices());
    neighbors_.resize(n);
    slot_node_.resize(n);
    node_slot_.assign(n, -1);
    for (VertexId v = 0; v < g.num_vertices(); ++v) {
      const auto s = static_cast<std::size_t>(v);
      slot_node_[s] = v;
      node_slot_[s] = v;
      auto& table = neighbors_[s];
      table.reserve(g.neighbors(v).size());
      for (const VertexId w : g.neighbors(v)) {
        table.emplace(w, Link{1, 0});
      }
    }
    live_links_ = static_cast<std::size_t>(g.num_edges());
    for (const auto& [u, v] : g.edges()) {
      push(u, v);
    }
  }

  /// Picks and applies the next merge. Returns the trace step.
  TraceStep step() {
    const CombineCandidate best = next_candidate();
    const auto merged = tree_.combine(best.first, best.second, best.cut_between);
    absorb(best.first, best.second, merged.node);
    TraceStep s;
    s.kind = StepKind::combine;
    s.nodes = {best.first, best.second, merged.node};
    s.delta = merged.delta;
    return s;
  }

private:
  int slot_of(NodeId node) const {
    return static_cast<std::size_t>(node) < node_slot_.size() ? node_slot_[static_cast<std::size_t>(node)] : -1;
  }

  struct Link {
    Count cut = 0;
    std::uint64_t stamp = 0;
  };

  /// `ab` and `ba` are the two table entries of the pair.
  void push(NodeId a, int sa, Link& ab, NodeId b, int sb, Link& ba) {
    if (a > b) {
      std::swap(a, b);
      std::swap(sa, sb);
    }
    const double reduction = -tree_.combine_delta(a, b, ab.cut);
    ab.stamp = ba.stamp = ++stamp_;
    heap_.push_back(PairEntry{reduction, a, b, sa, sb, stamp_});
    std::push_heap(heap_.begin(), heap_.end(), PairLess{});
  }

  void push(NodeId a, NodeId b) {
    const int sa = slot_of(a);
    const int sb = slot_of(b);
    push(a, sa, neighbors_[static_cast<std::size_t>(sa)].at(sb), b, sb, neighbors_[static_cast<std::size_t>(sb)].at(sa));
  }

  CombineCandidate next_candidate() {
    if (heap_.size() > 2 * live_links_ + 1024) {
      purge();
    }
    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), PairLess{});
      const PairEntry top = heap_.back();
      heap_.pop_back();
      const NodeId a = slot_node_[static_cast<std::size_t>(top.first_slot)];
      const NodeId b = slot_node_[static_cast<std::size_t>(top.second_slot)];
      if (a == kNoNode || b == kNoNode) {
        continue;
      }
      const Link& link = neighbors_[static_cast<std::size_t>(top.first_slot)].at(top.second_slot);
      if (link.stamp != top.stamp) {
        continue;
      }
      if (a != top.first || b != top.second) {
        push(a, b);
        continue;
      }
      return {a, b, top.reduction, link.cut};
    }
    // No two remaining clusters share an edge, and merging cannot create
    // one, so from here on pair the two lightest.
    if (by_volume_.empty()) {
      tree_.for_each_child(tree_.root(), [&](NodeId c) { by_volume_.emplace(tree_.volume(c), c); });
    }
    auto it = by_volume_.begin();
    const NodeId a = it->second;
    const NodeId b = std::next(it)->second;
    return {std::min(a, b), std::max(a, b), 0.0, 0};
  }

  bool is_current(const PairEntry& e) const {
    if (slot_node_[static_cast<std::size_t>(e.first_slot)] == kNoNode ||
        slot_node_[static_cast<std::size_t>(e.second_slot)] == kNoNode) {
      return false;
    }
    return neighbors_[static_cast<std::size_t>(e.first_slot)].at(e.second_slot).stamp == e.stamp;
  }

  void purge() {
    std::erase_if(heap_, [&](const PairEntry& e) { return !is_current(e); });
    std::make_heap(heap_.begin(), heap_.end(), PairLess{});
  }

  void absorb(NodeId a, NodeId b, NodeId merged) {
    if (!by_volume_.empty()) {
      by_volume_.erase({tree_.volume(a), a});
      by_volume_.erase({tree_.volume(b), b});
      by_volume_.emplace(tree_.volume(merged), merged);
    }

    int keep = slot_of(a);
    int gone = slot_of(b);
    if (neighbors_[static_cast<std::size_t>(keep)].size() < neighbors_[static_cast<std::size_t>(gone)].size()) {
      std::swap(keep, gone);
    }
    if (node_slot_.size() <= static_cast<std::size_t>(merged)) {
      node_slot_.resize(static_cast<std::size_t>(merged) + 1, -1);
    }
    node_slot_[static_cast<std::size_t>(a)] = -1;
    node_slot_[static_cast<std::size_t>(b)] = -1;
    node_slot_[static_cast<std::size_t>(merged)] = keep;
    slot_node_[static_cast<std::size_t>(keep)] = merged;
    slot_node_[static_cast<std::size_t>(gone)] = kNoNode;

    auto& kept = neighbors_[static_cast<std::size_t>(keep)];
    auto& moved = neighbors_[static_cast<std::size_t>(gone)];
    std::size_t entries = live_links_ * 2 - kept.size() - moved.size();
    kept.erase(gone);
    kept.reserve(kept.size() + moved.size());
    for (const auto& [other, link] : moved) {
      if (other == keep) {
        continue;
      }
      Link& mine = kept[other];
      mine.cut += link.cut;
      auto& theirs = neighbors_[static_cast<std::size_t>(other)];
      entries -= theirs.size();
      theirs.erase(gone);
      Link& back = theirs[keep];
      entries += theirs.size();
      back.cut = mine.cut;
      push(merged, keep, mine, slot_node_[static_cast<std::size_t>(other)], other, back);
    }
    live_links_ = (entries + kept.size()) / 2;
    decltype(neighbors_)::value_type().swap(moved);
  }

  CodingTree& tree_;
  std::vector<absl::flat_hash_map<int, Link>> neighbors_;
  std::uint64_t stamp_ = 0;
  std::vector<NodeId> slot_node_;
  std::vector<int> node_slot_;
  std::vector<PairEntry> heap_;
  std::size_t live_links_ = 0;
  std::set<std::pair<Count, NodeId>> by_volume_;
};

/// Range add, range max over leaf depths.
class DepthTree {
public:
  explicit DepthTree(const std::vector<int>& depth) : n_(depth.size()), max_(4 * std::max<std::size_t>(n_, 1)), add_(max_.size()) {
    if (n_ > 0) {
      build(1, 0, n_, depth);
    }
  }

  int max_all() const { return n_ > 0 ? max_[1] : 0; }
  int max(std::size_t lo, std::size_t hi) const { return query(1, 0, n_, lo, hi); }
  void add(std::size_t lo, std::size_t hi, int d) { update(1, 0, n_, lo, hi, d); }

private:
  void build(std::size_t x, std::size_t l, std::size_t r, const std::vector<int>& depth) {
    if (r - l == 1) {
      max_[x] = depth[l];
      return;
    }
    const std::size_t m = (l + r) / 2;
    build(2 * x, l, m, depth);
    build(2 * x + 1, m, r, depth);
    max_[x] = std::max(max_[2 * x], max_[2 * x + 1]);
  }

  int query(std::size_t x, std::size_t l, std::size_t r, std::size_t lo, std::size_t hi) const {
    if (lo <= l && r <= hi) {
      return max_[x];
    }
    const std::size_t m = (l + r) / 2;
    int best = std::numeric_limits<int>::min();
    if (lo < m) {
      best = std::max(best, query(2 * x, l, m, lo, hi));
    }
    if (hi > m) {
      best = std::max(best, query(2 * x + 1, m, r, lo, hi));
    }
    return best + add_[x];
  }

  void update(std::size_t x, std::size_t l, std::size_t r, std::size_t lo, std::size_t hi, int d) {
    if (lo <= l && r <= hi) {
      max_[x] += d;
      add_[x] += d;
      return;
    }
    const std::size_t m = (l + r) / 2;
    if (lo < m) {
      update(2 * x, l, m, lo, hi, d);
    }
    if (hi > m) {
      update(2 * x + 1, m, r, lo, hi, d);
    }
    max_[x] = std::max(max_[2 * x], max_[2 * x + 1]) + add_[x];
  }

  std::size_t n_;
  std::vector<int> max_;
  std::vector<int> add_;
};

/// Stage 2 state: drop keys for every inner node plus leaf depths.
///
/// Leaves are numbered in DFS order, so every node covers a contiguous
/// range of leaves. A drop keeps that true, and lowers the depth of exactly
/// the range of the dropped node.
class DropQueue {
public:
  explicit DropQueue(CodingTree& tree) : tree_(tree), depths_({}) {
    const auto cap = static_cast<std::size_t>(tree.capacity());
    key_.assign(cap, 0.0);
    child_cuts_.assign(cap, 0);
    lo_.assign(cap, 0);
    hi_.assign(cap, 0);

    std::vector<int> depth;
    std::vector<NodeId> postorder;
    std::vector<std::pair<NodeId, bool>> stack{{tree.root(), false}};
    while (!stack.empty()) {
      const auto [id, expanded] = stack.back();
      stack.pop_back();
      const auto i = static_cast<std::size_t>(id);
      if (expanded) {
        hi_[i] = depth.size();
        postorder.push_back(id);
        continue;
      }
      lo_[i] = depth.size();
      if (tree.is_leaf(id)) {
        depth.push_back(tree.level(id));
        hi_[i] = depth.size();
        continue;
      }
      stack.push_back({id, true});
      const auto kids = tree.children(id);
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
        stack.push_back({*it, false});
      }
    }
    depths_ = DepthTree(depth);
    for (const NodeId id : postorder) {
      Count sum = 0;
      tree.for_each_child(id, [&](NodeId c) { sum += tree.cut(c); });
      child_cuts_[static_cast<std::size_t>(id)] = sum;
      if (id != tree.root()) {
        insert(id);
      }
    }
  }

  int height() const { return depths_.max_all(); }

  DropCandidate pick(DropMode mode) const {
    if (mode == DropMode::literal) {
      if (keys_.empty()) {
        throw InternalError("no droppable node while the tree is too tall");
      }
      return {keys_.begin()->second, keys_.begin()->first};
    }
    // Walk only into children that hold a deepest leaf.
    const int deepest = height();
    DropCandidate best;
    std::vector<NodeId> stack{tree_.root()};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      tree_.for_each_child(id, [&](NodeId c) {
        const auto i = static_cast<std::size_t>(c);
        if (tree_.is_leaf(c) || depths_.max(lo_[i], hi_[i]) != deepest) {
          return;
        }
        const double k = key_[i];
        if (best.node == kNoNode || k < best.increase || (k == best.increase && c < best.node)) {
          best = {c, k};
        }
        stack.push_back(c);
      });
    }
    if (best.node == kNoNode) {
      throw InternalError("no droppable node while the tree is too tall");
    }
    return best;
  }

  TraceStep apply(NodeId v) {
    const auto i = static_cast<std::size_t>(v);
    const NodeId parent = tree_.parent(v);
    const std::vector<NodeId> kids = tree_.children(v);
    const Count v_cut = tree_.cut(v);
    erase(v);
    TraceStep s;
    s.kind = StepKind::drop;
    s.nodes = {v, parent};
    s.delta = tree_.drop(v);

    const auto p = static_cast<std::size_t>(parent);
    child_cuts_[p] += child_cuts_[i] - v_cut;
    if (parent != tree_.root()) {
      erase(parent);
      insert(parent);
    }
    for (const NodeId c : kids) {
      if (!tree_.is_leaf(c)) {
        erase(c);
        insert(c);
      }
    }
    depths_.add(lo_[i], hi_[i], -1);
    return s;
  }

private:
  void insert(NodeId id) {
    const auto i = static_cast<std::size_t>(id);
    const double k = tree_.drop_delta(id, (child_cuts_[i] - tree_.cut(id)) / 2);
    key_[i] = k;
    keys_.emplace(k, id);
  }

  void erase(NodeId id) { keys_.erase({key_[static_cast<std::size_t>(id)], id}); }

  CodingTree& tree_;
  DepthTree depths_;
  std::vector<double> key_;
  std::vector<Count> child_cuts_;
  std::vector<std::size_t> lo_;
  std::vector<std::size_t> hi_;
  std::set<std::pair<double, NodeId>> keys_;
};

} // namespace

MinimizeResult minimize(const Graph& g, const MinimizeConfig& cfg) {
  if (cfg.height_k < 2) {
    throw ConfigError("height must exceed 1 (got " + std::to_string(cfg.height_k) + ")");
  }
  MinimizeResult result{CodingTree::trivial(g), {}, 0.0, 0.0};
  CodingTree& tree = result.tree;
  MinimizeTrace& trace = result.trace;
  trace.initial_entropy = tree_entropy(g, tree).total;
  double running = trace.initial_entropy;

  auto t0 = Clock::now();
  if (tree.num_children(tree.root()) > 2) {
    MergeQueue merges(tree);
    while (tree.num_children(tree.root()) > 2) {
      TraceStep s = merges.step();
      running += s.delta;
      s.entropy_after = running;
      trace.steps.push_back(std::move(s));
    }
  }
  result.stage1_ms = elapsed_ms(t0);

  t0 = Clock::now();
  DropQueue drops(tree);
  trace.stage1_height = drops.height();
  while (drops.height() > cfg.height_k) {
    TraceStep s = drops.apply(drops.pick(cfg.drop_mode).node);
    running += s.delta;
    s.entropy_after = running;
    trace.steps.push_back(std::move(s));
  }
  if (cfg.pad_to_exact_height) {
    for (int h = drops.height(); h < cfg.height_k; ++h) {
      TraceStep s;
      s.kind = StepKind::pad;
      s.nodes = {tree.pad_below_root()};
      s.entropy_after = running;
      trace.steps.push_back(std::move(s));
    }
  }
  result.stage2_ms = elapsed_ms(t0);
  trace.final_entropy = tree_entropy(g, tree).total;
  return result;
}

CombineCandidate best_combine_candidate(const CodingTree& t) {
  const NodeId root = t.root();
  const auto kids = t.children(root);
  if (kids.size() < 3) {
    throw PreconditionError("root has " + std::to_string(kids.size()) + " children; nothing left to combine");
  }
  // Map every vertex to the root child above it, then tally crossing edges.
  const Graph& g = t.graph();
  std::vector<std::size_t> top(static_cast<std::size_t>(g.num_vertices()));
  for (std::size_t i = 0; i < kids.size(); ++i) {
    std::vector<NodeId> stack{kids[i]};
    while (!stack.empty()) {
      const NodeId id = stack.back();
      stack.pop_back();
      if (t.is_leaf(id)) {
        top[static_cast<std::size_t>(t.leaf_vertex(id))] = i;
      }
      t.for_each_child(id, [&](NodeId c) { stack.push_back(c); });
    }
  }
  const std::size_t c = kids.size();
  std::vector<Count> cuts(c * c, 0);
  for (const auto& [u, v] : g.edges()) {
    const std::size_t a = top[static_cast<std::size_t>(u)];
    const std::size_t b = top[static_cast<std::size_t>(v)];
    if (a != b) {
      ++cuts[a * c + b];
      ++cuts[b * c + a];
    }
  }
  CombineCandidate best;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      const Count cut = cuts[i * c + j];
      if (cut == 0) {
        continue;
      }
      const NodeId a = std::min(kids[i], kids[j]);
      const NodeId b = std::max(kids[i], kids[j]);
      const double reduction = -t.combine_delta(a, b, cut);
      if (better_pair(reduction, a, b, best)) {
        best = {a, b, reduction, cut};
      }
    }
  }
  if (best.first != kNoNode) {
    return best;
  }
  std::vector<std::pair<Count, NodeId>> light;
  light.reserve(c);
  for (const NodeId k : kids) {
    light.emplace_back(t.volume(k), k);
  }
  std::partial_sort(light.begin(), light.begin() + 2, light.end());
  return {std::min(light[0].second, light[1].second), std::max(light[0].second, light[1].second), 0.0, 0};
}

DropCandidate best_drop_candidate(const CodingTree& t, DropMode mode) {
  const auto ids = t.node_ids();
  std::vector<char> eligible(static_cast<std::size_t>(t.capacity()), 0);
  if (mode == DropMode::literal) {
    for (const NodeId id : ids) {
      eligible[static_cast<std::size_t>(id)] = id != t.root() && !t.is_leaf(id);
    }
  } else {
    const int height = t.height();
    for (const NodeId id : ids) {
      if (t.is_leaf(id) && t.level(id) == height) {
        for (NodeId a = t.parent(id); a != t.root(); a = t.parent(a)) {
          eligible[static_cast<std::size_t>(a)] = 1;
        }
      }
    }
  }
  DropCandidate best;
  for (const NodeId id : ids) {
    if (!eligible[static_cast<std::size_t>(id)]) {
      continue;
    }
    const double inc = t.drop_delta(id);
    if (best.node == kNoNode || inc < best.increase) {
      best = {id, inc};
    }
  }
  if (best.node == kNoNode) {
    throw InternalError("no droppable node");
  }
  return best;
}

CodingTree rbbt(const Graph& g, int k, std::uint64_t seed) {
  if (k < 2) {
    throw ConfigError("height must exceed 1 (got " + std::to_string(k) + ")");
  }
  const VertexId n = g.num_vertices();
  if (n == 0) {
    throw InputError("cannot build a coding tree for an empty graph");
  }
  std::vector<VertexId> order(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    order[static_cast<std::size_t>(v)] = v;
  }
  Rng rng(seed);
  rng.shuffle(std::span<VertexId>(order));

  std::vector<NodeId> parent(static_cast<std::size_t>(n) + 1, kNoNode);
  std::vector<VertexId> leaf(static_cast<std::size_t>(n) + 1, kNoVertex);
  for (VertexId v = 0; v < n; ++v) {
    leaf[static_cast<std::size_t>(v)] = v;
  }
  struct Range {
    std::size_t lo, hi;
    NodeId node;
    int depth;
  };
  std::vector<Range> work{{0, order.size(), n, 0}};
  for (std::size_t head = 0; head < work.size(); ++head) {
    const Range r = work[head];
    if (r.depth == k - 1) {
      for (std::size_t i = r.lo; i < r.hi; ++i) {
        parent[static_cast<std::size_t>(order[i])] = r.node;
      }
      continue;
    }
    const std::size_t mid = r.lo + (r.hi - r.lo + 1) / 2;
    for (const auto& [lo, hi] : {std::pair{r.lo, mid}, std::pair{mid, r.hi}}) {
      if (lo == hi) {
        continue;
      }
      const auto id = static_cast<NodeId>(parent.size());
      parent.push_back(r.node);
      leaf.push_back(kNoVertex);
      work.push_back({lo, hi, id, r.depth + 1});
    }
  }
  return CodingTree::from_parents(g, parent, leaf);
}

} // namespace setree
