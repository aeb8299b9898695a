#include "setree/coding_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "setree/error.hpp"

namespace setree {

namespace {

std::string id_str(NodeId id) { return std::to_string(id); }

/// -(g / vol_total) * log2(vol / vol_parent), with 0 * log 0 = 0.
double node_term(Count cut, Count vol, Count vol_parent, Count vol_total) {
  if (cut == 0 || vol == 0 || vol_parent == 0) {
    return 0.0;
  }
  return -(static_cast<double>(cut) / static_cast<double>(vol_total)) *
         std::log2(static_cast<double>(vol) / static_cast<double>(vol_parent));
}

} // namespace

// ---------------------------------------------------------------------------
// construction

CodingTree CodingTree::trivial(const Graph& g) {
  const VertexId n = g.num_vertices();
  if (n == 0) {
    throw InputError("cannot build a coding tree for an empty graph");
  }
  CodingTree t(g);
  t.slots_.resize(static_cast<std::size_t>(n) + 1);
  t.root_ = n;
  Slot& root = t.slots_[static_cast<std::size_t>(n)];
  root.alive = true;
  root.volume = g.total_volume();
  root.children.reserve(static_cast<std::size_t>(n));
  for (VertexId v = 0; v < n; ++v) {
    Slot& leaf = t.slots_[static_cast<std::size_t>(v)];
    leaf.alive = true;
    leaf.parent = n;
    leaf.leaf_vertex = v;
    leaf.volume = g.degree(v);
    leaf.cut = g.degree(v);
    leaf.level = 1;
    leaf.pos_in_parent = root.children.size();
    root.children.push_back(v);
  }
  root.live_children = static_cast<std::size_t>(n);
  t.live_count_ = static_cast<std::size_t>(n) + 1;
  return t;
}

CodingTree CodingTree::from_parents(const Graph& g, std::span<const NodeId> parent,
                                    std::span<const VertexId> leaf_vertex) {
  if (parent.size() != leaf_vertex.size()) {
    throw ConsistencyError("parent and leaf_vertex arrays differ in length");
  }
  const auto count = parent.size();
  CodingTree t(g);
  t.slots_.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Slot& s = t.slots_[i];
    s.alive = true;
    s.parent = parent[i];
    s.leaf_vertex = leaf_vertex[i];
    if (s.parent == kNoNode) {
      if (t.root_ != kNoNode) {
        throw ConsistencyError("more than one root (nodes " + id_str(t.root_) + " and " + std::to_string(i) + ")");
      }
      t.root_ = static_cast<NodeId>(i);
    } else if (s.parent < 0 || static_cast<std::size_t>(s.parent) >= count || s.parent == static_cast<NodeId>(i)) {
      throw ConsistencyError("node " + std::to_string(i) + " has invalid parent " + id_str(s.parent));
    }
  }
  if (t.root_ == kNoNode) {
    throw ConsistencyError("no root node");
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (t.slots_[i].parent != kNoNode) {
      t.append_child(t.slots_[i].parent, static_cast<NodeId>(i));
    }
  }
  t.live_count_ = count;

  // Top-down order; also rejects cycles, which would leave nodes unreached.
  std::vector<NodeId> order;
  order.reserve(count);
  order.push_back(t.root_);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const NodeId id = order[head];
    t.for_each_child(id, [&](NodeId c) {
      t.slots_[static_cast<std::size_t>(c)].level = t.slots_[static_cast<std::size_t>(id)].level + 1;
      order.push_back(c);
    });
  }
  if (order.size() != count) {
    throw ConsistencyError("parent array contains a cycle or unreachable nodes");
  }

  std::vector<NodeId> leaf_of(static_cast<std::size_t>(g.num_vertices()), kNoNode);
  for (std::size_t i = 0; i < count; ++i) {
    const Slot& s = t.slots_[i];
    const bool leaf = s.live_children == 0;
    if (leaf != (s.leaf_vertex != kNoVertex)) {
      throw ConsistencyError("node " + std::to_string(i) + (leaf ? " is a leaf without a vertex" : " is internal but carries a vertex"));
    }
    if (!leaf) {
      continue;
    }
    if (s.leaf_vertex < 0 || s.leaf_vertex >= g.num_vertices()) {
      throw ConsistencyError("node " + std::to_string(i) + " refers to vertex " + std::to_string(s.leaf_vertex) + " outside the graph");
    }
    auto& owner = leaf_of[static_cast<std::size_t>(s.leaf_vertex)];
    if (owner != kNoNode) {
      throw ConsistencyError("vertex " + std::to_string(s.leaf_vertex) + " has two leaves");
    }
    owner = static_cast<NodeId>(i);
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (leaf_of[static_cast<std::size_t>(v)] == kNoNode) {
      throw ConsistencyError("vertex " + std::to_string(v) + " has no leaf");
    }
  }

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Slot& s = t.slots_[static_cast<std::size_t>(*it)];
    if (s.leaf_vertex != kNoVertex) {
      s.volume = g.degree(s.leaf_vertex);
    }
    if (s.parent != kNoNode) {
      t.slots_[static_cast<std::size_t>(s.parent)].volume += s.volume;
    }
  }
  // An edge leaves every node on the path from either endpoint up to, but
  // excluding, the lowest common ancestor.
  for (const auto& [u, v] : g.edges()) {
    NodeId a = leaf_of[static_cast<std::size_t>(u)];
    NodeId b = leaf_of[static_cast<std::size_t>(v)];
    while (a != b) {
      Slot& sa = t.slots_[static_cast<std::size_t>(a)];
      Slot& sb = t.slots_[static_cast<std::size_t>(b)];
      if (sa.level >= sb.level) {
        ++sa.cut;
        a = sa.parent;
      } else {
        ++sb.cut;
        b = sb.parent;
      }
    }
  }
  return t;
}

CodingTree CodingTree::from_nodes(const Graph& g, std::span<const CodingTreeNode> nodes) {
  CodingTree t(g);
  NodeId max_id = kNoNode;
  for (const auto& n : nodes) {
    if (n.id < 0) {
      throw ConsistencyError("negative node id " + id_str(n.id));
    }
    max_id = std::max(max_id, n.id);
  }
  t.slots_.resize(static_cast<std::size_t>(max_id + 1));
  for (const auto& n : nodes) {
    Slot& s = t.slots_[static_cast<std::size_t>(n.id)];
    if (s.alive) {
      throw ConsistencyError("duplicate node id " + id_str(n.id));
    }
    s.alive = true;
    s.parent = n.parent;
    s.children = n.children;
    s.live_children = n.children.size();
    s.leaf_vertex = n.leaf_vertex;
    s.volume = n.volume;
    s.cut = n.cut;
    s.level = n.level;
    ++t.live_count_;
    if (n.parent == kNoNode && t.root_ == kNoNode) {
      t.root_ = n.id;
    }
  }
  for (NodeId id = 0; id <= max_id; ++id) {
    const Slot& s = t.slots_[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < s.children.size(); ++i) {
      const NodeId c = s.children[i];
      if (c >= 0 && c <= max_id && t.slots_[static_cast<std::size_t>(c)].parent == id) {
        t.slots_[static_cast<std::size_t>(c)].pos_in_parent = i;
      }
    }
  }
  return t;
}

CodingTree trivial_tree(const Graph& g) { return CodingTree::trivial(g); }

// ---------------------------------------------------------------------------
// accessors

bool CodingTree::contains(NodeId id) const noexcept {
  return id >= 0 && static_cast<std::size_t>(id) < slots_.size() && slots_[static_cast<std::size_t>(id)].alive;
}

const CodingTree::Slot& CodingTree::slot(NodeId id) const {
  if (!contains(id)) {
    throw PreconditionError("node " + id_str(id) + " is not in the tree");
  }
  return slots_[static_cast<std::size_t>(id)];
}

CodingTree::Slot& CodingTree::slot(NodeId id) {
  return const_cast<Slot&>(static_cast<const CodingTree&>(*this).slot(id));
}

std::vector<NodeId> CodingTree::children(NodeId id) const {
  std::vector<NodeId> out;
  out.reserve(slot(id).live_children);
  for_each_child(id, [&](NodeId c) { out.push_back(c); });
  return out;
}

void CodingTree::refresh_levels() const {
  if (!levels_dirty_) {
    return;
  }
  auto& slots = const_cast<std::vector<Slot>&>(slots_);
  std::vector<NodeId> frontier{root_};
  slots[static_cast<std::size_t>(root_)].level = 0;
  while (!frontier.empty()) {
    const NodeId id = frontier.back();
    frontier.pop_back();
    const int next = slots[static_cast<std::size_t>(id)].level + 1;
    for_each_child(id, [&](NodeId c) {
      slots[static_cast<std::size_t>(c)].level = next;
      frontier.push_back(c);
    });
  }
  levels_dirty_ = false;
}

int CodingTree::level(NodeId id) const {
  refresh_levels();
  return slot(id).level;
}

int CodingTree::height() const {
  refresh_levels();
  int h = 0;
  for (const Slot& s : slots_) {
    if (s.alive && s.live_children == 0) {
      h = std::max(h, s.level);
    }
  }
  return h;
}

std::vector<NodeId> CodingTree::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(live_count_);
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].alive) {
      ids.push_back(static_cast<NodeId>(i));
    }
  }
  return ids;
}

CodingTreeNode CodingTree::node(NodeId id) const {
  refresh_levels();
  const Slot& s = slot(id);
  return CodingTreeNode{id, s.parent, children(id), s.leaf_vertex, s.volume, s.cut, s.level};
}

std::vector<CodingTreeNode> CodingTree::nodes() const {
  std::vector<CodingTreeNode> out;
  out.reserve(live_count_);
  for (const NodeId id : node_ids()) {
    out.push_back(node(id));
  }
  return out;
}

Count CodingTree::intra_cut(NodeId id) const {
  Count child_cuts = 0;
  for_each_child(id, [&](NodeId c) { child_cuts += slots_[static_cast<std::size_t>(c)].cut; });
  return (child_cuts - slot(id).cut) / 2;
}

double CodingTree::combine_delta(NodeId c1, NodeId c2, Count cut_between) const {
  const Count total = graph_->total_volume();
  if (cut_between == 0 || total == 0) {
    return 0.0;
  }
  const Count merged = slot(c1).volume + slot(c2).volume;
  return (2.0 * static_cast<double>(cut_between) / static_cast<double>(total)) *
         std::log2(static_cast<double>(merged) / static_cast<double>(total));
}

double CodingTree::drop_delta(NodeId id) const { return drop_delta(id, intra_cut(id)); }

double CodingTree::drop_delta(NodeId id, Count intra) const {
  const Count total = graph_->total_volume();
  if (intra == 0 || total == 0) {
    return 0.0;
  }
  const Slot& s = slot(id);
  return (2.0 * static_cast<double>(intra) / static_cast<double>(total)) *
         std::log2(static_cast<double>(slot(s.parent).volume) / static_cast<double>(s.volume));
}

// ---------------------------------------------------------------------------
// mutation

NodeId CodingTree::allocate() {
  const auto id = static_cast<NodeId>(slots_.size());
  slots_.emplace_back();
  slots_.back().alive = true;
  ++live_count_;
  return id;
}

void CodingTree::detach_child(NodeId parent, NodeId child) {
  Slot& p = slots_[static_cast<std::size_t>(parent)];
  Slot& c = slots_[static_cast<std::size_t>(child)];
  p.children[c.pos_in_parent] = kNoNode;
  --p.live_children;
  c.parent = kNoNode;
  // Compact once removed entries dominate so iteration stays linear.
  if (p.children.size() > 16 && p.live_children * 2 < p.children.size()) {
    std::size_t out = 0;
    for (const NodeId x : p.children) {
      if (x != kNoNode) {
        slots_[static_cast<std::size_t>(x)].pos_in_parent = out;
        p.children[out++] = x;
      }
    }
    p.children.resize(out);
  }
}

void CodingTree::append_child(NodeId parent, NodeId child) {
  Slot& p = slots_[static_cast<std::size_t>(parent)];
  Slot& c = slots_[static_cast<std::size_t>(child)];
  c.parent = parent;
  c.pos_in_parent = p.children.size();
  p.children.push_back(child);
  ++p.live_children;
}

void CodingTree::require_root_child(NodeId id, const char* what) const {
  if (!contains(id) || slots_[static_cast<std::size_t>(id)].parent != root_) {
    throw PreconditionError(std::string(what) + " " + id_str(id) + " is not a child of the root");
  }
}

Count CodingTree::scan_cut_between(NodeId c1, NodeId c2) const {
  if (slot(c1).volume > slot(c2).volume) {
    std::swap(c1, c2);
  }
  std::vector<char> in_other(static_cast<std::size_t>(graph_->num_vertices()), 0);
  std::vector<NodeId> stack{c2};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Slot& s = slots_[static_cast<std::size_t>(id)];
    if (s.live_children == 0) {
      in_other[static_cast<std::size_t>(s.leaf_vertex)] = 1;
    }
    for_each_child(id, [&](NodeId c) { stack.push_back(c); });
  }
  Count crossing = 0;
  stack.push_back(c1);
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const Slot& s = slots_[static_cast<std::size_t>(id)];
    if (s.live_children == 0) {
      for (const VertexId w : graph_->neighbors(s.leaf_vertex)) {
        crossing += in_other[static_cast<std::size_t>(w)];
      }
    }
    for_each_child(id, [&](NodeId c) { stack.push_back(c); });
  }
  return crossing;
}

CodingTree::Combined CodingTree::combine(NodeId c1, NodeId c2) {
  require_root_child(c1, "combine operand");
  require_root_child(c2, "combine operand");
  if (c1 == c2) {
    throw PreconditionError("combine operands must differ");
  }
  return combine(c1, c2, scan_cut_between(c1, c2));
}

CodingTree::Combined CodingTree::combine(NodeId c1, NodeId c2, Count cut_between) {
  require_root_child(c1, "combine operand");
  require_root_child(c2, "combine operand");
  if (c1 == c2) {
    throw PreconditionError("combine operands must differ");
  }
  const double delta = combine_delta(c1, c2, cut_between);
  const NodeId id = allocate();
  detach_child(root_, c1);
  detach_child(root_, c2);
  Slot& s = slots_[static_cast<std::size_t>(id)];
  s.volume = slots_[static_cast<std::size_t>(c1)].volume + slots_[static_cast<std::size_t>(c2)].volume;
  s.cut = slots_[static_cast<std::size_t>(c1)].cut + slots_[static_cast<std::size_t>(c2)].cut - 2 * cut_between;
  append_child(id, c1);
  append_child(id, c2);
  append_child(root_, id);
  levels_dirty_ = true;
  return {id, delta};
}

double CodingTree::drop(NodeId id) {
  if (!contains(id)) {
    throw PreconditionError("node " + id_str(id) + " is not in the tree");
  }
  if (id == root_) {
    throw PreconditionError("cannot drop the root");
  }
  if (is_leaf(id)) {
    throw PreconditionError("cannot drop leaf node " + id_str(id));
  }
  const double delta = drop_delta(id);
  const NodeId parent = slots_[static_cast<std::size_t>(id)].parent;
  const std::vector<NodeId> kids = children(id);
  detach_child(parent, id);
  for (const NodeId c : kids) {
    append_child(parent, c);
  }
  Slot& s = slots_[static_cast<std::size_t>(id)];
  s = Slot{};
  --live_count_;
  levels_dirty_ = true;
  return delta;
}

NodeId CodingTree::insert_unary_above(NodeId id) {
  if (!contains(id) || id == root_) {
    throw PreconditionError("node " + id_str(id) + " has no parent to insert under");
  }
  const NodeId u = allocate();
  Slot& c = slots_[static_cast<std::size_t>(id)];
  Slot& s = slots_[static_cast<std::size_t>(u)];
  s.parent = c.parent;
  s.pos_in_parent = c.pos_in_parent;
  s.volume = c.volume;
  s.cut = c.cut;
  slots_[static_cast<std::size_t>(c.parent)].children[c.pos_in_parent] = u;
  c.parent = u;
  c.pos_in_parent = 0;
  s.children.push_back(id);
  s.live_children = 1;
  levels_dirty_ = true;
  return u;
}

NodeId CodingTree::pad_below_root() {
  const NodeId u = allocate();
  const std::vector<NodeId> kids = children(root_);
  Slot& root = slots_[static_cast<std::size_t>(root_)];
  root.children.clear();
  root.live_children = 0;
  Slot& s = slots_[static_cast<std::size_t>(u)];
  s.volume = root.volume;
  s.cut = root.cut;
  for (const NodeId c : kids) {
    append_child(u, c);
  }
  append_child(root_, u);
  levels_dirty_ = true;
  return u;
}

bool CodingTree::same_structure(const CodingTree& other) const {
  if (root_ != other.root_ || live_count_ != other.live_count_) {
    return false;
  }
  for (const NodeId id : node_ids()) {
    if (!other.contains(id)) {
      return false;
    }
    const Slot& a = slots_[static_cast<std::size_t>(id)];
    const Slot& b = other.slots_[static_cast<std::size_t>(id)];
    if (a.parent != b.parent || a.leaf_vertex != b.leaf_vertex) {
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// entropy

EntropyReport tree_entropy(const Graph& g, const CodingTree& t) {
  if (&t.graph() != &g && (t.graph().fingerprint() != g.fingerprint() || t.graph().num_vertices() != g.num_vertices())) {
    throw ConsistencyError("coding tree was built over a different graph");
  }
  EntropyReport report;
  const Count total = g.total_volume();
  if (total == 0) {
    report.degenerate = true;
    report.warnings.emplace_back("graph has no edges; structural entropy is taken as 0");
  }
  for (const NodeId id : t.node_ids()) {
    if (id == t.root()) {
      continue;
    }
    const double term =
        total == 0 ? 0.0 : node_term(t.cut(id), t.volume(id), t.volume(t.parent(id)), total);
    report.per_node.emplace(id, term);
    report.total += term;
  }
  return report;
}

double one_dim_entropy(const Graph& g) {
  const Count total = g.total_volume();
  double h = 0.0;
  if (total == 0) {
    return h;
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    h += node_term(g.degree(v), g.degree(v), total, total);
  }
  return h;
}

// ---------------------------------------------------------------------------
// validation

std::vector<Violation> validate(const CodingTree& t, const Graph& g) {
  std::vector<Violation> out;
  auto report = [&](std::string rule, NodeId node, std::string message) {
    out.push_back({std::move(rule), node, std::move(message)});
  };

  if (t.graph().fingerprint() != g.fingerprint() || t.graph().num_vertices() != g.num_vertices()) {
    report("graph", kNoNode, "tree was built over a different graph");
    return out;
  }

  const auto ids = t.node_ids();
  NodeId root = kNoNode;
  for (const NodeId id : ids) {
    if (t.parent(id) == kNoNode) {
      if (root != kNoNode) {
        report("root", id, "second parentless node besides " + id_str(root));
      } else {
        root = id;
      }
    }
  }
  if (root == kNoNode) {
    report("root", kNoNode, "no parentless node");
    return out;
  }
  if (root != t.root()) {
    report("root", root, "parentless node is not the designated root " + id_str(t.root()));
  }

  bool structure_ok = out.empty();
  std::vector<int> listed(static_cast<std::size_t>(t.capacity()), 0);
  for (const NodeId id : ids) {
    const NodeId p = t.parent(id);
    if (p != kNoNode && !t.contains(p)) {
      report("structure", id, "parent " + id_str(p) + " is not in the tree");
      structure_ok = false;
    }
    t.for_each_child(id, [&](NodeId c) {
      if (!t.contains(c)) {
        report("structure", id, "child " + id_str(c) + " is not in the tree");
        structure_ok = false;
      } else if (t.parent(c) != id) {
        report("structure", id, "child " + id_str(c) + " names " + id_str(t.parent(c)) + " as its parent");
        structure_ok = false;
      } else {
        ++listed[static_cast<std::size_t>(c)];
      }
    });
  }
  for (const NodeId id : ids) {
    if (t.parent(id) != kNoNode && t.contains(t.parent(id)) && listed[static_cast<std::size_t>(id)] != 1) {
      report("structure", id, "listed " + std::to_string(listed[static_cast<std::size_t>(id)]) +
                                  " times among the children of its parent " + id_str(t.parent(id)));
      structure_ok = false;
    }
  }
  if (!structure_ok) {
    return out;
  }

  // Reachability and top-down order from the root.
  std::vector<char> seen(static_cast<std::size_t>(t.capacity()), 0);
  std::vector<NodeId> order{root};
  seen[static_cast<std::size_t>(root)] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (const NodeId c : t.children(order[head])) {
      if (seen[static_cast<std::size_t>(c)]) {
        report("structure", c, "reached twice; the tree contains a cycle");
        return out;
      }
      seen[static_cast<std::size_t>(c)] = 1;
      order.push_back(c);
    }
  }
  for (const NodeId id : ids) {
    if (!seen[static_cast<std::size_t>(id)]) {
      report("structure", id, "not reachable from the root");
    }
  }
  if (!out.empty()) {
    return out;
  }

  // Axiom 4: leaves are exactly the vertices, one leaf each.
  std::vector<NodeId> leaf_of(static_cast<std::size_t>(g.num_vertices()), kNoNode);
  bool leaves_ok = true;
  for (const NodeId id : ids) {
    const VertexId v = t.leaf_vertex(id);
    if (t.is_leaf(id)) {
      if (v == kNoVertex) {
        report("axiom-4", id, "leaf is not associated with any vertex");
        leaves_ok = false;
      } else if (v < 0 || v >= g.num_vertices()) {
        report("axiom-4", id, "leaf refers to vertex " + std::to_string(v) + " outside the graph");
        leaves_ok = false;
      } else if (leaf_of[static_cast<std::size_t>(v)] != kNoNode) {
        report("axiom-4", id, "vertex " + std::to_string(v) + " already has leaf " + id_str(leaf_of[static_cast<std::size_t>(v)]));
        leaves_ok = false;
      } else {
        leaf_of[static_cast<std::size_t>(v)] = id;
      }
    } else if (v != kNoVertex) {
      report("axiom-4", id, "internal node carries vertex " + std::to_string(v));
      leaves_ok = false;
    }
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (leaf_of[static_cast<std::size_t>(v)] == kNoNode) {
      report("axiom-4", kNoNode, "vertex " + std::to_string(v) + " has no leaf");
      leaves_ok = false;
    }
  }
  if (!leaves_ok) {
    return out;
  }

  // With every vertex under exactly one leaf and every node reached once,
  // sibling markers are disjoint and union to their parent's marker. What
  // remains is the cached statistics of each marker.
  const auto cap = static_cast<std::size_t>(t.capacity());
  std::vector<int> level(cap, 0);
  std::vector<Count> volume(cap, 0);
  std::vector<Count> cut(cap, 0);
  for (const NodeId id : order) {
    if (id != root) {
      level[static_cast<std::size_t>(id)] = level[static_cast<std::size_t>(t.parent(id))] + 1;
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId id = *it;
    if (t.is_leaf(id)) {
      volume[static_cast<std::size_t>(id)] = g.degree(t.leaf_vertex(id));
    }
    if (id != root) {
      volume[static_cast<std::size_t>(t.parent(id))] += volume[static_cast<std::size_t>(id)];
    }
  }
  for (const auto& [u, v] : g.edges()) {
    NodeId a = leaf_of[static_cast<std::size_t>(u)];
    NodeId b = leaf_of[static_cast<std::size_t>(v)];
    while (a != b) {
      if (level[static_cast<std::size_t>(a)] >= level[static_cast<std::size_t>(b)]) {
        ++cut[static_cast<std::size_t>(a)];
        a = t.parent(a);
      } else {
        ++cut[static_cast<std::size_t>(b)];
        b = t.parent(b);
      }
    }
  }
  for (const NodeId id : ids) {
    const auto i = static_cast<std::size_t>(id);
    if (volume[i] != t.volume(id)) {
      report("cache", id, "volume cache " + std::to_string(t.volume(id)) + " != " + std::to_string(volume[i]));
    }
    if (cut[i] != t.cut(id)) {
      report("cache", id, "cut cache " + std::to_string(t.cut(id)) + " != " + std::to_string(cut[i]));
    }
    if (t.level(id) != level[i]) {
      report("cache", id, "level cache " + std::to_string(t.level(id)) + " != " + std::to_string(level[i]));
    }
  }
  return out;
}

double recompute_entropy(const CodingTree& t, const Graph& g) {
  const Count total = g.total_volume();
  if (total == 0) {
    return 0.0;
  }
  std::vector<VertexSetStats> stats(static_cast<std::size_t>(t.capacity()));
  std::vector<NodeId> order{t.root()};
  for (std::size_t head = 0; head < order.size(); ++head) {
    t.for_each_child(order[head], [&](NodeId c) { order.push_back(c); });
  }
  std::vector<std::vector<VertexId>> marker(static_cast<std::size_t>(t.capacity()));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId id = *it;
    auto& mine = marker[static_cast<std::size_t>(id)];
    if (t.is_leaf(id)) {
      mine.push_back(t.leaf_vertex(id));
    }
    t.for_each_child(id, [&](NodeId c) {
      auto& theirs = marker[static_cast<std::size_t>(c)];
      mine.insert(mine.end(), theirs.begin(), theirs.end());
    });
    stats[static_cast<std::size_t>(id)] = set_stats(g, mine);
  }
  double h = 0.0;
  for (const NodeId id : t.node_ids()) {
    if (id == t.root()) {
      continue;
    }
    const auto& s = stats[static_cast<std::size_t>(id)];
    h += node_term(s.cut, s.volume, stats[static_cast<std::size_t>(t.parent(id))].volume, total);
  }
  return h;
}

} // namespace setree
