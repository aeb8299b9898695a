#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "setree/graph.hpp"

namespace setree {

using NodeId = std::int32_t;

inline constexpr NodeId kNoNode = -1;
inline constexpr VertexId kNoVertex = -1;

/// Entropies are reported in bits.
inline constexpr double kLogBase = 2.0;

/// Exchange form of a single tree node, used for snapshots, raw
/// construction and serialization.
struct CodingTreeNode {
  NodeId id = kNoNode;
  NodeId parent = kNoNode;
  std::vector<NodeId> children;
  VertexId leaf_vertex = kNoVertex;
  Count volume = 0;
  Count cut = 0;
  int level = 0;

  friend bool operator==(const CodingTreeNode&, const CodingTreeNode&) = default;
};

/// Rooted hierarchy over the vertices of a graph.
///
/// Node ids are stable: the leaf for vertex v has id v, the root of a tree
/// built by `trivial` has id n, and every node created later gets the next
/// free id. Dropped nodes leave a hole in the id space.
///
/// Each node caches its volume (sum of member degrees) and cut (edges leaving
/// its member set). COMBINE and DROP keep both caches exact; levels are
/// recomputed lazily after a structural change.
///
/// The tree keeps a non-owning reference to its graph; the graph must outlive it.
class CodingTree {
public:
  /// Root with one leaf child per vertex. Throws InputError on an empty graph.
  static CodingTree trivial(const Graph& g);

  /// Builds a tree from a parent array (`kNoNode` marks the root) and a leaf
  /// vertex array (`kNoVertex` for internal nodes). All caches are computed
  /// from scratch. Throws ConsistencyError when the arrays do not describe a
  /// coding tree of `g`.
  static CodingTree from_parents(const Graph& g, std::span<const NodeId> parent, std::span<const VertexId> leaf_vertex);

  /// Adopts `nodes` verbatim, caches included, without checking anything.
  /// Intended for deserialization; run `validate` on the result.
  static CodingTree from_nodes(const Graph& g, std::span<const CodingTreeNode> nodes);

  const Graph& graph() const noexcept { return *graph_; }
  NodeId root() const noexcept { return root_; }

  /// One past the largest node id ever allocated.
  NodeId capacity() const noexcept { return static_cast<NodeId>(slots_.size()); }
  std::size_t size() const noexcept { return live_count_; }
  bool contains(NodeId id) const noexcept;

  NodeId parent(NodeId id) const { return slot(id).parent; }
  std::vector<NodeId> children(NodeId id) const;
  std::size_t num_children(NodeId id) const { return slot(id).live_children; }
  bool is_leaf(NodeId id) const { return slot(id).live_children == 0; }
  VertexId leaf_vertex(NodeId id) const { return slot(id).leaf_vertex; }
  Count volume(NodeId id) const { return slot(id).volume; }
  Count cut(NodeId id) const { return slot(id).cut; }
  int level(NodeId id) const;
  int height() const;

  /// Calls `fn(child)` for every child of `id`, in order.
  template <class Fn>
  void for_each_child(NodeId id, Fn&& fn) const {
    for (const NodeId c : slot(id).children) {
      if (c != kNoNode) {
        fn(c);
      }
    }
  }

  /// Live node ids in increasing order.
  std::vector<NodeId> node_ids() const;
  CodingTreeNode node(NodeId id) const;
  std::vector<CodingTreeNode> nodes() const;

  /// Edges whose endpoints lie under two different children of `id`.
  Count intra_cut(NodeId id) const;

  /// Entropy change of COMBINE(c1, c2) given the cut between the two subtrees.
  double combine_delta(NodeId c1, NodeId c2, Count cut_between) const;
  /// Entropy change of DROP(id).
  double drop_delta(NodeId id) const;
  /// Same, with the intra-cut supplied by a caller that tracks it.
  double drop_delta(NodeId id, Count intra) const;

  struct Combined {
    NodeId node = kNoNode;
    double delta = 0.0;
  };

  /// Inserts a new node between the root and its children `c1` and `c2`. The
  /// new node is appended to the root's children. The cut between the two
  /// subtrees is computed by scanning the smaller one.
  Combined combine(NodeId c1, NodeId c2);

  /// Same as above with a caller-maintained cut between the two subtrees.
  Combined combine(NodeId c1, NodeId c2, Count cut_between);

  /// Removes internal non-root node `id`; its children are appended, in
  /// order, to its parent's children. Returns the entropy change (>= 0).
  double drop(NodeId id);

  /// Inserts a unary node between `id` and its parent, in place. Entropy is unchanged.
  NodeId insert_unary_above(NodeId id);

  /// Inserts a unary node directly below the root that adopts all of the
  /// root's children. Entropy is unchanged; height grows by one.
  NodeId pad_below_root();

  /// Same parent for every live node, same leaf vertices. Child order is ignored.
  bool same_structure(const CodingTree& other) const;

private:
  struct Slot {
    NodeId parent = kNoNode;
    std::vector<NodeId> children; // kNoNode marks a removed child
    std::size_t live_children = 0;
    std::size_t pos_in_parent = 0;
    VertexId leaf_vertex = kNoVertex;
    Count volume = 0;
    Count cut = 0;
    int level = 0;
    bool alive = false;
  };

  explicit CodingTree(const Graph& g) : graph_(&g) {}

  const Slot& slot(NodeId id) const;
  Slot& slot(NodeId id);
  NodeId allocate();
  void detach_child(NodeId parent, NodeId child);
  void append_child(NodeId parent, NodeId child);
  void refresh_levels() const;
  void require_root_child(NodeId id, const char* what) const;
  Count scan_cut_between(NodeId c1, NodeId c2) const;

  const Graph* graph_;
  std::vector<Slot> slots_;
  NodeId root_ = kNoNode;
  std::size_t live_count_ = 0;
  mutable bool levels_dirty_ = false;
};

/// Structural entropy of `g` under `t`, with the term of every non-root node.
struct EntropyReport {
  static constexpr double log_base = kLogBase;

  double total = 0.0;
  std::map<NodeId, double> per_node;
  /// Set when the graph has no edges; total is then 0 by convention.
  bool degenerate = false;
  std::vector<std::string> warnings;
};

/// Throws ConsistencyError if `t` was not built over `g`.
EntropyReport tree_entropy(const Graph& g, const CodingTree& t);

/// Entropy of the degree distribution, i.e. of the height-1 tree.
double one_dim_entropy(const Graph& g);

CodingTree trivial_tree(const Graph& g);

struct Violation {
  /// "root", "structure", "axiom-3", "axiom-4", "cache" or "graph".
  std::string rule;
  NodeId node = kNoNode;
  std::string message;
};

/// Checks the coding-tree axioms and every cached value. Empty means valid.
std::vector<Violation> validate(const CodingTree& t, const Graph& g);

/// Entropy recomputed from member sets alone, ignoring every cache.
double recompute_entropy(const CodingTree& t, const Graph& g);

} // namespace setree
