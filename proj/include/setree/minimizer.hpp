#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "setree/coding_tree.hpp"
#include "setree/graph.hpp"

namespace setree {

enum class DropMode {
  /// Global argmin of the entropy increase over every inner node.
  literal,
  /// Argmin restricted to ancestors of the deepest leaves.
  height_aware,
};

std::string_view to_string(DropMode mode);
/// Throws ConfigError on anything but "literal" or "height-aware".
DropMode parse_drop_mode(std::string_view text);

struct MinimizeConfig {
  int height_k = 2;
  bool pad_to_exact_height = true;
  DropMode drop_mode = DropMode::literal;
  /// Recorded for audit only; minimization is deterministic.
  std::uint64_t seed = 0;
};

enum class StepKind { combine, drop, pad };

std::string_view to_string(StepKind kind);

struct TraceStep {
  StepKind kind = StepKind::combine;
  /// combine: {c1, c2, new}; drop: {dropped, parent}; pad: {pad}.
  std::vector<NodeId> nodes;
  double delta = 0.0;
  double entropy_after = 0.0;
};

struct MinimizeTrace {
  std::vector<TraceStep> steps;
  double initial_entropy = 0.0;
  double final_entropy = 0.0;
  /// Height after the binary merge stage.
  int stage1_height = 0;

  std::size_t count(StepKind kind) const;
};

struct MinimizeResult {
  CodingTree tree;
  MinimizeTrace trace;
  double stage1_ms = 0.0;
  double stage2_ms = 0.0;
};

/// Greedy two-stage structural entropy minimization to a coding tree of
/// height `cfg.height_k`.
///
/// Stage 1 repeatedly combines the pair of root children with the largest
/// entropy reduction until the root has at most two children. Stage 2 drops
/// the inner node with the smallest entropy increase until the height fits.
/// A tree that ends up shorter than k is padded with unary nodes below the
/// root when `cfg.pad_to_exact_height` is set.
///
/// Throws ConfigError when height_k < 2 and InputError on an empty graph.
MinimizeResult minimize(const Graph& g, const MinimizeConfig& cfg);

struct CombineCandidate {
  NodeId first = kNoNode;
  NodeId second = kNoNode;
  double reduction = 0.0;
  Count cut_between = 0;
};

/// Exhaustive evaluation of every pair of root children. Pairs joined by at
/// least one edge compete on reduction, ties going to the lexicographically
/// smallest (min id, max id). Without such a pair, the two children of
/// smallest (volume, id) are returned with reduction 0.
///
/// Throws PreconditionError when the root has fewer than three children.
CombineCandidate best_combine_candidate(const CodingTree& t);

struct DropCandidate {
  NodeId node = kNoNode;
  double increase = 0.0;
};

/// Exhaustive scan of the droppable nodes under `mode`; ties go to the
/// smallest id. Throws InternalError when nothing can be dropped.
DropCandidate best_drop_candidate(const CodingTree& t, DropMode mode);

/// Randomly balanced binary tree: vertices are shuffled under `seed` and split
/// into halves level by level, so every leaf sits at level k.
CodingTree rbbt(const Graph& g, int k, std::uint64_t seed);

} // namespace setree
