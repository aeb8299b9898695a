#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "setree/coding_tree.hpp"
#include "setree/contrastive.hpp"
#include "setree/graph.hpp"
#include "setree/minimizer.hpp"

namespace setree {

// ---------------------------------------------------------------------------
// edge lists

struct EdgeListGraph {
  Graph graph;
  /// original_ids[v] is the id vertex v carried in the file.
  std::vector<std::int64_t> original_ids;
};

/// One edge per line as "u v" or "u,v"; a line with a single id declares a
/// vertex. Blank lines and lines starting with '#' or '%' are skipped. Ids are
/// arbitrary non-negative integers, compacted to 0..n-1 in increasing order.
/// Throws ParseError (with the line number) on a bad token and InputError
/// when the text declares no vertices.
EdgeListGraph parse_edge_list(std::string_view text);

/// Throws IoError when the file cannot be read.
EdgeListGraph read_edge_list(const std::filesystem::path& path);

/// Inverse of parse_edge_list for a dense graph: every edge as "u v", then
/// every isolated vertex on a line of its own.
std::string serialize_edge_list(const Graph& g);

// ---------------------------------------------------------------------------
// TUDataset

struct DatasetBundle {
  std::string name;
  std::vector<Graph> graphs;
  std::optional<std::vector<int>> labels;
  /// node_offset[i] is the global (0-based) id of the first node of graph i.
  std::vector<std::size_t> node_offset;
  std::vector<std::string> warnings;
  /// Optional per-node/edge/graph files that were present, by suffix, with
  /// their raw lines. Kept verbatim and never used by the entropy code.
  std::map<std::string, std::vector<std::string>> metadata;
};

/// Reads NAME_A.txt, NAME_graph_indicator.txt and, when present,
/// NAME_graph_labels.txt from `dir` (or from `dir`/NAME). Node ids on disk
/// are 1-based and global; each graph gets dense 0-based ids in order of
/// appearance. Throws IoError for a missing mandatory file, ParseError for
/// malformed lines and FormatError for an edge joining two graphs.
DatasetBundle parse_tudataset(const std::filesystem::path& dir, const std::string& name);

struct DatasetStats {
  std::size_t num_graphs = 0;
  std::size_t num_classes = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
};

DatasetStats dataset_stats(const DatasetBundle& bundle);

// ---------------------------------------------------------------------------
// tree documents

inline constexpr std::string_view kTreeFormatVersion = "1";

struct TraceSummary {
  std::size_t combines = 0;
  std::size_t drops = 0;
  std::size_t pads = 0;
  double initial_entropy = 0.0;

  friend bool operator==(const TraceSummary&, const TraceSummary&) = default;
};

TraceSummary summarize(const MinimizeTrace& trace);

struct TreeDocument {
  std::string format_version{kTreeFormatVersion};
  std::string graph_fingerprint;
  int height = 0;
  double entropy_bits = 0.0;
  std::vector<CodingTreeNode> nodes;
  std::optional<TraceSummary> trace_summary;
};

/// Canonical JSON: sorted keys, nodes by id, reals with 12 significant
/// digits. Throws ConsistencyError when `t` fails validation.
std::string serialize_tree(const CodingTree& t, const EntropyReport& report, const MinimizeTrace* trace = nullptr);

/// Throws ParseError on malformed JSON and FormatError on a schema violation.
TreeDocument parse_tree_document(std::string_view text);

/// Rebuilds the tree over `g`. Throws ConsistencyError when the document was
/// written for another graph. The result is not validated.
CodingTree tree_from_document(const TreeDocument& doc, const Graph& g);

// ---------------------------------------------------------------------------
// numeric matrices

/// One row per line, values separated by commas or whitespace. Blank lines
/// and '#' comments are skipped. Throws ParseError on a non-numeric token and
/// InputError on ragged rows or an empty file.
Matrix parse_matrix_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace setree
