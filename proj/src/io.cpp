#include "setree/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "setree/canonical_json.hpp"
#include "setree/error.hpp"

namespace setree {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Splits on runs of whitespace and commas.
std::vector<std::string_view> tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' || line[i] == ',' || line[i] == '\r')) {
      ++i;
    }
    if (i > start) {
      out.push_back(line.substr(start, i - start));
    }
  }
  return out;
}

std::int64_t parse_id(std::string_view token, std::size_t line_no) {
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line_no, "'" + std::string(token) + "' is not an integer");
  }
  if (value < 0) {
    throw ParseError(line_no, "negative id " + std::string(token));
  }
  return value;
}

/// Calls fn(line_no, line) for every line of `text`.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    ++line_no;
    if (!(end == std::string_view::npos && line.empty())) {
      fn(line_no, line);
    }
    if (end == std::string_view::npos) {
      break;
    }
    pos = end + 1;
  }
}

} // namespace

// ---------------------------------------------------------------------------
// edge lists

EdgeListGraph parse_edge_list(std::string_view text) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  std::vector<std::int64_t> ids;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == '%') {
      return;
    }
    const auto tok = tokens(line);
    if (tok.size() == 1) {
      ids.push_back(parse_id(tok[0], line_no));
    } else if (tok.size() == 2) {
      const auto u = parse_id(tok[0], line_no);
      const auto v = parse_id(tok[1], line_no);
      raw_edges.emplace_back(u, v);
      ids.push_back(u);
      ids.push_back(v);
    } else {
      throw ParseError(line_no, "expected two vertex ids, found " + std::to_string(tok.size()) + " tokens");
    }
  });
  if (ids.empty()) {
    throw InputError("edge list declares no vertices");
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() > static_cast<std::size_t>(std::numeric_limits<VertexId>::max())) {
    throw InputError("too many vertices");
  }
  auto dense = [&](std::int64_t id) {
    return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  std::vector<Edge> edges;
  edges.reserve(raw_edges.size());
  for (const auto& [u, v] : raw_edges) {
    edges.emplace_back(dense(u), dense(v));
  }
  return {Graph(static_cast<VertexId>(ids.size()), edges), std::move(ids)};
}

EdgeListGraph read_edge_list(const std::filesystem::path& path) { return parse_edge_list(read_text_file(path)); }

std::string serialize_edge_list(const Graph& g) {
  std::string out;
  for (const auto& [u, v] : g.edges()) {
    out += std::to_string(u);
    out += ' ';
    out += std::to_string(v);
    out += '\n';
  }
  for (VertexId v = 0; v < g.num_vertices(); ++v) {
    if (g.degree(v) == 0) {
      out += std::to_string(v);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// TUDataset

namespace {

std::filesystem::path locate(const std::filesystem::path& dir, const std::string& name, const std::string& suffix) {
  const std::string file = name + "_" + suffix + ".txt";
  if (std::filesystem::exists(dir / file)) {
    return dir / file;
  }
  if (std::filesystem::exists(dir / name / file)) {
    return dir / name / file;
  }
  return {};
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  for_each_line(read_text_file(path), [&](std::size_t, std::string_view line) { lines.emplace_back(line); });
  while (!lines.empty() && trim(lines.back()).empty()) {
    lines.pop_back();
  }
  return lines;
}

} // namespace

DatasetBundle parse_tudataset(const std::filesystem::path& dir, const std::string& name) {
  const auto adjacency_path = locate(dir, name, "A");
  const auto indicator_path = locate(dir, name, "graph_indicator");
  if (indicator_path.empty()) {
    throw IoError("missing " + name + "_graph_indicator.txt under " + dir.string());
  }
  if (adjacency_path.empty()) {
    throw IoError("missing " + name + "_A.txt under " + dir.string());
  }

  DatasetBundle bundle;
  bundle.name = name;

  // Node i (1-based, global) belongs to graph indicator[i-1] (1-based).
  const auto indicator_lines = read_lines(indicator_path);
  std::vector<std::size_t> graph_of;
  graph_of.reserve(indicator_lines.size());
  std::size_t num_graphs = 0;
  for (std::size_t i = 0; i < indicator_lines.size(); ++i) {
    const auto tok = tokens(trim(indicator_lines[i]));
    if (tok.size() != 1) {
      throw ParseError(i + 1, indicator_path.filename().string() + ": expected one graph id");
    }
    const auto gid = parse_id(tok[0], i + 1);
    if (gid < 1) {
      throw ParseError(i + 1, indicator_path.filename().string() + ": graph ids are 1-based");
    }
    graph_of.push_back(static_cast<std::size_t>(gid - 1));
    num_graphs = std::max(num_graphs, static_cast<std::size_t>(gid));
  }

  // Dense per-graph ids in order of appearance.
  std::vector<VertexId> local(graph_of.size());
  std::vector<VertexId> sizes(num_graphs, 0);
  bundle.node_offset.assign(num_graphs, 0);
  std::vector<char> seen_graph(num_graphs, 0);
  for (std::size_t i = 0; i < graph_of.size(); ++i) {
    const auto gi = graph_of[i];
    if (!seen_graph[gi]) {
      seen_graph[gi] = 1;
      bundle.node_offset[gi] = i;
    }
    local[i] = sizes[gi]++;
  }
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    if (!seen_graph[gi]) {
      bundle.warnings.push_back("graph " + std::to_string(gi + 1) + " has no nodes");
    }
  }

  std::vector<std::vector<Edge>> edges(num_graphs);
  const auto adjacency_lines = read_lines(adjacency_path);
  for (std::size_t i = 0; i < adjacency_lines.size(); ++i) {
    const auto line = trim(adjacency_lines[i]);
    if (line.empty()) {
      continue;
    }
    const auto tok = tokens(line);
    if (tok.size() != 2) {
      throw ParseError(i + 1, adjacency_path.filename().string() + ": expected 'u, v'");
    }
    const auto u = parse_id(tok[0], i + 1);
    const auto v = parse_id(tok[1], i + 1);
    if (u < 1 || v < 1 || static_cast<std::size_t>(u) > graph_of.size() || static_cast<std::size_t>(v) > graph_of.size()) {
      throw FormatError(adjacency_path.filename().string() + " line " + std::to_string(i + 1) + ": node id outside 1.." +
                        std::to_string(graph_of.size()));
    }
    const auto gu = graph_of[static_cast<std::size_t>(u - 1)];
    const auto gv = graph_of[static_cast<std::size_t>(v - 1)];
    if (gu != gv) {
      throw FormatError(adjacency_path.filename().string() + " line " + std::to_string(i + 1) + ": edge (" +
                        std::to_string(u) + ", " + std::to_string(v) + ") joins graph " + std::to_string(gu + 1) +
                        " and graph " + std::to_string(gv + 1));
    }
    edges[gu].emplace_back(local[static_cast<std::size_t>(u - 1)], local[static_cast<std::size_t>(v - 1)]);
  }

  bundle.graphs.reserve(num_graphs);
  for (std::size_t gi = 0; gi < num_graphs; ++gi) {
    auto& list = edges[gi];
    // Both orientations of an undirected edge are expected; only exact
    // repeats of an ordered pair count as duplicates.
    auto ordered = list;
    std::sort(ordered.begin(), ordered.end());
    const auto repeats = std::distance(std::unique(ordered.begin(), ordered.end()), ordered.end());
    Graph g(sizes[gi], list);
    if (g.self_loops_dropped() > 0) {
      bundle.warnings.push_back("graph " + std::to_string(gi + 1) + ": dropped " + std::to_string(g.self_loops_dropped()) +
                                " self-loop(s)");
    }
    if (repeats > 0) {
      bundle.warnings.push_back("graph " + std::to_string(gi + 1) + ": collapsed " + std::to_string(repeats) +
                                " repeated edge line(s)");
    }
    bundle.graphs.push_back(std::move(g));
  }

  if (const auto labels_path = locate(dir, name, "graph_labels"); !labels_path.empty()) {
    const auto lines = read_lines(labels_path);
    if (lines.size() != num_graphs) {
      throw FormatError(labels_path.filename().string() + " has " + std::to_string(lines.size()) + " labels for " +
                        std::to_string(num_graphs) + " graphs");
    }
    std::vector<int> labels;
    labels.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto tok = trim(lines[i]);
      int value = 0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(i + 1, labels_path.filename().string() + ": '" + std::string(tok) + "' is not an integer label");
      }
      labels.push_back(value);
    }
    bundle.labels = std::move(labels);
  }

  for (const char* suffix : {"node_labels", "node_attributes", "edge_labels", "edge_attributes", "graph_attributes"}) {
    if (const auto path = locate(dir, name, suffix); !path.empty()) {
      bundle.metadata.emplace(suffix, read_lines(path));
    }
  }
  return bundle;
}

DatasetStats dataset_stats(const DatasetBundle& bundle) {
  DatasetStats s;
  s.num_graphs = bundle.graphs.size();
  if (bundle.labels) {
    s.num_classes = std::set<int>(bundle.labels->begin(), bundle.labels->end()).size();
  }
  if (s.num_graphs == 0) {
    return s;
  }
  double nodes = 0.0;
  double edges = 0.0;
  for (const auto& g : bundle.graphs) {
    nodes += static_cast<double>(g.num_vertices());
    edges += static_cast<double>(g.num_edges());
  }
  s.avg_nodes = nodes / static_cast<double>(s.num_graphs);
  s.avg_edges = edges / static_cast<double>(s.num_graphs);
  return s;
}

// ---------------------------------------------------------------------------
// tree documents

TraceSummary summarize(const MinimizeTrace& trace) {
  return {trace.count(StepKind::combine), trace.count(StepKind::drop), trace.count(StepKind::pad), trace.initial_entropy};
}

std::string serialize_tree(const CodingTree& t, const EntropyReport& report, const MinimizeTrace* trace) {
  if (const auto problems = validate(t, t.graph()); !problems.empty()) {
    throw ConsistencyError("refusing to serialize an invalid tree: " + problems.front().rule + " at node " +
                           std::to_string(problems.front().node) + ": " + problems.front().message);
  }
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    nodes.push_back({
        {"id", n.id},
        {"parent", n.parent == kNoNode ? json(nullptr) : json(n.parent)},
        {"children", n.children},
        {"leaf_vertex", n.leaf_vertex == kNoVertex ? json(nullptr) : json(n.leaf_vertex)},
        {"volume", n.volume},
        {"cut", n.cut},
        {"level", n.level},
    });
  }
  json doc{
      {"format_version", std::string(kTreeFormatVersion)},
      {"graph_fingerprint", fingerprint_hex(t.graph().fingerprint())},
      {"height", t.height()},
      {"entropy_bits", report.total},
      {"nodes", nodes},
  };
  if (trace != nullptr) {
    const auto s = summarize(*trace);
    doc["trace_summary"] = {
        {"combines", s.combines}, {"drops", s.drops}, {"pads", s.pads}, {"initial_entropy", s.initial_entropy}};
  }
  return canonical_json_pretty(doc);
}

namespace {

template <class T>
T field(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw FormatError(std::string("tree document is missing '") + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("tree document field '") + key + "' has the wrong type: " + e.what());
  }
}

template <class T>
T nullable(const json& obj, const char* key, T none) {
  if (!obj.contains(key)) {
    throw FormatError(std::string("tree node is missing '") + key + "'");
  }
  return obj.at(key).is_null() ? none : field<T>(obj, key);
}

} // namespace

TreeDocument parse_tree_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports a byte offset; convert it to a line number.
    const auto offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n')) + 1;
    throw ParseError(line, std::string("malformed tree document: ") + e.what());
  }
  if (!doc.is_object()) {
    throw FormatError("tree document must be a JSON object");
  }
  TreeDocument out;
  out.format_version = field<std::string>(doc, "format_version");
  if (out.format_version != kTreeFormatVersion) {
    throw FormatError("unsupported tree document version '" + out.format_version + "'");
  }
  out.graph_fingerprint = field<std::string>(doc, "graph_fingerprint");
  out.height = field<int>(doc, "height");
  out.entropy_bits = field<double>(doc, "entropy_bits");
  if (!doc.contains("nodes")) {
    throw FormatError("tree document is missing 'nodes'");
  }
  const json& nodes = doc.at("nodes");
  if (!nodes.is_array()) {
    throw FormatError("'nodes' must be an array");
  }
  for (const auto& n : nodes) {
    CodingTreeNode node;
    node.id = field<NodeId>(n, "id");
    node.parent = nullable<NodeId>(n, "parent", kNoNode);
    node.children = field<std::vector<NodeId>>(n, "children");
    node.leaf_vertex = nullable<VertexId>(n, "leaf_vertex", kNoVertex);
    node.volume = field<Count>(n, "volume");
    node.cut = field<Count>(n, "cut");
    node.level = field<int>(n, "level");
    out.nodes.push_back(std::move(node));
  }
  if (doc.contains("trace_summary")) {
    const json& s = doc.at("trace_summary");
    out.trace_summary = TraceSummary{field<std::size_t>(s, "combines"), field<std::size_t>(s, "drops"),
                                     field<std::size_t>(s, "pads"), field<double>(s, "initial_entropy")};
  }
  return out;
}

CodingTree tree_from_document(const TreeDocument& doc, const Graph& g) {
  if (doc.graph_fingerprint != fingerprint_hex(g.fingerprint())) {
    throw ConsistencyError("tree document belongs to graph " + doc.graph_fingerprint + ", not " +
                           fingerprint_hex(g.fingerprint()));
  }
  return CodingTree::from_nodes(g, doc.nodes);
}

// ---------------------------------------------------------------------------
// numeric matrices

Matrix parse_matrix_csv(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    line = trim(line);
    if (line.empty() || line.front() == '#') {
      return;
    }
    std::vector<double> row;
    for (const auto tok : tokens(line)) {
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
      if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError(line_no, "'" + std::string(tok) + "' is not a number");
      }
      row.push_back(value);
    }
    rows.push_back(std::move(row));
  });
  if (rows.empty()) {
    throw InputError("matrix file has no rows");
  }
  return Matrix::from_rows(rows);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

} // namespace setree
