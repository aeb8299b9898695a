#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "setree/graph.hpp"

namespace setree {

enum class GraphFamily { uniform_random, preferential_attachment, planted_partition };

std::string_view to_string(GraphFamily family);
GraphFamily parse_graph_family(std::string_view text);

struct PlantedPartition {
  int blocks = 2;
  double p_in = 0.5;
  double p_out = 0.05;
};

struct GeneratorSpec {
  GraphFamily family = GraphFamily::uniform_random;
  VertexId n = 0;
  /// uniform-random: probability of each edge.
  double edge_probability = 0.0;
  /// preferential-attachment: edges added with each new vertex.
  int attachment_degree = 1;
  PlantedPartition planted;
  std::uint64_t seed = 0;
};

struct GeneratedGraph {
  Graph graph;
  /// Block of each vertex for planted-partition graphs, empty otherwise.
  std::vector<int> planted_block;
};

/// Deterministic under (family, parameters, seed). Throws ConfigError for
/// out-of-range parameters.
///
/// uniform-random samples G(n, p) with geometric skips, so the cost is
/// linear in the number of edges. preferential-attachment grows from a
/// clique on attachment_degree + 1 vertices, each new vertex linking to
/// that many distinct existing vertices chosen proportionally to degree.
/// planted-partition splits the vertices into contiguous, near-equal blocks.
GeneratedGraph generate(const GeneratorSpec& spec);

struct ScalingRow {
  VertexId n = 0;
  Count m = 0;
  double stage1_ms = 0.0;
  double stage2_ms = 0.0;
  double total_ms = 0.0;
  int h_max = 0;
};

struct ScalingReport {
  std::vector<ScalingRow> rows;
  /// Least-squares slope of log(total_ms) against log(m); empty with fewer
  /// than two distinct sizes.
  std::optional<double> fit_exponent;
};

struct ScalingConfig {
  GraphFamily family = GraphFamily::uniform_random;
  /// Target edge counts, ascending.
  std::vector<Count> sizes;
  int height_k = 2;
  int repeats = 3;
  /// Mean degree used to derive n from each target edge count.
  double mean_degree = 10.0;
  std::uint64_t seed = 1;
};

/// Times minimize() once per repeat on one generated graph per size, after
/// one untimed warm-up run, and keeps the median run. Throws ConfigError for unsorted sizes or the
/// planted-partition family.
ScalingReport scaling_run(const ScalingConfig& cfg);

std::optional<double> loglog_slope(std::span<const ScalingRow> rows);

std::string scaling_report_json(const ScalingReport& report);

/// Fraction of vertices whose predicted group maps onto their true group
/// under the best one-to-one assignment of true groups to predicted groups.
double best_match_agreement(std::span<const int> predicted, std::span<const int> truth);

struct RecoveryReport {
  std::vector<double> per_seed;
  double mean_agreement = 0.0;
};

/// Minimizes planted-partition graphs at height 2 and scores the level-1
/// modules against the planted blocks. Throws ConfigError when p_in < p_out.
RecoveryReport recovery_run(const PlantedPartition& planted, VertexId n, std::span<const std::uint64_t> seeds);

} // namespace setree
