#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "setree/coding_tree.hpp"

namespace setree {

/// Dense row-major matrix; one embedding per row.
class Matrix {
public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  /// Throws InputError on ragged rows.
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class DenominatorMode {
  /// Sum over every j, the positive pair included.
  standard,
  /// Sum over j != i only.
  literal_eq3,
};

std::string_view to_string(DenominatorMode mode);
/// Accepts "standard" and "literal-eq3"; throws ConfigError otherwise.
DenominatorMode parse_denominator_mode(std::string_view text);

struct EmbeddingBatch {
  Matrix view1;
  Matrix view2;
  double temperature = 1.0;
  DenominatorMode denominator_mode = DenominatorMode::standard;
};

struct LossResult {
  std::vector<double> per_sample;
  double mean = 0.0;
};

/// a.b / (|a| |b|). Throws DomainError for a zero vector, InputError on a length mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// NT-Xent loss of each row of view1 against the rows of view2:
///   L_i = -log( exp(s_ii / tau) / sum_j exp(s_ij / tau) )
/// with s the cosine similarity. The log-sum-exp is shifted by its maximum.
/// Throws InputError on shape mismatch or N < 2, DomainError for tau <= 0.
LossResult ntxent_loss(const EmbeddingBatch& batch);

/// Same quantity evaluated without the max shift; reference for tests.
LossResult ntxent_loss_unshifted(const EmbeddingBatch& batch);

/// Maps the summed child vectors of a node to its representation. `layer`
/// counts up from 1 at the parents of the deepest leaves.
using LevelTransform = std::function<std::vector<double>(int layer, std::span<const double> summed)>;

LevelTransform identity_transform();

/// Fixed dim x dim Gaussian projection per layer followed by tanh, seeded.
LevelTransform random_projection_transform(std::size_t dim, int layers, std::uint64_t seed);

struct TreeFeatures {
  /// per_level[d] holds a vector for every node at depth d (root is depth 0).
  std::vector<std::map<NodeId, std::vector<double>>> per_level;
  std::map<NodeId, std::vector<double>> leaf_input;

  const std::vector<double>& root_vector() const { return per_level.front().begin()->second; }
};

/// Bottom-up aggregation over the coding tree: a leaf keeps its input
/// vector; an internal node at depth d gets transform(height - d, sum of
/// its children's vectors). `leaf_input` is keyed by graph vertex.
/// Throws InputError when a leaf has no feature or dimensions disagree.
TreeFeatures tree_aggregate(const CodingTree& t, const std::map<VertexId, std::vector<double>>& leaf_input,
                            const LevelTransform& transform);

} // namespace setree
