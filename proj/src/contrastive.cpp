#include "setree/contrastive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "setree/error.hpp"
#include "setree/random.hpp"

namespace setree {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) {
    return {};
  }
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != m.cols()) {
      throw InputError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) + " columns, expected " +
                       std::to_string(m.cols()));
    }
    std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
  }
  return m;
}

std::string_view to_string(DenominatorMode mode) {
  return mode == DenominatorMode::standard ? "standard" : "literal-eq3";
}

DenominatorMode parse_denominator_mode(std::string_view text) {
  if (text == "standard") {
    return DenominatorMode::standard;
  }
  if (text == "literal-eq3") {
    return DenominatorMode::literal_eq3;
  }
  throw ConfigError("unknown loss mode '" + std::string(text) + "' (expected standard or literal-eq3)");
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("cosine similarity of vectors with different lengths");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) {
    throw DomainError("cosine similarity is undefined for a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

namespace {

void check_batch(const EmbeddingBatch& b) {
  if (b.view1.rows() != b.view2.rows() || b.view1.cols() != b.view2.cols()) {
    throw InputError("views differ in shape: " + std::to_string(b.view1.rows()) + "x" + std::to_string(b.view1.cols()) +
                     " vs " + std::to_string(b.view2.rows()) + "x" + std::to_string(b.view2.cols()));
  }
  if (b.view1.rows() < 2) {
    throw InputError("NT-Xent needs at least two samples per view");
  }
  if (!(b.temperature > 0.0)) {
    throw DomainError("temperature must be positive");
  }
}

/// Scaled similarity logits of row i against every row of view2.
std::vector<double> logits(const EmbeddingBatch& b, std::size_t i) {
  std::vector<double> out(b.view2.rows());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = cosine_similarity(b.view1.row(i), b.view2.row(j)) / b.temperature;
  }
  return out;
}

LossResult finish(std::vector<double> per_sample) {
  LossResult r;
  for (const double x : per_sample) {
    r.mean += x;
  }
  r.mean /= static_cast<double>(per_sample.size());
  r.per_sample = std::move(per_sample);
  return r;
}

} // namespace

LossResult ntxent_loss(const EmbeddingBatch& batch) {
  check_batch(batch);
  const std::size_t n = batch.view1.rows();
  std::vector<double> per_sample(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = logits(batch, i);
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i || batch.denominator_mode == DenominatorMode::standard) {
        shift = std::max(shift, z[j]);
      }
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i || batch.denominator_mode == DenominatorMode::standard) {
        sum += std::exp(z[j] - shift);
      }
    }
    per_sample[i] = shift + std::log(sum) - z[i];
  }
  return finish(std::move(per_sample));
}

LossResult ntxent_loss_unshifted(const EmbeddingBatch& batch) {
  check_batch(batch);
  const std::size_t n = batch.view1.rows();
  std::vector<double> per_sample(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = logits(batch, i);
    double denom = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i || batch.denominator_mode == DenominatorMode::standard) {
        denom += std::exp(z[j]);
      }
    }
    per_sample[i] = -std::log(std::exp(z[i]) / denom);
  }
  return finish(std::move(per_sample));
}

LevelTransform identity_transform() {
  return [](int, std::span<const double> summed) { return std::vector<double>(summed.begin(), summed.end()); };
}

LevelTransform random_projection_transform(std::size_t dim, int layers, std::uint64_t seed) {
  auto weights = std::make_shared<std::vector<Matrix>>();
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(dim, 1)));
  for (int l = 0; l < layers; ++l) {
    Matrix w(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = 0; c < dim; ++c) {
        w(r, c) = rng.normal() * scale;
      }
    }
    weights->push_back(std::move(w));
  }
  return [weights, dim](int layer, std::span<const double> summed) {
    if (layer < 1 || static_cast<std::size_t>(layer) > weights->size()) {
      throw InputError("random projection has no weights for layer " + std::to_string(layer));
    }
    if (summed.size() != dim) {
      throw InputError("random projection expects dimension " + std::to_string(dim));
    }
    const Matrix& w = (*weights)[static_cast<std::size_t>(layer - 1)];
    std::vector<double> out(dim, 0.0);
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        acc += w(r, c) * summed[c];
      }
      out[r] = std::tanh(acc);
    }
    return out;
  };
}

TreeFeatures tree_aggregate(const CodingTree& t, const std::map<VertexId, std::vector<double>>& leaf_input,
                            const LevelTransform& transform) {
  const int height = t.height();
  TreeFeatures f;
  f.per_level.resize(static_cast<std::size_t>(height) + 1);

  std::vector<std::vector<NodeId>> by_depth(static_cast<std::size_t>(height) + 1);
  for (const NodeId id : t.node_ids()) {
    by_depth[static_cast<std::size_t>(t.level(id))].push_back(id);
  }

  std::size_t dim = 0;
  bool have_dim = false;
  std::vector<std::vector<double>> value(static_cast<std::size_t>(t.capacity()));
  for (int d = height; d >= 0; --d) {
    auto& level = f.per_level[static_cast<std::size_t>(d)];
    for (const NodeId id : by_depth[static_cast<std::size_t>(d)]) {
      std::vector<double> v;
      if (t.is_leaf(id)) {
        const auto it = leaf_input.find(t.leaf_vertex(id));
        if (it == leaf_input.end()) {
          throw InputError("no feature for vertex " + std::to_string(t.leaf_vertex(id)));
        }
        v = it->second;
        f.leaf_input.emplace(id, v);
      } else {
        std::vector<double> summed(dim, 0.0);
        t.for_each_child(id, [&](NodeId c) {
          const auto& x = value[static_cast<std::size_t>(c)];
          if (x.size() != summed.size()) {
            throw InputError("child feature dimensions disagree");
          }
          for (std::size_t i = 0; i < x.size(); ++i) {
            summed[i] += x[i];
          }
        });
        v = transform(height - d, summed);
      }
      if (!have_dim) {
        dim = v.size();
        have_dim = true;
      } else if (t.is_leaf(id) && v.size() != dim) {
        throw InputError("leaf features have different dimensions");
      }
      level.emplace(id, v);
      value[static_cast<std::size_t>(id)] = std::move(v);
    }
  }
  return f;
}

} // namespace setree
