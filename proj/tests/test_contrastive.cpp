#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "setree/contrastive.hpp"
#include "setree/error.hpp"
#include "setree/io.hpp"
#include "support/reference.hpp"

using namespace setree;

namespace {

Matrix fixture(const char* name) { return parse_matrix_csv(read_text_file(std::string(SETREE_FIXTURES) + "/loss/" + name)); }

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> d;
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = d(rng);
    }
  }
  return m;
}

std::vector<double> v(std::initializer_list<double> x) { return x; }

} // namespace

TEST_CASE("cosine similarity") {
  const auto a = v({3, 4});
  const auto b = v({-3, -4});
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(a, b) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_similarity(v({1, 0}), v({0, 1})) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(v({0, 0}), a), DomainError);
  CHECK_THROWS_AS(cosine_similarity(v({1, 0, 0}), a), InputError);
}

TEST_CASE("orthogonal two-sample fixture") {
  EmbeddingBatch b{fixture("ortho_view1.csv"), fixture("ortho_view2.csv"), 1.0, DenominatorMode::literal_eq3};
  const auto lit = ntxent_loss(b);
  REQUIRE(lit.per_sample.size() == 2);
  CHECK(std::abs(lit.per_sample[0] - -1.0) < 1e-12);
  b.denominator_mode = DenominatorMode::standard;
  const auto std_loss = ntxent_loss(b);
  CHECK(std::abs(std_loss.per_sample[0] - -std::log(std::exp(1.0) / (std::exp(1.0) + 1.0))) < 1e-12);
  CHECK(std::abs(std_loss.per_sample[0] - 0.313262) < 1e-6);
}

TEST_CASE("identical embeddings give log 2") {
  const EmbeddingBatch b{fixture("same_view1.csv"), fixture("same_view2.csv"), 1.0, DenominatorMode::standard};
  const auto r = ntxent_loss(b);
  for (const double l : r.per_sample) {
    CHECK(std::abs(l - std::log(2.0)) < 1e-12);
  }
  CHECK(std::abs(r.mean - std::log(2.0)) < 1e-12);
}

TEST_CASE("loss is invariant under a common rescaling") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    Matrix a = random_matrix(rng, n, 5);
    Matrix b = random_matrix(rng, n, 5);
    const double tau = 0.1 + static_cast<double>(rng() % 100) / 50.0;
    for (const auto mode : {DenominatorMode::standard, DenominatorMode::literal_eq3}) {
      const auto before = ntxent_loss({a, b, tau, mode});
      Matrix as = a;
      Matrix bs = b;
      const double s = 0.001 + static_cast<double>(rng() % 1000);
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
          as(r, c) *= s;
          bs(r, c) *= s;
        }
      }
      const auto after = ntxent_loss({as, bs, tau, mode});
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(before.per_sample[i] - after.per_sample[i]) < 1e-9);
      }
    }
  }
}

TEST_CASE("shifted and unshifted evaluations agree") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng() % 16;
    const Matrix a = random_matrix(rng, n, 8);
    const Matrix b = random_matrix(rng, n, 8);
    const double tau = 1.0 / 30.0 + static_cast<double>(rng() % 100) / 100.0; // |sim/tau| <= 30
    for (const auto mode : {DenominatorMode::standard, DenominatorMode::literal_eq3}) {
      const auto s = ntxent_loss({a, b, tau, mode});
      const auto u = ntxent_loss_unshifted({a, b, tau, mode});
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(std::abs(s.per_sample[i] - u.per_sample[i]) < 1e-6);
      }
    }
  }
}

TEST_CASE("loss falls as the positive pair aligns") {
  Matrix a = Matrix::from_rows({{1, 0}, {0, 1}, {-1, 1}});
  Matrix b = Matrix::from_rows({{0, 1}, {1, 1}, {1, -1}});
  double prev = ntxent_loss({a, b, 0.5, DenominatorMode::standard}).per_sample[0];
  for (int step = 1; step <= 10; ++step) {
    const double angle = (1.0 - step / 10.0) * std::acos(-1.0) / 2; // rotate b_0 towards a_0
    b(0, 0) = std::cos(angle);
    b(0, 1) = std::sin(angle);
    const double cur = ntxent_loss({a, b, 0.5, DenominatorMode::standard}).per_sample[0];
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("loss input errors") {
  const Matrix one = Matrix::from_rows({{1, 0}});
  const Matrix two = Matrix::from_rows({{1, 0}, {0, 1}});
  const Matrix wide = Matrix::from_rows({{1, 0, 0}, {0, 1, 0}});
  CHECK_THROWS_AS(ntxent_loss({one, one, 1.0, DenominatorMode::standard}), InputError);
  CHECK_THROWS_AS(ntxent_loss({two, wide, 1.0, DenominatorMode::standard}), InputError);
  CHECK_THROWS_AS(ntxent_loss({two, two, 0.0, DenominatorMode::standard}), DomainError);
  CHECK_THROWS_AS(ntxent_loss({two, two, -1.0, DenominatorMode::standard}), DomainError);
  CHECK_THROWS_AS(Matrix::from_rows({{1, 0}, {1}}), InputError);
  CHECK_THROWS_AS(parse_denominator_mode("eq3"), ConfigError);
  CHECK(parse_denominator_mode("literal-eq3") == DenominatorMode::literal_eq3);
}

TEST_CASE("aggregating ones counts the vertices") {
  std::mt19937_64 rng(12);
  const Graph g(30, ref::random_edges(rng, 30, 0.2));
  for (int k = 2; k <= 4; ++k) {
    const CodingTree t = rbbt(g, k, 5);
    std::map<VertexId, std::vector<double>> ones;
    for (VertexId x = 0; x < 30; ++x) {
      ones[x] = {1.0};
    }
    const auto f = tree_aggregate(t, ones, identity_transform());
    CHECK(f.root_vector() == std::vector<double>{30.0});
    CHECK(f.per_level.size() == static_cast<std::size_t>(k + 1));
    for (std::size_t d = 0; d < f.per_level.size(); ++d) {
      for (const auto& [id, vec] : f.per_level[d]) {
        CHECK(t.level(id) == static_cast<int>(d));
      }
    }
  }
}

TEST_CASE("degree histogram at the root of the bridge module tree") {
  const Graph g(6, ref::kBridge);
  const auto r = minimize(g, MinimizeConfig{});
  std::map<VertexId, std::vector<double>> onehot;
  for (VertexId x = 0; x < 6; ++x) {
    onehot[x] = g.degree(x) == 2 ? v({1, 0}) : v({0, 1});
  }
  const auto f = tree_aggregate(r.tree, onehot, identity_transform());
  CHECK(f.root_vector() == v({4, 2}));
}

TEST_CASE("child order does not change the aggregate") {
  std::mt19937_64 rng(21);
  const Graph g(12, ref::random_edges(rng, 12, 0.3));
  std::map<VertexId, std::vector<double>> x;
  std::normal_distribution<double> d;
  for (VertexId i = 0; i < 12; ++i) {
    x[i] = {d(rng), d(rng), d(rng)};
  }
  // same tree with children appended in a different order
  CodingTree a = CodingTree::trivial(g);
  CodingTree b = CodingTree::trivial(g);
  const NodeId a1 = a.combine(0, 1).node;
  a.combine(a1, 2);
  const NodeId b1 = b.combine(1, 0).node;
  b.combine(2, b1);
  CHECK(a.children(a.children(a.root()).back()) != b.children(b.children(b.root()).back()));
  const auto transform = random_projection_transform(3, 3, 77);
  const auto fa = tree_aggregate(a, x, transform);
  const auto fb = tree_aggregate(b, x, transform);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(fa.root_vector()[i] == doctest::Approx(fb.root_vector()[i]).epsilon(1e-12));
  }
}

TEST_CASE("identity aggregation conserves the sum of leaf inputs") {
  std::mt19937_64 rng(31);
  const Graph g(20, ref::random_edges(rng, 20, 0.25));
  const auto r = minimize(g, MinimizeConfig{3, true, DropMode::literal, 0});
  std::map<VertexId, std::vector<double>> x;
  std::vector<double> total(4, 0.0);
  std::normal_distribution<double> d;
  for (VertexId i = 0; i < 20; ++i) {
    x[i] = {d(rng), d(rng), d(rng), d(rng)};
    for (std::size_t c = 0; c < 4; ++c) {
      total[c] += x[i][c];
    }
  }
  const auto f = tree_aggregate(r.tree, x, identity_transform());
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(std::abs(f.root_vector()[c] - total[c]) < 1e-12);
  }
}

TEST_CASE("aggregation input errors") {
  const Graph g(3, ref::complete(3));
  const CodingTree t = CodingTree::trivial(g);
  std::map<VertexId, std::vector<double>> x{{0, {1}}, {1, {1}}};
  CHECK_THROWS_AS(tree_aggregate(t, x, identity_transform()), InputError);
  x[2] = {1, 2};
  CHECK_THROWS_AS(tree_aggregate(t, x, identity_transform()), InputError);
}
