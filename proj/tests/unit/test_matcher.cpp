#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ridgeguard/error.hpp"
#include "ridgeguard/matcher.hpp"

using namespace ridgeguard;

namespace {

Matrix mat(int r, int c, std::initializer_list<double> v) {
  Matrix m(r, c);
  auto it = v.begin();
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = *it++;
  return m;
}

// Literal enumeration: a cell is marked when it holds the first maximum of
// its row and the first maximum of its column.
Mask oracle_mask(const Matrix& sim) {
  Mask m = Mask::Constant(sim.rows(), sim.cols(), false);
  for (Eigen::Index i = 0; i < sim.rows(); ++i)
    for (Eigen::Index j = 0; j < sim.cols(); ++j) {
      bool row_first = true, col_first = true;
      for (Eigen::Index k = 0; k < sim.cols(); ++k)
        if (sim(i, k) > sim(i, j) || (k < j && sim(i, k) == sim(i, j))) row_first = false;
      for (Eigen::Index k = 0; k < sim.rows(); ++k)
        if (sim(k, j) > sim(i, j) || (k < i && sim(k, j) == sim(i, j))) col_first = false;
      m(i, j) = row_first && col_first;
    }
  return m;
}

double oracle_score(const Matrix& sim) {
  const Mask m = oracle_mask(sim);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < sim.rows(); ++i)
    for (Eigen::Index j = 0; j < sim.cols(); ++j)
      if (m(i, j)) sum += sim(i, j);
  return sum / static_cast<double>(std::min(sim.rows(), sim.cols()));
}

}  // namespace

TEST_CASE("local similarity examples") {
  const Matrix ct = mat(3, 2, {1, 2, 3, -1, 0.5, 7});
  const auto sim = local_similarity(ct, ct);
  for (int i = 0; i < 3; ++i) CHECK(sim(i, i) == doctest::Approx(1.0));
  CHECK(local_similarity(mat(1, 2, {1, 0}), mat(1, 2, {0, 1}))(0, 0) == 0.0);
  CHECK(local_similarity(mat(1, 2, {1, 1}), mat(1, 2, {2, 2}))(0, 0) == doctest::Approx(0.8));
  CHECK(local_similarity(mat(1, 2, {0, 0}), mat(1, 2, {2, 2}))(0, 0) == 0.0);
  CHECK(local_similarity(mat(1, 2, {0, 0}), mat(1, 2, {0, 0}))(0, 0) == 0.0);
  CHECK_THROWS_AS(local_similarity(Matrix::Ones(2, 3), Matrix::Ones(2, 4)), DimensionError);
}

TEST_CASE("mask examples") {
  const Mask a = coincident_maxima_mask(mat(2, 2, {0.9, 0.2, 0.3, 0.8}));
  CHECK(a(0, 0));
  CHECK_FALSE(a(0, 1));
  CHECK_FALSE(a(1, 0));
  CHECK(a(1, 1));
  const Mask b = coincident_maxima_mask(mat(2, 2, {0.9, 0.95, 0.3, 0.8}));
  CHECK(b.count() == 1);
  CHECK(b(0, 1));
  const Mask c = coincident_maxima_mask(mat(1, 1, {0.1}));
  CHECK(c(0, 0));
}

TEST_CASE("ties keep one cell per row and column") {
  const Mask m = coincident_maxima_mask(Matrix::Constant(3, 4, 0.5));
  CHECK(m.count() == 1);
  CHECK(m(0, 0));
  const Mask z = coincident_maxima_mask(Matrix::Zero(2, 2));
  CHECK(z.count() == 1);
  // identical rows tie, so only the first pair counts
  CHECK(match_score(Matrix::Ones(2, 4), Matrix::Ones(2, 4)) == doctest::Approx(0.5));
}

TEST_CASE("global score examples") {
  const Matrix ct = mat(2, 3, {1, 2, 3, -4, 1, 0.5});
  CHECK(match_score(ct, ct) == doctest::Approx(1.0));
  const auto r = global_score(mat(2, 2, {0.9, 0.2, 0.3, 0.8}));
  CHECK(r.score == doctest::Approx(0.85));
  CHECK(r.filtered(0, 1) == 0.0);
  CHECK(r.filtered(0, 0) == 0.9);
  CHECK(global_score(Matrix::Zero(3, 2)).score == 0.0);
}

TEST_CASE("1000 random matrices match the enumeration oracle") {
  std::mt19937_64 rng(40);
  std::uniform_int_distribution<int> dim(1, 8);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = dim(rng), m = dim(rng);
    Matrix sim = rgtest::random_matrix(rng, n, m, -1, 1);
    if (trial % 4 == 0)  // coarse values force ties
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) sim(i, j) = coarse(rng) / 4.0;
    const auto r = global_score(sim);
    CHECK((r.mask == oracle_mask(sim)).all());
    CHECK(std::abs(r.score - oracle_score(sim)) <= 1e-9);
  }
}

TEST_CASE("symmetry, scale invariance and bounds") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> dim(1, 30);
  for (int trial = 0; trial < 300; ++trial) {
    const Matrix a = rgtest::random_matrix(rng, dim(rng), 4, -10, 10);
    const Matrix b = rgtest::random_matrix(rng, dim(rng), 4, -10, 10);
    const double s = match_score(a, b);
    CHECK(std::abs(s - match_score(b, a)) <= 1e-12);
    CHECK(s >= -1.0);
    CHECK(s <= 1.0);
    const double k = (trial % 2 ? -1.0 : 1.0) * std::uniform_real_distribution<double>(0.01, 100)(rng);
    const auto r0 = global_score(local_similarity(a, b));
    const auto r1 = global_score(local_similarity(k * a, k * b));
    CHECK((r0.mask == r1.mask).all());
    CHECK(std::abs(r0.score - r1.score) <= 1e-9);
    CHECK((local_similarity(a, b) - local_similarity(k * a, k * b)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(match_score(a, a) == doctest::Approx(1.0));
    const Matrix pa = a.cwiseAbs(), pb = b.cwiseAbs();
    CHECK(match_score(pa, pb) >= 0.0);
  }
}

TEST_CASE("protected template overload checks parameters") {
  ProtectedTemplate a{Matrix(2, 4), "k1", Params{8, 1.2, 4}};
  a.ct << 1, 2, 3, 4, -1, 0, 2, 5;
  ProtectedTemplate b{Matrix::Ones(3, 3), "k1", Params{8, 1.2, 3}};
  CHECK_THROWS_AS(match_score(a, b), DimensionError);
  CHECK(match_score(a, a) == doctest::Approx(1.0));
}
