#include "ridgeguard/matcher.hpp"

#include <algorithm>
#include <vector>

#include "ridgeguard/error.hpp"

namespace ridgeguard {

SimilarityMatrix local_similarity(const Matrix& ct, const Matrix& qt) {
  if (ct.cols() != qt.cols()) {
    throw DimensionError("templates differ in projected dimension (" +
                         std::to_string(ct.cols()) + " vs " + std::to_string(qt.cols()) + ")");
  }
  const Eigen::VectorXd ct_norm = ct.rowwise().squaredNorm();
  const Eigen::VectorXd qt_norm = qt.rowwise().squaredNorm();
  SimilarityMatrix sim(ct.rows(), qt.rows());
  for (Eigen::Index i = 0; i < ct.rows(); ++i)
    for (Eigen::Index j = 0; j < qt.rows(); ++j) {
      const double denom = ct_norm(i) + qt_norm(j);
      sim(i, j) = (ct_norm(i) == 0.0 || qt_norm(j) == 0.0) ? 0.0 : 2.0 * ct.row(i).dot(qt.row(j)) / denom;
    }
  return sim;
}

SimilarityMatrix local_similarity(const ProtectedTemplate& ct, const ProtectedTemplate& qt) {
  return local_similarity(ct.ct, qt.ct);
}

Mask coincident_maxima_mask(const SimilarityMatrix& sim) {
  const Eigen::Index n = sim.rows();
  const Eigen::Index m = sim.cols();
  Mask mask = Mask::Constant(n, m, false);
  if (n == 0 || m == 0) return mask;

  std::vector<Eigen::Index> row_arg(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> col_arg(static_cast<std::size_t>(m), 0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 1; j < m; ++j)
      if (sim(i, j) > sim(i, row_arg[static_cast<std::size_t>(i)])) row_arg[static_cast<std::size_t>(i)] = j;
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 1; i < n; ++i)
      if (sim(i, j) > sim(col_arg[static_cast<std::size_t>(j)], j)) col_arg[static_cast<std::size_t>(j)] = i;

  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = row_arg[static_cast<std::size_t>(i)];
    if (col_arg[static_cast<std::size_t>(j)] == i) mask(i, j) = true;
  }
  return mask;
}

MatchResult global_score(const SimilarityMatrix& sim) {
  MatchResult result;
  result.mask = coincident_maxima_mask(sim);
  result.filtered = sim.array() * result.mask.cast<double>();
  const Eigen::Index denom = std::min(sim.rows(), sim.cols());
  result.score = denom == 0 ? 0.0 : result.filtered.sum() / static_cast<double>(denom);
  return result;
}

double match_score(const Matrix& ct, const Matrix& qt) {
  return global_score(local_similarity(ct, qt)).score;
}

double match_score(const ProtectedTemplate& ct, const ProtectedTemplate& qt) {
  return match_score(ct.ct, qt.ct);
}

}  // namespace ridgeguard
