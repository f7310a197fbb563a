#pragma once

#include "ridgeguard/types.hpp"

namespace ridgeguard {

/// n x m grid of Dice similarities between enrolled rows and query rows.
using SimilarityMatrix = Matrix;

/// sim(i, j) = 2 <ct_i, qt_j> / (|ct_i|^2 + |qt_j|^2); 0 when either row is
/// all zero.
SimilarityMatrix local_similarity(const Matrix& ct, const Matrix& qt);
SimilarityMatrix local_similarity(const ProtectedTemplate& ct, const ProtectedTemplate& qt);

/// Cells holding both their row's and their column's maximum. Ties go to the
/// lowest index, so every row and every column has at most one marked cell.
Mask coincident_maxima_mask(const SimilarityMatrix& sim);

struct MatchResult {
  double score = 0.0;
  Matrix filtered;
  Mask mask;
};

/// Sum of the coincident-maxima similarities over min(n, m).
MatchResult global_score(const SimilarityMatrix& sim);

/// Convenience: global_score(local_similarity(ct, qt)).score.
double match_score(const ProtectedTemplate& ct, const ProtectedTemplate& qt);
double match_score(const Matrix& ct, const Matrix& qt);

}  // namespace ridgeguard
