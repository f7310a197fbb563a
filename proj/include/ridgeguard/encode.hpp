#pragma once

#include <cstdint>
#include <utility>

#include "ridgeguard/ridge_features.hpp"
#include "ridgeguard/types.hpp"

namespace ridgeguard {

/// Cantor pairing: (k1 + k2)(k1 + k2 + 1) / 2 + k2.
///
/// Exact in 64-bit arithmetic; throws ValidationError on negative input and
/// on results that do not fit in 64 bits.
std::uint64_t cantor_pair(std::int64_t k1, std::int64_t k2);

/// Inverse of cantor_pair, returned as (k1, k2) = (rc, ro).
std::pair<std::int64_t, std::int64_t> cantor_unpair(std::uint64_t cp);

struct PairedMatrix {
  CantorGrid cp;
  Mask valid;
};

PairedMatrix pair_features(const RidgeFeatureMatrix& features);

/// Pointwise log_b of the paired matrix. Zero cells (no neighbour, or no ridge
/// between the pair) stay 0 so they contribute nothing after projection.
struct LogTemplate {
  Matrix lt;
  double b = 1.2;
  Mask valid;
};

LogTemplate log_transform(const PairedMatrix& pm, double b);

}  // namespace ridgeguard
