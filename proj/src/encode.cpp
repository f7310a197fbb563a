#include "ridgeguard/encode.hpp"

#include <cmath>

#include "ridgeguard/error.hpp"

namespace ridgeguard {
namespace {

// floor(sqrt(v)) without relying on the rounding of std::sqrt near 2^53.
std::uint64_t isqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(v)));
  while (static_cast<unsigned __int128>(r) * r > v) --r;
  while (static_cast<unsigned __int128>(r + 1) * (r + 1) <= v) ++r;
  return r;
}

}  // namespace

std::uint64_t cantor_pair(std::int64_t k1, std::int64_t k2) {
  if (k1 < 0 || k2 < 0) throw ValidationError("cantor_pair needs non-negative arguments");
  using u128 = unsigned __int128;
  const u128 sum = static_cast<u128>(k1) + static_cast<u128>(k2);
  const u128 value = sum * (sum + 1) / 2 + static_cast<u128>(k2);
  if (value > UINT64_MAX) throw ValidationError("cantor_pair result exceeds 64 bits");
  return static_cast<std::uint64_t>(value);
}

std::pair<std::int64_t, std::int64_t> cantor_unpair(std::uint64_t cp) {
  using u128 = unsigned __int128;
  // w = floor((sqrt(8 cp + 1) - 1) / 2), computed in 128 bits.
  const u128 disc = static_cast<u128>(cp) * 8 + 1;
  std::uint64_t root;
  if (disc <= UINT64_MAX) {
    root = isqrt(static_cast<std::uint64_t>(disc));
  } else {
    // 8 cp + 1 overflows 64 bits: the root still fits, refine from a float guess.
    auto r = static_cast<u128>(std::sqrt(static_cast<long double>(disc)));
    while (r * r > disc) --r;
    while ((r + 1) * (r + 1) <= disc) ++r;
    root = static_cast<std::uint64_t>(r);
  }
  const u128 w = (static_cast<u128>(root) - 1) / 2;
  const u128 tri = (w * w + w) / 2;
  const u128 k2 = static_cast<u128>(cp) - tri;
  const u128 k1 = w - k2;
  return {static_cast<std::int64_t>(k1), static_cast<std::int64_t>(k2)};
}

PairedMatrix pair_features(const RidgeFeatureMatrix& features) {
  if (features.rc.rows() != features.ro.rows() || features.rc.cols() != features.ro.cols()) {
    throw DimensionError("rc and ro grids differ in shape");
  }
  PairedMatrix pm{CantorGrid(features.rc.rows(), features.rc.cols()), features.valid};
  for (Eigen::Index i = 0; i < pm.cp.rows(); ++i)
    for (Eigen::Index j = 0; j < pm.cp.cols(); ++j)
      pm.cp(i, j) = cantor_pair(features.rc(i, j), features.ro(i, j));
  return pm;
}

LogTemplate log_transform(const PairedMatrix& pm, double b) {
  if (!(b > 1.0) || !std::isfinite(b)) throw ValidationError("log base must be > 1");
  LogTemplate out{Matrix::Zero(pm.cp.rows(), pm.cp.cols()), b, pm.valid};
  const double log_b = std::log(b);
  for (Eigen::Index i = 0; i < pm.cp.rows(); ++i)
    for (Eigen::Index j = 0; j < pm.cp.cols(); ++j)
      if (pm.cp(i, j) > 0) out.lt(i, j) = std::log(static_cast<double>(pm.cp(i, j))) / log_b;
  return out;
}

}  // namespace ridgeguard
