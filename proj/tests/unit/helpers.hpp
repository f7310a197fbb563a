#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "ridgeguard/types.hpp"

namespace rgtest {

using ridgeguard::Minutia;
using ridgeguard::MinutiaeSet;
using ridgeguard::SkeletonImage;

// Vertical one-pixel ridges at the given x positions.
inline SkeletonImage vertical_ridges(int w, int h, const std::vector<int>& xs) {
  SkeletonImage img(w, h);
  for (int x : xs)
    for (int y = 0; y < h; ++y) img.set(x, y, true);
  return img;
}

inline MinutiaeSet random_minutiae(std::mt19937_64& rng, int n, int w, int h) {
  std::uniform_int_distribution<int> ux(0, w - 1), uy(0, h - 1);
  std::uniform_real_distribution<double> ut(0.0, 360.0);
  MinutiaeSet ms;
  std::set<std::pair<int, int>> used;
  while (static_cast<int>(ms.size()) < n) {
    const int x = ux(rng), y = uy(rng);
    if (!used.emplace(x, y).second) continue;
    ms.minutiae.push_back({x, y, ut(rng)});
  }
  return ms;
}

inline ridgeguard::Matrix random_matrix(std::mt19937_64& rng, int r, int c, double lo = -1.0,
                                        double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  ridgeguard::Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

}  // namespace rgtest
