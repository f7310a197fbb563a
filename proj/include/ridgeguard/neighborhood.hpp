#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ridgeguard/types.hpp"

namespace ridgeguard {

/// Sector (1..s) that `other` falls in around `reference`. Sectors have equal
/// angular width and are counted anti-clockwise starting at the reference
/// orientation; each sector is half-open, so a point exactly on a boundary
/// belongs to the higher-indexed sector.
///
/// Throws ValidationError when the two positions coincide or s < 2.
int sector_of(const Minutia& reference, const Minutia& other, int s);

/// Per reference minutia and sector, the index of the closest minutia in that
/// sector (Euclidean, ties to the lowest index). Sector j is column j - 1.
struct NeighborTable {
  std::size_t n = 0;
  int s = 0;
  std::vector<std::optional<std::size_t>> entries;
  std::vector<double> distances;

  const std::optional<std::size_t>& neighbor(std::size_t i, int col) const {
    return entries[i * static_cast<std::size_t>(s) + static_cast<std::size_t>(col)];
  }
  /// Meaningful only where `neighbor(i, col)` is present.
  double distance(std::size_t i, int col) const {
    return distances[i * static_cast<std::size_t>(s) + static_cast<std::size_t>(col)];
  }

  friend bool operator==(const NeighborTable&, const NeighborTable&) = default;
};

NeighborTable build_neighbor_table(const MinutiaeSet& ms, int s);

}  // namespace ridgeguard
