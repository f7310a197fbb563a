#include "ridgeguard/neighborhood.hpp"

#include <cmath>
#include <numbers>

#include "ridgeguard/error.hpp"

namespace ridgeguard {

int sector_of(const Minutia& reference, const Minutia& other, int s) {
  if (s < 2) throw ValidationError("sector count must be >= 2");
  const int dx = other.x - reference.x;
  const int dy = other.y - reference.y;
  if (dx == 0 && dy == 0) throw ValidationError("direction undefined for coincident minutiae");

  const double direction = std::atan2(static_cast<double>(dy), static_cast<double>(dx)) *
                           180.0 / std::numbers::pi;
  const double relative = normalize_degrees(direction - reference.theta);
  const int sector = 1 + static_cast<int>(std::floor(relative / (360.0 / s)));
  return sector > s ? s : sector;
}

NeighborTable build_neighbor_table(const MinutiaeSet& ms, int s) {
  if (s < 2) throw ValidationError("sector count must be >= 2");
  NeighborTable table;
  table.n = ms.size();
  table.s = s;
  const std::size_t cells = table.n * static_cast<std::size_t>(s);
  table.entries.assign(cells, std::nullopt);
  table.distances.assign(cells, 0.0);

  for (std::size_t i = 0; i < ms.size(); ++i) {
    const auto& ref = ms[i];
    for (std::size_t k = 0; k < ms.size(); ++k) {
      if (k == i) continue;
      const auto& other = ms[k];
      if (other.x == ref.x && other.y == ref.y) continue;
      const double d = std::hypot(static_cast<double>(other.x - ref.x),
                                  static_cast<double>(other.y - ref.y));
      const std::size_t cell = i * static_cast<std::size_t>(s) +
                               static_cast<std::size_t>(sector_of(ref, other, s) - 1);
      // Strict comparison keeps the lowest index on ties (k ascends).
      if (!table.entries[cell] || d < table.distances[cell]) {
        table.entries[cell] = k;
        table.distances[cell] = d;
      }
    }
  }
  return table;
}

}  // namespace ridgeguard
