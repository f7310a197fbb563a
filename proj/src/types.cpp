#include "ridgeguard/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "ridgeguard/error.hpp"

namespace ridgeguard {

double normalize_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  // fmod of a tiny negative value can round up to exactly 360.
  if (r >= 360.0) r = 0.0;
  return r;
}

void MinutiaeSet::validate() const {
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < minutiae.size(); ++i) {
    const auto& m = minutiae[i];
    if (m.x < 0 || m.y < 0) {
      throw ValidationError("minutia " + std::to_string(i) + " has negative coordinates");
    }
    if (!(m.theta >= 0.0 && m.theta < 360.0)) {
      throw ValidationError("minutia " + std::to_string(i) + " theta outside [0, 360)");
    }
    if (!seen.emplace(m.x, m.y).second) {
      throw ValidationError("duplicate minutia position (" + std::to_string(m.x) + ", " +
                            std::to_string(m.y) + ")");
    }
  }
}

SkeletonImage::SkeletonImage(int w, int h) : width(w), height(h) {
  if (w < 0 || h < 0) throw ValidationError("negative image dimensions");
  pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
}

std::size_t SkeletonImage::ridge_pixel_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t p) { return p != 0; }));
}

void Params::validate() const {
  if (s < 2) throw ValidationError("s must be >= 2");
  if (!(b > 1.0) || !std::isfinite(b)) throw ValidationError("b must be > 1");
  if (t < 1) throw ValidationError("t must be >= 1");
  if (t >= s) throw ValidationError("t must be < s");
}

Params Params::with_sectors(int s, double b) {
  return Params{s, b, std::max(1, s / 2)};
}

void ProtectedTemplate::validate() const {
  params.validate();
  if (ct.cols() != params.t) {
    throw DimensionError("template has " + std::to_string(ct.cols()) + " columns, t = " +
                         std::to_string(params.t));
  }
  if (!ct.allFinite()) throw ValidationError("template contains non-finite entries");
}

}  // namespace ridgeguard
