#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ridgeguard/neighborhood.hpp"
#include "ridgeguard/types.hpp"

namespace ridgeguard {

struct Pixel {
  int x = 0;
  int y = 0;

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

struct PointF {
  double x = 0.0;
  double y = 0.0;
};

/// A ridge intersected by a query segment: where, and the ridge's undirected
/// tangent direction in [0, 180).
struct RidgeCrossing {
  PointF point;
  double tangent_deg = 0.0;
};

struct CrossingOptions {
  /// Runs touching this radius around either endpoint belong to the
  /// endpoints' own ridges and are not counted.
  double exclusion_radius = 3.0;
  /// Radius of the pixel window used for the tangent fit.
  int window_radius = 3;
  /// Runs separated by at most this many background pixels are one ridge.
  int merge_gap = 1;
};

/// Pixels of the 8-connected digital segment from `a` to `b`, inclusive.
/// One pixel per step on the major axis, nearest to the exact line; ties
/// round toward `a`.
std::vector<Pixel> bresenham(Pixel a, Pixel b);

/// Ridges crossed by the straight segment p1-p2 on the skeleton.
///
/// The rasterized segment hits a ridge on a ridge pixel, or on a diagonal
/// step whose two corner pixels are both ridge. Hits form runs (gaps of up to
/// `merge_gap` background pixels are bridged); runs whose ridge pixels connect
/// inside the one-pixel band around the path are the same ridge. A ridge with
/// any band pixel within `exclusion_radius` of an endpoint is that minutia's
/// own ridge and is skipped. One crossing per remaining ridge, in path order.
/// Throws ValidationError if p1 == p2 or either endpoint is outside the image.
std::vector<RidgeCrossing> ridge_crossings(const SkeletonImage& skel, Pixel p1, Pixel p2,
                                           const CrossingOptions& options = {});

/// Rounded axial mean of (tangent - line direction) over all crossings, in
/// whole degrees [0, 180). Empty input means there are no ridges between the
/// pair; the caller decides what to store.
std::optional<int> mean_ridge_orientation(std::span<const RidgeCrossing> crossings,
                                          double theta_line_deg);

/// Ridge count and mean ridge orientation per (reference, sector) cell.
/// Cells without a neighbour, or whose pair crosses no ridge, hold (0, 0);
/// `valid` is true exactly where the neighbour table has an entry.
struct RidgeFeatureMatrix {
  IntGrid rc;
  IntGrid ro;
  Mask valid;
};

RidgeFeatureMatrix extract_features(const MinutiaeSet& ms, const SkeletonImage& skel,
                                    const NeighborTable& nt,
                                    const CrossingOptions& options = {});

}  // namespace ridgeguard
