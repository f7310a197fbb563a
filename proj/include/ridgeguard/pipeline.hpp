#pragma once

#include "ridgeguard/encode.hpp"
#include "ridgeguard/projection.hpp"
#include "ridgeguard/ridge_features.hpp"
#include "ridgeguard/types.hpp"

namespace ridgeguard {

/// Neighbour table, ridge features, Cantor pairing and log transform for one
/// impression. This is everything before the key is applied.
LogTemplate compute_log_template(const MinutiaeSet& ms, const SkeletonImage& skel, int s,
                                 double b, const CrossingOptions& options = {});

/// Full enrollment under `key`. The intermediate features live only inside
/// this call.
ProtectedTemplate enroll(const MinutiaeSet& ms, const SkeletonImage& skel,
                         const ProjectionKey& key, const CrossingOptions& options = {});

}  // namespace ridgeguard
