#include "ridgeguard/pipeline.hpp"

#include "ridgeguard/neighborhood.hpp"

namespace ridgeguard {

LogTemplate compute_log_template(const MinutiaeSet& ms, const SkeletonImage& skel, int s,
                                 double b, const CrossingOptions& options) {
  const auto table = build_neighbor_table(ms, s);
  const auto features = extract_features(ms, skel, table, options);
  return log_transform(pair_features(features), b);
}

ProtectedTemplate enroll(const MinutiaeSet& ms, const SkeletonImage& skel,
                         const ProjectionKey& key, const CrossingOptions& options) {
  const auto lt = compute_log_template(ms, skel, key.s, key.b, options);
  return project(lt, generate_rp(key));
}

}  // namespace ridgeguard
