#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "ridgeguard/dataset.hpp"
#include "ridgeguard/ridge_features.hpp"
#include "ridgeguard/types.hpp"

namespace ridgeguard {

enum class OrientationField { constant, smooth_random };

/// Per-impression acquisition noise. Ranges are symmetric: a rotation range
/// of 10 samples uniformly from [-10, 10] degrees.
struct NoiseSpec {
  double rotation_deg_range = 0.0;
  double translation_px_range = 0.0;
  double theta_jitter_deg = 0.0;
  /// Maximum displacement of a reported minutia from its true position.
  double position_jitter_px = 0.0;
  double drop_rate = 0.0;
  /// Expected spurious minutiae per true minutia.
  double spurious_rate = 0.0;
};

struct SynthSpec {
  std::uint64_t seed = 1;
  int width = 320;
  int height = 320;
  double ridge_period = 9.0;
  OrientationField orientation_field = OrientationField::smooth_random;
  int n_minutiae = 36;
  int n_impressions = 2;
  double bifurcation_fraction = 0.5;
  NoiseSpec noise;

  void validate() const;
};

enum class MinutiaKind { ending, bifurcation };

/// Rotation about (cx, cy) followed by a translation.
struct RigidTransform {
  double rotation_deg = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  PointF apply(PointF p) const;
  PointF inverse(PointF p) const;
};

struct SynthSubject {
  Impression ground_truth;
  /// Kind and exact (unrounded) position of each ground-truth minutia.
  std::vector<MinutiaKind> kinds;
  std::vector<PointF> planted;
  std::vector<Impression> impressions;
  std::vector<RigidTransform> transforms;
};

/// Deterministic in `spec`: the same spec always gives the same bytes.
/// Throws ValidationError when n_minutiae cannot be placed in the finger area.
SynthSubject generate_subject(const SynthSpec& spec);

/// One impression of the finger described by `spec` under an explicit rigid
/// motion about the finger centre, ignoring the spec's rotation and
/// translation ranges. The other noise terms use draw stream `stream`.
Impression render_impression(const SynthSpec& spec, double rotation_deg, double tx, double ty,
                             std::uint64_t stream = 0);

/// Subjects `s001`, `s002`, ... with impressions `1`, `2`, ...; subject i uses
/// seed derive_seed(base_seed, i).
Dataset generate_population(std::uint64_t base_seed, int n_subjects, int impressions_per_subject,
                            const SynthSpec& spec_template);

/// Named specs: "clean" (no noise), "default" (5 deg theta jitter, 2 px
/// position jitter, 10% drop) and "rigid" (default plus up to 15 deg
/// rotation and 10 px translation).
SynthSpec synth_preset(std::string_view name);

}  // namespace ridgeguard
