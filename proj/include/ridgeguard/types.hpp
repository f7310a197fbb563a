#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ridgeguard {

using Matrix = Eigen::MatrixXd;
using IntGrid = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using CantorGrid = Eigen::Matrix<std::uint64_t, Eigen::Dynamic, Eigen::Dynamic>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Folds any angle in degrees into [0, 360).
double normalize_degrees(double deg);

/// One minutia: pixel position and orientation in degrees, [0, 360).
struct Minutia {
  int x = 0;
  int y = 0;
  double theta = 0.0;

  friend bool operator==(const Minutia&, const Minutia&) = default;
};

struct MinutiaeSet {
  std::vector<Minutia> minutiae;
  std::string subject_id;
  std::string impression_id;

  std::size_t size() const noexcept { return minutiae.size(); }
  bool empty() const noexcept { return minutiae.empty(); }
  const Minutia& operator[](std::size_t i) const { return minutiae[i]; }

  /// Throws ValidationError on negative coordinates, out-of-range theta or
  /// two minutiae at the same position.
  void validate() const;
};

/// Binary raster of one-pixel-wide ridges, row-major, 1 = ridge.
struct SkeletonImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  SkeletonImage() = default;
  SkeletonImage(int w, int h);

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  /// Out-of-bounds reads are background.
  bool ridge(int x, int y) const noexcept {
    return contains(x, y) && pixels[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool value) {
    pixels[static_cast<std::size_t>(y) * width + x] = value ? 1 : 0;
  }
  std::size_t ridge_pixel_count() const noexcept;

  friend bool operator==(const SkeletonImage&, const SkeletonImage&) = default;
};

/// Transform parameters: sector count, log base, projected dimension.
struct Params {
  int s = 8;
  double b = 1.2;
  int t = 4;

  /// s >= 2, b > 1, 1 <= t < s.
  void validate() const;

  /// Defaults with t = s / 2 (at least 1).
  static Params with_sectors(int s, double b = 1.2);

  friend bool operator==(const Params&, const Params&) = default;
};

/// Stored cancelable template: n x t matrix plus the key it was made with.
struct ProtectedTemplate {
  Matrix ct;
  std::string key_id;
  Params params;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(ct.rows()); }
  void validate() const;
};

}  // namespace ridgeguard
