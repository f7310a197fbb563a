#include "ridgeguard/ridge_features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>
#include <cstdlib>
#include <numbers>

#include "ridgeguard/error.hpp"

namespace ridgeguard {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kDegToRad = std::numbers::pi / 180.0;

struct Run {
  std::size_t first = 0;
  std::size_t last = 0;
};

double dist2(double x0, double y0, double x1, double y1) {
  return (x0 - x1) * (x0 - x1) + (y0 - y1) * (y0 - y1);
}

// Undirected principal direction of the ridge pixels 8-connected to `seeds`
// inside a disc of radius `radius` around `center`.
double fit_tangent(const SkeletonImage& skel, const std::vector<Pixel>& seeds, PointF center,
                   int radius) {
  // Disc around the exact centre; rounding it would break symmetry.
  const int x0 = static_cast<int>(std::floor(center.x - radius));
  const int y0 = static_cast<int>(std::floor(center.y - radius));
  const int side = 2 * radius + 2;
  const double r2 = static_cast<double>(radius) * radius;
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(side * side), 0);
  auto inside = [&](int x, int y) {
    const double ddx = x - center.x, ddy = y - center.y;
    return x >= x0 && y >= y0 && x < x0 + side && y < y0 + side && ddx * ddx + ddy * ddy <= r2 &&
           skel.ridge(x, y);
  };
  auto slot = [&](int x, int y) -> std::uint8_t& {
    return seen[static_cast<std::size_t>((y - y0) * side + (x - x0))];
  };

  std::vector<Pixel> stack;
  for (const auto& p : seeds) {
    if (inside(p.x, p.y) && !slot(p.x, p.y)) {
      slot(p.x, p.y) = 1;
      stack.push_back(p);
    }
  }
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  std::size_t count = 0;
  while (!stack.empty()) {
    Pixel p = stack.back();
    stack.pop_back();
    sx += p.x;
    sy += p.y;
    sxx += static_cast<double>(p.x) * p.x;
    syy += static_cast<double>(p.y) * p.y;
    sxy += static_cast<double>(p.x) * p.y;
    ++count;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        int nx = p.x + dx, ny = p.y + dy;
        if ((dx || dy) && inside(nx, ny) && !slot(nx, ny)) {
          slot(nx, ny) = 1;
          stack.push_back({nx, ny});
        }
      }
  }
  if (count < 2) return 0.0;
  const double n = static_cast<double>(count);
  const double cxx = sxx / n - (sx / n) * (sx / n);
  const double cyy = syy / n - (sy / n) * (sy / n);
  const double cxy = sxy / n - (sx / n) * (sy / n);
  double angle = 0.5 * std::atan2(2.0 * cxy, cxx - cyy) * kRadToDeg;
  angle = std::fmod(angle + 180.0, 180.0);
  return angle >= 180.0 ? 0.0 : angle;
}

}  // namespace

std::vector<Pixel> bresenham(Pixel a, Pixel b) {
  // Nearest pixel on the minor axis at every major step. Exact ties round
  // toward the start, so the path commutes with quarter turns and mirrors.
  const int dx = b.x - a.x, dy = b.y - a.y;
  const bool x_major = std::abs(dx) >= std::abs(dy);
  const int n = std::max(std::abs(dx), std::abs(dy));
  const int major = x_major ? dx : dy, minor = x_major ? dy : dx;
  const int step = major < 0 ? -1 : 1;
  std::vector<Pixel> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    int off = 0;
    if (n > 0) {
      const long long num = static_cast<long long>(i) * std::abs(minor);
      const long long q = (2 * num + n - 1) / (2LL * n);
      off = static_cast<int>(minor < 0 ? -q : q);
    }
    out.push_back(x_major ? Pixel{a.x + step * i, a.y + off} : Pixel{a.x + off, a.y + step * i});
  }
  return out;
}

std::vector<RidgeCrossing> ridge_crossings(const SkeletonImage& skel, Pixel p1, Pixel p2,
                                           const CrossingOptions& options) {
  if (p1 == p2) throw ValidationError("ridge crossing query needs two distinct points");
  if (!skel.contains(p1.x, p1.y) || !skel.contains(p2.x, p2.y)) {
    throw ValidationError("ridge crossing endpoint outside the skeleton image");
  }

  const auto path = bresenham(p1, p2);
  // Ridge pixels contributing to each path position (the pixel itself, or the
  // two corners of a diagonal step a ridge slips through).
  std::vector<std::vector<Pixel>> hits(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    const auto& p = path[k];
    if (skel.ridge(p.x, p.y)) hits[k].push_back(p);
    if (k > 0) {
      const auto& q = path[k - 1];
      if (q.x != p.x && q.y != p.y && skel.ridge(p.x, q.y) && skel.ridge(q.x, p.y)) {
        hits[k].push_back({p.x, q.y});
        hits[k].push_back({q.x, p.y});
      }
    }
  }

  std::vector<Run> runs;
  for (std::size_t k = 0; k < path.size(); ++k) {
    if (hits[k].empty()) continue;
    if (!runs.empty() && k - runs.back().last <= static_cast<std::size_t>(options.merge_gap) + 1) {
      runs.back().last = k;
    } else {
      runs.push_back({k, k});
    }
  }
  if (runs.empty()) return {};

  // Ridge pixels within one pixel (Chebyshev) of the path. Runs whose pixels
  // are connected inside this tube touch the same ridge: a segment sliding
  // along a ridge meets it several times but crosses it at most once.
  const int bx0 = std::min(p1.x, p2.x) - 1, by0 = std::min(p1.y, p2.y) - 1;
  const int bw = std::abs(p1.x - p2.x) + 3, bh = std::abs(p1.y - p2.y) + 3;
  std::vector<int> label(static_cast<std::size_t>(bw) * bh, -2);  // -2 outside tube
  auto at = [&](int x, int y) -> int& {
    return label[static_cast<std::size_t>(y - by0) * bw + (x - bx0)];
  };
  for (const auto& p : path)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (skel.ridge(p.x + dx, p.y + dy)) at(p.x + dx, p.y + dy) = -1;  // unlabelled ridge

  const double ex2 = options.exclusion_radius * options.exclusion_radius;
  std::vector<char> touches_endpoint;
  std::vector<Pixel> stack;
  auto flood = [&](Pixel seed, int id) {
    stack.push_back(seed);
    at(seed.x, seed.y) = id;
    while (!stack.empty()) {
      const Pixel p = stack.back();
      stack.pop_back();
      if (dist2(p.x, p.y, p1.x, p1.y) <= ex2 || dist2(p.x, p.y, p2.x, p2.y) <= ex2) {
        touches_endpoint[static_cast<std::size_t>(id)] = 1;
      }
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int nx = p.x + dx, ny = p.y + dy;
          if (nx < bx0 || ny < by0 || nx >= bx0 + bw || ny >= by0 + bh) continue;
          if (at(nx, ny) == -1) {
            at(nx, ny) = id;
            stack.push_back({nx, ny});
          }
        }
    }
  };

  // Label every tube component a run touches; components sharing a run are
  // one ridge too.
  std::vector<int> parent;
  auto find = [&](int c) {
    while (parent[static_cast<std::size_t>(c)] != c) c = parent[static_cast<std::size_t>(c)] =
        parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(c)])];
    return c;
  };
  std::vector<int> run_group(runs.size(), -1);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t k = runs[r].first; k <= runs[r].last; ++k) {
      for (const auto& h : hits[k]) {
        int l = at(h.x, h.y);
        if (l == -1) {
          l = static_cast<int>(parent.size());
          parent.push_back(l);
          touches_endpoint.push_back(0);
          flood(h, l);
        }
        if (run_group[r] < 0) {
          run_group[r] = l;
        } else {
          const int a = find(run_group[r]), b = find(l);
          if (a != b) parent[static_cast<std::size_t>(b)] = a;
        }
      }
    }
  }
  std::vector<char> excluded(parent.size(), 0);
  for (std::size_t c = 0; c < parent.size(); ++c)
    if (touches_endpoint[c]) excluded[static_cast<std::size_t>(find(static_cast<int>(c)))] = 1;

  std::vector<RidgeCrossing> crossings;
  std::vector<char> emitted(parent.size(), 0);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto g = static_cast<std::size_t>(find(run_group[r]));
    if (excluded[g] || emitted[g]) continue;
    emitted[g] = 1;
    // The tangent comes from the first run of the ridge along the path.
    std::vector<Pixel> seeds;
    double mx = 0.0, my = 0.0;
    for (std::size_t k = runs[r].first; k <= runs[r].last; ++k) {
      for (const auto& h : hits[k]) {
        seeds.push_back(h);
        mx += h.x;
        my += h.y;
      }
    }
    const auto count = static_cast<double>(seeds.size());
    PointF mid{mx / count, my / count};
    crossings.push_back({mid, fit_tangent(skel, seeds, mid, options.window_radius)});
  }
  return crossings;
}

std::optional<int> mean_ridge_orientation(std::span<const RidgeCrossing> crossings,
                                          double theta_line_deg) {
  if (crossings.empty()) return std::nullopt;
  // Tangents are undirected. The doubled-angle mean picks the half plane,
  // then differences are unwrapped around it and averaged plainly.
  std::vector<double> diffs;
  diffs.reserve(crossings.size());
  double c = 0.0, s = 0.0;
  for (const auto& crossing : crossings) {
    const double d = crossing.tangent_deg - theta_line_deg;
    diffs.push_back(d);
    c += std::cos(2.0 * d * kDegToRad);
    s += std::sin(2.0 * d * kDegToRad);
  }
  const double centre = 0.5 * std::atan2(s, c) * kRadToDeg;
  double sum = 0.0;
  for (double d : diffs) {
    double u = std::fmod(d - centre + 90.0, 180.0);
    if (u < 0.0) u += 180.0;
    sum += centre + u - 90.0;
  }
  double mean = std::fmod(sum / static_cast<double>(diffs.size()), 180.0);
  if (mean < 0.0) mean += 180.0;
  const long rounded = std::lround(mean) % 180;
  return static_cast<int>(rounded);
}

RidgeFeatureMatrix extract_features(const MinutiaeSet& ms, const SkeletonImage& skel,
                                    const NeighborTable& nt, const CrossingOptions& options) {
  if (nt.n != ms.size()) throw DimensionError("neighbor table was built for another minutiae set");
  const auto n = static_cast<Eigen::Index>(nt.n);
  RidgeFeatureMatrix out{IntGrid::Zero(n, nt.s), IntGrid::Zero(n, nt.s), Mask::Constant(n, nt.s, false)};

  for (std::size_t i = 0; i < nt.n; ++i) {
    const auto& ref = ms[i];
    for (int j = 0; j < nt.s; ++j) {
      const auto& nb = nt.neighbor(i, j);
      if (!nb) continue;
      const auto& other = ms[*nb];
      out.valid(static_cast<Eigen::Index>(i), j) = true;
      auto crossings = ridge_crossings(skel, {ref.x, ref.y}, {other.x, other.y}, options);
      if (crossings.empty()) continue;
      const double line = std::atan2(static_cast<double>(other.y - ref.y),
                                     static_cast<double>(other.x - ref.x)) * kRadToDeg;
      out.rc(static_cast<Eigen::Index>(i), j) = static_cast<std::int64_t>(crossings.size());
      out.ro(static_cast<Eigen::Index>(i), j) = *mean_ridge_orientation(crossings, line);
    }
  }
  return out;
}

}  // namespace ridgeguard
