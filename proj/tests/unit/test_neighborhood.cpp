#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "ridgeguard/error.hpp"
#include "ridgeguard/neighborhood.hpp"

using namespace ridgeguard;

namespace {

double rel_angle(const Minutia& r, const Minutia& o) {
  const double a = std::atan2(o.y - r.y, o.x - r.x) * 180.0 / std::numbers::pi;
  return normalize_degrees(a - r.theta);
}

// O(n^2 s) recomputation straight from the definition.
NeighborTable brute_force(const MinutiaeSet& ms, int s) {
  NeighborTable nt;
  nt.n = ms.size();
  nt.s = s;
  nt.entries.assign(nt.n * s, std::nullopt);
  nt.distances.assign(nt.n * s, 0.0);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (int j = 1; j <= s; ++j) {
      std::optional<std::size_t> best;
      double best_d = 0.0;
      for (std::size_t k = 0; k < ms.size(); ++k) {
        if (k == i) continue;
        const double a = rel_angle(ms[i], ms[k]);
        const int sec = 1 + static_cast<int>(std::floor(a / (360.0 / s)));
        if (sec != j) continue;
        const double d = std::hypot(ms[k].x - ms[i].x, ms[k].y - ms[i].y);
        if (!best || d < best_d) {
          best = k;
          best_d = d;
        }
      }
      nt.entries[i * s + (j - 1)] = best;
      if (best) nt.distances[i * s + (j - 1)] = best_d;
    }
  return nt;
}

}  // namespace

TEST_CASE("sector_of examples") {
  CHECK(sector_of({0, 0, 0.0}, {1, 0, 0.0}, 8) == 1);
  CHECK(sector_of({0, 0, 0.0}, {0, 1, 0.0}, 8) == 3);
  CHECK(sector_of({0, 0, 90.0}, {0, 1, 0.0}, 8) == 1);
}

TEST_CASE("sector_of boundaries and range") {
  // exactly 45 degrees is the start of sector 2
  CHECK(sector_of({0, 0, 0.0}, {5, 5, 0.0}, 8) == 2);
  CHECK(sector_of({0, 0, 0.0}, {1, -1, 0.0}, 8) == 8);
  CHECK(sector_of({0, 0, 0.0}, {-1, 0, 0.0}, 8) == 5);
  CHECK(sector_of({0, 0, 0.0}, {0, 1, 0.0}, 2) == 1);
  CHECK(sector_of({0, 0, 0.0}, {0, -1, 0.0}, 2) == 2);
  std::mt19937_64 rng(1);
  const auto ms = rgtest::random_minutiae(rng, 100, 500, 500);
  for (int s : {2, 3, 8, 16})
    for (std::size_t i = 1; i < ms.size(); ++i) {
      const int j = sector_of(ms[0], ms[i], s);
      CHECK(j >= 1);
      CHECK(j <= s);
    }
}

TEST_CASE("sector_of errors") {
  CHECK_THROWS_AS(sector_of({3, 4, 0.0}, {3, 4, 90.0}, 8), ValidationError);
  CHECK_THROWS_AS(sector_of({3, 4, 0.0}, {5, 4, 90.0}, 1), ValidationError);
}

TEST_CASE("single minutia yields an all-absent table") {
  MinutiaeSet ms;
  ms.minutiae = {{10, 10, 0.0}};
  const auto nt = build_neighbor_table(ms, 8);
  CHECK(nt.n == 1);
  CHECK(nt.s == 8);
  for (int c = 0; c < 8; ++c) CHECK_FALSE(nt.neighbor(0, c).has_value());
  CHECK(build_neighbor_table(MinutiaeSet{}, 8).n == 0);
}

TEST_CASE("smaller distance wins within a sector") {
  MinutiaeSet ms;
  ms.minutiae = {{0, 0, 0.0}, {10, 0, 0.0}, {5, 0, 0.0}};
  const auto nt = build_neighbor_table(ms, 8);
  REQUIRE(nt.neighbor(0, 0).has_value());
  CHECK(*nt.neighbor(0, 0) == 2);
  CHECK(nt.distance(0, 0) == doctest::Approx(5.0));
}

TEST_CASE("equal distances go to the lowest index") {
  MinutiaeSet ms;
  ms.minutiae = {{10, 10, 0.0}, {13, 14, 0.0}, {14, 13, 0.0}};
  const auto nt = build_neighbor_table(ms, 8);
  CHECK(*nt.neighbor(0, 0) == 2);  // (14,13) is 42.9 deg: sector 1
  CHECK(*nt.neighbor(0, 1) == 1);  // (13,14) is 53.1 deg: sector 2
  MinutiaeSet tie;
  tie.minutiae = {{10, 10, 0.0}, {14, 11, 0.0}, {14, 9, 0.0}};
  // both at distance sqrt(17); with s = 2 both fall in sector 1 / 2 respectively
  const auto t2 = build_neighbor_table(tie, 2);
  CHECK(*t2.neighbor(0, 0) == 1);
  CHECK(*t2.neighbor(0, 1) == 2);
  MinutiaeSet same;
  same.minutiae = {{10, 10, 0.0}, {13, 14, 0.0}, {14, 13, 0.0}};
  const auto t1 = build_neighbor_table(same, 2);
  CHECK(*t1.neighbor(0, 0) == 1);
}

TEST_CASE("table equals the brute-force oracle for n <= 50") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 50;
    const auto ms = rgtest::random_minutiae(rng, n, 200, 200);
    for (int s : {2, 5, 8, 12}) {
      const auto nt = build_neighbor_table(ms, s);
      const auto oracle = brute_force(ms, s);
      CHECK(nt.entries == oracle.entries);
      for (std::size_t k = 0; k < nt.entries.size(); ++k)
        if (nt.entries[k]) CHECK(nt.distances[k] == doctest::Approx(oracle.distances[k]));
    }
  }
  const auto twenty = rgtest::random_minutiae(rng, 20, 300, 300);
  CHECK(build_neighbor_table(twenty, 8).entries == brute_force(twenty, 8).entries);
}

TEST_CASE("each entry is the closest minutia in its sector") {
  std::mt19937_64 rng(21);
  const auto ms = rgtest::random_minutiae(rng, 40, 300, 300);
  const int s = 8;
  const auto nt = build_neighbor_table(ms, s);
  for (std::size_t i = 0; i < ms.size(); ++i)
    for (int c = 0; c < s; ++c) {
      const auto& e = nt.neighbor(i, c);
      if (!e) continue;
      CHECK(*e != i);
      CHECK(sector_of(ms[i], ms[*e], s) == c + 1);
      for (std::size_t k = 0; k < ms.size(); ++k)
        if (k != i && sector_of(ms[i], ms[k], s) == c + 1)
          CHECK(nt.distance(i, c) <= std::hypot(ms[k].x - ms[i].x, ms[k].y - ms[i].y));
    }
}

TEST_CASE("exact rigid motions preserve the table") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ms = rgtest::random_minutiae(rng, 30, 200, 200);
    const int quarter = trial % 4;
    const int tx = 250 + trial, ty = 300 - trial;
    MinutiaeSet moved;
    for (const auto& m : ms.minutiae) {
      int x = m.x, y = m.y;
      for (int q = 0; q < quarter; ++q) {
        const int nx = -y, ny = x;  // +90 deg about the origin
        x = nx;
        y = ny;
      }
      moved.minutiae.push_back({x + tx, y + ty, normalize_degrees(m.theta + 90.0 * quarter)});
    }
    const auto a = build_neighbor_table(ms, 8);
    const auto b = build_neighbor_table(moved, 8);
    // boundary cases can flip on floating point; skip cells within tolerance
    for (std::size_t i = 0; i < ms.size(); ++i)
      for (int c = 0; c < 8; ++c) {
        bool near_boundary = false;
        for (std::size_t k = 0; k < ms.size(); ++k) {
          if (k == i) continue;
          const double r = std::fmod(rel_angle(ms[i], ms[k]), 45.0);
          if (r < 0.5 || r > 44.5) near_boundary = true;
        }
        if (!near_boundary) CHECK(a.neighbor(i, c) == b.neighbor(i, c));
      }
  }
}

TEST_CASE("arbitrary rotations keep neighbors away from sector boundaries") {
  // Continuous coordinates scaled large so integer rounding stays far below
  // the angular tolerance.
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ang(0.0, 360.0), off(-1e5, 1e5);
  const double eps = 0.5;
  std::size_t checked = 0;
  for (int trial = 0; trial < 30; ++trial) {
    MinutiaeSet ms;
    std::uniform_int_distribution<int> coord(0, 200000);
    for (int i = 0; i < 25; ++i) ms.minutiae.push_back({coord(rng), coord(rng), ang(rng)});
    const double phi = ang(rng);
    const double c = std::cos(phi * std::numbers::pi / 180.0);
    const double sn = std::sin(phi * std::numbers::pi / 180.0);
    const double cx = 100000, cy = 100000, tx = off(rng), ty = off(rng);
    MinutiaeSet moved;
    for (const auto& m : ms.minutiae) {
      const double dx = m.x - cx, dy = m.y - cy;
      const double x = cx + c * dx - sn * dy + tx + 300000;
      const double y = cy + sn * dx + c * dy + ty + 300000;
      moved.minutiae.push_back({static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y)),
                                normalize_degrees(m.theta + phi)});
    }
    const auto a = build_neighbor_table(ms, 8);
    const auto b = build_neighbor_table(moved, 8);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      bool near_boundary = false;
      for (std::size_t k = 0; k < ms.size(); ++k) {
        if (k == i) continue;
        const double r = std::fmod(rel_angle(ms[i], ms[k]), 45.0);
        if (r < eps || r > 45.0 - eps) near_boundary = true;
      }
      if (near_boundary) continue;
      for (int col = 0; col < 8; ++col) {
        CHECK(a.neighbor(i, col) == b.neighbor(i, col));
        ++checked;
      }
    }
  }
  CHECK(checked > 500);
}
