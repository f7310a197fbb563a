#include <doctest.h>

#include <cmath>
#include <limits>

#include "ridgeguard/encode.hpp"
#include "ridgeguard/error.hpp"

using namespace ridgeguard;

TEST_CASE("cantor_pair examples") {
  CHECK(cantor_pair(0, 0) == 0);
  CHECK(cantor_pair(1, 2) == 8);
  CHECK(cantor_pair(2, 1) == 7);
}

TEST_CASE("cantor_unpair examples") {
  CHECK(cantor_unpair(0) == std::pair<std::int64_t, std::int64_t>{0, 0});
  CHECK(cantor_unpair(8) == std::pair<std::int64_t, std::int64_t>{1, 2});
  CHECK(cantor_unpair(7) == std::pair<std::int64_t, std::int64_t>{2, 1});
}

TEST_CASE("exhaustive round trip over [0, 500]^2") {
  std::size_t bad = 0;
  for (std::int64_t a = 0; a <= 500; ++a)
    for (std::int64_t b = 0; b <= 500; ++b)
      if (cantor_unpair(cantor_pair(a, b)) != std::pair{a, b}) ++bad;
  CHECK(bad == 0);
}

TEST_CASE("pair after unpair is the identity on [0, N]") {
  std::size_t bad = 0;
  for (std::uint64_t cp = 0; cp <= 300000; ++cp) {
    const auto [a, b] = cantor_unpair(cp);
    if (cantor_pair(a, b) != cp) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("large values stay exact") {
  const std::int64_t big = 1000000;
  const auto cp = cantor_pair(big, big);
  CHECK(cp == static_cast<std::uint64_t>(2 * big) * (2 * big + 1) / 2 + big);
  CHECK(cantor_unpair(cp) == std::pair{big, big});
  const std::int64_t huge = 2000000000;
  CHECK(cantor_unpair(cantor_pair(huge, 7)) == std::pair<std::int64_t, std::int64_t>{huge, 7});
  // perfect-square edges of the triangle index
  for (std::int64_t w : {4000000000LL, 4294967295LL, 5000000000LL}) {
    CHECK(cantor_unpair(cantor_pair(w, 0)) == std::pair<std::int64_t, std::int64_t>{w, 0});
    CHECK(cantor_unpair(cantor_pair(0, w)) == std::pair<std::int64_t, std::int64_t>{0, w});
  }
}

TEST_CASE("cantor_pair errors") {
  CHECK_THROWS_AS(cantor_pair(-1, 0), ValidationError);
  CHECK_THROWS_AS(cantor_pair(0, -3), ValidationError);
  CHECK_THROWS_AS(cantor_pair(std::numeric_limits<std::int64_t>::max(), 1), ValidationError);
}

TEST_CASE("pairing increases along each diagonal") {
  for (std::int64_t d = 0; d <= 400; ++d)
    for (std::int64_t k2 = 1; k2 <= d; ++k2) CHECK(cantor_pair(d - k2, k2) == cantor_pair(d - k2 + 1, k2 - 1) + 1);
}

TEST_CASE("log transform examples") {
  PairedMatrix pm;
  pm.cp = CantorGrid(1, 3);
  pm.cp << 1, 8, 0;
  pm.valid = Mask::Constant(1, 3, true);
  pm.valid(0, 2) = false;
  const auto lt = log_transform(pm, 1.2);
  CHECK(lt.lt(0, 0) == 0.0);
  CHECK(lt.lt(0, 1) == doctest::Approx(11.4054).epsilon(1e-5));
  CHECK(std::abs(lt.lt(0, 1) - std::log(8.0) / std::log(1.2)) <= 1e-9);
  CHECK(lt.lt(0, 2) == 0.0);
  CHECK(lt.b == 1.2);
  CHECK((lt.valid == pm.valid).all());
  for (double b : {1.0001, 2.0, 10.0}) CHECK(log_transform(pm, b).lt(0, 0) == 0.0);
}

TEST_CASE("log transform errors on b <= 1") {
  PairedMatrix pm{CantorGrid::Ones(1, 1), Mask::Constant(1, 1, true)};
  CHECK_THROWS_AS(log_transform(pm, 1.0), ValidationError);
  CHECK_THROWS_AS(log_transform(pm, 0.5), ValidationError);
}

TEST_CASE("log transform is order preserving") {
  PairedMatrix pm;
  pm.cp = CantorGrid(1, 2000);
  for (int j = 0; j < 2000; ++j) pm.cp(0, j) = static_cast<std::uint64_t>(1 + 37 * j);
  pm.valid = Mask::Constant(1, 2000, true);
  const auto lt = log_transform(pm, 1.2);
  for (int j = 1; j < 2000; ++j) CHECK(lt.lt(0, j) > lt.lt(0, j - 1));
}

TEST_CASE("pair_features pairs every cell and keeps the mask") {
  RidgeFeatureMatrix f;
  f.rc = IntGrid(2, 2);
  f.ro = IntGrid(2, 2);
  f.rc << 1, 0, 3, 0;
  f.ro << 2, 0, 90, 0;
  f.valid = Mask::Constant(2, 2, true);
  f.valid(1, 1) = false;
  const auto pm = pair_features(f);
  CHECK(pm.cp(0, 0) == 8);
  CHECK(pm.cp(0, 1) == 0);
  CHECK(pm.cp(1, 0) == cantor_pair(3, 90));
  CHECK(pm.cp(1, 1) == 0);
  CHECK((pm.valid == f.valid).all());
}
