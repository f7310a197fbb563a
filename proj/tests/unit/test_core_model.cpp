#include <doctest.h>

#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "ridgeguard/error.hpp"
#include "ridgeguard/io.hpp"
#include "ridgeguard/types.hpp"

using namespace ridgeguard;

static bool bit_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

TEST_CASE("parse_minutiae reads lines in order") {
  const auto ms = parse_minutiae("10 20 90\n30 40 180");
  REQUIRE(ms.size() == 2);
  CHECK(ms[0] == Minutia{10, 20, 90.0});
  CHECK(ms[1] == Minutia{30, 40, 180.0});
}

TEST_CASE("parse_minutiae normalizes theta") {
  const auto ms = parse_minutiae("10 20 -30");
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].theta == doctest::Approx(330.0));
  CHECK(parse_minutiae("1 1 360")[0].theta == 0.0);
  CHECK(parse_minutiae("1 1 725.5")[0].theta == doctest::Approx(5.5));
}

TEST_CASE("parse_minutiae counts a generated 38 line file") {
  std::mt19937_64 rng(3);
  const auto ms = rgtest::random_minutiae(rng, 38, 300, 300);
  std::ostringstream out;
  write_minutiae(out, ms);
  const auto back = parse_minutiae(out.str());
  CHECK(back.size() == 38);
  for (std::size_t i = 0; i < 38; ++i) {
    CHECK(back[i].x == ms[i].x);
    CHECK(back[i].y == ms[i].y);
    CHECK(back[i].theta == doctest::Approx(ms[i].theta).epsilon(1e-12));
  }
}

TEST_CASE("parse_minutiae skips comments and blank lines") {
  const auto ms = parse_minutiae("# header\n\n5 6 7  # trailing\n   \n8 9 10\n");
  REQUIRE(ms.size() == 2);
  CHECK(ms[1] == Minutia{8, 9, 10.0});
}

TEST_CASE("parse_minutiae errors name the line") {
  try {
    parse_minutiae("1 2 3\n4 five 6\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_minutiae("1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_minutiae("1 2 3 4\n"), ParseError);
  CHECK_THROWS_AS(parse_minutiae("1.5 2 3\n"), ParseError);
}

TEST_CASE("parse_minutiae rejects negative coordinates and duplicates") {
  CHECK_THROWS_AS(parse_minutiae("-1 2 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_minutiae("1 -2 3\n"), ValidationError);
  CHECK_THROWS_AS(parse_minutiae("1 2 3\n1 2 40\n"), ValidationError);
}

TEST_CASE("theta normalization is idempotent") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5000.0, 5000.0);
  for (int i = 0; i < 10000; ++i) {
    const double v = u(rng);
    const double once = normalize_degrees(v);
    CHECK(once >= 0.0);
    CHECK(once < 360.0);
    CHECK(normalize_degrees(once) == once);
  }
  CHECK(normalize_degrees(-1e-18) < 360.0);
  CHECK(normalize_degrees(-0.0) == 0.0);
}

TEST_CASE("all-white PGM has no ridge pixels") {
  std::string pgm = "P5\n4 4\n255\n" + std::string(16, '\xff');
  const auto img = parse_skeleton(pgm);
  CHECK(img.width == 4);
  CHECK(img.height == 4);
  CHECK(img.ridge_pixel_count() == 0);
  const auto ascii = parse_skeleton("P2\n4 4\n255\n" + [] {
    std::string s;
    for (int i = 0; i < 16; ++i) s += "255 ";
    return s;
  }());
  CHECK(ascii.ridge_pixel_count() == 0);
}

TEST_CASE("P1 bitmap sets ridge pixels") {
  const auto img = parse_skeleton("P1\n2 2\n1 0\n0 1\n");
  CHECK(img.ridge_pixel_count() == 2);
  CHECK(img.ridge(0, 0));
  CHECK(img.ridge(1, 1));
  CHECK_FALSE(img.ridge(1, 0));
  CHECK_FALSE(img.ridge(0, 1));
}

TEST_CASE("PGM threshold: 127 is ridge, 128 is background") {
  const auto img = parse_skeleton("P2\n3 1\n255\n127 128 0\n");
  CHECK(img.ridge(0, 0));
  CHECK_FALSE(img.ridge(1, 0));
  CHECK(img.ridge(2, 0));
}

TEST_CASE("P4 packed bitmap") {
  std::string p4 = "P4\n10 2\n";
  p4 += static_cast<char>(0b10000000);
  p4 += static_cast<char>(0b01000000);
  p4 += static_cast<char>(0b00000000);
  p4 += static_cast<char>(0b11000000);
  const auto img = parse_skeleton(p4);
  CHECK(img.ridge_pixel_count() == 4);
  CHECK(img.ridge(0, 0));
  CHECK(img.ridge(9, 0));
  CHECK(img.ridge(8, 1));
  CHECK(img.ridge(9, 1));
}

TEST_CASE("parallel ridge fixture survives a PGM round trip") {
  SkeletonImage img(64, 64);
  std::size_t generated = 0;
  for (int x = 2; x < 64; x += 7)
    for (int y = 0; y < 64; ++y) {
      img.set(x, y, true);
      ++generated;
    }
  std::ostringstream out;
  write_pgm(out, img);
  const auto back = parse_skeleton(out.str());
  CHECK(back.ridge_pixel_count() == generated);
  CHECK(back == img);
}

TEST_CASE("parse_skeleton errors") {
  CHECK_THROWS_AS(parse_skeleton("P3\n1 1\n255\n0 0 0\n"), ParseError);
  CHECK_THROWS_AS(parse_skeleton("P5\n4 4\n255\n" + std::string(10, '\xff')), ParseError);
  CHECK_THROWS_AS(parse_skeleton("P1\n2 2\n1 0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_skeleton(""), ParseError);
}

static ProtectedTemplate make_template(Matrix ct) {
  ProtectedTemplate t;
  t.params = Params{8, 1.2, static_cast<int>(ct.cols())};
  t.ct = std::move(ct);
  t.key_id = "sm64bm1:0123456789abcdef01234567";
  return t;
}

TEST_CASE("empty template round trips") {
  const auto t = make_template(Matrix(0, 4));
  const auto back = deserialize_template(serialize_template(t));
  CHECK(back.rows() == 0);
  CHECK(back.ct.cols() == 4);
  CHECK(back.key_id == t.key_id);
  CHECK(back.params == t.params);
}

TEST_CASE("1x3 template round trips bit-exactly") {
  Matrix ct(1, 3);
  ct << -1.328, -1.591, 0.664;
  auto t = make_template(ct);
  t.params = Params{4, 1.2, 3};
  const auto back = deserialize_template(serialize_template(t));
  REQUIRE(back.ct.rows() == 1);
  REQUIRE(back.ct.cols() == 3);
  for (int j = 0; j < 3; ++j) CHECK(bit_equal(back.ct(0, j), ct(0, j)));
}

TEST_CASE("random 50x4 template round trips bit-exactly") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 30.0);
  Matrix ct(50, 4);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 4; ++j) ct(i, j) = g(rng);
  ct(0, 0) = std::numeric_limits<double>::denorm_min();
  ct(1, 1) = -0.0;
  ct(2, 2) = std::numeric_limits<double>::max();
  const auto t = make_template(ct);
  const auto back = deserialize_template(serialize_template(t));
  REQUIRE(back.ct.rows() == 50);
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 4; ++j) CHECK(bit_equal(back.ct(i, j), ct(i, j)));
}

TEST_CASE("template JSON carries the documented fields") {
  const auto text = serialize_template(make_template(Matrix::Zero(2, 4)));
  for (const char* field : {"\"version\"", "\"key_id\"", "\"s\"", "\"b\"", "\"t\"", "\"n\"", "\"rows\""})
    CHECK(text.find(field) != std::string::npos);
  CHECK(text.find("seed") == std::string::npos);
}

TEST_CASE("template version and dimension errors") {
  const std::string good =
      R"({"version":1,"key_id":"k","s":8,"b":1.2,"t":2,"n":1,"rows":[[1.0,2.0]]})";
  CHECK_NOTHROW(deserialize_template(good));
  CHECK_THROWS_AS(deserialize_template(
                      R"({"version":2,"key_id":"k","s":8,"b":1.2,"t":2,"n":1,"rows":[[1.0,2.0]]})"),
                  FormatError);
  CHECK_THROWS_AS(deserialize_template(
                      R"({"version":1,"key_id":"k","s":8,"b":1.2,"t":2,"n":2,"rows":[[1.0,2.0]]})"),
                  DimensionError);
  CHECK_THROWS_AS(deserialize_template(
                      R"({"version":1,"key_id":"k","s":8,"b":1.2,"t":3,"n":1,"rows":[[1.0,2.0]]})"),
                  DimensionError);
  CHECK_THROWS_AS(deserialize_template("not json"), Error);
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(Params{8, 1.2, 4}.validate());
  CHECK_THROWS_AS((Params{8, 1.2, 8}.validate()), ValidationError);
  CHECK_THROWS_AS((Params{8, 1.0, 4}.validate()), ValidationError);
  CHECK_THROWS_AS((Params{1, 1.2, 1}.validate()), ValidationError);
  CHECK_THROWS_AS((Params{8, 1.2, 0}.validate()), ValidationError);
  CHECK(Params::with_sectors(8).t == 4);
  CHECK(Params::with_sectors(3).t == 1);
}
