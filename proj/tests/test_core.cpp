#include "doctest.h"

#include <cmath>

#include "pilotmesh/core/geometry.hpp"
#include "pilotmesh/core/overlay_id.hpp"
#include "pilotmesh/core/topology.hpp"
#include "pilotmesh/sim/scenario.hpp"

using namespace pilotmesh;

namespace {
const IdWidths kDefault{8, 8, 16};
}

TEST_CASE("encode_id concatenates segments") {
  CHECK(OverlayId::encode(1, 2, 3, kDefault).value() == 0x01020003u);
  CHECK(OverlayId::encode(0, 0, 0, kDefault).value() == 0u);
  CHECK(OverlayId::encode(0, 0, 0, IdWidths{3, 5, 7}).value() == 0u);
  CHECK(OverlayId::encode(255, 255, 65535, kDefault).value() == 0xFFFFFFFFu);
}

TEST_CASE("decode_id inverts encode") {
  CHECK(OverlayId(0x01020003u, kDefault).decode() == IdSegments{1, 2, 3});
  CHECK(OverlayId(0, kDefault).decode() == IdSegments{0, 0, 0});
  CHECK(OverlayId(0xFFFFFFFFu, kDefault).decode() == IdSegments{255, 255, 65535});
}

TEST_CASE("encode rejects the overflowing segment by name") {
  auto segment_of = [](std::uint64_t b, std::uint64_t p, std::uint64_t h) {
    try {
      OverlayId::encode(b, p, h, kDefault);
    } catch (const SegmentOverflow& e) {
      return e.segment();
    }
    return std::string("none");
  };
  CHECK(segment_of(256, 0, 0) == "enb");
  CHECK(segment_of(0, 256, 0) == "pilot");
  CHECK(segment_of(0, 0, 65536) == "ms");
  CHECK(segment_of(255, 255, 65535) == "none");
  CHECK_THROWS_AS(OverlayId(std::uint64_t{1} << 32, kDefault), std::out_of_range);
}

TEST_CASE("round trip is exhaustive at widths (3,3,3)") {
  const IdWidths w{3, 3, 3};
  for (std::uint64_t b = 0; b < 8; ++b) {
    for (std::uint64_t p = 0; p < 8; ++p) {
      for (std::uint64_t h = 0; h < 8; ++h) {
        const OverlayId id = OverlayId::encode(b, p, h, w);
        REQUIRE(id.value() == (b << 6 | p << 3 | h));
        REQUIRE(id.decode() == IdSegments{b, p, h});
      }
    }
  }
  for (std::uint64_t v = 0; v < 512; ++v) {
    const auto s = OverlayId(v, w).decode();
    REQUIRE(OverlayId::encode(s.enb, s.pilot, s.ms, w).value() == v);
  }
}

TEST_CASE("widths must fit 64 bits and be non-empty") {
  CHECK_THROWS_AS((IdWidths{32, 32, 1}.validate()), std::invalid_argument);
  CHECK_NOTHROW((IdWidths{16, 16, 32}.validate()));
}

TEST_CASE("in_vicinity is the closed disc test") {
  CHECK(in_vicinity({0, 0}, {0, 0}, 20));
  CHECK(in_vicinity({20, 0}, {0, 0}, 20));
  CHECK_FALSE(in_vicinity({15, 15}, {0, 0}, 20));
  CHECK_THROWS_AS(in_vicinity({0, 0}, {0, 0}, 0), std::invalid_argument);
}

TEST_CASE("in_vicinity is symmetric and monotone in r") {
  sim::Rng rng(11);
  for (int n = 0; n < 2000; ++n) {
    const Position a{rng.uniform01() * 60 - 30, rng.uniform01() * 60 - 30};
    const Position b{rng.uniform01() * 60 - 30, rng.uniform01() * 60 - 30};
    const double r1 = 1 + rng.uniform01() * 30;
    const double r2 = r1 + rng.uniform01() * 30;
    REQUIRE(in_vicinity(a, b, r1) == in_vicinity(b, a, r1));
    if (in_vicinity(a, b, r1)) REQUIRE(in_vicinity(a, b, r2));
  }
}

TEST_CASE("d2d_hops counts relay hops of range r") {
  CHECK(d2d_hops(0, 20) == 1);
  CHECK(d2d_hops(20, 20) == 1);
  CHECK(d2d_hops(20.5, 20) == 2);
  CHECK(d2d_hops(100, 20) == 5);
}

TEST_CASE("prefix_distance examples") {
  const IdWidths w4{1, 1, 2};
  CHECK(prefix_distance(OverlayId(0b1011, w4), OverlayId(0b1011, w4)) == 0);
  CHECK(prefix_distance(OverlayId(0b1000, w4), OverlayId(0b1011, w4)) == 2);
  CHECK(prefix_distance(OverlayId(0b0000, w4), OverlayId(0b1000, w4)) == 4);
  CHECK_THROWS_AS(prefix_distance(OverlayId(0, w4), OverlayId(0, kDefault)), std::invalid_argument);
}

TEST_CASE("prefix_distance properties") {
  const IdWidths w{2, 2, 4};
  for (std::uint64_t a = 0; a < 256; ++a) {
    for (std::uint64_t b = 0; b < 256; ++b) {
      const unsigned d = prefix_distance(OverlayId(a, w), OverlayId(b, w));
      REQUIRE(d == prefix_distance(OverlayId(b, w), OverlayId(a, w)));
      REQUIRE((d == 0) == (a == b));
      REQUIRE(d <= 8);
    }
  }
  CHECK(prefix_distance(FileKey{0b1000}, OverlayId(0b1011, IdWidths{1, 1, 2})) == 2);
}

TEST_CASE("file keys live in the m-bit space") {
  for (int i = 0; i < 200; ++i) {
    const FileKey k = key_from_content("file-" + std::to_string(i), 32);
    REQUIRE(k.value < (std::uint64_t{1} << 32));
    REQUIRE_NOTHROW(check_key(k, 32));
  }
  CHECK(key_from_content("abc", 32) == key_from_content("abc", 32));
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK_THROWS_AS(check_key(FileKey{std::uint64_t{1} << 32}, 32), std::out_of_range);
  const KeyHasher constant = [](std::string_view) { return ~std::uint64_t{0}; };
  CHECK(key_from_content("x", 8, constant).value == 255u);
}

TEST_CASE("overlay ids are derived from ordinals") {
  CHECK(pilot_overlay_id(1, 0, kDefault).decode() == IdSegments{1, 1, 0});
  CHECK(member_overlay_id(1, 2, 7, kDefault).decode() == IdSegments{1, 3, 8});
  CHECK(member_overlay_id(1, std::nullopt, 7, kDefault).decode() == IdSegments{1, 0, 8});
}

TEST_CASE("topology validation") {
  Topology t;
  t.devices = {Device{0, {0, 0}, 10, true}, Device{1, {5, 5}, 0, false}};
  CHECK_NOTHROW(t.validate());
  t.set_pilots({0});
  CHECK(t.device(0).role == Role::pilot);
  CHECK(t.device(1).role == Role::member);
  Topology u = t;
  CHECK_THROWS_AS(u.set_pilots({1}), std::invalid_argument);

  Topology bad = t;
  bad.devices[1].id = 5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = t;
  bad.devices[1].position = {300, 0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = t;
  bad.d2d_range = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = t;
  bad.isd = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
