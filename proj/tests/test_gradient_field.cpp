#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <tuple>

#include "ppii/error.hpp"
#include "ppii/gradient_field.hpp"
#include "support/fixtures.hpp"

using ppii::BlendParams;
using ppii::PatchRegion;
using ppii::Raster;

TEST_CASE("neighbor pair counts") {
  CHECK(ppii::neighbor_pair_count(3, 3) == 12);
  CHECK(ppii::neighbor_pair_count(4, 3) == 17);
  CHECK(ppii::neighbor_pair_count(3, 4) == 17);
  CHECK(ppii::neighbor_pair_count(5, 5) == 40);

  for (std::size_t w = 3; w < 9; ++w) {
    for (std::size_t h = 3; h < 9; ++h) {
      const auto pairs = ppii::neighbor_pairs({2, 5, w, h});
      CHECK(pairs.size() == h * (w - 1) + (h - 1) * w);
      std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> seen;
      for (const auto& p : pairs) {
        const std::size_t dist = (p.qx - p.px) + (p.qy - p.py);
        CHECK(dist == 1);
        auto key = std::make_tuple(p.px, p.py, p.qx, p.qy);
        auto rev = std::make_tuple(p.qx, p.qy, p.px, p.py);
        CHECK(seen.count(rev) == 0);
        CHECK(seen.insert(key).second);
        CHECK(p.qx < w);
        CHECK(p.qy < h);
      }
    }
  }
}

TEST_CASE("region validation") {
  CHECK_NOTHROW(ppii::validate(PatchRegion{0, 0, 3, 3}, 3, 3));
  CHECK_THROWS_AS(ppii::validate(PatchRegion{0, 0, 2, 5}, 10, 10), ppii::Error);
  CHECK_THROWS_AS(ppii::validate(PatchRegion{8, 0, 3, 3}, 10, 10), ppii::Error);
  CHECK(ppii::overlaps({0, 0, 4, 4}, {3, 3, 4, 4}));
  CHECK_FALSE(ppii::overlaps({0, 0, 4, 4}, {4, 0, 4, 4}));
  CHECK_THROWS_AS(ppii::validate(BlendParams{1.5, 1.0}), ppii::Error);
  CHECK_THROWS_AS(ppii::validate(BlendParams{0.5, 0.5}), ppii::Error);
}

TEST_CASE("selection rule examples") {
  CHECK(ppii::select_gradient(0.4, 0.1, {0.5, 1.0}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ppii::select_gradient(0.4, 0.15, {0.5, 4.0}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ppii::select_gradient(0.4, 0.9, {0.0, 3.0}) == 0.4);
  // Equal magnitudes take the source branch.
  CHECK(ppii::select_gradient(0.2, -0.2, {0.5, 1.0}) == -0.1);

  // The same rule applied through a 3x3 field.
  Raster t(3, 3, 0.0), s(3, 3, 0.0);
  t.at(0, 0) = 0.4;
  s.at(0, 0) = 0.1;
  const auto f = ppii::build_guidance_field(t, s, {0.5, 1.0});
  CHECK(f.horizontal(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f.vertical(0, 0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f.horizontal(1, 0) == 0.0);
  CHECK(f.horizontal_values().size() == 3 * 2);
  CHECK(f.vertical_values().size() == 2 * 3);
}

TEST_CASE("field properties") {
  auto rng = ppii::make_stream({21});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t w = 3 + t % 9, h = 3 + t % 7;
    const Raster tp = fixtures::random_raster(rng, w, h);
    const Raster sp = fixtures::random_raster(rng, w, h);
    const BlendParams p{u(rng), 1.0 + 3.0 * u(rng)};

    // alpha = 0 gives the target gradients.
    const auto f0 = ppii::build_guidance_field(tp, sp, {0.0, p.gain});
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x + 1 < w; ++x) CHECK(f0.horizontal(x, y) == tp.at(x, y) - tp.at(x + 1, y));
    for (std::size_t y = 0; y + 1 < h; ++y)
      for (std::size_t x = 0; x < w; ++x) CHECK(f0.vertical(x, y) == tp.at(x, y) - tp.at(x, y + 1));

    // Homogeneity (power-of-two scale keeps the arithmetic exact).
    Raster t2 = tp, s2 = sp;
    for (double& v : t2.values()) v *= 4.0;
    for (double& v : s2.values()) v *= 4.0;
    const auto f = ppii::build_guidance_field(tp, sp, p);
    const auto f2 = ppii::build_guidance_field(t2, s2, p);
    for (std::size_t i = 0; i < f.horizontal_values().size(); ++i)
      CHECK(f2.horizontal_values()[i] == 4.0 * f.horizontal_values()[i]);

    // Shifting either patch by a constant leaves the winning branch in place.
    Raster ts = tp;
    for (double& v : ts.values()) v += 0.25;
    const auto fs = ppii::build_guidance_field(ts, sp, p);
    for (std::size_t i = 0; i < f.vertical_values().size(); ++i)
      CHECK(fs.vertical_values()[i] == doctest::Approx(f.vertical_values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("mask restriction") {
  Raster t(5, 5, 0.0), s(5, 5, 0.0);
  for (std::size_t x = 0; x < 5; ++x) s.at(x, 2) = 1.0;
  std::vector<std::uint8_t> mask(25, 0);
  mask[2 * 5 + 2] = 1;
  mask[1 * 5 + 2] = 1;
  const auto f = ppii::build_guidance_field(t, s, {0.5, 2.0}, &mask);
  CHECK(f.vertical(2, 1) == -1.0);  // both pixels inside: source branch 2*0.5*(0-1)
  CHECK(f.vertical(1, 1) == 0.0);   // outside: target gradient
  CHECK(f.vertical(2, 2) == 0.0);   // one pixel outside
  CHECK_THROWS_AS(ppii::build_guidance_field(t, Raster(4, 5), {}), ppii::Error);
}

TEST_CASE("divergence") {
  CHECK(ppii::divergence(ppii::GuidanceField(6, 4)) == Raster(4, 2, 0.0));
  CHECK(ppii::divergence(ppii::build_guidance_field(Raster(5, 5, 0.7), Raster(5, 5, 0.1), {0.3, 2})) ==
        Raster(3, 3, 0.0));

  auto rng = ppii::make_stream({8});
  for (int t = 0; t < 100; ++t) {
    const std::size_t w = 3 + t % 11, h = 3 + t % 5;
    const Raster img = fixtures::random_raster(rng, w, h);
    const Raster d = ppii::divergence(ppii::build_guidance_field(img, img, {0.0, 1.0}));
    REQUIRE(d.width() == w - 2);
    REQUIRE(d.height() == h - 2);
    for (std::size_t y = 1; y + 1 < h; ++y) {
      for (std::size_t x = 1; x + 1 < w; ++x) {
        const double stencil =
            4 * img.at(x, y) - img.at(x - 1, y) - img.at(x + 1, y) - img.at(x, y - 1) - img.at(x, y + 1);
        CHECK(d.at(x - 1, y - 1) == doctest::Approx(stencil).epsilon(1e-12));
      }
    }
  }
}
