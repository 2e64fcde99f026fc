#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ppii/error.hpp"
#include "ppii/metrics.hpp"
#include "ppii/sampler.hpp"
#include "support/fixtures.hpp"

using ppii::GeneratorConfig;
using ppii::MaskDistribution;
using ppii::Raster;

namespace {

bool ring_clear(const std::vector<std::uint8_t>& mask, std::size_t w, std::size_t h) {
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      if ((x == 0 || y == 0 || x + 1 == w || y + 1 == h) && mask[y * w + x]) return false;
  return true;
}

Raster stripes(std::size_t w, std::size_t h, std::size_t period) {
  Raster r(w, h, 0.0);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) r.at(x, y) = (x / period) % 2 ? 1.0 : 0.0;
  return r;
}

}  // namespace

TEST_CASE("patch spec bounds over many draws") {
  GeneratorConfig cfg;
  auto rng = ppii::make_stream({1});
  for (int i = 0; i < 10000; ++i) {
    const auto spec = ppii::sample_patch_spec(rng, 512, 512, cfg);
    for (const auto& r : {spec.target, spec.source}) {
      CHECK(r.width >= 30);
      CHECK(r.width <= 128);
      CHECK(r.height >= 30);
      CHECK(r.height <= 128);
      CHECK(r.x >= 1);
      CHECK(r.y >= 1);
      CHECK(r.x <= 511 - r.width);
      CHECK(r.y <= 511 - r.height);
    }
    CHECK(spec.target.width == spec.source.width);
    CHECK(spec.target.height == spec.source.height);
  }
}

TEST_CASE("patch spec degenerate and error cases") {
  GeneratorConfig cfg;
  cfg.patch_frac_min = cfg.patch_frac_max = 0.1;
  auto rng = ppii::make_stream({2});
  for (int i = 0; i < 100; ++i) {
    const auto spec = ppii::sample_patch_spec(rng, 100, 100, cfg);
    CHECK(spec.target.width == 10);
    CHECK(spec.target.height == 10);
  }
  auto a = ppii::make_stream({9, 9});
  auto b = ppii::make_stream({9, 9});
  for (int i = 0; i < 20; ++i) {
    const auto sa = ppii::sample_patch_spec(a, 300, 200, GeneratorConfig{});
    const auto sb = ppii::sample_patch_spec(b, 300, 200, GeneratorConfig{});
    CHECK(sa.target == sb.target);
    CHECK(sa.source == sb.source);
  }
  CHECK_THROWS_AS(ppii::sample_patch_spec(rng, 10, 10, GeneratorConfig{}), ppii::Error);
}

TEST_CASE("degenerate mask distribution") {
  auto rng = ppii::make_stream({3});
  const MaskDistribution dist{5.0, 0.0, 10.0, 10.0, 0.0, 0.0};
  const auto disc = ppii::sample_disc(rng, 20, 20, dist);
  CHECK(disc.radius == 5.0);
  CHECK(disc.cx == 10.0);
  CHECK(disc.cy == 10.0);
  const Raster mask = ppii::sample_circle_mask(rng, 20, 20, dist);
  double area = 0;
  for (double v : mask.values()) area += v;
  CHECK(area >= 69);
  CHECK(area <= 89);
  CHECK(area == 81);

  // Independent pixel count of the same disc.
  std::size_t count = 0;
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) count += (x - 10) * (x - 10) + (y - 10) * (y - 10) <= 25;
  CHECK(area == count);
}

TEST_CASE("disc containment over many draws") {
  auto rng = ppii::make_stream({4});
  std::uniform_int_distribution<std::size_t> side(6, 80);
  const ppii::MaskFractions fractions;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t w = side(rng), h = side(rng);
    const auto disc = ppii::sample_disc(rng, w, h, fractions.for_patch(w, h));
    CHECK(disc.radius >= 2.0);
    CHECK(disc.radius <= std::floor(std::min(w, h) / 2.0) - 1.0);
    CHECK(ring_clear(ppii::rasterize_disc(disc, w, h), w, h));
  }
}

TEST_CASE("inconsistent mask parameters") {
  auto rng = ppii::make_stream({5});
  CHECK_THROWS_AS(ppii::sample_disc(rng, 20, 20, {5.0, 0.0, 1.0, 10.0, 0.0, 0.0}), ppii::Error);
  try {
    ppii::sample_disc(rng, 20, 20, {50.0, 0.0, 10.0, 10.0, 0.0, 0.0});
  } catch (const ppii::Error& e) {
    CHECK(e.code() == ppii::ErrorCode::DegenerateDistribution);
  }
}

TEST_CASE("different seeds give different masks") {
  const ppii::MaskDistribution dist = ppii::MaskFractions{}.for_patch(40, 40);
  int differ = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    auto a = ppii::make_stream({s, 1});
    auto b = ppii::make_stream({s, 2});
    differ += ppii::sample_circle_mask(a, 40, 40, dist) != ppii::sample_circle_mask(b, 40, 40, dist);
  }
  CHECK(differ >= 99);
}

TEST_CASE("generation is deterministic and local") {
  const Raster target = fixtures::chest_like(160, 128, 1);
  const std::vector<Raster> sources = {fixtures::chest_like(160, 128, 2), fixtures::chest_like(160, 128, 3)};
  GeneratorConfig cfg;
  cfg.raters = 4;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto a = ppii::generate_anomalies(target, sources, cfg, {seed, 3});
    const auto b = ppii::generate_anomalies(target, sources, cfg, {seed, 3});
    CHECK(a.mean_image == b.mean_image);
    CHECK(a.variance_map == b.variance_map);
    CHECK(a.binary_mask == b.binary_mask);
    CHECK(a.anomaly_count >= cfg.k_min);
    CHECK(a.anomaly_count <= cfg.k_max);
    CHECK(a.anomalies.size() == a.anomaly_count);
    for (const auto& rec : a.anomalies) {
      CHECK(rec.raters.size() == 4);
      for (std::size_t r = 0; r < rec.raters.size(); ++r) CHECK(rec.raters[r].source_index == r % 2);
    }

    for (std::size_t y = 0; y < target.height(); ++y) {
      for (std::size_t x = 0; x < target.width(); ++x) {
        bool inside = false;
        for (const auto& rec : a.anomalies) inside |= rec.target.contains_interior(x, y);
        if (inside) continue;
        CHECK(a.mean_image.at(x, y) == target.at(x, y));
        CHECK(a.variance_map.at(x, y) == 0.0);
        CHECK(a.label_map.at(x, y) == 0.0);
      }
    }
    for (std::size_t p = 0; p < target.size(); ++p) {
      CHECK(a.label_map.values()[p] == std::abs(target.values()[p] - a.mean_image.values()[p]));
      CHECK(a.variance_map.values()[p] >= 0.0);
    }
  }
  const auto other = ppii::generate_anomalies(target, sources, cfg, {11, 3});
  CHECK(other.mean_image != ppii::generate_anomalies(target, sources, cfg, {12, 3}).mean_image);
}

TEST_CASE("single rater has zero variance") {
  const Raster target = fixtures::chest_like(128, 128, 4);
  const std::vector<Raster> sources = {fixtures::chest_like(128, 128, 5)};
  GeneratorConfig cfg;
  cfg.raters = 1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto b = ppii::generate_anomalies(target, sources, cfg, {seed, 0});
    CHECK(b.variance_map == Raster(128, 128, 0.0));
  }
}

TEST_CASE("self pairing with alpha zero leaves the target") {
  const Raster target = fixtures::chest_like(128, 128, 6);
  const std::vector<Raster> sources = {target};
  GeneratorConfig cfg;
  cfg.gain = 1.0;
  cfg.alpha_min = cfg.alpha_max = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto b = ppii::generate_anomalies(target, sources, cfg, {seed, 0});
    CHECK(b.label_map.max_value() <= 1e-6);
    CHECK(b.binary_mask.max_value() == 0.0);
  }
}

TEST_CASE("three disjoint anomalies give three components") {
  const Raster target(128, 128, 0.5);
  const std::vector<Raster> sources = {stripes(128, 128, 4)};
  GeneratorConfig cfg;
  cfg.gain = 3.0;
  cfg.alpha_min = cfg.alpha_max = 0.5;
  cfg.k_min = cfg.k_max = 3;
  cfg.raters = 1;
  cfg.disjoint = true;
  cfg.patch_frac_min = cfg.patch_frac_max = 0.2;
  cfg.mask.radius_mean = 0.3;
  cfg.mask.radius_sigma = 0.0;
  cfg.mask.center_sigma = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto b = ppii::generate_anomalies(target, sources, cfg, {seed, 0});
    CAPTURE(seed);
    CHECK(ppii::connected_components(b.binary_mask, 8).count == 3);
  }
}

TEST_CASE("generation errors") {
  const Raster target = fixtures::chest_like(128, 128, 7);
  GeneratorConfig cfg;
  CHECK_THROWS_AS(ppii::generate_anomalies(target, {}, cfg, {}), ppii::Error);
  const std::vector<Raster> wrong = {Raster(32, 128, 0.0)};
  CHECK_THROWS_WITH(ppii::generate_anomalies(target, wrong, cfg, {}), doctest::Contains("32x128"));
  cfg.k_min = 5;
  cfg.k_max = 2;
  CHECK_THROWS_AS(ppii::validate(cfg), ppii::Error);
}
