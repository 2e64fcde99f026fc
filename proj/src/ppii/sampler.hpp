#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ppii/gradient_field.hpp"
#include "ppii/poisson.hpp"
#include "ppii/raster.hpp"
#include "ppii/rng.hpp"

namespace ppii {

// Normal distributions for the circular mask, in patch-relative pixels.
struct MaskDistribution {
  double radius_mean = 5.0;
  double radius_sigma = 0.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double center_sigma_x = 0.0;
  double center_sigma_y = 0.0;
};

// Mask parameters as fractions of the patch size.
struct MaskFractions {
  double radius_mean = 0.25;    // of min(patch w, h)
  double radius_sigma = 0.125;  // of min(patch w, h)
  double center_x = 0.5;        // of patch w
  double center_y = 0.5;        // of patch h
  double center_sigma = 0.125;  // of the respective patch side

  MaskDistribution for_patch(std::size_t w, std::size_t h) const;
};

struct GeneratorConfig {
  double patch_frac_min = 0.06;
  double patch_frac_max = 0.25;
  double alpha_min = 0.05;
  double alpha_max = 0.95;
  double gain = 2.0;
  std::size_t k_min = 1;
  std::size_t k_max = 4;
  std::size_t raters = 8;
  MaskFractions mask;
  double label_threshold = 0.05;
  std::uint64_t seed = 0;
  bool disjoint = false;  // retry target placements (up to 100) until patches do not overlap
  SolverBackend backend = SolverBackend::Dst;
};

void validate(const GeneratorConfig& cfg);

struct PatchPlacement {
  PatchRegion target;
  PatchRegion source;
};

// Side lengths ~ U[frac_min, frac_max] * image side per axis; both placements
// uniform over positions that keep a one-pixel margin to the image border.
PatchPlacement sample_patch_spec(SeededStream& rng, std::size_t image_w, std::size_t image_h,
                                 const GeneratorConfig& cfg);

std::pair<std::size_t, std::size_t> sample_patch_size(SeededStream& rng, std::size_t image_w, std::size_t image_h,
                                                      const GeneratorConfig& cfg);
PatchRegion sample_placement(SeededStream& rng, std::size_t image_w, std::size_t image_h, std::size_t patch_w,
                             std::size_t patch_h);

struct Disc {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

// Pixels (u,v) with (u-cx)^2 + (v-cy)^2 <= r^2, as a w x h 0/1 mask.
std::vector<std::uint8_t> rasterize_disc(const Disc& disc, std::size_t w, std::size_t h);

// Draws r, clamped to [2, floor(min(w,h)/2) - 1], then rejection-samples
// (x,y) until the disc stays off the patch's outer ring. Throws
// DegenerateDistribution after 1000 consecutive rejections or when the patch
// is too small for any disc.
Disc sample_disc(SeededStream& rng, std::size_t patch_w, std::size_t patch_h, const MaskDistribution& dist);

Raster sample_circle_mask(SeededStream& rng, std::size_t patch_w, std::size_t patch_h, const MaskDistribution& dist);

struct RaterDraw {
  std::size_t source_index = 0;
  PatchRegion source;
  double alpha = 0.0;
  Disc disc;  // patch-relative
};

struct AnomalyRecord {
  PatchRegion target;
  std::vector<RaterDraw> raters;
};

struct AnomalyBundle {
  Raster mean_image;
  Raster variance_map;
  Raster label_map;
  Raster binary_mask;
  std::size_t anomaly_count = 0;
  std::vector<AnomalyRecord> anomalies;
  double max_residual = 0.0;
};

// Identifies one image's job; every random draw is taken from a stream keyed
// by (seed, image_index, anomaly_index, rater_index).
struct JobKey {
  std::uint64_t seed = 0;
  std::uint64_t image_index = 0;
};

// Composes k anomalies into N rater copies of `target` and aggregates them:
// mean, population variance, |target - mean| and its thresholded mask.
AnomalyBundle generate_anomalies(const Raster& target, std::span<const Raster> sources, const GeneratorConfig& cfg,
                                 JobKey key);

// Union of every rater disc of every anomaly, in image coordinates.
Raster anomaly_footprint(const AnomalyBundle& bundle, std::size_t w, std::size_t h);

}  // namespace ppii
