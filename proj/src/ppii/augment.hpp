#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "ppii/raster.hpp"

namespace ppii {

struct ElasticSpec {
  double grid_spacing = 32.0;        // pixels between displacement nodes
  double displacement_sigma = 4.0;   // pixels
  std::uint64_t seed = 0;
};

struct AugmentSpec {
  double rotation_degrees = 0.0;  // within +-10
  double scale_factor = 1.0;
  std::optional<ElasticSpec> elastic;
};

enum class AugmentMode { None, Scaling, Combined };

struct AugmentRanges {
  double max_rotation_degrees = 10.0;
  double scale_min = 0.9;
  double scale_max = 1.1;
  double elastic_grid_spacing = 32.0;
  double elastic_sigma = 4.0;
};

void validate(const AugmentSpec& spec, const AugmentRanges& ranges = {});

// Rotation about the centre, scaling about the centre and an elastic
// displacement field, composed into a single backward warp with bilinear
// sampling and edge clamping. The output keeps the input size.
Raster augment(const Raster& img, const AugmentSpec& spec);

// Draws an AugmentSpec for `mode`: Scaling varies only the scale factor,
// Combined adds rotation and elastic deformation.
AugmentSpec sample_augment_spec(std::mt19937_64& rng, AugmentMode mode, const AugmentRanges& ranges = {});

}  // namespace ppii
