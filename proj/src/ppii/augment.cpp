#include "ppii/augment.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "ppii/error.hpp"

namespace ppii {

namespace {

// Dense per-pixel displacement obtained by bilinear upsampling of a coarse
// grid of N(0, sigma) node displacements.
struct DisplacementField {
  std::vector<double> dx, dy;
};

DisplacementField make_displacement(std::size_t w, std::size_t h, const ElasticSpec& es) {
  DisplacementField field{std::vector<double>(w * h, 0.0), std::vector<double>(w * h, 0.0)};
  if (es.displacement_sigma == 0.0) return field;

  const auto nodes_x = static_cast<std::size_t>(std::ceil(static_cast<double>(w - 1) / es.grid_spacing)) + 1;
  const auto nodes_y = static_cast<std::size_t>(std::ceil(static_cast<double>(h - 1) / es.grid_spacing)) + 1;
  std::mt19937_64 rng(es.seed);
  std::normal_distribution<double> normal(0.0, es.displacement_sigma);
  Raster coarse_x(nodes_x, nodes_y), coarse_y(nodes_x, nodes_y);
  for (double& v : coarse_x.values()) v = normal(rng);
  for (double& v : coarse_y.values()) v = normal(rng);

  for (std::size_t y = 0; y < h; ++y) {
    const double gy = static_cast<double>(y) / es.grid_spacing;
    for (std::size_t x = 0; x < w; ++x) {
      const double gx = static_cast<double>(x) / es.grid_spacing;
      field.dx[y * w + x] = coarse_x.sample_bilinear(gx, gy);
      field.dy[y * w + x] = coarse_y.sample_bilinear(gx, gy);
    }
  }
  return field;
}

bool is_identity(const AugmentSpec& spec) {
  const bool still = !spec.elastic || spec.elastic->displacement_sigma == 0.0;
  return spec.rotation_degrees == 0.0 && spec.scale_factor == 1.0 && still;
}

}  // namespace

void validate(const AugmentSpec& spec, const AugmentRanges& ranges) {
  if (!(std::abs(spec.rotation_degrees) <= ranges.max_rotation_degrees)) {
    fail(ErrorCode::InvalidInput, "augment: rotation outside +-" + std::to_string(ranges.max_rotation_degrees));
  }
  if (!(spec.scale_factor > 0.0)) fail(ErrorCode::InvalidInput, "augment: scale factor must be > 0");
  if (spec.elastic) {
    if (!(spec.elastic->grid_spacing >= 1.0)) fail(ErrorCode::InvalidInput, "augment: elastic grid spacing must be >= 1");
    if (!(spec.elastic->displacement_sigma >= 0.0)) fail(ErrorCode::InvalidInput, "augment: elastic sigma must be >= 0");
  }
}

Raster augment(const Raster& img, const AugmentSpec& spec) {
  if (img.empty()) fail(ErrorCode::InvalidInput, "augment: empty raster");
  if (!(spec.scale_factor > 0.0)) fail(ErrorCode::InvalidInput, "augment: scale factor must be > 0");
  if (is_identity(spec)) return img;

  const std::size_t w = img.width();
  const std::size_t h = img.height();
  const double cx = static_cast<double>(w - 1) / 2.0;
  const double cy = static_cast<double>(h - 1) / 2.0;
  const double theta = spec.rotation_degrees * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double inv_scale = 1.0 / spec.scale_factor;

  DisplacementField disp;
  if (spec.elastic) disp = make_displacement(w, h, *spec.elastic);

  Raster out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double px = static_cast<double>(x) - cx;
      const double py = static_cast<double>(y) - cy;
      // Inverse of "rotate by theta, then scale" about the centre.
      double sx = (c * px + s * py) * inv_scale + cx;
      double sy = (-s * px + c * py) * inv_scale + cy;
      if (!disp.dx.empty()) {
        sx += disp.dx[y * w + x];
        sy += disp.dy[y * w + x];
      }
      out.at(x, y) = img.sample_bilinear(sx, sy);
    }
  }
  return out;
}

AugmentSpec sample_augment_spec(std::mt19937_64& rng, AugmentMode mode, const AugmentRanges& ranges) {
  AugmentSpec spec;
  if (mode == AugmentMode::None) return spec;
  std::uniform_real_distribution<double> scale(ranges.scale_min, ranges.scale_max);
  spec.scale_factor = scale(rng);
  if (mode == AugmentMode::Combined) {
    std::uniform_real_distribution<double> rot(-ranges.max_rotation_degrees, ranges.max_rotation_degrees);
    spec.rotation_degrees = rot(rng);
    spec.elastic = ElasticSpec{ranges.elastic_grid_spacing, ranges.elastic_sigma, rng()};
  }
  return spec;
}

}  // namespace ppii
