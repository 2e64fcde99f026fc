#include "ppii/gradient_field.hpp"

#include <cmath>
#include <string>

#include "ppii/error.hpp"

namespace ppii {

void validate(const PatchRegion& region, std::size_t host_w, std::size_t host_h) {
  if (region.width < 3 || region.height < 3) {
    fail(ErrorCode::InvalidInput, "patch must be at least 3x3, got " + std::to_string(region.width) + "x" +
                                      std::to_string(region.height));
  }
  if (region.x + region.width > host_w || region.y + region.height > host_h) {
    fail(ErrorCode::InvalidInput, "patch (" + std::to_string(region.x) + "," + std::to_string(region.y) + "," +
                                      std::to_string(region.width) + "," + std::to_string(region.height) +
                                      ") exceeds host " + std::to_string(host_w) + "x" + std::to_string(host_h));
  }
}

bool overlaps(const PatchRegion& a, const PatchRegion& b) noexcept {
  return a.x < b.x + b.width && b.x < a.x + a.width && a.y < b.y + b.height && b.y < a.y + a.height;
}

std::size_t neighbor_pair_count(std::size_t width, std::size_t height) noexcept {
  return height * (width - 1) + (height - 1) * width;
}

std::vector<NeighborPair> neighbor_pairs(const PatchRegion& region) {
  validate(region, region.x + region.width, region.y + region.height);
  std::vector<NeighborPair> pairs;
  pairs.reserve(neighbor_pair_count(region.width, region.height));
  for (std::size_t y = 0; y < region.height; ++y)
    for (std::size_t x = 0; x + 1 < region.width; ++x) pairs.push_back({x, y, x + 1, y});
  for (std::size_t y = 0; y + 1 < region.height; ++y)
    for (std::size_t x = 0; x < region.width; ++x) pairs.push_back({x, y, x, y + 1});
  return pairs;
}

void validate(const BlendParams& params) {
  if (!(params.alpha >= 0.0 && params.alpha <= 1.0)) fail(ErrorCode::InvalidInput, "alpha must lie in [0,1]");
  if (!(params.gain >= 1.0) || !std::isfinite(params.gain)) fail(ErrorCode::InvalidInput, "gain must be >= 1");
}

GuidanceField::GuidanceField(std::size_t width, std::size_t height)
    : width_(width),
      height_(height),
      horizontal_(height * (width - 1), 0.0),
      vertical_((height - 1) * width, 0.0) {
  if (width < 3 || height < 3) fail(ErrorCode::InvalidInput, "guidance field needs a patch of at least 3x3");
}

GuidanceField build_guidance_field(const Raster& target_patch, const Raster& source_patch,
                                   const BlendParams& params, const std::vector<std::uint8_t>* mask) {
  if (!target_patch.same_shape(source_patch)) {
    fail(ErrorCode::InvalidInput, "guidance field: target patch " + std::to_string(target_patch.width()) + "x" +
                                      std::to_string(target_patch.height()) + " vs source patch " +
                                      std::to_string(source_patch.width()) + "x" +
                                      std::to_string(source_patch.height()));
  }
  validate(params);
  const std::size_t w = target_patch.width();
  const std::size_t h = target_patch.height();
  if (mask && mask->size() != w * h) fail(ErrorCode::InvalidInput, "guidance field: mask size mismatch");

  auto mixed = [&](std::size_t ax, std::size_t ay, std::size_t bx, std::size_t by) {
    return !mask || ((*mask)[ay * w + ax] != 0 && (*mask)[by * w + bx] != 0);
  };

  GuidanceField field(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x + 1 < w; ++x) {
      const double dt = target_patch.at(x, y) - target_patch.at(x + 1, y);
      field.horizontal(x, y) =
          mixed(x, y, x + 1, y) ? select_gradient(dt, source_patch.at(x, y) - source_patch.at(x + 1, y), params) : dt;
    }
  }
  for (std::size_t y = 0; y + 1 < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double dt = target_patch.at(x, y) - target_patch.at(x, y + 1);
      field.vertical(x, y) =
          mixed(x, y, x, y + 1) ? select_gradient(dt, source_patch.at(x, y) - source_patch.at(x, y + 1), params) : dt;
    }
  }
  return field;
}

Raster divergence(const GuidanceField& field) {
  const std::size_t iw = field.width() - 2;
  const std::size_t ih = field.height() - 2;
  Raster out(iw, ih);
  for (std::size_t j = 0; j < ih; ++j) {
    const std::size_t y = j + 1;
    for (std::size_t i = 0; i < iw; ++i) {
      const std::size_t x = i + 1;
      out.at(i, j) = field.horizontal(x, y) - field.horizontal(x - 1, y) + field.vertical(x, y) -
                     field.vertical(x, y - 1);
    }
  }
  return out;
}

}  // namespace ppii
