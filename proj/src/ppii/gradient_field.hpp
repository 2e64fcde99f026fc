#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ppii/raster.hpp"

namespace ppii {

// Rectangular patch h inside a host image. The outer one-pixel ring is the
// Dirichlet boundary; everything inside it is the solved interior.
struct PatchRegion {
  std::size_t x = 0;  // top-left column in the host image
  std::size_t y = 0;  // top-left row in the host image
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t interior_width() const noexcept { return width - 2; }
  std::size_t interior_height() const noexcept { return height - 2; }
  std::size_t boundary_length() const noexcept { return 2 * width + 2 * height - 4; }

  bool contains_interior(std::size_t px, std::size_t py) const noexcept {
    return px > x && py > y && px + 1 < x + width && py + 1 < y + height;
  }

  friend bool operator==(const PatchRegion&, const PatchRegion&) = default;
};

// Throws InvalidInput unless the region is at least 3x3 and lies inside a
// host of the given size.
void validate(const PatchRegion& region, std::size_t host_w, std::size_t host_h);

// Whether two regions share any pixel.
bool overlaps(const PatchRegion& a, const PatchRegion& b) noexcept;

// One 4-neighbour pair <p,q>, q to the right of or below p (patch-relative).
struct NeighborPair {
  std::size_t px, py, qx, qy;
};

std::size_t neighbor_pair_count(std::size_t width, std::size_t height) noexcept;

// Every unordered 4-neighbour pair exactly once: all horizontal pairs in
// row-major order, then all vertical pairs. Coordinates are patch-relative.
std::vector<NeighborPair> neighbor_pairs(const PatchRegion& region);

struct BlendParams {
  double alpha = 0.5;  // interpolation factor in [0,1]
  double gain = 1.0;   // source-gradient amplification, >= 1
};

void validate(const BlendParams& params);

// Guidance values v_pq = -v_qp stored once per unordered pair, oriented as
// (value at p) - (value at q) with q the right/lower neighbour.
class GuidanceField {
 public:
  GuidanceField(std::size_t width, std::size_t height);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }

  // Pair (x,y)-(x+1,y); x < width-1.
  double& horizontal(std::size_t x, std::size_t y) { return horizontal_[y * (width_ - 1) + x]; }
  double horizontal(std::size_t x, std::size_t y) const { return horizontal_[y * (width_ - 1) + x]; }
  // Pair (x,y)-(x,y+1); y < height-1.
  double& vertical(std::size_t x, std::size_t y) { return vertical_[y * width_ + x]; }
  double vertical(std::size_t x, std::size_t y) const { return vertical_[y * width_ + x]; }

  const std::vector<double>& horizontal_values() const noexcept { return horizontal_; }
  const std::vector<double>& vertical_values() const noexcept { return vertical_; }

  friend bool operator==(const GuidanceField&, const GuidanceField&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> horizontal_;  // height x (width-1)
  std::vector<double> vertical_;    // (height-1) x width
};

// The mixing rule for one pair, given target and source differences.
// The target branch wins only on a strict ">", the gain scales the source
// branch in both the comparison and the emitted value.
inline double select_gradient(double target_diff, double source_diff, const BlendParams& params) noexcept {
  const double from_target = (1.0 - params.alpha) * target_diff;
  const double from_source = params.gain * params.alpha * source_diff;
  return (from_target < 0 ? -from_target : from_target) > (from_source < 0 ? -from_source : from_source)
             ? from_target
             : from_source;
}

// Mixed, amplified guidance field over two equally sized patches. When a
// patch-sized `mask` is given (nonzero = inside), the mixing rule applies only
// to pairs with both pixels inside it; all other pairs carry the plain target
// gradient.
GuidanceField build_guidance_field(const Raster& target_patch, const Raster& source_patch,
                                   const BlendParams& params, const std::vector<std::uint8_t>* mask = nullptr);

// For every interior pixel p: sum over its four neighbours q of v_pq. With the
// field of a single image this is 4 f_p - sum_q f_q, the right-hand side of
// the discrete normal equations.
Raster divergence(const GuidanceField& field);

}  // namespace ppii
