#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ppii {

// Row-major grayscale grid. Intensities are kept as doubles, nominally in
// [0,1] once normalised, independent of the on-disk bit depth.
class Raster {
 public:
  Raster() = default;
  Raster(std::size_t width, std::size_t height, double fill = 0.0);
  Raster(std::size_t width, std::size_t height, std::vector<double> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& at(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  double at(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  // Edge-clamped bilinear sample at continuous pixel coordinates.
  double sample_bilinear(double x, double y) const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  // Copy of the w x h window whose top-left corner is (x0, y0).
  Raster crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const;

  double min_value() const;
  double max_value() const;

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> data_;
};

// Linear rescale to [0,1]; constant images map to all zeros.
Raster normalize(const Raster& img);

// Global-cdf histogram equalisation on `bins` quantisation levels:
//   h(v) = (cdf(b(v)) - cdf_min) / (N - cdf_min),  b(v) = round(v * (bins - 1)).
// A constant image is returned unchanged.
Raster equalize_histogram(const Raster& img, std::size_t bins = 256);

// Bilinear resampling with pixel-centre alignment and edge clamping.
Raster resize_bilinear(const Raster& img, std::size_t new_w, std::size_t new_h);

}  // namespace ppii
