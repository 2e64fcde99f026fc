#include "ppii/raster.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ppii/error.hpp"

namespace ppii {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::UndefinedMetric: return "UndefinedMetric";
    case ErrorCode::NoInputs: return "NoInputs";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

Raster::Raster(std::size_t width, std::size_t height, double fill)
    : width_(width), height_(height) {
  if (width == 0 || height == 0) fail(ErrorCode::InvalidInput, "raster dimensions must be >= 1");
  data_.assign(width * height, fill);
}

Raster::Raster(std::size_t width, std::size_t height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width == 0 || height == 0) fail(ErrorCode::InvalidInput, "raster dimensions must be >= 1");
  if (data_.size() != width * height) {
    fail(ErrorCode::InvalidInput, "raster data length " + std::to_string(data_.size()) +
                                      " does not match " + std::to_string(width) + "x" +
                                      std::to_string(height));
  }
}

double Raster::sample_bilinear(double x, double y) const {
  const double max_x = static_cast<double>(width_ - 1);
  const double max_y = static_cast<double>(height_ - 1);
  x = std::clamp(x, 0.0, max_x);
  y = std::clamp(y, 0.0, max_y);
  const auto x0 = static_cast<std::size_t>(std::floor(x));
  const auto y0 = static_cast<std::size_t>(std::floor(y));
  const std::size_t x1 = std::min(x0 + 1, width_ - 1);
  const std::size_t y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - static_cast<double>(x0);
  const double fy = y - static_cast<double>(y0);
  // Integer coordinates hit the grid exactly so identity warps are lossless.
  if (fx == 0.0 && fy == 0.0) return at(x0, y0);
  const double a = at(x0, y0), b = at(x1, y0), c = at(x0, y1), d = at(x1, y1);
  const double top = a + fx * (b - a);
  const double bottom = c + fx * (d - c);
  // Rounding must not push the result outside the corner hull.
  return std::clamp(top + fy * (bottom - top), std::min({a, b, c, d}), std::max({a, b, c, d}));
}

Raster Raster::crop(std::size_t x0, std::size_t y0, std::size_t w, std::size_t h) const {
  if (x0 + w > width_ || y0 + h > height_) fail(ErrorCode::InvalidInput, "crop window outside raster");
  Raster out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    const auto src = data_.begin() + static_cast<std::ptrdiff_t>((y0 + y) * width_ + x0);
    std::copy(src, src + static_cast<std::ptrdiff_t>(w), out.data_.begin() + static_cast<std::ptrdiff_t>(y * w));
  }
  return out;
}

double Raster::min_value() const {
  if (data_.empty()) fail(ErrorCode::InvalidInput, "empty raster");
  return *std::min_element(data_.begin(), data_.end());
}

double Raster::max_value() const {
  if (data_.empty()) fail(ErrorCode::InvalidInput, "empty raster");
  return *std::max_element(data_.begin(), data_.end());
}

Raster normalize(const Raster& img) {
  if (img.empty()) fail(ErrorCode::InvalidInput, "normalize: empty raster");
  const auto [lo_it, hi_it] = std::minmax_element(img.values().begin(), img.values().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  Raster out(img.width(), img.height(), 0.0);
  if (hi == lo) return out;
  const double range = hi - lo;
  auto dst = out.values().begin();
  for (double v : img.values()) *dst++ = (v - lo) / range;
  return out;
}

Raster equalize_histogram(const Raster& img, std::size_t bins) {
  if (img.empty()) fail(ErrorCode::InvalidInput, "equalize: empty raster");
  if (bins < 2) fail(ErrorCode::InvalidInput, "equalize: bins must be >= 2");
  const double top = static_cast<double>(bins - 1);
  auto level = [&](double v) {
    const double q = std::nearbyint(std::clamp(v, 0.0, 1.0) * top);
    return static_cast<std::size_t>(q);
  };

  std::vector<std::size_t> cdf(bins, 0);
  for (double v : img.values()) ++cdf[level(v)];
  std::size_t cdf_min = 0;
  for (std::size_t b = 0, running = 0; b < bins; ++b) {
    running += cdf[b];
    if (cdf_min == 0 && running > 0) cdf_min = running;
    cdf[b] = running;
  }
  const std::size_t n = img.size();
  if (cdf_min == n) return img;

  const double denom = static_cast<double>(n - cdf_min);
  std::vector<double> lut(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    lut[b] = cdf[b] < cdf_min ? 0.0 : static_cast<double>(cdf[b] - cdf_min) / denom;
  }
  Raster out(img.width(), img.height());
  auto dst = out.values().begin();
  for (double v : img.values()) *dst++ = lut[level(v)];
  return out;
}

Raster resize_bilinear(const Raster& img, std::size_t new_w, std::size_t new_h) {
  if (img.empty()) fail(ErrorCode::InvalidInput, "resize: empty raster");
  if (new_w == 0 || new_h == 0) fail(ErrorCode::InvalidInput, "resize: target dimensions must be >= 1");
  if (new_w == img.width() && new_h == img.height()) return img;
  const double sx = static_cast<double>(img.width()) / static_cast<double>(new_w);
  const double sy = static_cast<double>(img.height()) / static_cast<double>(new_h);
  Raster out(new_w, new_h);
  for (std::size_t y = 0; y < new_h; ++y) {
    const double src_y = (static_cast<double>(y) + 0.5) * sy - 0.5;
    for (std::size_t x = 0; x < new_w; ++x) {
      const double src_x = (static_cast<double>(x) + 0.5) * sx - 0.5;
      out.at(x, y) = img.sample_bilinear(src_x, src_y);
    }
  }
  return out;
}

}  // namespace ppii
