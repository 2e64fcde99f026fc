#include "support/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "ppii/error.hpp"
#include "ppii/image_io.hpp"

namespace fs = std::filesystem;

namespace fixtures {

ppii::Raster chest_like(std::size_t w, std::size_t h, std::uint64_t seed) {
  ppii::SeededStream rng = ppii::make_stream({seed, 0x63686573});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.02);

  struct Blob {
    double x, y, r, amp;
  };
  std::vector<Blob> blobs(3 + static_cast<std::size_t>(u(rng) * 3));
  for (auto& b : blobs) b = {u(rng) * w, u(rng) * h, (0.04 + 0.08 * u(rng)) * w, 0.1 + 0.2 * u(rng)};
  const double rib_period = (0.08 + 0.04 * u(rng)) * h;
  const double rib_phase = u(rng) * 2.0 * std::numbers::pi;

  ppii::Raster img(w, h, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double nx = (x + 0.5) / w - 0.5;
      const double ny = (y + 0.5) / h - 0.5;
      double v = 0.3 + 0.4 * std::exp(-(nx * nx + ny * ny) / 0.08);
      v += 0.08 * std::sin(2.0 * std::numbers::pi * y / rib_period + rib_phase + 3.0 * nx * nx);
      for (const auto& b : blobs) {
        const double dx = x - b.x, dy = y - b.y;
        v += b.amp * std::exp(-(dx * dx + dy * dy) / (2.0 * b.r * b.r));
      }
      img.at(x, y) = v + noise(rng);
    }
  }
  return ppii::normalize(img);
}

void write_folder(const fs::path& dir, std::size_t count, std::size_t w, std::size_t h, std::uint64_t seed) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "img_%03zu.png", i);
    ppii::save_image(chest_like(w, h, seed * 1000 + i), dir / name, 16);
  }
}

ppii::DirichletProblem random_problem(ppii::SeededStream& rng, std::size_t nx, std::size_t ny) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ppii::DirichletProblem prob{ppii::Raster(nx, ny, 0.0), {}, {0, 0, nx + 2, ny + 2}};
  for (double& v : prob.interior_rhs.values()) v = u(rng);
  prob.boundary.resize(2 * (nx + 2) + 2 * ny);
  for (double& v : prob.boundary) v = u(rng);
  return prob;
}

ppii::DirichletProblem random_harmonic(ppii::SeededStream& rng, std::size_t nx, std::size_t ny, double lo,
                                       double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  ppii::DirichletProblem prob{ppii::Raster(nx, ny, 0.0), {}, {0, 0, nx + 2, ny + 2}};
  prob.boundary.resize(2 * (nx + 2) + 2 * ny);
  for (double& v : prob.boundary) v = u(rng);
  return prob;
}

ppii::Raster dense_solve(const ppii::DirichletProblem& prob) {
  const std::size_t nx = prob.region.width - 2, ny = prob.region.height - 2, n = nx * ny;
  const std::size_t w = prob.region.width, h = prob.region.height;
  // Ring values by patch coordinate, following the documented ring order.
  ppii::Raster ring(w, h, 0.0);
  std::size_t k = 0;
  for (std::size_t x = 0; x < w; ++x) ring.at(x, 0) = prob.boundary[k++];
  for (std::size_t x = 0; x < w; ++x) ring.at(x, h - 1) = prob.boundary[k++];
  for (std::size_t y = 1; y + 1 < h; ++y) ring.at(0, y) = prob.boundary[k++];
  for (std::size_t y = 1; y + 1 < h; ++y) ring.at(w - 1, y) = prob.boundary[k++];

  std::vector<double> a(n * n, 0.0), b(n, 0.0);
  for (std::size_t y = 0; y < ny; ++y) {
    for (std::size_t x = 0; x < nx; ++x) {
      const std::size_t row = y * nx + x;
      a[row * n + row] = 4.0;
      b[row] = prob.interior_rhs.at(x, y);
      const long dx[4] = {-1, 1, 0, 0}, dy[4] = {0, 0, -1, 1};
      for (int d = 0; d < 4; ++d) {
        const long qx = static_cast<long>(x) + dx[d], qy = static_cast<long>(y) + dy[d];
        if (qx < 0 || qy < 0 || qx >= static_cast<long>(nx) || qy >= static_cast<long>(ny))
          b[row] += ring.at(qx + 1, qy + 1);
        else
          a[row * n + qy * nx + qx] = -1.0;
      }
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      if (f == 0.0) continue;
      for (std::size_t j = c; j < n; ++j) a[r * n + j] -= f * a[c * n + j];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return ppii::Raster(nx, ny, std::move(x));
}

ppii::Raster random_raster(ppii::SeededStream& rng, std::size_t w, std::size_t h) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ppii::Raster r(w, h, 0.0);
  for (double& v : r.values()) v = u(rng);
  return r;
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ppii_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[entry.path().filename().string()] = ss.str();
  }
  return files;
}

double max_abs_diff(const ppii::Raster& a, const ppii::Raster& b) {
  if (!a.same_shape(b)) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace fixtures
