#include "ppii/poisson.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "ppii/error.hpp"

namespace ppii {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::size_t ring_top(std::size_t x) { return x; }
std::size_t ring_bottom(std::size_t w, std::size_t x) { return w + x; }
std::size_t ring_left(std::size_t w, std::size_t y) { return 2 * w + (y - 1); }
std::size_t ring_right(std::size_t w, std::size_t h, std::size_t y) { return 2 * w + (h - 2) + (y - 1); }

// y = A x for the 5-point operator with zero Dirichlet data.
void apply_laplacian(const std::vector<double>& x, std::vector<double>& y, std::size_t nx, std::size_t ny) {
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      double v = 4.0 * x[k];
      if (i > 0) v -= x[k - 1];
      if (i + 1 < nx) v -= x[k + 1];
      if (j > 0) v -= x[k - nx];
      if (j + 1 < ny) v -= x[k + nx];
      y[k] = v;
    }
  }
}

struct FftwFree {
  void operator()(double* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<double[], FftwFree>;

FftwBuffer fftw_buffer(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (!p) fail(ErrorCode::Internal, "fftw_malloc failed");
  return FftwBuffer(p);
}

// The FFTW planner is not reentrant; plans are created once per interior
// shape under a lock and then executed concurrently through the new-array
// interface, which is thread-safe.
fftw_plan dst_plan(std::size_t nx, std::size_t ny) {
  static std::mutex mutex;
  static std::map<std::pair<std::size_t, std::size_t>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  auto& plan = plans[{nx, ny}];
  if (!plan) {
    FftwBuffer in = fftw_buffer(nx * ny);
    FftwBuffer out = fftw_buffer(nx * ny);
    plan = fftw_plan_r2r_2d(static_cast<int>(ny), static_cast<int>(nx), in.get(), out.get(), FFTW_RODFT00,
                            FFTW_RODFT00, FFTW_ESTIMATE);
    if (!plan) fail(ErrorCode::Internal, "fftw could not plan a " + std::to_string(nx) + "x" + std::to_string(ny) + " DST");
  }
  return plan;
}

}  // namespace

std::string_view to_string(SolverBackend backend) noexcept {
  switch (backend) {
    case SolverBackend::Direct: return "direct";
    case SolverBackend::Dst: return "dst";
    case SolverBackend::Cg: return "cg";
  }
  return "unknown";
}

SolverBackend parse_backend(std::string_view name) {
  if (name == "direct") return SolverBackend::Direct;
  if (name == "dst") return SolverBackend::Dst;
  if (name == "cg") return SolverBackend::Cg;
  fail(ErrorCode::InvalidInput, "unknown solver backend '" + std::string(name) + "' (expected direct, dst or cg)");
}

std::vector<double> extract_boundary(const Raster& patch) {
  const std::size_t w = patch.width();
  const std::size_t h = patch.height();
  if (w < 3 || h < 3) fail(ErrorCode::InvalidInput, "patch must be at least 3x3");
  std::vector<double> ring(2 * w + 2 * h - 4);
  for (std::size_t x = 0; x < w; ++x) {
    ring[ring_top(x)] = patch.at(x, 0);
    ring[ring_bottom(w, x)] = patch.at(x, h - 1);
  }
  for (std::size_t y = 1; y + 1 < h; ++y) {
    ring[ring_left(w, y)] = patch.at(0, y);
    ring[ring_right(w, h, y)] = patch.at(w - 1, y);
  }
  return ring;
}

DirichletProblem DirichletProblem::from_field(const Raster& target_patch, const GuidanceField& field,
                                              PatchRegion region) {
  if (field.width() != target_patch.width() || field.height() != target_patch.height()) {
    fail(ErrorCode::InvalidInput, "guidance field does not match the target patch");
  }
  return {divergence(field), extract_boundary(target_patch), region};
}

void validate(const DirichletProblem& prob) {
  const PatchRegion& r = prob.region;
  if (r.width < 3 || r.height < 3) fail(ErrorCode::InvalidInput, "Dirichlet region must be at least 3x3");
  if (prob.interior_rhs.width() != r.interior_width() || prob.interior_rhs.height() != r.interior_height()) {
    fail(ErrorCode::InvalidInput, "interior rhs is " + std::to_string(prob.interior_rhs.width()) + "x" +
                                      std::to_string(prob.interior_rhs.height()) + ", region interior is " +
                                      std::to_string(r.interior_width()) + "x" + std::to_string(r.interior_height()));
  }
  if (prob.boundary.size() != r.boundary_length()) {
    fail(ErrorCode::InvalidInput, "boundary ring has " + std::to_string(prob.boundary.size()) + " values, expected " +
                                      std::to_string(r.boundary_length()));
  }
}

Raster fold_boundary(const DirichletProblem& prob) {
  validate(prob);
  const std::size_t w = prob.region.width;
  const std::size_t h = prob.region.height;
  const std::size_t nx = w - 2;
  const std::size_t ny = h - 2;
  Raster b = prob.interior_rhs;
  for (std::size_t j = 0; j < ny; ++j) {
    b.at(0, j) += prob.boundary[ring_left(w, j + 1)];
    b.at(nx - 1, j) += prob.boundary[ring_right(w, h, j + 1)];
  }
  for (std::size_t i = 0; i < nx; ++i) {
    b.at(i, 0) += prob.boundary[ring_top(i + 1)];
    b.at(i, ny - 1) += prob.boundary[ring_bottom(w, i + 1)];
  }
  return b;
}

double residual_norm(const DirichletProblem& prob, const Raster& interior) {
  const Raster b = fold_boundary(prob);
  if (!interior.same_shape(b)) fail(ErrorCode::InvalidInput, "solution does not match the problem interior");
  std::vector<double> ax(b.size());
  apply_laplacian(interior.values(), ax, b.width(), b.height());
  double worst = 0.0;
  for (std::size_t k = 0; k < ax.size(); ++k) worst = std::max(worst, std::abs(ax[k] - b.values()[k]));
  return worst;
}

SolveResult solve_direct(const DirichletProblem& prob, const DirectOptions& opts) {
  const auto start = Clock::now();
  const Raster b = fold_boundary(prob);
  const std::size_t nx = b.width();
  const std::size_t ny = b.height();
  const std::size_t n = nx * ny;
  if (n > opts.max_unknowns) {
    fail(ErrorCode::CapExceeded, "direct solver cap of " + std::to_string(opts.max_unknowns) +
                                     " unknowns exceeded by a " + std::to_string(nx) + "x" + std::to_string(ny) +
                                     " interior; use the dst backend");
  }

  // Order unknowns along the shorter side so the half-bandwidth is minimal.
  const bool transposed = ny < nx;
  const std::size_t run = transposed ? ny : nx;  // unknowns per line = bandwidth
  const std::size_t lines = transposed ? nx : ny;
  auto index_of = [&](std::size_t i, std::size_t j) { return transposed ? i * ny + j : j * nx + i; };

  const std::size_t bw = run;
  const std::size_t stride = bw + 1;
  // L(k, c) lives at k*stride + (c - k + bw) for k - bw <= c <= k.
  std::vector<double> L(n * stride, 0.0);
  auto a_entry = [&](std::size_t k, std::size_t c) -> double {
    if (k == c) return 4.0;
    const std::size_t d = k - c;
    if (d == 1 && k % run != 0) return -1.0;
    if (d == run) return -1.0;
    return 0.0;
  };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t first = k >= bw ? k - bw : 0;
    double* lk = &L[k * stride + bw - k];  // lk[c] == L(k, c)
    for (std::size_t c = first; c <= k; ++c) {
      const double* lc = &L[c * stride + bw - c];
      const std::size_t lo = std::max(first, c >= bw ? c - bw : 0);
      double s = a_entry(k, c);
      for (std::size_t m = lo; m < c; ++m) s -= lk[m] * lc[m];
      if (c == k) {
        if (!(s > 0.0)) fail(ErrorCode::Internal, "direct solver: matrix not positive definite");
        lk[k] = std::sqrt(s);
      } else {
        lk[c] = s / lc[c];
      }
    }
  }

  std::vector<double> z(n);
  for (std::size_t j = 0; j < lines; ++j)
    for (std::size_t i = 0; i < run; ++i) {
      const std::size_t k = j * run + i;
      z[k] = transposed ? b.at(j, i) : b.at(i, j);
    }
  for (std::size_t k = 0; k < n; ++k) {
    const double* lk = &L[k * stride + bw - k];
    const std::size_t first = k >= bw ? k - bw : 0;
    double s = z[k];
    for (std::size_t m = first; m < k; ++m) s -= lk[m] * z[m];
    z[k] = s / lk[k];
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = z[k];
    const std::size_t last = std::min(n - 1, k + bw);
    for (std::size_t r = k + 1; r <= last; ++r) s -= L[r * stride + bw - r + k] * z[r];
    z[k] = s / L[k * stride + bw];
  }

  Raster x(nx, ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) x.at(i, j) = z[index_of(i, j)];

  SolverReport report{SolverBackend::Direct, residual_norm(prob, x), 0.0, 0};
  report.wall_time = seconds_since(start);
  return {std::move(x), report};
}

SolveResult solve_dst(const DirichletProblem& prob) {
  const auto start = Clock::now();
  const Raster b = fold_boundary(prob);
  const std::size_t nx = b.width();
  const std::size_t ny = b.height();
  const std::size_t n = nx * ny;

  fftw_plan plan = dst_plan(nx, ny);
  FftwBuffer work = fftw_buffer(n);
  FftwBuffer spectrum = fftw_buffer(n);
  std::copy(b.values().begin(), b.values().end(), work.get());
  fftw_execute_r2r(plan, work.get(), spectrum.get());

  std::vector<double> lambda_x(nx), lambda_y(ny);
  for (std::size_t i = 0; i < nx; ++i)
    lambda_x[i] = 2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(i + 1) / static_cast<double>(nx + 1));
  for (std::size_t j = 0; j < ny; ++j)
    lambda_y[j] = 2.0 - 2.0 * std::cos(std::numbers::pi * static_cast<double>(j + 1) / static_cast<double>(ny + 1));
  // Unnormalised DST-I applied twice scales by 2(n+1) per axis.
  const double scale = 1.0 / (4.0 * static_cast<double>(nx + 1) * static_cast<double>(ny + 1));
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) spectrum[j * nx + i] *= scale / (lambda_x[i] + lambda_y[j]);

  fftw_execute_r2r(plan, spectrum.get(), work.get());
  Raster x(nx, ny, std::vector<double>(work.get(), work.get() + n));

  SolverReport report{SolverBackend::Dst, residual_norm(prob, x), 0.0, 0};
  report.wall_time = seconds_since(start);
  return {std::move(x), report};
}

SolveResult solve_cg(const DirichletProblem& prob, const CgOptions& opts) {
  const auto start = Clock::now();
  const Raster b = fold_boundary(prob);
  const std::size_t nx = b.width();
  const std::size_t ny = b.height();
  const std::size_t n = nx * ny;

  std::vector<double> x(n, 0.0), r = b.values(), p = r, ap(n);
  auto dot = [](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
    return s;
  };
  const double b_norm = std::sqrt(dot(r, r));
  double rr = b_norm * b_norm;
  const double stop = opts.relative_tolerance * (b_norm > 0.0 ? b_norm : 1.0);
  std::size_t it = 0;
  while (std::sqrt(rr) > stop && it < opts.max_iterations) {
    apply_laplacian(p, ap, nx, ny);
    const double step = rr / dot(p, ap);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += step * p[k];
      r[k] -= step * ap[k];
    }
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    for (std::size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    rr = rr_next;
    ++it;
  }

  Raster sol(nx, ny, std::move(x));
  SolverReport report{SolverBackend::Cg, residual_norm(prob, sol), 0.0, it};
  report.wall_time = seconds_since(start);
  return {std::move(sol), report};
}

SolveResult solve(const DirichletProblem& prob, SolverBackend backend) {
  switch (backend) {
    case SolverBackend::Direct: return solve_direct(prob);
    case SolverBackend::Dst: return solve_dst(prob);
    case SolverBackend::Cg: return solve_cg(prob);
  }
  fail(ErrorCode::InvalidInput, "unknown solver backend");
}

void blend_patch_into(Raster& canvas, const Raster& source, const PatchRegion& region,
                      const PatchRegion& source_region, const BlendParams& params, const BlendOptions& opts) {
  if (region.width != source_region.width || region.height != source_region.height) {
    fail(ErrorCode::InvalidInput, "blend: target region " + std::to_string(region.width) + "x" +
                                      std::to_string(region.height) + " vs source region " +
                                      std::to_string(source_region.width) + "x" + std::to_string(source_region.height));
  }
  validate(region, canvas.width(), canvas.height());
  validate(source_region, source.width(), source.height());

  const Raster target_patch = canvas.crop(region.x, region.y, region.width, region.height);
  const Raster source_patch = source.crop(source_region.x, source_region.y, source_region.width, source_region.height);
  const GuidanceField field = build_guidance_field(target_patch, source_patch, params, opts.mask);
  const DirichletProblem prob = DirichletProblem::from_field(target_patch, field, region);
  SolveResult solved = solve(prob, opts.backend);

  for (std::size_t j = 0; j < solved.interior.height(); ++j)
    for (std::size_t i = 0; i < solved.interior.width(); ++i)
      canvas.at(region.x + 1 + i, region.y + 1 + j) = std::clamp(solved.interior.at(i, j), 0.0, 1.0);
  if (opts.report) *opts.report = solved.report;
}

Raster blend_patch(const Raster& target, const Raster& source, const PatchRegion& region,
                   const PatchRegion& source_region, const BlendParams& params, const BlendOptions& opts) {
  Raster out = target;
  blend_patch_into(out, source, region, source_region, params, opts);
  return out;
}

}  // namespace ppii
