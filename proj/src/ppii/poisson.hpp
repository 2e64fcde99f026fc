#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "ppii/gradient_field.hpp"
#include "ppii/raster.hpp"

namespace ppii {

// Discrete Dirichlet problem over the interior of `region`:
//   4 f_p - sum_{q in N_p, interior} f_q = rhs_p + sum_{q in N_p, ring} boundary(q)
// The ring is stored top row (left to right), bottom row, then the left and
// right columns without their corners (top to bottom).
struct DirichletProblem {
  Raster interior_rhs;          // (height-2) x (width-2)
  std::vector<double> boundary;  // 2*width + 2*height - 4
  PatchRegion region;

  static DirichletProblem from_field(const Raster& target_patch, const GuidanceField& field, PatchRegion region);
};

void validate(const DirichletProblem& prob);

// Ring values of a patch in the DirichletProblem order.
std::vector<double> extract_boundary(const Raster& patch);

// Right-hand side with the ring values folded in.
Raster fold_boundary(const DirichletProblem& prob);

enum class SolverBackend { Direct, Dst, Cg };

std::string_view to_string(SolverBackend backend) noexcept;
SolverBackend parse_backend(std::string_view name);

struct SolverReport {
  SolverBackend backend = SolverBackend::Dst;
  double residual_norm = 0.0;  // max-norm of the folded system residual
  double wall_time = 0.0;      // seconds
  std::size_t iterations = 0;  // Cg only
};

struct SolveResult {
  Raster interior;
  SolverReport report;
};

struct DirectOptions {
  std::size_t max_unknowns = 64 * 64;
};

struct CgOptions {
  double relative_tolerance = 1e-6;
  std::size_t max_iterations = 100000;
};

double residual_norm(const DirichletProblem& prob, const Raster& interior);

// Banded Cholesky factorisation of the full 5-point system. Throws
// CapExceeded past `max_unknowns`.
SolveResult solve_direct(const DirichletProblem& prob, const DirectOptions& opts = {});

// Diagonalises the system with a 2-D type-I discrete sine transform. Any
// interior size; O(N log N).
SolveResult solve_dst(const DirichletProblem& prob);

// Matrix-free conjugate gradients from a zero start; the iterative reference.
SolveResult solve_cg(const DirichletProblem& prob, const CgOptions& opts = {});

SolveResult solve(const DirichletProblem& prob, SolverBackend backend);

struct BlendOptions {
  SolverBackend backend = SolverBackend::Dst;
  // Optional patch-sized mask restricting where source gradients enter.
  const std::vector<std::uint8_t>* mask = nullptr;
  SolverReport* report = nullptr;
};

// Blends the source_region patch of `source` into `region` of `target`.
// Only the interior of `region` changes; the solved values are clamped to
// [0,1] after the solve.
Raster blend_patch(const Raster& target, const Raster& source, const PatchRegion& region,
                   const PatchRegion& source_region, const BlendParams& params, const BlendOptions& opts = {});

// In-place variant used by the generator to compose several anomalies.
void blend_patch_into(Raster& canvas, const Raster& source, const PatchRegion& region,
                      const PatchRegion& source_region, const BlendParams& params, const BlendOptions& opts = {});

}  // namespace ppii
