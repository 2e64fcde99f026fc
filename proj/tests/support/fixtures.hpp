#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "ppii/poisson.hpp"
#include "ppii/raster.hpp"
#include "ppii/rng.hpp"

namespace fixtures {

// Smooth grayscale image loosely resembling a chest radiograph: a bright
// vignette, horizontal rib bands, a few soft blobs and sensor noise.
ppii::Raster chest_like(std::size_t w, std::size_t h, std::uint64_t seed);

// Folder of `count` 16-bit PNGs named img_000.png, img_001.png, ...
void write_folder(const std::filesystem::path& dir, std::size_t count, std::size_t w, std::size_t h,
                  std::uint64_t seed);

// Interior nx x ny with uniform [-1,1] rhs and boundary values.
ppii::DirichletProblem random_problem(ppii::SeededStream& rng, std::size_t nx, std::size_t ny);

// Zero rhs; boundary values uniform in [lo, hi].
ppii::DirichletProblem random_harmonic(ppii::SeededStream& rng, std::size_t nx, std::size_t ny, double lo = 0.0,
                                       double hi = 1.0);

// Assembles the full 5-point system densely and solves it by Gaussian
// elimination with partial pivoting. Small interiors only.
ppii::Raster dense_solve(const ppii::DirichletProblem& prob);

ppii::Raster random_raster(ppii::SeededStream& rng, std::size_t w, std::size_t h);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// File name -> contents for every regular file in `dir`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& dir);

double max_abs_diff(const ppii::Raster& a, const ppii::Raster& b);

}  // namespace fixtures
