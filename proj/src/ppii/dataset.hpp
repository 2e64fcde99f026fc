#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ppii/config.hpp"
#include "ppii/poisson.hpp"
#include "ppii/raster.hpp"

namespace ppii {

enum class Split { Train, Val, Test };
enum class SampleLabel { Id, Ood, Unknown };

struct ManifestEntry {
  std::string path;  // relative to the manifest root
  Split split = Split::Train;
  SampleLabel sample_label = SampleLabel::Unknown;
};

struct Manifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;
};

nlohmann::json to_json(const Manifest& manifest);
Manifest manifest_from_json(const nlohmann::json& doc);

struct FileError {
  std::string path;
  std::string message;
};

struct IngestResult {
  Manifest manifest;
  std::vector<FileError> rejected;
};

// Regular files in `dir` whose names match `pattern` (fnmatch), in
// lexicographic order. Every match is decoded; undecodable or non-grayscale
// files are reported in `rejected`. Throws NoInputs when nothing matches.
IngestResult ingest(const std::filesystem::path& dir, const std::string& pattern = "*.png");

// normalize -> optional resize -> optional equalize.
Raster preprocess(const Raster& img, const PreprocessConfig& cfg);

// Partner indices for every target: a seeded cyclic derangement unless
// self-pairing is allowed (or unavoidable with a single image).
std::vector<std::vector<std::size_t>> pair_sources(std::size_t count, std::size_t per_image, bool allow_self,
                                                   std::uint64_t seed);

struct GenerateSummary {
  std::size_t images = 0;
  std::size_t succeeded = 0;
  std::vector<FileError> failures;
  std::vector<std::size_t> mask_pixels;  // per train image; 0 for failures

  int exit_code() const noexcept { return failures.empty() ? 0 : 1; }
};

// Writes <stem>_{mean,variance,label,mask}.png and <stem>.json for every
// train entry, plus manifest.json and run_report.json. Output bytes depend
// only on (manifest, config, seed), not on the worker count. Files rejected
// at ingest are carried into the report as failures.
GenerateSummary cmd_generate(const RunConfig& cfg, const Manifest& manifest, const std::vector<FileError>& rejected = {});

struct EvaluateReport {
  std::optional<double> auroc_pixel;
  std::optional<double> auroc_sample;
  std::optional<double> ap_sample;
  std::optional<FrocCurve> froc;
  std::optional<double> sensitivity_at_target_fp;
  std::size_t images = 0;

  nlohmann::json to_json() const;
};

// Pairs files of the two directories by name; a mismatch is InvalidInput
// listing the names present on only one side.
EvaluateReport cmd_evaluate(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                            const std::filesystem::path& report_path, const EvalConfig& cfg = {});

struct BlendRequest {
  std::filesystem::path source;
  std::filesystem::path target;
  PatchRegion rect;
  double alpha = 0.5;
  double gain = 1.0;
  std::filesystem::path out;
  SolverBackend backend = SolverBackend::Dst;
  bool normalize = true;
  int bit_depth = 16;
};

// Single-patch blend; the rect is used for both images and must keep a
// one-pixel margin to the border.
SolverReport cmd_blend(const BlendRequest& request);

void cmd_equalize(const std::filesystem::path& input, const std::filesystem::path& output, std::size_t bins = 256,
                  int bit_depth = 16);

}  // namespace ppii
