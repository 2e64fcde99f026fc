#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ppii/augment.hpp"
#include "ppii/metrics.hpp"
#include "ppii/sampler.hpp"

namespace ppii {

struct PreprocessConfig {
  bool normalize = true;
  bool equalize = true;
  std::size_t equalize_bins = 256;
  std::size_t resize_width = 0;  // 0 keeps the native size
  std::size_t resize_height = 0;
  AugmentMode augment = AugmentMode::None;
  AugmentRanges augment_ranges;
};

struct EvalConfig {
  SampleReducer reducer;
  std::size_t thresholds = 256;
  FrocOptions froc;
  double target_fp = 10.0;
  std::string pattern = "*";
};

struct RunConfig {
  GeneratorConfig generator;
  PreprocessConfig preprocess;
  EvalConfig evaluate;
  std::filesystem::path output_dir;
  std::size_t workers = 1;
  bool allow_self_pair = false;
  std::size_t sources_per_image = 1;
  int bit_depth = 16;
  std::string pattern = "*.png";
};

// One published configuration key.
struct ConfigKey {
  std::string name;         // "section.key"
  std::string type;         // bool | int | real | string
  std::string default_value;
  std::string description;
};

const std::vector<ConfigKey>& config_schema();

// Sets one key from its textual value; throws InvalidInput naming the key.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

// Flat key = value text with optional [section] headers and # comments.
// Diagnostics carry "<origin>:<line>: key '<name>': ...".
RunConfig parse_config(std::string_view text, std::string_view origin = "config", RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path);

// Cross-key checks run after all keys are applied.
void validate(const RunConfig& cfg);

}  // namespace ppii
