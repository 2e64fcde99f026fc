#include "ppii/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "ppii/error.hpp"

namespace ppii {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, const std::string& msg) {
  fail(ErrorCode::InvalidInput, "key '" + std::string(key) + "': " + msg);
}

std::string as_string(std::string_view key, std::string_view v) {
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'')) {
    if (v.back() != v.front()) bad_value(key, "unterminated string");
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

bool as_bool(std::string_view key, std::string_view v) {
  const std::string s = as_string(key, v);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad_value(key, "expected a boolean, got '" + s + "'");
}

double as_real(std::string_view key, std::string_view v) {
  const std::string s = as_string(key, v);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(out)) {
    bad_value(key, "expected a real number, got '" + s + "'");
  }
  return out;
}

std::uint64_t as_uint(std::string_view key, std::string_view v) {
  const std::string s = as_string(key, v);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad_value(key, "expected a non-negative integer, got '" + s + "'");
  return out;
}

double in_range(std::string_view key, double v, double lo, double hi) {
  if (v < lo || v > hi) {
    std::ostringstream msg;
    msg << "value " << v << " outside [" << lo << ", " << hi << "]";
    bad_value(key, msg.str());
  }
  return v;
}

std::size_t at_least(std::string_view key, std::uint64_t v, std::uint64_t lo) {
  if (v < lo) bad_value(key, "value " + std::to_string(v) + " must be >= " + std::to_string(lo));
  return static_cast<std::size_t>(v);
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

struct KeyEntry {
  ConfigKey key;
  Setter set;
};

const std::vector<KeyEntry>& entries() {
  static const std::vector<KeyEntry> table = [] {
    std::vector<KeyEntry> t;
    auto real = [&](std::string name, std::string def, std::string desc, double lo, double hi,
                    std::function<double&(RunConfig&)> slot) {
      t.push_back({{std::move(name), "real", std::move(def), std::move(desc)},
                   [=](RunConfig& c, std::string_view k, std::string_view v) { slot(c) = in_range(k, as_real(k, v), lo, hi); }});
    };
    auto count = [&](std::string name, std::string def, std::string desc, std::uint64_t lo,
                     std::function<std::size_t&(RunConfig&)> slot) {
      t.push_back({{std::move(name), "int", std::move(def), std::move(desc)},
                   [=](RunConfig& c, std::string_view k, std::string_view v) { slot(c) = at_least(k, as_uint(k, v), lo); }});
    };
    auto flag = [&](std::string name, std::string def, std::string desc, std::function<bool&(RunConfig&)> slot) {
      t.push_back({{std::move(name), "bool", std::move(def), std::move(desc)},
                   [=](RunConfig& c, std::string_view k, std::string_view v) { slot(c) = as_bool(k, v); }});
    };
    auto text = [&](std::string name, std::string def, std::string desc, Setter set) {
      t.push_back({{std::move(name), "string", std::move(def), std::move(desc)}, std::move(set)});
    };

    real("generator.patch_frac_min", "0.06", "minimum patch side as a fraction of the image side", 0.0, 0.5,
         [](RunConfig& c) -> double& { return c.generator.patch_frac_min; });
    real("generator.patch_frac_max", "0.25", "maximum patch side as a fraction of the image side", 0.0, 0.5,
         [](RunConfig& c) -> double& { return c.generator.patch_frac_max; });
    real("generator.alpha_min", "0.05", "lower bound of the uniform interpolation factor", 0.0, 1.0,
         [](RunConfig& c) -> double& { return c.generator.alpha_min; });
    real("generator.alpha_max", "0.95", "upper bound of the uniform interpolation factor", 0.0, 1.0,
         [](RunConfig& c) -> double& { return c.generator.alpha_max; });
    real("generator.gain", "2.0", "source-gradient amplification", 1.0, 5.0,
         [](RunConfig& c) -> double& { return c.generator.gain; });
    count("generator.k_min", "1", "fewest anomalies per image", 1, [](RunConfig& c) -> std::size_t& { return c.generator.k_min; });
    count("generator.k_max", "4", "most anomalies per image", 1, [](RunConfig& c) -> std::size_t& { return c.generator.k_max; });
    count("generator.raters", "8", "simulated raters per anomaly", 1, [](RunConfig& c) -> std::size_t& { return c.generator.raters; });
    real("generator.label_threshold", "0.05", "label intensity above which the binary mask is set", 0.0, 1.0,
         [](RunConfig& c) -> double& { return c.generator.label_threshold; });
    t.push_back({{"generator.seed", "int", "0", "global seed (the CLI --seed overrides it)"},
                 [](RunConfig& c, std::string_view k, std::string_view v) { c.generator.seed = as_uint(k, v); }});
    flag("generator.disjoint", "false", "retry placements until anomaly patches do not overlap",
         [](RunConfig& c) -> bool& { return c.generator.disjoint; });

    real("mask.radius_mean_frac", "0.25", "disc radius mean as a fraction of the shorter patch side", 0.0, 0.5,
         [](RunConfig& c) -> double& { return c.generator.mask.radius_mean; });
    real("mask.radius_sigma_frac", "0.125", "disc radius sigma as a fraction of the shorter patch side", 0.0, 0.5,
         [](RunConfig& c) -> double& { return c.generator.mask.radius_sigma; });
    real("mask.center_x_frac", "0.5", "disc centre mean, fraction of the patch width", 0.0, 1.0,
         [](RunConfig& c) -> double& { return c.generator.mask.center_x; });
    real("mask.center_y_frac", "0.5", "disc centre mean, fraction of the patch height", 0.0, 1.0,
         [](RunConfig& c) -> double& { return c.generator.mask.center_y; });
    real("mask.center_sigma_frac", "0.125", "disc centre sigma, fraction of the patch side", 0.0, 0.5,
         [](RunConfig& c) -> double& { return c.generator.mask.center_sigma; });

    flag("preprocess.normalize", "true", "rescale every image to [0,1]", [](RunConfig& c) -> bool& { return c.preprocess.normalize; });
    flag("preprocess.equalize", "true", "global histogram equalisation after resizing",
         [](RunConfig& c) -> bool& { return c.preprocess.equalize; });
    count("preprocess.equalize_bins", "256", "quantisation levels used by equalisation", 2,
          [](RunConfig& c) -> std::size_t& { return c.preprocess.equalize_bins; });
    count("preprocess.resize_width", "0", "target width (0 keeps the native size)", 0,
          [](RunConfig& c) -> std::size_t& { return c.preprocess.resize_width; });
    count("preprocess.resize_height", "0", "target height (0 keeps the native size)", 0,
          [](RunConfig& c) -> std::size_t& { return c.preprocess.resize_height; });
    text("preprocess.augment", "none", "none | scaling | combined (rotation, elastic, scaling)",
         [](RunConfig& c, std::string_view k, std::string_view v) {
           const std::string s = as_string(k, v);
           if (s == "none") c.preprocess.augment = AugmentMode::None;
           else if (s == "scaling") c.preprocess.augment = AugmentMode::Scaling;
           else if (s == "combined") c.preprocess.augment = AugmentMode::Combined;
           else bad_value(k, "expected none, scaling or combined, got '" + s + "'");
         });
    real("preprocess.rotation_max", "10", "largest rotation in degrees", 0.0, 10.0,
         [](RunConfig& c) -> double& { return c.preprocess.augment_ranges.max_rotation_degrees; });
    real("preprocess.scale_min", "0.9", "smallest scale factor", 0.1, 10.0,
         [](RunConfig& c) -> double& { return c.preprocess.augment_ranges.scale_min; });
    real("preprocess.scale_max", "1.1", "largest scale factor", 0.1, 10.0,
         [](RunConfig& c) -> double& { return c.preprocess.augment_ranges.scale_max; });
    real("preprocess.elastic_spacing", "32", "elastic displacement grid spacing in pixels", 1.0, 1e6,
         [](RunConfig& c) -> double& { return c.preprocess.augment_ranges.elastic_grid_spacing; });
    real("preprocess.elastic_sigma", "4", "elastic displacement sigma in pixels", 0.0, 1e3,
         [](RunConfig& c) -> double& { return c.preprocess.augment_ranges.elastic_sigma; });

    text("solver.backend", "dst", "direct | dst | cg", [](RunConfig& c, std::string_view k, std::string_view v) {
      try {
        c.generator.backend = parse_backend(as_string(k, v));
      } catch (const Error& e) {
        bad_value(k, e.what());
      }
    });

    count("run.workers", "1", "parallel image jobs", 1, [](RunConfig& c) -> std::size_t& { return c.workers; });
    flag("run.allow_self_pair", "false", "let an image serve as its own source", [](RunConfig& c) -> bool& { return c.allow_self_pair; });
    count("run.sources_per_image", "1", "partner images drawn per target", 1,
          [](RunConfig& c) -> std::size_t& { return c.sources_per_image; });
    t.push_back({{"run.bit_depth", "int", "16", "PNG bit depth of the written maps (8 or 16)"},
                 [](RunConfig& c, std::string_view k, std::string_view v) {
                   const auto d = as_uint(k, v);
                   if (d != 8 && d != 16) bad_value(k, "expected 8 or 16");
                   c.bit_depth = static_cast<int>(d);
                 }});
    text("run.pattern", "*.png", "file name glob used at ingest",
         [](RunConfig& c, std::string_view k, std::string_view v) { c.pattern = as_string(k, v); });

    text("evaluate.reducer", "max", "max | mean | topk_mean: pixel map to sample score",
         [](RunConfig& c, std::string_view k, std::string_view v) {
           const std::string s = as_string(k, v);
           if (s == "max") c.evaluate.reducer.kind = Reducer::Max;
           else if (s == "mean") c.evaluate.reducer.kind = Reducer::Mean;
           else if (s == "topk_mean") c.evaluate.reducer.kind = Reducer::TopKMean;
           else bad_value(k, "expected max, mean or topk_mean, got '" + s + "'");
         });
    count("evaluate.topk", "1", "k of the topk_mean reducer", 1, [](RunConfig& c) -> std::size_t& { return c.evaluate.reducer.k; });
    count("evaluate.thresholds", "256", "FROC thresholds evenly spaced in (0,1)", 1,
          [](RunConfig& c) -> std::size_t& { return c.evaluate.thresholds; });
    t.push_back({{"evaluate.connectivity", "int", "8", "lesion and prediction connectivity (4 or 8)"},
                 [](RunConfig& c, std::string_view k, std::string_view v) {
                   const auto n = as_uint(k, v);
                   if (n != 4 && n != 8) bad_value(k, "expected 4 or 8");
                   c.evaluate.froc.connectivity = static_cast<int>(n);
                 }});
    text("evaluate.hit", "overlap", "overlap | centroid: FROC lesion hit criterion",
         [](RunConfig& c, std::string_view k, std::string_view v) {
           const std::string s = as_string(k, v);
           if (s == "overlap") c.evaluate.froc.hit = HitCriterion::AnyOverlap;
           else if (s == "centroid") c.evaluate.froc.hit = HitCriterion::CenterOfMass;
           else bad_value(k, "expected overlap or centroid, got '" + s + "'");
         });
    real("evaluate.target_fp", "10", "average false positives per image for the sensitivity summary", 0.0, 1e9,
         [](RunConfig& c) -> double& { return c.evaluate.target_fp; });
    text("evaluate.pattern", "*", "file name glob selecting prediction/ground-truth images",
         [](RunConfig& c, std::string_view k, std::string_view v) { c.evaluate.pattern = as_string(k, v); });
    return t;
  }();
  return table;
}

// Strips a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

}  // namespace

const std::vector<ConfigKey>& config_schema() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& e : entries()) out.push_back(e.key);
    return out;
  }();
  return keys;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
  const auto& table = entries();
  const auto it = std::find_if(table.begin(), table.end(), [&](const KeyEntry& e) { return e.key.name == key; });
  if (it == table.end()) fail(ErrorCode::InvalidInput, "unknown key '" + std::string(key) + "'");
  it->set(cfg, key, trim(value));
}

RunConfig parse_config(std::string_view text, std::string_view origin, RunConfig base) {
  RunConfig cfg = std::move(base);
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::InvalidInput, where + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::InvalidInput, where + "expected 'key = value'");
    const std::string_view name = trim(line.substr(0, eq));
    const std::string key = section.empty() ? std::string(name) : section + "." + std::string(name);
    try {
      set_config_value(cfg, key, trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      fail(e.code(), where + e.what());
    }
  }
  try {
    validate(cfg);
  } catch (const Error& e) {
    fail(e.code(), std::string(origin) + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

void validate(const RunConfig& cfg) {
  validate(cfg.generator);
  const auto& r = cfg.preprocess.augment_ranges;
  if (r.scale_min > r.scale_max) fail(ErrorCode::InvalidInput, "keys 'preprocess.scale_min' > 'preprocess.scale_max'");
  if ((cfg.preprocess.resize_width == 0) != (cfg.preprocess.resize_height == 0)) {
    fail(ErrorCode::InvalidInput, "keys 'preprocess.resize_width' and 'preprocess.resize_height' must both be set or both be 0");
  }
  if (cfg.workers < 1) fail(ErrorCode::InvalidInput, "key 'run.workers' must be >= 1");
}

}  // namespace ppii
