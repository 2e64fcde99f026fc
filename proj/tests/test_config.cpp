#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <set>

#include "ppii/config.hpp"
#include "ppii/error.hpp"
#include "support/fixtures.hpp"

using ppii::RunConfig;

namespace {

std::string message_of(std::string_view text) {
  try {
    ppii::parse_config(text, "run.toml");
  } catch (const ppii::Error& e) {
    CHECK(e.code() == ppii::ErrorCode::InvalidInput);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("sections, comments and values") {
  const RunConfig cfg = ppii::parse_config(R"(
# generation
[generator]
gain = 3.5        # louder anomalies
k_min = 2
k_max = 2
raters = 1
disjoint = true
seed = 123

[mask]
radius_mean_frac = 0.3

[solver]
backend = "cg"

[run]
workers = 4
pattern = "*.pgm"   # with a # inside quotes: "#"

[evaluate]
reducer = topk_mean
topk = 3
hit = centroid
connectivity = 4
)");
  CHECK(cfg.generator.gain == 3.5);
  CHECK(cfg.generator.k_min == 2);
  CHECK(cfg.generator.raters == 1);
  CHECK(cfg.generator.disjoint);
  CHECK(cfg.generator.seed == 123);
  CHECK(cfg.generator.mask.radius_mean == 0.3);
  CHECK(cfg.generator.backend == ppii::SolverBackend::Cg);
  CHECK(cfg.workers == 4);
  CHECK(cfg.pattern == "*.pgm");
  CHECK(cfg.evaluate.reducer.kind == ppii::Reducer::TopKMean);
  CHECK(cfg.evaluate.reducer.k == 3);
  CHECK(cfg.evaluate.froc.hit == ppii::HitCriterion::CenterOfMass);
  CHECK(cfg.evaluate.froc.connectivity == 4);

  // Dotted keys without sections are equivalent.
  CHECK(ppii::parse_config("generator.gain = 4\n").generator.gain == 4.0);
}

TEST_CASE("diagnostics carry origin, line and key") {
  CHECK(message_of("[generator]\n\ngain = 6\n") == "run.toml:3: key 'generator.gain': value 6 outside [1, 5]");
  CHECK(message_of("generator.raters = -2") ==
        "run.toml:1: key 'generator.raters': expected a non-negative integer, got '-2'");
  CHECK(message_of("a = 1").find("run.toml:1: unknown key 'a'") == 0);
  CHECK(message_of("[generator\n").find("run.toml:1: malformed section header") == 0);
  CHECK(message_of("gain 2").find("run.toml:1: expected 'key = value'") == 0);
  CHECK(message_of("generator.disjoint = maybe").find("key 'generator.disjoint'") != std::string::npos);
  CHECK(message_of("run.bit_depth = 12").find("key 'run.bit_depth'") != std::string::npos);
  CHECK(message_of("solver.backend = lu").find("key 'solver.backend'") != std::string::npos);
  CHECK(message_of("[generator]\nk_min = 5\nk_max = 2\n").find("run.toml: ") == 0);
  CHECK(message_of("preprocess.resize_width = 256\n").find("resize_height") != std::string::npos);
}

TEST_CASE("published defaults reproduce the built-in defaults") {
  const auto& schema = ppii::config_schema();
  std::set<std::string> names;
  std::string text;
  for (const auto& key : schema) {
    CHECK(names.insert(key.name).second);
    CHECK(key.name.find('.') != std::string::npos);
    CHECK_FALSE(key.description.empty());
    CHECK((key.type == "bool" || key.type == "int" || key.type == "real" || key.type == "string"));
    text += key.name + " = " + key.default_value + "\n";
  }
  CHECK(schema.size() >= 35);
  const RunConfig parsed = ppii::parse_config(text);
  const RunConfig def;
  CHECK(parsed.generator.patch_frac_min == def.generator.patch_frac_min);
  CHECK(parsed.generator.alpha_max == def.generator.alpha_max);
  CHECK(parsed.generator.gain == def.generator.gain);
  CHECK(parsed.generator.raters == def.generator.raters);
  CHECK(parsed.generator.mask.radius_sigma == def.generator.mask.radius_sigma);
  CHECK(parsed.generator.label_threshold == def.generator.label_threshold);
  CHECK(parsed.preprocess.equalize == def.preprocess.equalize);
  CHECK(parsed.preprocess.augment_ranges.scale_max == def.preprocess.augment_ranges.scale_max);
  CHECK(parsed.workers == def.workers);
  CHECK(parsed.bit_depth == def.bit_depth);
  CHECK(parsed.pattern == def.pattern);
  CHECK(parsed.evaluate.thresholds == def.evaluate.thresholds);
  CHECK(parsed.evaluate.target_fp == def.evaluate.target_fp);
}

TEST_CASE("set and load") {
  RunConfig cfg;
  ppii::set_config_value(cfg, "generator.alpha_min", "0.2");
  CHECK(cfg.generator.alpha_min == 0.2);
  CHECK_THROWS_AS(ppii::set_config_value(cfg, "generator.nope", "1"), ppii::Error);

  const auto dir = fixtures::scratch_dir("config");
  std::ofstream(dir / "c.toml") << "[generator]\nraters = 3\n";
  CHECK(ppii::load_config(dir / "c.toml").generator.raters == 3);
  try {
    ppii::load_config(dir / "missing.toml");
    FAIL("missing file accepted");
  } catch (const ppii::Error& e) {
    CHECK(e.code() == ppii::ErrorCode::Io);
  }
  std::ofstream(dir / "bad.toml") << "[generator]\nalpha_min = 0.9\nalpha_max = 0.1\n";
  CHECK_THROWS_WITH(ppii::load_config(dir / "bad.toml"), doctest::Contains("bad.toml"));
}
