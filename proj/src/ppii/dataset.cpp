#include "ppii/dataset.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <thread>

#include "ppii/augment.hpp"
#include "ppii/error.hpp"
#include "ppii/image_io.hpp"
#include "ppii/log.hpp"
#include "ppii/metrics.hpp"
#include "ppii/rng.hpp"
#include "ppii/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ppii {

namespace {

constexpr std::uint64_t kPairingStream = 0x70616972;  // "pair"
constexpr std::uint64_t kAugmentStream = 0x61756720;  // "aug "

const char* to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

const char* to_string(SampleLabel l) {
  switch (l) {
    case SampleLabel::Id: return "id";
    case SampleLabel::Ood: return "ood";
    case SampleLabel::Unknown: return "unknown";
  }
  return "unknown";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  fail(ErrorCode::InvalidInput, "manifest: unknown split '" + s + "'");
}

SampleLabel parse_label(const std::string& s) {
  if (s == "id") return SampleLabel::Id;
  if (s == "ood") return SampleLabel::Ood;
  if (s == "unknown") return SampleLabel::Unknown;
  fail(ErrorCode::InvalidInput, "manifest: unknown sample label '" + s + "'");
}

std::vector<std::string> matching_files(const fs::path& dir, const std::string& pattern) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) fail(ErrorCode::Io, "not a readable directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(pattern.c_str(), name.c_str(), 0) == 0) names.push_back(name);
  }
  std::sort(names.begin(), names.end());
  return names;
}

bool is_image_name(const std::string& name) {
  std::string ext = fs::path(name).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".pgm";
}

Raster load_preprocessed(const fs::path& path, const PreprocessConfig& cfg) {
  return preprocess(load_image(path).raster, cfg);
}

json rect_json(const PatchRegion& r) { return {{"x", r.x}, {"y", r.y}, {"w", r.width}, {"h", r.height}}; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) fail(ErrorCode::Io, "failed writing " + path.string());
}

json sidecar(const AnomalyBundle& bundle, const ManifestEntry& entry, std::size_t index,
             const std::vector<std::string>& sources, const RunConfig& cfg, std::size_t mask_pixels) {
  json anomalies = json::array();
  for (const AnomalyRecord& a : bundle.anomalies) {
    json raters = json::array();
    for (const RaterDraw& d : a.raters) {
      raters.push_back({{"source", sources[d.source_index]},
                        {"source_rect", rect_json(d.source)},
                        {"alpha", d.alpha},
                        {"disc", {{"cx", d.disc.cx}, {"cy", d.disc.cy}, {"r", d.disc.radius}}}});
    }
    anomalies.push_back({{"target_rect", rect_json(a.target)}, {"raters", std::move(raters)}});
  }
  const double scale = cfg.bit_depth == 16 ? 65535.0 : 255.0;
  return {{"image", entry.path},
          {"index", index},
          {"seed", cfg.generator.seed},
          {"width", bundle.mean_image.width()},
          {"height", bundle.mean_image.height()},
          {"bit_depth", cfg.bit_depth},
          {"scale", scale},
          {"gain", cfg.generator.gain},
          {"raters", cfg.generator.raters},
          {"label_threshold", cfg.generator.label_threshold},
          {"backend", std::string(to_string(cfg.generator.backend))},
          {"anomaly_count", bundle.anomaly_count},
          {"mask_pixels", mask_pixels},
          {"max_residual", bundle.max_residual},
          {"sources", sources},
          {"anomalies", std::move(anomalies)}};
}

template <typename Job>
void run_pool(std::size_t jobs, std::size_t workers, Job&& job) {
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < jobs; i = next++) job(i);
  };
  workers = std::max<std::size_t>(1, std::min(workers, jobs));
  if (workers == 1) {
    work();
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
}

}  // namespace

json to_json(const Manifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"path", e.path}, {"split", to_string(e.split)}, {"sample_label", to_string(e.sample_label)}});
  }
  return {{"root", manifest.root.string()}, {"entries", std::move(entries)}};
}

Manifest manifest_from_json(const json& doc) {
  Manifest m;
  try {
    m.root = doc.at("root").get<std::string>();
    std::set<std::string> seen;
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.path = e.at("path").get<std::string>();
      entry.split = parse_split(e.value("split", "train"));
      entry.sample_label = parse_label(e.value("sample_label", "unknown"));
      if (!seen.insert(entry.path).second) fail(ErrorCode::InvalidInput, "manifest: duplicate path " + entry.path);
      m.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::InvalidInput, std::string("manifest: ") + e.what());
  }
  return m;
}

IngestResult ingest(const fs::path& dir, const std::string& pattern) {
  const auto names = matching_files(dir, pattern);
  if (names.empty()) fail(ErrorCode::NoInputs, "no files matching '" + pattern + "' in " + dir.string());
  IngestResult result;
  result.manifest.root = dir;
  for (const auto& name : names) {
    try {
      (void)load_image(dir / name);
      result.manifest.entries.push_back({name, Split::Train, SampleLabel::Unknown});
    } catch (const Error& e) {
      logger().warn("ingest: skipping {}: {}", name, e.what());
      result.rejected.push_back({name, e.what()});
    }
  }
  return result;
}

Raster preprocess(const Raster& img, const PreprocessConfig& cfg) {
  Raster out = cfg.normalize ? normalize(img) : img;
  if (cfg.resize_width != 0 && cfg.resize_height != 0) out = resize_bilinear(out, cfg.resize_width, cfg.resize_height);
  if (cfg.equalize) out = equalize_histogram(out, cfg.equalize_bins);
  return out;
}

std::vector<std::vector<std::size_t>> pair_sources(std::size_t count, std::size_t per_image, bool allow_self,
                                                   std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> partners(count);
  if (count == 0) return partners;
  SeededStream rng = make_stream({seed, kPairingStream});
  if (allow_self || count == 1) {
    if (!allow_self) logger().warn("only one image available; pairing it with itself");
    std::uniform_int_distribution<std::size_t> pick(0, count - 1);
    for (auto& p : partners)
      for (std::size_t j = 0; j < per_image; ++j) p.push_back(pick(rng));
    return partners;
  }
  // Walking a random cycle never returns to the start within count-1 steps.
  std::vector<std::size_t> cycle(count);
  std::iota(cycle.begin(), cycle.end(), std::size_t{0});
  std::shuffle(cycle.begin(), cycle.end(), rng);
  const std::size_t steps = std::min(per_image, count - 1);
  for (std::size_t pos = 0; pos < count; ++pos)
    for (std::size_t j = 1; j <= steps; ++j) partners[cycle[pos]].push_back(cycle[(pos + j) % count]);
  return partners;
}

GenerateSummary cmd_generate(const RunConfig& cfg, const Manifest& manifest, const std::vector<FileError>& rejected) {
  validate(cfg);
  if (cfg.output_dir.empty()) fail(ErrorCode::InvalidInput, "generate: no output directory");
  fs::create_directories(cfg.output_dir);

  std::vector<const ManifestEntry*> train;
  for (const auto& e : manifest.entries)
    if (e.split == Split::Train) train.push_back(&e);

  GenerateSummary summary;
  summary.images = train.size();
  summary.mask_pixels.assign(train.size(), 0);
  const auto partners = pair_sources(train.size(), cfg.sources_per_image, cfg.allow_self_pair, cfg.generator.seed);
  std::vector<std::optional<std::string>> errors(train.size());

  run_pool(train.size(), cfg.workers, [&](std::size_t i) {
    const ManifestEntry& entry = *train[i];
    try {
      Raster target = load_preprocessed(manifest.root / entry.path, cfg.preprocess);
      if (cfg.preprocess.augment != AugmentMode::None) {
        SeededStream rng = make_stream({cfg.generator.seed, i, kAugmentStream});
        target = augment(target, sample_augment_spec(rng, cfg.preprocess.augment, cfg.preprocess.augment_ranges));
      }
      std::vector<Raster> sources;
      std::vector<std::string> source_names;
      for (std::size_t j : partners[i]) {
        sources.push_back(load_preprocessed(manifest.root / train[j]->path, cfg.preprocess));
        source_names.push_back(train[j]->path);
      }
      const AnomalyBundle bundle = generate_anomalies(target, sources, cfg.generator, JobKey{cfg.generator.seed, i});

      const auto mask_pixels = static_cast<std::size_t>(
          std::count(bundle.binary_mask.values().begin(), bundle.binary_mask.values().end(), 1.0));
      const std::string stem = fs::path(entry.path).stem().string();
      save_image(bundle.mean_image, cfg.output_dir / (stem + "_mean.png"), cfg.bit_depth);
      save_image(bundle.variance_map, cfg.output_dir / (stem + "_variance.png"), cfg.bit_depth);
      save_image(bundle.label_map, cfg.output_dir / (stem + "_label.png"), cfg.bit_depth);
      save_image(bundle.binary_mask, cfg.output_dir / (stem + "_mask.png"), cfg.bit_depth);
      write_text(cfg.output_dir / (stem + ".json"), sidecar(bundle, entry, i, source_names, cfg, mask_pixels).dump(2) + "\n");
      summary.mask_pixels[i] = mask_pixels;
      logger().info("generated {} ({} anomalies, {} mask pixels)", entry.path, bundle.anomaly_count, mask_pixels);
    } catch (const std::exception& e) {
      logger().error("generate: {} failed: {}", entry.path, e.what());
      errors[i] = e.what();
    }
  });

  json failures = json::array();
  for (const FileError& r : rejected) {
    summary.failures.push_back(r);
    failures.push_back({{"path", r.path}, {"error", r.message}, {"stage", "ingest"}});
  }
  for (std::size_t i = 0; i < train.size(); ++i) {
    if (errors[i]) {
      summary.failures.push_back({train[i]->path, *errors[i]});
      failures.push_back({{"path", train[i]->path}, {"error", *errors[i]}, {"stage", "generate"}});
    } else {
      ++summary.succeeded;
    }
  }
  write_text(cfg.output_dir / "manifest.json", to_json(manifest).dump(2) + "\n");
  const json report = {{"images", summary.images},
                       {"succeeded", summary.succeeded},
                       {"failed", summary.failures.size()},
                       {"seed", cfg.generator.seed},
                       {"failures", std::move(failures)}};
  write_text(cfg.output_dir / "run_report.json", report.dump(2) + "\n");
  return summary;
}

json EvaluateReport::to_json() const {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json points = json::array();
  if (froc) {
    for (std::size_t i = 0; i < froc->points.size(); ++i) {
      points.push_back({{"threshold", froc->thresholds[i]},
                        {"avg_fp", froc->points[i].avg_fp},
                        {"sensitivity", froc->points[i].sensitivity}});
    }
  }
  return {{"auroc_pixel", opt(auroc_pixel)},
          {"auroc_sample", opt(auroc_sample)},
          {"ap_sample", opt(ap_sample)},
          {"froc_points", std::move(points)},
          {"sensitivity_at_10fp", opt(sensitivity_at_target_fp)},
          {"images", images},
          {"lesions", froc ? froc->lesions : 0}};
}

EvaluateReport cmd_evaluate(const fs::path& pred_dir, const fs::path& gt_dir, const fs::path& report_path,
                            const EvalConfig& cfg) {
  auto images_in = [&](const fs::path& dir) {
    std::vector<std::string> names;
    for (auto& n : matching_files(dir, cfg.pattern))
      if (is_image_name(n)) names.push_back(std::move(n));
    return names;
  };
  const auto pred_names = images_in(pred_dir);
  const auto gt_names = images_in(gt_dir);
  if (pred_names != gt_names) {
    std::vector<std::string> only_pred, only_gt;
    std::set_difference(pred_names.begin(), pred_names.end(), gt_names.begin(), gt_names.end(), std::back_inserter(only_pred));
    std::set_difference(gt_names.begin(), gt_names.end(), pred_names.begin(), pred_names.end(), std::back_inserter(only_gt));
    std::string msg = "evaluate: file sets differ;";
    for (const auto& n : only_pred) msg += " pred-only: " + n + ";";
    for (const auto& n : only_gt) msg += " gt-only: " + n + ";";
    fail(ErrorCode::InvalidInput, msg);
  }
  if (pred_names.empty()) fail(ErrorCode::NoInputs, "evaluate: no images in " + pred_dir.string());

  std::vector<Raster> preds, gts;
  std::vector<double> pixel_scores, sample_scores;
  std::vector<std::uint8_t> pixel_labels, sample_labels;
  for (const auto& name : pred_names) {
    Raster pred = load_image(pred_dir / name).raster;
    Raster gt = load_image(gt_dir / name).raster;
    if (!pred.same_shape(gt)) fail(ErrorCode::InvalidInput, "evaluate: " + name + " differs in size between the directories");
    bool any = false;
    for (double& v : gt.values()) {
      v = v != 0.0 ? 1.0 : 0.0;
      any = any || v != 0.0;
    }
    pixel_scores.insert(pixel_scores.end(), pred.values().begin(), pred.values().end());
    for (double v : gt.values()) pixel_labels.push_back(v != 0.0);
    sample_scores.push_back(sample_score(pred, cfg.reducer));
    sample_labels.push_back(any);
    preds.push_back(std::move(pred));
    gts.push_back(std::move(gt));
  }

  EvaluateReport report;
  report.images = preds.size();
  auto guarded = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UndefinedMetric) throw;
      logger().warn("evaluate: {}", e.what());
      return std::nullopt;
    }
  };
  report.auroc_pixel = guarded([&] { return auroc(pixel_scores, pixel_labels); });
  report.auroc_sample = guarded([&] { return auroc(sample_scores, sample_labels); });
  report.ap_sample = guarded([&] { return average_precision(sample_scores, sample_labels); });
  try {
    report.froc = froc(preds, gts, default_thresholds(cfg.thresholds), cfg.froc);
    report.sensitivity_at_target_fp = sensitivity_at_avg_fp(*report.froc, cfg.target_fp);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UndefinedMetric) throw;
    logger().warn("evaluate: {}", e.what());
  }

  if (!report_path.empty()) {
    if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
    write_text(report_path, report.to_json().dump(2) + "\n");
  }
  return report;
}

SolverReport cmd_blend(const BlendRequest& req) {
  PreprocessConfig pre;
  pre.normalize = req.normalize;
  pre.equalize = false;
  const Raster source = load_preprocessed(req.source, pre);
  const Raster target = load_preprocessed(req.target, pre);
  if (!source.same_shape(target)) {
    fail(ErrorCode::InvalidInput, "blend: source is " + std::to_string(source.width()) + "x" +
                                      std::to_string(source.height()) + ", target is " + std::to_string(target.width()) +
                                      "x" + std::to_string(target.height()));
  }
  const PatchRegion& r = req.rect;
  if (r.width < 3 || r.height < 3 || r.x < 1 || r.y < 1 || r.x + r.width + 1 > target.width() ||
      r.y + r.height + 1 > target.height()) {
    fail(ErrorCode::InvalidInput, "blend: rect " + std::to_string(r.x) + "," + std::to_string(r.y) + "," +
                                      std::to_string(r.width) + "," + std::to_string(r.height) +
                                      " must be at least 3x3 and keep a one-pixel margin inside " +
                                      std::to_string(target.width()) + "x" + std::to_string(target.height()));
  }
  SolverReport report;
  BlendOptions opts{req.backend, nullptr, &report};
  const Raster out = blend_patch(target, source, r, r, BlendParams{req.alpha, req.gain}, opts);
  save_image(out, req.out, req.bit_depth);
  return report;
}

void cmd_equalize(const fs::path& input, const fs::path& output, std::size_t bins, int bit_depth) {
  const Raster img = normalize(load_image(input).raster);
  save_image(equalize_histogram(img, bins), output, bit_depth);
}

}  // namespace ppii
