#include "ppii/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ppii/error.hpp"

namespace ppii {

namespace {

constexpr std::uint64_t kAllSlots = std::numeric_limits<std::uint64_t>::max();
constexpr int kMaxDiscRejections = 1000;
constexpr int kMaxDisjointRetries = 100;

double draw_normal(SeededStream& rng, double mean, double sigma) {
  if (sigma == 0.0) return mean;
  return std::normal_distribution<double>(mean, sigma)(rng);
}

// Pixel left unchanged by every rater iff all composites equal the first.
void aggregate(const std::vector<Raster>& composites, AnomalyBundle& bundle) {
  const std::size_t n = composites.size();
  const std::size_t pixels = composites.front().size();
  auto& mean = bundle.mean_image.values();
  auto& var = bundle.variance_map.values();
  for (std::size_t p = 0; p < pixels; ++p) {
    const double first = composites[0].values()[p];
    bool agree = true;
    double sum = 0.0;
    for (const Raster& c : composites) {
      agree = agree && c.values()[p] == first;
      sum += c.values()[p];
    }
    if (agree) {
      mean[p] = first;
      var[p] = 0.0;
      continue;
    }
    const double m = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const Raster& c : composites) {
      const double d = c.values()[p] - m;
      ss += d * d;
    }
    mean[p] = m;
    var[p] = ss / static_cast<double>(n);
  }
}

}  // namespace

MaskDistribution MaskFractions::for_patch(std::size_t w, std::size_t h) const {
  const double side = static_cast<double>(std::min(w, h));
  return {radius_mean * side,
          radius_sigma * side,
          center_x * static_cast<double>(w),
          center_y * static_cast<double>(h),
          center_sigma * static_cast<double>(w),
          center_sigma * static_cast<double>(h)};
}

void validate(const GeneratorConfig& cfg) {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidInput, "generator config: " + what); };
  if (!(cfg.patch_frac_min > 0.0 && cfg.patch_frac_min <= cfg.patch_frac_max && cfg.patch_frac_max <= 0.5))
    bad("require 0 < patch_frac_min <= patch_frac_max <= 0.5");
  if (!(cfg.alpha_min >= 0.0 && cfg.alpha_min <= cfg.alpha_max && cfg.alpha_max <= 1.0))
    bad("require 0 <= alpha_min <= alpha_max <= 1");
  if (!(cfg.gain >= 1.0 && std::isfinite(cfg.gain))) bad("gain must be >= 1");
  if (cfg.k_min < 1 || cfg.k_max < cfg.k_min) bad("require 1 <= k_min <= k_max");
  if (cfg.raters < 1) bad("raters must be >= 1");
  if (!(cfg.label_threshold >= 0.0)) bad("label_threshold must be >= 0");
  const MaskFractions& m = cfg.mask;
  if (!(m.radius_mean > 0.0)) bad("mask radius mean must be > 0");
  if (!(m.radius_sigma >= 0.0 && m.center_sigma >= 0.0)) bad("mask sigmas must be >= 0");
  if (!(m.center_x >= 0.0 && m.center_x <= 1.0 && m.center_y >= 0.0 && m.center_y <= 1.0))
    bad("mask centre fractions must lie in [0,1]");
}

std::pair<std::size_t, std::size_t> sample_patch_size(SeededStream& rng, std::size_t image_w, std::size_t image_h,
                                                      const GeneratorConfig& cfg) {
  const auto smallest = static_cast<double>(std::min(image_w, image_h));
  if (cfg.patch_frac_max * smallest < 3.0 || image_w < 5 || image_h < 5) {
    fail(ErrorCode::InvalidInput, "image " + std::to_string(image_w) + "x" + std::to_string(image_h) +
                                      " too small for a 3x3 patch at patch_frac_max " +
                                      std::to_string(cfg.patch_frac_max));
  }
  std::uniform_real_distribution<double> frac(cfg.patch_frac_min, cfg.patch_frac_max);
  auto side = [&](std::size_t image_side) {
    const auto s = static_cast<std::size_t>(std::floor(frac(rng) * static_cast<double>(image_side)));
    return std::clamp<std::size_t>(s, 3, image_side - 2);
  };
  const std::size_t w = side(image_w);
  const std::size_t h = side(image_h);
  return {w, h};
}

PatchRegion sample_placement(SeededStream& rng, std::size_t image_w, std::size_t image_h, std::size_t patch_w,
                             std::size_t patch_h) {
  if (patch_w + 2 > image_w || patch_h + 2 > image_h) {
    fail(ErrorCode::InvalidInput, "patch does not fit inside the image with a one-pixel margin");
  }
  std::uniform_int_distribution<std::size_t> px(1, image_w - 1 - patch_w);
  std::uniform_int_distribution<std::size_t> py(1, image_h - 1 - patch_h);
  const std::size_t x = px(rng);
  const std::size_t y = py(rng);
  return {x, y, patch_w, patch_h};
}

PatchPlacement sample_patch_spec(SeededStream& rng, std::size_t image_w, std::size_t image_h,
                                 const GeneratorConfig& cfg) {
  const auto [w, h] = sample_patch_size(rng, image_w, image_h, cfg);
  PatchPlacement placement;
  placement.target = sample_placement(rng, image_w, image_h, w, h);
  placement.source = sample_placement(rng, image_w, image_h, w, h);
  return placement;
}

std::vector<std::uint8_t> rasterize_disc(const Disc& disc, std::size_t w, std::size_t h) {
  std::vector<std::uint8_t> mask(w * h, 0);
  const double r2 = disc.radius * disc.radius;
  for (std::size_t v = 0; v < h; ++v) {
    const double dy = static_cast<double>(v) - disc.cy;
    for (std::size_t u = 0; u < w; ++u) {
      const double dx = static_cast<double>(u) - disc.cx;
      if (dx * dx + dy * dy <= r2) mask[v * w + u] = 1;
    }
  }
  return mask;
}

Disc sample_disc(SeededStream& rng, std::size_t patch_w, std::size_t patch_h, const MaskDistribution& dist) {
  if (patch_w < 3 || patch_h < 3) fail(ErrorCode::InvalidInput, "mask patch must be at least 3x3");
  if (dist.radius_sigma < 0 || dist.center_sigma_x < 0 || dist.center_sigma_y < 0) {
    fail(ErrorCode::InvalidInput, "mask sigmas must be >= 0");
  }
  const double r_min = 2.0;
  const double r_max = std::floor(static_cast<double>(std::min(patch_w, patch_h)) / 2.0) - 1.0;
  if (r_max < r_min) {
    fail(ErrorCode::DegenerateDistribution, "a " + std::to_string(patch_w) + "x" + std::to_string(patch_h) +
                                                " patch cannot hold a disc of radius >= 2");
  }
  const double w = static_cast<double>(patch_w);
  const double h = static_cast<double>(patch_h);
  for (int attempt = 0; attempt < kMaxDiscRejections; ++attempt) {
    const double r = std::clamp(draw_normal(rng, dist.radius_mean, dist.radius_sigma), r_min, r_max);
    const double x = draw_normal(rng, dist.center_x, dist.center_sigma_x);
    const double y = draw_normal(rng, dist.center_y, dist.center_sigma_y);
    // Strict inequalities keep every rasterised pixel off the outer ring.
    if (x - r > 0.0 && x + r < w - 1.0 && y - r > 0.0 && y + r < h - 1.0) return {x, y, r};
  }
  fail(ErrorCode::DegenerateDistribution,
       "mask distribution (radius " + std::to_string(dist.radius_mean) + " +- " + std::to_string(dist.radius_sigma) +
           ") rejected " + std::to_string(kMaxDiscRejections) + " times in a " + std::to_string(patch_w) + "x" +
           std::to_string(patch_h) + " patch");
}

Raster sample_circle_mask(SeededStream& rng, std::size_t patch_w, std::size_t patch_h, const MaskDistribution& dist) {
  const Disc disc = sample_disc(rng, patch_w, patch_h, dist);
  const auto bits = rasterize_disc(disc, patch_w, patch_h);
  return Raster(patch_w, patch_h, std::vector<double>(bits.begin(), bits.end()));
}

AnomalyBundle generate_anomalies(const Raster& target, std::span<const Raster> sources, const GeneratorConfig& cfg,
                                 JobKey key) {
  validate(cfg);
  if (target.empty()) fail(ErrorCode::InvalidInput, "generate: empty target");
  if (sources.empty()) fail(ErrorCode::InvalidInput, "generate: no source images");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (!sources[i].same_shape(target)) {
      fail(ErrorCode::InvalidInput, "generate: source " + std::to_string(i) + " is " +
                                        std::to_string(sources[i].width()) + "x" + std::to_string(sources[i].height()) +
                                        ", target is " + std::to_string(target.width()) + "x" +
                                        std::to_string(target.height()));
    }
  }
  const std::size_t w = target.width();
  const std::size_t h = target.height();

  SeededStream count_rng = make_stream({key.seed, key.image_index, kAllSlots, kAllSlots});
  const std::size_t k = std::uniform_int_distribution<std::size_t>(cfg.k_min, cfg.k_max)(count_rng);

  AnomalyBundle bundle;
  bundle.anomaly_count = k;
  bundle.anomalies.resize(k);
  std::vector<Raster> composites(cfg.raters, target);

  for (std::size_t a = 0; a < k; ++a) {
    AnomalyRecord& record = bundle.anomalies[a];
    std::size_t rater = kAllSlots;
    try {
      SeededStream placement_rng = make_stream({key.seed, key.image_index, a, kAllSlots});
      const auto [pw, ph] = sample_patch_size(placement_rng, w, h, cfg);
      record.target = sample_placement(placement_rng, w, h, pw, ph);
      if (cfg.disjoint) {
        auto clashes = [&](const PatchRegion& r) {
          return std::any_of(bundle.anomalies.begin(), bundle.anomalies.begin() + static_cast<std::ptrdiff_t>(a),
                             [&](const AnomalyRecord& prev) { return overlaps(prev.target, r); });
        };
        int retries = 0;
        while (clashes(record.target)) {
          if (++retries > kMaxDisjointRetries) {
            fail(ErrorCode::DegenerateDistribution, "no disjoint placement after " +
                                                        std::to_string(kMaxDisjointRetries) + " retries");
          }
          record.target = sample_placement(placement_rng, w, h, pw, ph);
        }
      }

      const MaskDistribution dist = cfg.mask.for_patch(pw, ph);
      std::uniform_real_distribution<double> alpha(cfg.alpha_min, cfg.alpha_max);
      record.raters.resize(cfg.raters);
      for (rater = 0; rater < cfg.raters; ++rater) {
        SeededStream rng = make_stream({key.seed, key.image_index, a, rater});
        RaterDraw& draw = record.raters[rater];
        draw.source_index = rater % sources.size();
        draw.source = sample_placement(rng, w, h, pw, ph);
        draw.alpha = alpha(rng);
        draw.disc = sample_disc(rng, pw, ph, dist);

        const auto mask = rasterize_disc(draw.disc, pw, ph);
        SolverReport report;
        BlendOptions opts{cfg.backend, &mask, &report};
        blend_patch_into(composites[rater], sources[draw.source_index], record.target, draw.source,
                         BlendParams{draw.alpha, cfg.gain}, opts);
        bundle.max_residual = std::max(bundle.max_residual, report.residual_norm);
      }
    } catch (const Error& e) {
      std::string where = "anomaly " + std::to_string(a);
      if (rater != kAllSlots && rater < cfg.raters) where += " rater " + std::to_string(rater);
      throw Error(e.code(), where + ": " + e.what());
    }
  }

  bundle.mean_image = Raster(w, h);
  bundle.variance_map = Raster(w, h);
  aggregate(composites, bundle);
  bundle.label_map = Raster(w, h);
  bundle.binary_mask = Raster(w, h);
  for (std::size_t p = 0; p < target.size(); ++p) {
    const double label = std::abs(target.values()[p] - bundle.mean_image.values()[p]);
    bundle.label_map.values()[p] = label;
    bundle.binary_mask.values()[p] = label > cfg.label_threshold ? 1.0 : 0.0;
  }
  return bundle;
}

Raster anomaly_footprint(const AnomalyBundle& bundle, std::size_t w, std::size_t h) {
  Raster out(w, h, 0.0);
  for (const AnomalyRecord& a : bundle.anomalies) {
    for (const RaterDraw& d : a.raters) {
      const auto mask = rasterize_disc(d.disc, a.target.width, a.target.height);
      for (std::size_t v = 0; v < a.target.height; ++v)
        for (std::size_t u = 0; u < a.target.width; ++u)
          if (mask[v * a.target.width + u]) out.at(a.target.x + u, a.target.y + v) = 1.0;
    }
  }
  return out;
}

}  // namespace ppii
