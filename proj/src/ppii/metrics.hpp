#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ppii/raster.hpp"

namespace ppii {

enum class ScoreLevel { Pixel, Sample };

struct ScoredSet {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;  // 0 = in-distribution, 1 = anomalous
  ScoreLevel level = ScoreLevel::Sample;
};

// Mann-Whitney AUROC: share of (positive, negative) pairs ranked correctly,
// ties credited 1/2. Throws UndefinedMetric without both classes.
double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels);
inline double auroc(const ScoredSet& set) { return auroc(set.scores, set.labels); }

// Step-sum AP over descending-score cut points, tied scores entering together.
// Throws UndefinedMetric without positives.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels);
inline double average_precision(const ScoredSet& set) { return average_precision(set.scores, set.labels); }

struct Labeling {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::int32_t> labels;  // 0 background, 1..count in row-major first-pixel order
  std::size_t count = 0;
};

// Two-pass union-find labelling of the nonzero pixels; connectivity 4 or 8.
Labeling connected_components(const Raster& mask, int connectivity = 8);

enum class HitCriterion {
  AnyOverlap,    // a lesion is hit by any predicted pixel above threshold
  CenterOfMass,  // a lesion is hit when a predicted component's centroid falls inside it
};

struct FrocOptions {
  int connectivity = 8;
  HitCriterion hit = HitCriterion::AnyOverlap;
};

struct FrocPoint {
  double avg_fp = 0.0;
  double sensitivity = 0.0;
};

struct FrocCurve {
  std::vector<FrocPoint> points;
  std::vector<double> thresholds;  // ascending, aligned with points
  std::size_t lesions = 0;
  std::size_t images = 0;
};

// `count` thresholds evenly spaced strictly inside (0,1): i / (count + 1).
std::vector<double> default_thresholds(std::size_t count = 256);

// Predictions are binarised with "> t"; gt masks are nonzero = lesion.
// Throws InvalidInput on misaligned lists and UndefinedMetric when the
// ground truth holds no lesion at all.
FrocCurve froc(std::span<const Raster> pred_maps, std::span<const Raster> gt_masks, std::span<const double> thresholds,
               const FrocOptions& opts = {});

// Same curve, evaluated independently at every threshold by labelling the
// binarised prediction. Quadratic in practice; kept as the reference route
// and for the centroid criterion.
FrocCurve froc_reference(std::span<const Raster> pred_maps, std::span<const Raster> gt_masks,
                         std::span<const double> thresholds, const FrocOptions& opts = {});

// Linear interpolation of sensitivity at target_fp, clamped to the curve ends.
double sensitivity_at_avg_fp(const FrocCurve& curve, double target_fp = 10.0);

enum class Reducer { Max, Mean, TopKMean };

struct SampleReducer {
  Reducer kind = Reducer::Max;
  std::size_t k = 1;  // TopKMean only
};

double sample_score(const Raster& pred_map, const SampleReducer& reducer = {});

}  // namespace ppii
