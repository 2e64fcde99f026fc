#include "ppii/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ppii/error.hpp"

namespace ppii {

namespace {

void check_scored(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    fail(ErrorCode::InvalidInput, "scores (" + std::to_string(scores.size()) + ") and labels (" +
                                      std::to_string(labels.size()) + ") differ in length");
  }
}

std::vector<std::size_t> order_by_score(std::span<const double> scores, bool descending) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (descending) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  } else {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  }
  return order;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t add() {
    parent_.push_back(parent_.size());
    return parent_.size() - 1;
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns the surviving root; the smaller index wins.
  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
};

void check_connectivity(int connectivity) {
  if (connectivity != 4 && connectivity != 8) fail(ErrorCode::InvalidInput, "connectivity must be 4 or 8");
}

void check_aligned(std::span<const Raster> preds, std::span<const Raster> gts) {
  if (preds.size() != gts.size()) {
    fail(ErrorCode::InvalidInput, "froc: " + std::to_string(preds.size()) + " predictions vs " +
                                      std::to_string(gts.size()) + " ground-truth masks");
  }
  if (preds.empty()) fail(ErrorCode::InvalidInput, "froc: no images");
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!preds[i].same_shape(gts[i])) fail(ErrorCode::InvalidInput, "froc: image " + std::to_string(i) + " shape mismatch");
  }
}

void check_thresholds(std::span<const double> thresholds) {
  if (thresholds.empty()) fail(ErrorCode::InvalidInput, "froc: no thresholds");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) fail(ErrorCode::InvalidInput, "froc: thresholds must ascend");
}

FrocCurve finish_curve(std::span<const double> thresholds, const std::vector<std::size_t>& detected,
                       const std::vector<std::size_t>& false_pos, std::size_t lesions, std::size_t images) {
  if (lesions == 0) fail(ErrorCode::UndefinedMetric, "froc: ground truth contains no lesions");
  FrocCurve curve;
  curve.lesions = lesions;
  curve.images = images;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    curve.points.push_back({static_cast<double>(false_pos[t]) / static_cast<double>(images),
                            static_cast<double>(detected[t]) / static_cast<double>(lesions)});
  }
  return curve;
}

template <typename Fn>
void for_each_neighbor(std::size_t x, std::size_t y, std::size_t w, std::size_t h, int connectivity, Fn&& fn) {
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      if (connectivity == 4 && dx != 0 && dy != 0) continue;
      const auto nx = static_cast<std::ptrdiff_t>(x) + dx;
      const auto ny = static_cast<std::ptrdiff_t>(y) + dy;
      if (nx < 0 || ny < 0 || nx >= static_cast<std::ptrdiff_t>(w) || ny >= static_cast<std::ptrdiff_t>(h)) continue;
      fn(static_cast<std::size_t>(ny) * w + static_cast<std::size_t>(nx));
    }
  }
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_scored(scores, labels);
  const auto order = order_by_score(scores, false);
  // Twice the Mann-Whitney U, kept integral so ties are exact.
  std::uint64_t twice_u = 0;
  std::uint64_t neg_below = 0;
  std::uint64_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::uint64_t pos = 0, neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] ? pos : neg) += 1;
      ++j;
    }
    twice_u += 2 * pos * neg_below + pos * neg;
    neg_below += neg;
    positives += pos;
    i = j;
  }
  const std::uint64_t negatives = neg_below;
  if (positives == 0 || negatives == 0) fail(ErrorCode::UndefinedMetric, "auroc needs at least one positive and one negative");
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_scored(scores, labels);
  const std::size_t positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
  if (positives == 0) fail(ErrorCode::UndefinedMetric, "average precision needs at least one positive");
  const auto order = order_by_score(scores, true);
  double ap = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      if (labels[order[j]]) ++tp;
      ++j;
    }
    seen = j;
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

Labeling connected_components(const Raster& mask, int connectivity) {
  check_connectivity(connectivity);
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  Labeling out{w, h, std::vector<std::int32_t>(w * h, 0), 0};
  std::vector<std::size_t> provisional(w * h, 0);  // 0 = background, otherwise union-find id + 1
  UnionFind uf(0);

  // First pass: provisional labels from the already-visited neighbours.
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (mask.at(x, y) == 0.0) continue;
      std::size_t label = 0;
      auto visit = [&](std::size_t nx, std::size_t ny) {
        const std::size_t n = provisional[ny * w + nx];
        if (n == 0) return;
        label = label == 0 ? n : uf.unite(label - 1, n - 1) + 1;
      };
      if (x > 0) visit(x - 1, y);
      if (y > 0) {
        visit(x, y - 1);
        if (connectivity == 8) {
          if (x > 0) visit(x - 1, y - 1);
          if (x + 1 < w) visit(x + 1, y - 1);
        }
      }
      if (label == 0) label = uf.add() + 1;
      provisional[y * w + x] = label;
    }
  }

  // Second pass: resolve equivalences, numbering roots in row-major order.
  std::vector<std::int32_t> final_of_root;
  for (std::size_t p = 0; p < w * h; ++p) {
    if (provisional[p] == 0) continue;
    const std::size_t root = uf.find(provisional[p] - 1);
    if (root >= final_of_root.size()) final_of_root.resize(root + 1, 0);
    if (final_of_root[root] == 0) final_of_root[root] = static_cast<std::int32_t>(++out.count);
    out.labels[p] = final_of_root[root];
  }
  return out;
}

std::vector<double> default_thresholds(std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = static_cast<double>(i + 1) / static_cast<double>(count + 1);
  return t;
}

FrocCurve froc(std::span<const Raster> pred_maps, std::span<const Raster> gt_masks, std::span<const double> thresholds,
               const FrocOptions& opts) {
  if (opts.hit != HitCriterion::AnyOverlap) return froc_reference(pred_maps, gt_masks, thresholds, opts);
  check_connectivity(opts.connectivity);
  check_aligned(pred_maps, gt_masks);
  check_thresholds(thresholds);

  const std::size_t nt = thresholds.size();
  std::vector<std::size_t> detected(nt, 0), false_pos(nt, 0);
  std::size_t lesions = 0;

  for (std::size_t img = 0; img < pred_maps.size(); ++img) {
    const Raster& pred = pred_maps[img];
    const Raster& gt = gt_masks[img];
    const std::size_t w = pred.width();
    const std::size_t h = pred.height();

    // A lesion is hit at t iff its hottest predicted pixel exceeds t.
    const Labeling lesion = connected_components(gt, opts.connectivity);
    std::vector<double> lesion_peak(lesion.count, -INFINITY);
    for (std::size_t p = 0; p < w * h; ++p)
      if (lesion.labels[p]) {
        double& peak = lesion_peak[static_cast<std::size_t>(lesion.labels[p] - 1)];
        peak = std::max(peak, pred.values()[p]);
      }
    lesions += lesion.count;
    for (double peak : lesion_peak) {
      const auto hit_until = std::lower_bound(thresholds.begin(), thresholds.end(), peak);
      for (auto t = thresholds.begin(); t != hit_until; ++t) ++detected[static_cast<std::size_t>(t - thresholds.begin())];
    }

    // Predicted components appear and merge as the threshold falls; track
    // how many of them touch no lesion pixel.
    const auto order = order_by_score(pred.values(), true);
    std::vector<std::size_t> node(w * h, SIZE_MAX);
    std::vector<std::uint8_t> touches;
    UnionFind uf(0);
    std::size_t clean = 0;
    std::size_t next = 0;
    for (std::size_t ti = nt; ti-- > 0;) {
      const double t = thresholds[ti];
      while (next < order.size() && pred.values()[order[next]] > t) {
        const std::size_t p = order[next++];
        const std::size_t id = uf.add();
        touches.push_back(gt.values()[p] != 0.0);
        node[p] = id;
        if (!touches[id]) ++clean;
        for_each_neighbor(p % w, p / w, w, h, opts.connectivity, [&](std::size_t q) {
          if (node[q] == SIZE_MAX) return;
          const std::size_t a = uf.find(node[p]);
          const std::size_t b = uf.find(node[q]);
          if (a == b) return;
          // Merging loses one clean component unless both already touch a lesion.
          if (!touches[a] || !touches[b]) --clean;
          const std::size_t root = uf.unite(a, b);
          touches[root] = touches[a] || touches[b];
        });
      }
      false_pos[ti] += clean;
    }
  }
  return finish_curve(thresholds, detected, false_pos, lesions, pred_maps.size());
}

FrocCurve froc_reference(std::span<const Raster> pred_maps, std::span<const Raster> gt_masks,
                         std::span<const double> thresholds, const FrocOptions& opts) {
  check_connectivity(opts.connectivity);
  check_aligned(pred_maps, gt_masks);
  check_thresholds(thresholds);
  const std::size_t nt = thresholds.size();
  std::vector<std::size_t> detected(nt, 0), false_pos(nt, 0);
  std::size_t lesions = 0;

  for (std::size_t img = 0; img < pred_maps.size(); ++img) {
    const Raster& pred = pred_maps[img];
    const Raster& gt = gt_masks[img];
    const std::size_t w = pred.width();
    const Labeling lesion = connected_components(gt, opts.connectivity);
    lesions += lesion.count;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      Raster binary(pred.width(), pred.height());
      for (std::size_t p = 0; p < pred.size(); ++p) binary.values()[p] = pred.values()[p] > thresholds[ti] ? 1.0 : 0.0;
      const Labeling comp = connected_components(binary, opts.connectivity);
      std::vector<std::uint8_t> lesion_hit(lesion.count, 0);

      if (opts.hit == HitCriterion::AnyOverlap) {
        std::vector<std::uint8_t> comp_touches(comp.count, 0);
        for (std::size_t p = 0; p < pred.size(); ++p) {
          if (!comp.labels[p] || !lesion.labels[p]) continue;
          comp_touches[static_cast<std::size_t>(comp.labels[p] - 1)] = 1;
          lesion_hit[static_cast<std::size_t>(lesion.labels[p] - 1)] = 1;
        }
        false_pos[ti] += static_cast<std::size_t>(std::count(comp_touches.begin(), comp_touches.end(), 0));
      } else {
        std::vector<double> sx(comp.count, 0.0), sy(comp.count, 0.0), n(comp.count, 0.0);
        for (std::size_t p = 0; p < pred.size(); ++p) {
          if (!comp.labels[p]) continue;
          const auto c = static_cast<std::size_t>(comp.labels[p] - 1);
          sx[c] += static_cast<double>(p % w);
          sy[c] += static_cast<double>(p / w);
          n[c] += 1.0;
        }
        for (std::size_t c = 0; c < comp.count; ++c) {
          const auto cx = static_cast<std::size_t>(std::lround(sx[c] / n[c]));
          const auto cy = static_cast<std::size_t>(std::lround(sy[c] / n[c]));
          const std::int32_t l = lesion.labels[cy * w + cx];
          if (l) {
            lesion_hit[static_cast<std::size_t>(l - 1)] = 1;
          } else {
            ++false_pos[ti];
          }
        }
      }
      detected[ti] += static_cast<std::size_t>(std::count(lesion_hit.begin(), lesion_hit.end(), 1));
    }
  }
  return finish_curve(thresholds, detected, false_pos, lesions, pred_maps.size());
}

double sensitivity_at_avg_fp(const FrocCurve& curve, double target_fp) {
  if (curve.points.empty()) fail(ErrorCode::InvalidInput, "empty FROC curve");
  // Operating points by ascending FP; where several share one FP rate the
  // best sensitivity is kept.
  std::vector<FrocPoint> pts = curve.points;
  std::sort(pts.begin(), pts.end(), [](const FrocPoint& a, const FrocPoint& b) {
    return a.avg_fp < b.avg_fp || (a.avg_fp == b.avg_fp && a.sensitivity > b.sensitivity);
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const FrocPoint& a, const FrocPoint& b) { return a.avg_fp == b.avg_fp; }),
            pts.end());
  if (target_fp <= pts.front().avg_fp) return pts.front().sensitivity;
  if (target_fp >= pts.back().avg_fp) return pts.back().sensitivity;
  const auto hi = std::lower_bound(pts.begin(), pts.end(), target_fp,
                                   [](const FrocPoint& p, double v) { return p.avg_fp < v; });
  const auto lo = hi - 1;
  if (hi->avg_fp == target_fp) return hi->sensitivity;
  const double f = (target_fp - lo->avg_fp) / (hi->avg_fp - lo->avg_fp);
  return lo->sensitivity + f * (hi->sensitivity - lo->sensitivity);
}

double sample_score(const Raster& pred_map, const SampleReducer& reducer) {
  if (pred_map.empty()) fail(ErrorCode::InvalidInput, "sample_score: empty map");
  const auto& v = pred_map.values();
  switch (reducer.kind) {
    case Reducer::Max: return *std::max_element(v.begin(), v.end());
    case Reducer::Mean: return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    case Reducer::TopKMean: {
      if (reducer.k == 0) fail(ErrorCode::InvalidInput, "sample_score: topk_mean needs k >= 1");
      const std::size_t k = std::min(reducer.k, v.size());
      std::vector<double> top(v.begin(), v.end());
      std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(), std::greater<>());
      return std::accumulate(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), 0.0) / static_cast<double>(k);
    }
  }
  fail(ErrorCode::InvalidInput, "sample_score: unknown reducer");
}

}  // namespace ppii
