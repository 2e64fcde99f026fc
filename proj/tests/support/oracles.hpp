#pragma once

// Brute-force reference implementations used to check the metric routes.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "ppii/raster.hpp"

namespace oracles {

// Every (positive, negative) pair, ties worth one half.
inline double auroc_pairs(const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!l[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (l[j]) continue;
      pairs += 1;
      wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

// Step sum over the distinct scores, each cut recounted from scratch.
inline double ap_step_sum(const std::vector<double>& s, const std::vector<std::uint8_t>& l) {
  std::set<double, std::greater<>> cuts(s.begin(), s.end());
  double positives = 0;
  for (auto v : l) positives += v;
  double ap = 0, prev_recall = 0;
  for (double t : cuts) {
    double tp = 0, k = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] >= t) {
        k += 1;
        tp += l[i];
      }
    }
    const double recall = tp / positives;
    ap += (recall - prev_recall) * (tp / k);
    prev_recall = recall;
  }
  return ap;
}

// Breadth-first flood fill from every unvisited foreground pixel.
inline std::size_t flood_fill_count(const ppii::Raster& mask, int connectivity) {
  const long w = static_cast<long>(mask.width()), h = static_cast<long>(mask.height());
  std::vector<char> seen(mask.size(), 0);
  std::size_t count = 0;
  for (long y0 = 0; y0 < h; ++y0) {
    for (long x0 = 0; x0 < w; ++x0) {
      if (mask.at(x0, y0) == 0.0 || seen[y0 * w + x0]) continue;
      ++count;
      std::queue<std::pair<long, long>> q;
      q.push({x0, y0});
      seen[y0 * w + x0] = 1;
      while (!q.empty()) {
        const auto [x, y] = q.front();
        q.pop();
        for (long dy = -1; dy <= 1; ++dy) {
          for (long dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (connectivity == 4 && dx != 0 && dy != 0) continue;
            const long nx = x + dx, ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            if (mask.at(nx, ny) == 0.0 || seen[ny * w + nx]) continue;
            seen[ny * w + nx] = 1;
            q.push({nx, ny});
          }
        }
      }
    }
  }
  return count;
}

}  // namespace oracles
