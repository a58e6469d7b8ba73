#pragma once

// Test-side reference implementations. They are written independently of the
// library (explicit loops, full sorts) and only share plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline const std::vector<std::string> kTableLabels = {"Mouth", "Chest", "Elbow", "Navel", "Neck", "Head",
                                                      "Back",  "Ear",   "Hip",   "Leg",   "Wrist", "Eye"};

// Joined results, 12 default gestures; rows = classification result,
// columns = expected. The blank Chest/Back cell is 0.
inline const std::vector<std::vector<long>> kTwelveGestureCounts = {
    {27, 3, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},   {3, 34, 3, 2, 0, 1, 0, 1, 1, 1, 0, 0},
    {5, 1, 34, 1, 0, 0, 0, 0, 1, 0, 0, 0},   {0, 2, 0, 35, 0, 0, 2, 0, 3, 1, 0, 0},
    {0, 0, 0, 0, 40, 2, 0, 2, 0, 0, 0, 0},   {2, 0, 2, 0, 0, 35, 0, 1, 0, 0, 1, 0},
    {1, 0, 0, 0, 0, 0, 38, 0, 0, 3, 0, 0},   {2, 0, 0, 0, 0, 0, 0, 10, 1, 1, 1, 0},
    {0, 0, 0, 2, 0, 0, 0, 0, 33, 12, 0, 0},  {0, 0, 0, 0, 0, 0, 0, 0, 1, 22, 0, 0},
    {0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 38, 0},   {0, 0, 0, 0, 0, 1, 0, 26, 0, 0, 0, 40},
};
inline const std::vector<double> kTwelveGesturePercentRow = {67.5, 85, 85, 87.5, 100, 87.5, 95, 25, 82.5, 55, 95, 100};

// Joined results, 5-gesture session.
inline const std::vector<std::vector<long>> kFiveGestureCounts = {
    {37, 1, 0, 1, 0, 0, 3, 1, 1, 0, 1, 0},  {2, 38, 1, 2, 0, 0, 0, 0, 0, 0, 0, 0},
    {6, 1, 46, 0, 0, 0, 1, 0, 1, 0, 0, 0},  {0, 0, 0, 29, 0, 0, 0, 0, 0, 1, 0, 0},
    {0, 0, 0, 0, 40, 1, 0, 5, 0, 0, 0, 0},  {2, 0, 0, 0, 0, 15, 0, 0, 0, 0, 0, 0},
    {0, 0, 1, 0, 0, 0, 28, 0, 0, 0, 0, 1},  {0, 0, 0, 0, 0, 0, 0, 18, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 29, 0, 0, 0},  {0, 0, 0, 0, 0, 0, 0, 0, 0, 31, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 23, 0},  {1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 31},
};
// As recorded: rounding is inconsistent and the last cell reads 0 although the
// column is 31 of 32.
inline const std::vector<double> kFiveGesturePercentRowRecorded = {77, 95, 95.8, 90.6, 100, 93.8,
                                                                   87.5, 75, 90.6, 96.8, 95.8, 0};

// Mirror extension about the end samples: x[-k] = x[k], x[n-1+k] = x[n-1-k].
inline double mirrored(const std::vector<double>& x, long i) {
  const long n = static_cast<long>(x.size());
  if (n == 1) return x[0];
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return x[static_cast<std::size_t>(i)];
}

inline std::vector<double> convolve_mirrored(const std::vector<double>& x, const std::vector<double>& kernel) {
  const long half = static_cast<long>(kernel.size() / 2);
  std::vector<double> out(x.size(), 0.0);
  for (long i = 0; i < static_cast<long>(x.size()); ++i) {
    double acc = 0.0;
    for (long j = -half; j <= half; ++j) acc += kernel[static_cast<std::size_t>(j + half)] * mirrored(x, i + j);
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

inline std::vector<double> hanning_kernel(std::size_t w) {
  if (w == 1) return {1.0};
  std::vector<double> k(w);
  double sum = 0.0;
  for (std::size_t n = 0; n < w; ++n) {
    k[n] = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(n) / static_cast<double>(w - 1));
    sum += k[n];
  }
  for (auto& v : k) v /= sum;
  return k;
}

inline std::vector<double> box_kernel(std::size_t w) { return std::vector<double>(w, 1.0 / static_cast<double>(w)); }

struct Row {
  std::vector<double> x;
  std::string label;
};

struct Scored {
  std::string label;
  double confidence;
};

// Gaussian-weighted kNN: z-score with population statistics, full sort of
// every distance, explicit per-class sums, top 3 by confidence.
inline std::vector<Scored> knn(const std::vector<double>& q, const std::vector<Row>& rows,
                               const std::vector<std::string>& classes, std::size_t k) {
  const std::size_t dim = q.size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(dim, 0.0), sd(dim, 0.0);
  for (std::size_t f = 0; f < dim; ++f) {
    for (const auto& r : rows) mean[f] += r.x[f];
    mean[f] /= n;
    for (const auto& r : rows) sd[f] += (r.x[f] - mean[f]) * (r.x[f] - mean[f]);
    sd[f] = std::sqrt(sd[f] / n);
    if (sd[f] == 0.0) sd[f] = 1.0;
  }
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    for (std::size_t f = 0; f < dim; ++f) {
      const double a = (q[f] - mean[f]) / sd[f];
      const double b = (rows[i].x[f] - mean[f]) / sd[f];
      s += (a - b) * (a - b);
    }
    d.emplace_back(std::sqrt(s), i);
  }
  std::sort(d.begin(), d.end());
  const std::size_t kk = std::min(k, rows.size());
  double sigma = d[kk - 1].first;
  if (sigma == 0.0) sigma = 1e-9;
  std::map<std::string, double> sums;
  for (const auto& c : classes) sums[c] = 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < kk; ++j) {
    const double w = std::exp(-d[j].first * d[j].first / (2.0 * sigma * sigma));
    sums[rows[d[j].second].label] += w;
    total += w;
  }
  std::vector<Scored> out;
  for (const auto& c : classes) out.push_back({c, sums[c] / total});
  std::stable_sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) { return a.confidence > b.confidence; });
  if (out.size() > 3) out.resize(3);
  return out;
}

// Confirm-window reference model over abstract events from the pending
// state: 'A' = action press (Multichoice), 'C' = cancel, 'T' = timer.
struct SessionOutcome {
  enum Kind { pending, triggered, cancelled, illegal } kind = pending;
  std::size_t index = 0;  // suggestion index when pending or triggered
  std::size_t step = 0;   // failing step when illegal
  friend bool operator==(const SessionOutcome&, const SessionOutcome&) = default;
};

inline SessionOutcome replay_pending(std::size_t list_length, const std::string& events) {
  SessionOutcome s;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (s.kind != SessionOutcome::pending) return {SessionOutcome::illegal, 0, i};
    const char e = events[i];
    if (e == 'T') {
      s.kind = SessionOutcome::triggered;
    } else if (e == 'C') {
      s.kind = SessionOutcome::cancelled;
    } else if (s.index + 1 < list_length) {
      ++s.index;
    } else {
      s.kind = SessionOutcome::cancelled;
    }
  }
  return s;
}

}  // namespace oracle
