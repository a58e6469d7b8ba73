#pragma once

// Feature-based recognition: twelve per-gesture statistics classified with a
// Gaussian-weighted kNN or a Gaussian Naive Bayes, reported as a top-3 ranking.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/signal_core.hpp"
#include "mbs/text.hpp"

namespace mbs {

inline constexpr std::size_t kFeatureCount = 12;
inline constexpr std::size_t kRankingSize = 3;
inline constexpr std::size_t kPolicyK = 50;

enum class Feature : std::size_t {
  max_x, min_x, max_y, min_y, max_z, min_z,
  final_x, final_y, final_z,
  amp_max, amp_min, amp_mean,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "max_x", "min_x", "max_y", "min_y", "max_z", "min_z",
    "final_x", "final_y", "final_z", "amp_max", "amp_min", "amp_mean"};

template <std::size_t Dim>
using Point = std::array<double, Dim>;

struct FeatureVector {
  Point<kFeatureCount> values{};
  std::optional<std::string> label;

  double operator[](Feature f) const noexcept { return values[static_cast<std::size_t>(f)]; }
  double& operator[](Feature f) noexcept { return values[static_cast<std::size_t>(f)]; }
};

struct FeatureConfig {
  bool center = true;
  double baseline_ms = kDefaultBaselineMs;
  SmoothingSpec smoothing{SmoothingKind::hanning, kDefaultSmoothingWindow};
};

// Center, Hanning-smooth, then take per-axis max/min/final value and the
// max/min/mean amplitude of the smoothed signal.
inline FeatureVector extract_features(const Trace& trace, const FeatureConfig& cfg = {}) {
  if (trace.empty()) throw Error(Errc::empty_trace, "cannot extract features from an empty trace");
  if (trace.size() < cfg.smoothing.window) throw Error(Errc::trace_too_short, "trace shorter than smoothing window");
  const Trace centered = cfg.center ? center_baseline(trace, cfg.baseline_ms) : trace;
  const Trace s = smooth(centered, cfg.smoothing);

  FeatureVector f;
  for (int axis = 0; axis < 3; ++axis) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& sample : s.samples) {
      hi = std::max(hi, sample.axis(axis));
      lo = std::min(lo, sample.axis(axis));
    }
    f.values[2 * static_cast<std::size_t>(axis)] = hi;
    f.values[2 * static_cast<std::size_t>(axis) + 1] = lo;
    f.values[6 + static_cast<std::size_t>(axis)] = s.samples.back().axis(axis);
  }
  double amp_hi = 0.0;
  double amp_lo = std::numeric_limits<double>::infinity();
  double amp_sum = 0.0;
  for (const auto& sample : s.samples) {
    const double a = amplitude(sample);
    amp_hi = std::max(amp_hi, a);
    amp_lo = std::min(amp_lo, a);
    amp_sum += a;
  }
  f[Feature::amp_max] = amp_hi;
  f[Feature::amp_min] = amp_lo;
  f[Feature::amp_mean] = std::clamp(amp_sum / static_cast<double>(s.size()), amp_lo, amp_hi);
  return f;
}

// Labeled rows plus the class universe in order of first appearance.
template <std::size_t Dim>
class BasicTrainingSet {
 public:
  struct Row {
    Point<Dim> x{};
    std::size_t class_id = 0;
  };

  void add(const Point<Dim>& x, std::string_view label) {
    if (label.empty()) throw Error(Errc::empty_label, "training rows must be labeled");
    rows_.push_back({x, intern(label)});
  }

  void append(const BasicTrainingSet& other) {
    for (const auto& r : other.rows_) add(r.x, other.classes_[r.class_id]);
  }

  // Copy without one row; the class universe is kept as is.
  BasicTrainingSet without_row(std::size_t index) const {
    BasicTrainingSet out;
    out.classes_ = classes_;
    out.rows_.reserve(rows_.size() - 1);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if (i != index) out.rows_.push_back(rows_[i]);
    }
    return out;
  }

  std::optional<std::size_t> find_class(std::string_view label) const {
    for (std::size_t i = 0; i < classes_.size(); ++i) {
      if (classes_[i] == label) return i;
    }
    return std::nullopt;
  }

  const std::vector<Row>& rows() const noexcept { return rows_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  const std::string& label_of(std::size_t row) const { return classes_[rows_[row].class_id]; }
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }

  std::vector<std::size_t> class_counts() const {
    std::vector<std::size_t> counts(classes_.size(), 0);
    for (const auto& r : rows_) ++counts[r.class_id];
    return counts;
  }

 private:
  std::size_t intern(std::string_view label) {
    if (auto found = find_class(label)) return *found;
    classes_.emplace_back(label);
    return classes_.size() - 1;
  }

  std::vector<Row> rows_;
  std::vector<std::string> classes_;
};

using TrainingSet = BasicTrainingSet<kFeatureCount>;

inline void add(TrainingSet& ts, const FeatureVector& f) {
  if (!f.label) throw Error(Errc::empty_label, "feature vector has no label");
  ts.add(f.values, *f.label);
}

struct RankedLabel {
  std::string label;
  double confidence = 0.0;
};

// Top min(3, #classes) hypotheses, by descending confidence.
struct Ranking {
  std::vector<RankedLabel> entries;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }
  const RankedLabel& top() const {
    if (entries.empty()) throw Error(Errc::invalid_argument, "empty ranking");
    return entries.front();
  }
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.label);
    return out;
  }
};

// Equal confidences keep class-universe order.
inline Ranking rank_top(std::span<const std::string> classes, std::span<const double> confidence,
                        std::size_t limit = kRankingSize) {
  std::vector<std::size_t> order(classes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return confidence[a] > confidence[b]; });
  Ranking r;
  for (std::size_t i = 0; i < std::min(limit, order.size()); ++i) {
    r.entries.push_back({classes[order[i]], std::clamp(confidence[order[i]], 0.0, 1.0)});
  }
  return r;
}

// Per-feature z-score statistics of a training set. Constant features keep
// unit scale.
template <std::size_t Dim>
struct ZScore {
  Point<Dim> mean{};
  Point<Dim> scale{};

  static ZScore fit(const BasicTrainingSet<Dim>& ts) {
    ZScore z;
    const auto n = static_cast<double>(ts.size());
    for (const auto& r : ts.rows()) {
      for (std::size_t f = 0; f < Dim; ++f) z.mean[f] += r.x[f];
    }
    for (auto& m : z.mean) m /= n;
    Point<Dim> var{};
    for (const auto& r : ts.rows()) {
      for (std::size_t f = 0; f < Dim; ++f) var[f] += (r.x[f] - z.mean[f]) * (r.x[f] - z.mean[f]);
    }
    for (std::size_t f = 0; f < Dim; ++f) {
      const double sd = std::sqrt(var[f] / n);
      z.scale[f] = sd > 0.0 ? sd : 1.0;
    }
    return z;
  }

  Point<Dim> apply(const Point<Dim>& x) const {
    Point<Dim> out;
    for (std::size_t f = 0; f < Dim; ++f) out[f] = (x[f] - mean[f]) / scale[f];
    return out;
  }
};

template <std::size_t Dim>
double euclidean(const Point<Dim>& a, const Point<Dim>& b) {
  double s = 0.0;
  for (std::size_t f = 0; f < Dim; ++f) s += (a[f] - b[f]) * (a[f] - b[f]);
  return std::sqrt(s);
}

// k nearest rows on z-scored features (distance ties by row order), each
// weighted exp(-d^2 / 2 sigma^2) with sigma the k-th neighbor distance.
template <std::size_t Dim>
Ranking knn_classify(const Point<Dim>& q, const BasicTrainingSet<Dim>& ts, std::size_t k) {
  if (ts.empty()) throw Error(Errc::empty_training_set, "kNN needs at least one training row");
  if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
  const std::size_t keff = std::min(k, ts.size());
  const auto z = ZScore<Dim>::fit(ts);
  const auto zq = z.apply(q);

  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) dist.emplace_back(euclidean(zq, z.apply(ts.rows()[i].x)), i);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(keff), dist.end());

  double sigma = dist[keff - 1].first;
  if (sigma == 0.0) sigma = 1e-9;
  std::vector<double> conf(ts.classes().size(), 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < keff; ++j) {
    const double d = dist[j].first;
    const double w = std::exp(-(d * d) / (2.0 * sigma * sigma));
    conf[ts.rows()[dist[j].second].class_id] += w;
    total += w;
  }
  for (auto& c : conf) c /= total;
  return rank_top(ts.classes(), conf);
}

// Gaussian Naive Bayes with relative-frequency priors. Class variances are
// floored at max(1e-6 * pooled feature variance, 1e-12).
template <std::size_t Dim>
std::vector<double> bayes_posteriors(const Point<Dim>& q, const BasicTrainingSet<Dim>& ts) {
  if (ts.empty()) throw Error(Errc::empty_training_set, "Naive Bayes needs at least one training row");
  const std::size_t nc = ts.classes().size();
  const auto n = static_cast<double>(ts.size());
  const auto counts = ts.class_counts();

  Point<Dim> pooled_mean{};
  for (const auto& r : ts.rows()) {
    for (std::size_t f = 0; f < Dim; ++f) pooled_mean[f] += r.x[f] / n;
  }
  Point<Dim> pooled_var{};
  for (const auto& r : ts.rows()) {
    for (std::size_t f = 0; f < Dim; ++f) pooled_var[f] += (r.x[f] - pooled_mean[f]) * (r.x[f] - pooled_mean[f]) / n;
  }

  std::vector<Point<Dim>> mean(nc, Point<Dim>{});
  std::vector<Point<Dim>> var(nc, Point<Dim>{});
  for (const auto& r : ts.rows()) {
    for (std::size_t f = 0; f < Dim; ++f) mean[r.class_id][f] += r.x[f];
  }
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto& m : mean[c]) m /= static_cast<double>(counts[c]);
  }
  for (const auto& r : ts.rows()) {
    for (std::size_t f = 0; f < Dim; ++f) {
      const double d = r.x[f] - mean[r.class_id][f];
      var[r.class_id][f] += d * d;
    }
  }

  std::vector<double> log_post(nc, -std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < nc; ++c) {
    if (counts[c] == 0) continue;
    double lp = std::log(static_cast<double>(counts[c]) / n);
    for (std::size_t f = 0; f < Dim; ++f) {
      const double floor = std::max(1e-6 * pooled_var[f], 1e-12);
      const double v = std::max(var[c][f] / static_cast<double>(counts[c]), floor);
      const double d = q[f] - mean[c][f];
      lp += -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
    log_post[c] = lp;
  }
  const double top = *std::max_element(log_post.begin(), log_post.end());
  std::vector<double> post(nc, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < nc; ++c) {
    post[c] = std::exp(log_post[c] - top);
    total += post[c];
  }
  for (auto& p : post) p /= total;
  return post;
}

template <std::size_t Dim>
Ranking bayes_classify(const Point<Dim>& q, const BasicTrainingSet<Dim>& ts) {
  const auto post = bayes_posteriors(q, ts);
  return rank_top(ts.classes(), post);
}

// With a pooled corpus: kNN over pooled + user rows. User data only: Naive Bayes.
template <std::size_t Dim>
Ranking classify_policy(const Point<Dim>& q, const BasicTrainingSet<Dim>& user, const BasicTrainingSet<Dim>* pooled,
                        std::size_t k = kPolicyK) {
  if (pooled != nullptr) {
    BasicTrainingSet<Dim> merged = *pooled;
    merged.append(user);
    if (merged.empty()) throw Error(Errc::empty_training_set, "no training data");
    return knn_classify(q, merged, k);
  }
  if (user.empty()) throw Error(Errc::empty_training_set, "no training data");
  return bayes_classify(q, user);
}

inline Ranking knn_classify(const FeatureVector& q, const TrainingSet& ts, std::size_t k) {
  return knn_classify(q.values, ts, k);
}
inline Ranking bayes_classify(const FeatureVector& q, const TrainingSet& ts) { return bayes_classify(q.values, ts); }
inline Ranking classify_policy(const FeatureVector& q, const TrainingSet& user, const TrainingSet* pooled,
                               std::size_t k = kPolicyK) {
  return classify_policy(q.values, user, pooled, k);
}

// Training-set CSV with the fixed column order of kFeatureNames plus `label`.
inline std::string feature_csv_header() {
  std::string h;
  for (const auto& name : kFeatureNames) {
    h += name;
    h += ',';
  }
  return h + "label";
}

inline std::string format_feature_row(const Point<kFeatureCount>& x, std::string_view label) {
  std::string out;
  for (double v : x) out += text::format_double(v) + ',';
  out += label;
  return out;
}

inline std::string format_training_set(const TrainingSet& ts) {
  std::string out = feature_csv_header() + '\n';
  for (std::size_t i = 0; i < ts.size(); ++i) out += format_feature_row(ts.rows()[i].x, ts.label_of(i)) + '\n';
  return out;
}

// Rows may leave the label empty; those come back with no label.
inline std::vector<FeatureVector> parse_feature_rows(std::string_view contents) {
  std::vector<FeatureVector> out;
  bool saw_header = false;
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != feature_csv_header()) throw Error(Errc::parse_error, "expected header '" + feature_csv_header() + "'");
      saw_header = true;
      continue;
    }
    const auto c = text::split(line, ',');
    if (c.size() != kFeatureCount + 1) throw Error(Errc::parse_error, "feature rows need 13 columns");
    FeatureVector f;
    for (std::size_t i = 0; i < kFeatureCount; ++i) f.values[i] = text::parse_double(c[i]);
    if (!c.back().empty()) f.label = c.back();
    out.push_back(std::move(f));
  }
  if (!saw_header) throw Error(Errc::parse_error, "missing feature header");
  return out;
}

inline TrainingSet parse_training_set(std::string_view contents) {
  TrainingSet ts;
  for (const auto& f : parse_feature_rows(contents)) add(ts, f);
  return ts;
}

}  // namespace mbs
