#pragma once

// Accelerometer traces and the pre-processing every pipeline shares:
// calibration from raw counts, baseline centering, window smoothing and
// amplitude.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/vec3.hpp"

namespace mbs {

inline constexpr double kGravity = 9.81;  // m/s^2
inline constexpr double kDefaultSampleRateHz = 1000.0;
inline constexpr double kDefaultBaselineMs = 100.0;
inline constexpr std::size_t kDefaultSmoothingWindow = 51;

struct Sample {
  double t_ms = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;

  constexpr Vec3 accel() const noexcept { return {ax, ay, az}; }
  constexpr double axis(int i) const noexcept { return i == 0 ? ax : i == 1 ? ay : az; }
  constexpr double& axis(int i) noexcept { return i == 0 ? ax : i == 1 ? ay : az; }

  friend constexpr bool operator==(const Sample&, const Sample&) = default;
};

struct Trace {
  std::vector<Sample> samples;
  double sample_rate_hz = kDefaultSampleRateHz;
  bool calibrated = false;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double period_ms() const noexcept { return 1000.0 / sample_rate_hz; }

  // Time covered by the samples, counting the last sample's own period.
  double duration_ms() const noexcept {
    return samples.empty() ? 0.0 : samples.back().t_ms - samples.front().t_ms + period_ms();
  }

  std::vector<double> axis_series(int axis) const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.axis(axis));
    return out;
  }

  friend bool operator==(const Trace&, const Trace&) = default;
};

// Throws InvalidTrace unless timestamps are non-negative, strictly increasing
// and within +/-50% of the nominal period.
inline void validate(const Trace& trace) {
  if (trace.empty()) throw Error(Errc::empty_trace, "trace has no samples");
  if (!(trace.sample_rate_hz > 0.0) || !std::isfinite(trace.sample_rate_hz)) {
    throw Error(Errc::invalid_trace, "sample rate must be positive");
  }
  const double period = trace.period_ms();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Sample& s = trace.samples[i];
    if (!(s.t_ms >= 0.0)) throw Error(Errc::invalid_trace, "negative timestamp at row " + std::to_string(i));
    if (!std::isfinite(s.ax) || !std::isfinite(s.ay) || !std::isfinite(s.az)) {
      throw Error(Errc::invalid_trace, "non-finite value at row " + std::to_string(i));
    }
    if (i == 0) continue;
    const double dt = s.t_ms - trace.samples[i - 1].t_ms;
    if (dt < 0.5 * period || dt > 1.5 * period) {
      throw Error(Errc::invalid_trace, "timestamp step " + std::to_string(dt) + " ms at row " +
                                           std::to_string(i) + " outside tolerance");
    }
  }
}

struct AxisCalibration {
  double offset = 0.0;  // counts
  double gain = 1.0;    // (m/s^2) per count
};

struct Calibration {
  std::array<AxisCalibration, 3> axes{};

  static Calibration identity() { return {}; }
};

// Maps raw counts to m/s^2 as (raw - offset) * gain on every axis.
inline Trace calibrate(const Trace& raw, const Calibration& cal) {
  if (raw.calibrated) throw Error(Errc::already_calibrated, "trace is already in m/s^2");
  for (const auto& a : cal.axes) {
    if (!std::isfinite(a.gain) || a.gain == 0.0 || !std::isfinite(a.offset)) {
      throw Error(Errc::invalid_calibration, "gain must be finite and nonzero");
    }
  }
  Trace out = raw;
  for (auto& s : out.samples) {
    for (int i = 0; i < 3; ++i) s.axis(i) = (s.axis(i) - cal.axes[i].offset) * cal.axes[i].gain;
  }
  out.calibrated = true;
  return out;
}

// Two-point fit from the readings of each axis pointing up (+1 g) and down (-1 g).
inline Calibration derive_calibration(const Vec3& plus_g, const Vec3& minus_g) {
  Calibration cal;
  for (int i = 0; i < 3; ++i) {
    const double span = plus_g[i] - minus_g[i];
    if (span == 0.0 || !std::isfinite(span)) {
      throw Error(Errc::degenerate_readings, "axis " + std::to_string(i) + " has equal +g and -g readings");
    }
    cal.axes[i].offset = 0.5 * (plus_g[i] + minus_g[i]);
    cal.axes[i].gain = 2.0 * kGravity / span;
  }
  return cal;
}

// Subtracts the per-axis mean of the samples within the first baseline_ms.
inline Trace center_baseline(const Trace& trace, double baseline_ms = kDefaultBaselineMs) {
  if (trace.empty()) throw Error(Errc::empty_trace, "cannot center an empty trace");
  if (!(baseline_ms > 0.0)) throw Error(Errc::invalid_argument, "baseline window must be positive");
  // Half a period of slack absorbs timestamp rounding.
  if (trace.duration_ms() + 0.5 * trace.period_ms() < baseline_ms) {
    throw Error(Errc::trace_too_short, "trace shorter than the baseline window");
  }
  const double t0 = trace.samples.front().t_ms;
  Vec3 sum;
  std::size_t count = 0;
  for (const auto& s : trace.samples) {
    if (s.t_ms - t0 >= baseline_ms) break;
    sum += s.accel();
    ++count;
  }
  const Vec3 mean = sum * (1.0 / static_cast<double>(count));
  Trace out = trace;
  for (auto& s : out.samples) {
    s.ax -= mean.x;
    s.ay -= mean.y;
    s.az -= mean.z;
  }
  return out;
}

enum class SmoothingKind { moving_average, hanning };

struct SmoothingSpec {
  SmoothingKind kind = SmoothingKind::hanning;
  std::size_t window = kDefaultSmoothingWindow;
};

// Normalized kernel: uniform, or Hanning 0.5 - 0.5 cos(2 pi n / (W - 1)) scaled to unit sum.
inline std::vector<double> smoothing_weights(const SmoothingSpec& spec) {
  const std::size_t w = spec.window;
  if (w == 0 || w % 2 == 0) throw Error(Errc::invalid_window, "window must be odd and >= 1");
  if (w == 1) return {1.0};
  std::vector<double> weights(w);
  if (spec.kind == SmoothingKind::moving_average) {
    for (auto& x : weights) x = 1.0 / static_cast<double>(w);
    return weights;
  }
  double sum = 0.0;
  for (std::size_t n = 0; n < w; ++n) {
    weights[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(w - 1));
    sum += weights[n];
  }
  for (auto& x : weights) x /= sum;
  return weights;
}

// Convolves with a centered kernel, extending both ends by reflection about
// the boundary sample (x[-k] = x[k], x[n-1+k] = x[n-1-k]).
inline std::vector<double> smooth_series(std::span<const double> x, std::span<const double> weights) {
  const std::size_t n = x.size();
  const std::size_t w = weights.size();
  if (w == 0 || w % 2 == 0) throw Error(Errc::invalid_window, "window must be odd and >= 1");
  if (n == 0) return {};
  if (w > 2 * n - 1) throw Error(Errc::window_too_large, "window exceeds mirrored signal length");
  const auto half = static_cast<std::ptrdiff_t>(w / 2);
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  std::vector<double> out(n);
  for (std::ptrdiff_t i = 0; i <= last; ++i) {
    double acc = 0.0;
    for (std::ptrdiff_t k = -half; k <= half; ++k) {
      std::ptrdiff_t j = i + k;
      if (j < 0) j = -j;
      if (j > last) j = 2 * last - j;
      acc += weights[static_cast<std::size_t>(k + half)] * x[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

inline Trace smooth(const Trace& trace, const SmoothingSpec& spec) {
  const auto weights = smoothing_weights(spec);
  if (trace.empty()) throw Error(Errc::empty_trace, "cannot smooth an empty trace");
  Trace out = trace;
  for (int axis = 0; axis < 3; ++axis) {
    const auto series = trace.axis_series(axis);
    const auto smoothed = smooth_series(series, weights);
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i].axis(axis) = smoothed[i];
  }
  return out;
}

inline double amplitude(const Vec3& a) noexcept { return norm(a); }
inline double amplitude(const Sample& s) noexcept { return norm(s.accel()); }

inline std::vector<double> amplitude_series(const Trace& trace) {
  std::vector<double> out;
  out.reserve(trace.size());
  for (const auto& s : trace.samples) out.push_back(amplitude(s));
  return out;
}

}  // namespace mbs
