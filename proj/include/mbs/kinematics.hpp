#pragma once

// Rotation from static gravity and translation by double integration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/signal_core.hpp"
#include "mbs/vec3.hpp"

namespace mbs {

inline constexpr double kStaticAmplitudeLimit = 10.0;  // m/s^2
inline constexpr double kDefaultTailMs = 50.0;
inline constexpr double kDefaultZeroVelocity = 0.02;  // m/s
inline constexpr double kDefaultNoiseThreshold = 0.4;  // m/s^2
inline constexpr double kDynamicTailTolerance = 2.0;   // m/s^2 around g

inline double rad_to_deg(double r) noexcept { return r * 180.0 / std::numbers::pi; }
inline double deg_to_rad(double d) noexcept { return d * std::numbers::pi / 180.0; }

// arcsin(a / g) in degrees, with the ratio clamped to [-1, 1].
inline double tilt_angle_deg(double accel) noexcept {
  return rad_to_deg(std::asin(std::clamp(accel / kGravity, -1.0, 1.0)));
}

// Per-axis inclination of the device. Pitch is read from the y axis, roll
// from x; a negative z angle means the device is upside down.
struct RotationAngles {
  double x_deg = 0.0;
  double y_deg = 0.0;
  double z_deg = 90.0;

  double pitch() const noexcept { return y_deg; }
  double roll() const noexcept { return x_deg; }
  bool inverted() const noexcept { return z_deg < 0.0; }

  // Angles of a device whose gravity reading is g (sin r cos p, sin p, cos p cos r).
  static RotationAngles from_pitch_roll(double pitch_deg, double roll_deg, bool inverted = false) {
    const double p = deg_to_rad(pitch_deg);
    const double r = deg_to_rad(roll_deg);
    RotationAngles a;
    a.x_deg = rad_to_deg(std::asin(std::clamp(std::sin(r) * std::cos(p), -1.0, 1.0)));
    a.y_deg = pitch_deg;
    a.z_deg = rad_to_deg(std::asin(std::clamp(std::cos(p) * std::cos(r), -1.0, 1.0)));
    if (inverted) a.z_deg = -std::abs(a.z_deg);
    return a;
  }
};

struct MotionPath {
  std::vector<double> t_ms;
  std::vector<Vec3> velocity;  // m/s
  std::vector<Vec3> position;  // m

  Vec3 final_position() const { return position.empty() ? Vec3{} : position.back(); }
};

struct GestureBounds {
  std::size_t start_index = 0;
  std::size_t end_index = 0;
};

// How detect_bounds walks outward from the extrema.
enum class BoundsRule {
  threshold_crossing,  // stop at the first sample below the noise threshold
  settle,              // then keep going while |value| still decreases
};

struct KinematicsConfig {
  double baseline_ms = kDefaultBaselineMs;
  SmoothingSpec smoothing{SmoothingKind::moving_average, kDefaultSmoothingWindow};
  double noise_threshold = kDefaultNoiseThreshold;
  double zero_velocity = kDefaultZeroVelocity;
  BoundsRule bounds_rule = BoundsRule::settle;
};

// Gravity-only test: every sample's amplitude stays below 10 m/s^2.
inline bool is_static(const Trace& segment) {
  if (segment.empty()) throw Error(Errc::empty_trace, "is_static needs at least one sample");
  return std::all_of(segment.samples.begin(), segment.samples.end(),
                     [](const Sample& s) { return amplitude(s) < kStaticAmplitudeLimit; });
}

inline Vec3 tail_mean(const Trace& trace, double tail_ms) {
  if (trace.empty()) throw Error(Errc::empty_trace, "empty trace");
  if (!(tail_ms > 0.0)) throw Error(Errc::invalid_argument, "tail window must be positive");
  if (trace.duration_ms() + 0.5 * trace.period_ms() < tail_ms) {
    throw Error(Errc::trace_too_short, "trace shorter than the tail window");
  }
  const double t_end = trace.samples.back().t_ms;
  Vec3 sum;
  std::size_t count = 0;
  for (auto it = trace.samples.rbegin(); it != trace.samples.rend(); ++it) {
    if (t_end - it->t_ms >= tail_ms) break;
    sum += it->accel();
    ++count;
  }
  return sum * (1.0 / static_cast<double>(count));
}

// Orientation from the averaged last tail_ms of a calibrated trace.
inline RotationAngles final_rotation(const Trace& trace, double tail_ms = kDefaultTailMs) {
  const Vec3 mean = tail_mean(trace, tail_ms);
  const double amp = amplitude(mean);
  if (std::abs(amp - kGravity) > kDynamicTailTolerance) {
    throw Error(Errc::dynamic_tail, "tail amplitude " + std::to_string(amp) + " m/s^2 is not gravity-only");
  }
  return {tilt_angle_deg(mean.x), tilt_angle_deg(mean.y), tilt_angle_deg(mean.z)};
}

// Trapezoidal velocity, then trapezoidal position from the velocity with
// |v| < zero_velocity_threshold snapped to zero.
inline MotionPath integrate(const Trace& segment, double zero_velocity_threshold = kDefaultZeroVelocity) {
  MotionPath path;
  const std::size_t n = segment.size();
  path.t_ms.reserve(n);
  path.velocity.reserve(n);
  path.position.reserve(n);
  if (n == 0) return path;

  Vec3 v_raw;
  Vec3 v_prev;
  Vec3 r;
  auto snap = [zero_velocity_threshold](Vec3 v) {
    for (int i = 0; i < 3; ++i) {
      if (std::abs(v[i]) < zero_velocity_threshold) v[i] = 0.0;
    }
    return v;
  };
  path.t_ms.push_back(segment.samples[0].t_ms);
  path.velocity.push_back({});
  path.position.push_back({});
  for (std::size_t i = 1; i < n; ++i) {
    const Sample& a0 = segment.samples[i - 1];
    const Sample& a1 = segment.samples[i];
    const double dt = (a1.t_ms - a0.t_ms) / 1000.0;
    v_raw += (a0.accel() + a1.accel()) * (0.5 * dt);
    const Vec3 v = snap(v_raw);
    r += (v_prev + v) * (0.5 * dt);
    v_prev = v;
    path.t_ms.push_back(a1.t_ms);
    path.velocity.push_back(v);
    path.position.push_back(r);
  }
  return path;
}

inline GestureBounds detect_bounds(const Trace& segment, double noise_threshold = kDefaultNoiseThreshold,
                                   BoundsRule rule = BoundsRule::settle) {
  const std::size_t n = segment.size();
  if (n < 2) throw Error(Errc::no_gesture, "segment too short to hold a gesture");

  bool above = false;
  int dominant = 0;
  double best_range = -1.0;
  for (int axis = 0; axis < 3; ++axis) {
    double lo = segment.samples[0].axis(axis);
    double hi = lo;
    for (const auto& s : segment.samples) {
      const double v = s.axis(axis);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (std::abs(v) > noise_threshold) above = true;
    }
    if (hi - lo > best_range) {
      best_range = hi - lo;
      dominant = axis;
    }
  }
  if (!above) throw Error(Errc::no_gesture, "no sample exceeds the noise threshold");

  const auto series = segment.axis_series(dominant);
  const auto i_max = static_cast<std::size_t>(std::max_element(series.begin(), series.end()) - series.begin());
  const auto i_min = static_cast<std::size_t>(std::min_element(series.begin(), series.end()) - series.begin());
  const std::size_t first = std::min(i_max, i_min);
  const std::size_t second = std::max(i_max, i_min);

  std::size_t start = 0;
  for (std::size_t i = first; i-- > 0;) {
    if (std::abs(series[i]) < noise_threshold) {
      start = i;
      break;
    }
  }
  std::size_t end = n - 1;
  for (std::size_t i = second + 1; i < n; ++i) {
    if (std::abs(series[i]) < noise_threshold) {
      end = i;
      break;
    }
  }
  if (rule == BoundsRule::settle) {
    while (start > 0 && std::abs(series[start - 1]) < std::abs(series[start])) --start;
    while (end + 1 < n && std::abs(series[end + 1]) < std::abs(series[end])) ++end;
  }
  if (end <= start) end = std::min(n - 1, start + 1);
  return {start, end};
}

inline Trace slice(const Trace& trace, std::size_t first, std::size_t last_inclusive) {
  Trace out;
  out.sample_rate_hz = trace.sample_rate_hz;
  out.calibrated = trace.calibrated;
  out.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     trace.samples.begin() + static_cast<std::ptrdiff_t>(last_inclusive) + 1);
  return out;
}

// Final displacement of the one gesture in a calibrated trace:
// center, smooth, bracket the gesture, integrate only inside the bracket.
inline Vec3 gesture_displacement(const Trace& trace, const KinematicsConfig& cfg = {}) {
  if (!trace.calibrated) throw Error(Errc::invalid_argument, "gesture_displacement needs a calibrated trace");
  const Trace prepared = smooth(center_baseline(trace, cfg.baseline_ms), cfg.smoothing);
  const GestureBounds b = detect_bounds(prepared, cfg.noise_threshold, cfg.bounds_rule);
  return integrate(slice(prepared, b.start_index, b.end_index), cfg.zero_velocity).final_position();
}

}  // namespace mbs
