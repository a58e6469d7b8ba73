#pragma once

// Preliminary detectors: four-phase tilt recognition, motion state from
// amplitude deviation, and threshold fall detection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string_view>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/kinematics.hpp"
#include "mbs/signal_core.hpp"

namespace mbs {

enum class TiltDirection { up, down, left, right };

constexpr std::string_view to_string(TiltDirection d) noexcept {
  switch (d) {
    case TiltDirection::up: return "up";
    case TiltDirection::down: return "down";
    case TiltDirection::left: return "left";
    case TiltDirection::right: return "right";
  }
  return "?";
}

struct TiltEvent {
  TiltDirection direction = TiltDirection::up;
  double peak_deg = 0.0;
  double start_ms = 0.0;
  double end_ms = 0.0;
};

struct TiltConfig {
  double threshold_deg = 25.0;
  double baseline_ms = kDefaultBaselineMs;
  SmoothingSpec smoothing{SmoothingKind::hanning, kDefaultSmoothingWindow};
};

namespace detail {

// Runs of same-signed samples whose magnitude exceeds the threshold.
inline void tilt_candidates(const std::vector<double>& angle, const Trace& t, double threshold, TiltDirection pos,
                            TiltDirection neg, std::vector<TiltEvent>& out) {
  std::size_t i = 0;
  const std::size_t n = angle.size();
  while (i < n) {
    if (std::abs(angle[i]) <= threshold) {
      ++i;
      continue;
    }
    const bool positive = angle[i] > 0.0;
    std::size_t j = i;
    double peak = 0.0;
    while (j < n && std::abs(angle[j]) > threshold && (angle[j] > 0.0) == positive) {
      peak = std::max(peak, std::abs(angle[j]));
      ++j;
    }
    if (j - i >= 2) out.push_back({positive ? pos : neg, peak, t.samples[i].t_ms, t.samples[j - 1].t_ms});
    i = j;
  }
}

inline bool overlaps(const TiltEvent& a, const TiltEvent& b) noexcept {
  return a.start_ms <= b.end_ms && b.start_ms <= a.end_ms;
}

}  // namespace detail

// 1) center and smooth; 2) per-axis angle series, y and z merged into one
// up/down channel by larger magnitude; 3) threshold into candidates;
// 4) of candidates sharing a time frame, only the largest peak survives.
inline std::vector<TiltEvent> detect_tilts(const Trace& trace, const TiltConfig& cfg = {}) {
  if (trace.empty()) return {};
  SmoothingSpec sm = cfg.smoothing;
  if (sm.window > 2 * trace.size() - 1) sm.window = 2 * trace.size() - 1;
  const Trace s = smooth(center_baseline(trace, std::min(cfg.baseline_ms, trace.duration_ms())), sm);

  std::vector<double> lateral(s.size());
  std::vector<double> vertical(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    lateral[i] = tilt_angle_deg(s.samples[i].ax);
    const double y = tilt_angle_deg(s.samples[i].ay);
    const double z = tilt_angle_deg(s.samples[i].az);
    vertical[i] = std::abs(z) > std::abs(y) ? z : y;
  }

  std::vector<TiltEvent> candidates;
  detail::tilt_candidates(vertical, s, cfg.threshold_deg, TiltDirection::up, TiltDirection::down, candidates);
  detail::tilt_candidates(lateral, s, cfg.threshold_deg, TiltDirection::right, TiltDirection::left, candidates);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const TiltEvent& a, const TiltEvent& b) { return a.peak_deg > b.peak_deg; });
  std::vector<TiltEvent> kept;
  for (const auto& c : candidates) {
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const TiltEvent& k) { return detail::overlaps(c, k); });
    if (!clash) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const TiltEvent& a, const TiltEvent& b) { return a.start_ms < b.start_ms; });
  return kept;
}

enum class MotionState { stopped, picked, holding, walking, running };

constexpr std::string_view to_string(MotionState s) noexcept {
  switch (s) {
    case MotionState::stopped: return "stopped";
    case MotionState::picked: return "picked";
    case MotionState::holding: return "holding";
    case MotionState::walking: return "walking";
    case MotionState::running: return "running";
  }
  return "?";
}

struct MotionConfig {
  double hold_threshold = 0.3;  // m/s^2, amplitude standard deviation
  double walk_threshold = 1.5;
  double run_threshold = 4.0;
  double window_ms = 1000.0;
};

// Population standard deviation of the amplitude.
inline double amplitude_deviation(const Trace& window) {
  const auto amp = amplitude_series(window);
  if (amp.empty()) throw Error(Errc::empty_trace, "empty window");
  const double mean = std::accumulate(amp.begin(), amp.end(), 0.0) / static_cast<double>(amp.size());
  double ss = 0.0;
  for (double a : amp) ss += (a - mean) * (a - mean);
  return std::sqrt(ss / static_cast<double>(amp.size()));
}

inline MotionState motion_state_for(double deviation, const MotionConfig& cfg) noexcept {
  if (deviation < cfg.hold_threshold) return MotionState::stopped;
  if (deviation < cfg.walk_threshold) return MotionState::holding;
  if (deviation < cfg.run_threshold) return MotionState::walking;
  return MotionState::running;
}

// A single window never reports `picked`; see classify_motion_stream.
inline MotionState classify_motion(const Trace& window, const MotionConfig& cfg = {}) {
  if (window.size() < 2 || window.duration_ms() + 0.5 * window.period_ms() < cfg.window_ms) {
    throw Error(Errc::window_too_short, "motion window shorter than " + std::to_string(cfg.window_ms) + " ms");
  }
  return motion_state_for(amplitude_deviation(window), cfg);
}

struct MotionWindow {
  double start_ms = 0.0;
  MotionState state = MotionState::stopped;
  double deviation = 0.0;
};

// Consecutive non-overlapping windows; a holding window right after a
// stopped one is reported as picked.
inline std::vector<MotionWindow> classify_motion_stream(const Trace& trace, const MotionConfig& cfg = {}) {
  std::vector<MotionWindow> out;
  if (trace.empty()) return out;
  const auto per_window = static_cast<std::size_t>(std::llround(cfg.window_ms / trace.period_ms()));
  if (per_window < 2) throw Error(Errc::window_too_short, "window holds fewer than 2 samples");
  MotionState previous = MotionState::holding;
  bool have_previous = false;
  for (std::size_t first = 0; first + per_window <= trace.size(); first += per_window) {
    const Trace w = slice(trace, first, first + per_window - 1);
    const double d = amplitude_deviation(w);
    MotionState st = motion_state_for(d, cfg);
    const MotionState raw = st;
    if (have_previous && previous == MotionState::stopped && st == MotionState::holding) st = MotionState::picked;
    out.push_back({w.samples.front().t_ms, st, d});
    previous = raw;
    have_previous = true;
  }
  return out;
}

struct FallConfig {
  double spike_threshold = 3.0 * kGravity;  // m/s^2
  double angle_threshold_deg = 60.0;
  double static_window_ms = 200.0;
  double pre_gap_ms = 500.0;     // orientation reference ends this long before the spike
  double pre_window_ms = 200.0;
};

inline double angle_between_deg(const Vec3& a, const Vec3& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return rad_to_deg(std::acos(std::clamp(dot(a, b) / (na * nb), -1.0, 1.0)));
}

// A spike above the threshold followed by a resting pose that differs from
// the pre-spike pose by more than the angle threshold.
inline bool detect_fall(const Trace& trace, const FallConfig& cfg = {}) {
  std::size_t spike = trace.size();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (amplitude(trace.samples[i]) > cfg.spike_threshold) {
      spike = i;
      break;
    }
  }
  if (spike == trace.size()) return false;

  const double period = trace.period_ms();
  const auto win = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(cfg.static_window_ms / period)));
  std::size_t rest = trace.size();
  for (std::size_t j = spike + 1; j + win <= trace.size(); ++j) {
    if (is_static(slice(trace, j, j + win - 1))) {
      rest = j;
      break;
    }
  }
  if (rest == trace.size()) throw Error(Errc::no_static_tail, "device never comes to rest after the spike");
  Vec3 after;
  for (std::size_t j = rest; j < rest + win; ++j) after += trace.samples[j].accel();

  const double t_spike = trace.samples[spike].t_ms;
  const double t_hi = t_spike - cfg.pre_gap_ms;
  const double t_lo = t_hi - cfg.pre_window_ms;
  Vec3 before;
  std::size_t count = 0;
  for (std::size_t i = 0; i < spike; ++i) {
    const double t = trace.samples[i].t_ms;
    if (t >= t_lo && t <= t_hi) {
      before += trace.samples[i].accel();
      ++count;
    }
  }
  if (count == 0) before = trace.samples.front().accel();
  return angle_between_deg(before, after) > cfg.angle_threshold_deg;
}

}  // namespace mbs
