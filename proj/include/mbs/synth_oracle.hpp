#pragma once

// Ground-truth synthetic accelerometer traces.
//
// A gesture is a minimum-jerk point-to-point move from the chest pose,
// x(tau) = D (10 tau^3 - 15 tau^4 + 6 tau^5), with the orientation blended by
// the same quintic. The sensor reads the specific force in the device frame:
//
//   f = M(pitch, roll) * (a_world + g e_z),   M = Ry(roll) * Rx(-pitch)
//
// so a device at rest reads g (sin r cos p, sin p, cos p cos r). World axes
// coincide with device axes in the reference pose (x right, y forward, z up).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mbs/error.hpp"
#include "mbs/kinematics.hpp"
#include "mbs/motion_detectors.hpp"
#include "mbs/signal_core.hpp"
#include "mbs/text.hpp"
#include "mbs/vec3.hpp"

namespace mbs::synth {

// Normalized minimum-jerk blend and its derivatives with respect to tau.
inline double min_jerk(double tau) noexcept {
  const double t = std::clamp(tau, 0.0, 1.0);
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}
inline double min_jerk_rate(double tau) noexcept {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  return 30.0 * tau * tau - 60.0 * tau * tau * tau + 30.0 * tau * tau * tau * tau;
}
inline double min_jerk_accel(double tau) noexcept {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  return 60.0 * tau - 180.0 * tau * tau + 120.0 * tau * tau * tau;
}

// World-to-device rotation for the given pitch and roll (degrees).
inline Vec3 to_device(const Vec3& w, double pitch_deg, double roll_deg) {
  const double p = deg_to_rad(pitch_deg);
  const double r = deg_to_rad(roll_deg);
  // Rx(-p)
  const Vec3 u{w.x, std::cos(p) * w.y + std::sin(p) * w.z, -std::sin(p) * w.y + std::cos(p) * w.z};
  // Ry(r)
  return {std::cos(r) * u.x + std::sin(r) * u.z, u.y, -std::sin(r) * u.x + std::cos(r) * u.z};
}

inline Vec3 gravity_reading(double pitch_deg, double roll_deg) {
  return to_device({0.0, 0.0, kGravity}, pitch_deg, roll_deg);
}

struct GestureSpec {
  Vec3 displacement;  // m, world frame
  double duration_ms = 800.0;
  double pitch_start = 0.0;
  double roll_start = 0.0;
  double pitch_end = 0.0;
  double roll_end = 0.0;
  double noise_sigma = 0.0;  // m/s^2, per axis
  std::uint64_t seed = 0;
  double lead_ms = 300.0;   // rest before onset
  double trail_ms = 300.0;  // rest after offset
};

struct GroundTruth {
  Vec3 displacement;
  double pitch_end = 0.0;
  double roll_end = 0.0;
  std::size_t onset_index = 0;
  std::size_t offset_index = 0;
  double onset_ms = 0.0;
  double offset_ms = 0.0;
};

struct SyntheticGesture {
  Trace trace;
  GroundTruth truth;
};

inline void check_spec(const GestureSpec& spec, double sample_rate_hz) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(spec.duration_ms > 0.0) || !finite(spec.duration_ms)) throw Error(Errc::invalid_spec, "duration must be > 0");
  if (!(spec.noise_sigma >= 0.0) || !finite(spec.noise_sigma)) throw Error(Errc::invalid_spec, "noise sigma must be >= 0");
  if (!(spec.lead_ms >= 0.0) || !(spec.trail_ms >= 0.0)) throw Error(Errc::invalid_spec, "rest padding must be >= 0");
  if (!(sample_rate_hz > 0.0) || !finite(sample_rate_hz)) throw Error(Errc::invalid_spec, "sample rate must be > 0");
  for (double v : {spec.displacement.x, spec.displacement.y, spec.displacement.z, spec.pitch_start, spec.roll_start,
                   spec.pitch_end, spec.roll_end}) {
    if (!finite(v)) throw Error(Errc::invalid_spec, "non-finite spec value");
  }
}

inline SyntheticGesture generate(const GestureSpec& spec, double sample_rate_hz = kDefaultSampleRateHz) {
  check_spec(spec, sample_rate_hz);
  const double period = 1000.0 / sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround((spec.lead_ms + spec.duration_ms + spec.trail_ms) / period));
  const double T = spec.duration_ms / 1000.0;

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  SyntheticGesture out;
  out.trace.sample_rate_hz = sample_rate_hz;
  out.trace.calibrated = true;
  out.trace.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * period;
    const double tau = (t - spec.lead_ms) / spec.duration_ms;
    const double blend = min_jerk(tau);
    const double pitch = spec.pitch_start + (spec.pitch_end - spec.pitch_start) * blend;
    const double roll = spec.roll_start + (spec.roll_end - spec.roll_start) * blend;
    const Vec3 a_world = spec.displacement * (min_jerk_accel(tau) / (T * T));
    Vec3 f = to_device(a_world + Vec3{0.0, 0.0, kGravity}, pitch, roll);
    if (spec.noise_sigma > 0.0) {
      f.x += spec.noise_sigma * noise(rng);
      f.y += spec.noise_sigma * noise(rng);
      f.z += spec.noise_sigma * noise(rng);
    }
    out.trace.samples.push_back({t, f.x, f.y, f.z});
  }

  out.truth.displacement = spec.displacement;
  out.truth.pitch_end = spec.pitch_end;
  out.truth.roll_end = spec.roll_end;
  out.truth.onset_index = static_cast<std::size_t>(std::llround(spec.lead_ms / period));
  out.truth.offset_index = static_cast<std::size_t>(std::llround((spec.lead_ms + spec.duration_ms) / period));
  out.truth.onset_ms = spec.lead_ms;
  out.truth.offset_ms = spec.lead_ms + spec.duration_ms;
  return out;
}

// Orientation-only traces: piecewise minimum-jerk blends between keyframes,
// holding the last pose after the final keyframe.
struct OrientationKeyframe {
  double t_ms = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

inline Trace generate_orientation_path(std::span<const OrientationKeyframe> keys, double total_ms,
                                       double noise_sigma = 0.0, std::uint64_t seed = 0,
                                       double sample_rate_hz = kDefaultSampleRateHz) {
  if (keys.empty()) throw Error(Errc::invalid_spec, "need at least one keyframe");
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (!(keys[i].t_ms > keys[i - 1].t_ms)) throw Error(Errc::invalid_spec, "keyframes must be time-ordered");
  }
  if (!(total_ms > 0.0) || !(noise_sigma >= 0.0)) throw Error(Errc::invalid_spec, "bad duration or noise");
  const double period = 1000.0 / sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(total_ms / period));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  Trace trace;
  trace.sample_rate_hz = sample_rate_hz;
  trace.calibrated = true;
  trace.samples.reserve(n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) * period;
    while (seg + 1 < keys.size() && t >= keys[seg + 1].t_ms) ++seg;
    double pitch = keys[seg].pitch;
    double roll = keys[seg].roll;
    if (t < keys.front().t_ms) {
      pitch = keys.front().pitch;
      roll = keys.front().roll;
    } else if (seg + 1 < keys.size()) {
      const auto& a = keys[seg];
      const auto& b = keys[seg + 1];
      const double s = min_jerk((t - a.t_ms) / (b.t_ms - a.t_ms));
      pitch = a.pitch + (b.pitch - a.pitch) * s;
      roll = a.roll + (b.roll - a.roll) * s;
    }
    Vec3 f = gravity_reading(pitch, roll);
    if (noise_sigma > 0.0) {
      f.x += noise_sigma * noise(rng);
      f.y += noise_sigma * noise(rng);
      f.z += noise_sigma * noise(rng);
    }
    trace.samples.push_back({t, f.x, f.y, f.z});
  }
  return trace;
}

struct TiltSpec {
  TiltDirection direction = TiltDirection::up;
  double angle_deg = 40.0;
  double lead_ms = 300.0;
  double transition_ms = 250.0;
  double hold_ms = 300.0;
  double trail_ms = 300.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

// Tilt away from the reference pose and back.
inline Trace generate_tilt(const TiltSpec& spec, double sample_rate_hz = kDefaultSampleRateHz) {
  double pitch = 0.0;
  double roll = 0.0;
  switch (spec.direction) {
    case TiltDirection::up: pitch = spec.angle_deg; break;
    case TiltDirection::down: pitch = -spec.angle_deg; break;
    case TiltDirection::right: roll = spec.angle_deg; break;
    case TiltDirection::left: roll = -spec.angle_deg; break;
  }
  const double t1 = spec.lead_ms;
  const double t2 = t1 + spec.transition_ms;
  const double t3 = t2 + spec.hold_ms;
  const double t4 = t3 + spec.transition_ms;
  const OrientationKeyframe keys[] = {{t1, 0.0, 0.0}, {t2, pitch, roll}, {t3, pitch, roll}, {t4, 0.0, 0.0}};
  return generate_orientation_path(keys, t4 + spec.trail_ms, spec.noise_sigma, spec.seed, sample_rate_hz);
}

// A drop: rest, an orientation change, an impact spike along the final
// gravity direction, then rest in the new pose.
struct FallSpec {
  double pitch_before = 0.0;
  double roll_before = 0.0;
  double pitch_after = 90.0;
  double roll_after = 0.0;
  double rest_before_ms = 800.0;
  double fall_ms = 300.0;
  double impact_ms = 40.0;
  double impact_peak = 4.0 * kGravity;  // m/s^2 on top of gravity
  double rest_after_ms = 800.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

inline Trace generate_fall(const FallSpec& spec, double sample_rate_hz = kDefaultSampleRateHz) {
  const double t_fall_end = spec.rest_before_ms + spec.fall_ms;
  const OrientationKeyframe keys[] = {{spec.rest_before_ms, spec.pitch_before, spec.roll_before},
                                      {t_fall_end, spec.pitch_after, spec.roll_after}};
  const double total = t_fall_end + spec.impact_ms + spec.rest_after_ms;
  Trace trace = generate_orientation_path(keys, total, spec.noise_sigma, spec.seed, sample_rate_hz);
  const Vec3 up = gravity_reading(spec.pitch_after, spec.roll_after) * (1.0 / kGravity);
  for (auto& s : trace.samples) {
    const double u = (s.t_ms - t_fall_end) / spec.impact_ms;
    if (u <= 0.0 || u >= 1.0) continue;
    const double pulse = spec.impact_peak * std::sin(std::numbers::pi * u);
    s.ax += pulse * up.x;
    s.ay += pulse * up.y;
    s.az += pulse * up.z;
  }
  return trace;
}

struct GestureClass {
  std::string label;
  GestureSpec prototype;
};

struct CorpusOptions {
  std::size_t n_per_class = 20;
  double jitter_m = 0.03;    // sigma per displacement axis
  double jitter_deg = 3.0;   // sigma on final pitch and roll
  std::uint64_t seed = 1;
};

struct LabeledGesture {
  std::string label;
  std::string name;  // stable file stem, e.g. "mouth_007"
  SyntheticGesture gesture;
};

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Per-trace seed, independent of generation order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::size_t class_index, std::size_t sample_index) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ class_index) ^ sample_index);
}

inline std::string sample_name(const std::string& label, std::size_t index) {
  std::string num = std::to_string(index);
  while (num.size() < 3) num.insert(num.begin(), '0');
  return text::to_lower(label) + "_" + num;
}

inline std::vector<LabeledGesture> corpus(std::span<const GestureClass> classes, const CorpusOptions& opt,
                                          double sample_rate_hz = kDefaultSampleRateHz) {
  if (opt.n_per_class == 0) throw Error(Errc::invalid_spec, "n_per_class must be >= 1");
  if (!(opt.jitter_m >= 0.0) || !(opt.jitter_deg >= 0.0)) throw Error(Errc::invalid_spec, "jitter must be >= 0");
  std::vector<LabeledGesture> out;
  out.reserve(classes.size() * opt.n_per_class);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t i = 0; i < opt.n_per_class; ++i) {
      std::mt19937_64 rng(derive_seed(opt.seed, c, i));
      std::normal_distribution<double> unit(0.0, 1.0);
      GestureSpec spec = classes[c].prototype;
      spec.displacement.x += opt.jitter_m * unit(rng);
      spec.displacement.y += opt.jitter_m * unit(rng);
      spec.displacement.z += opt.jitter_m * unit(rng);
      spec.pitch_end += opt.jitter_deg * unit(rng);
      spec.roll_end += opt.jitter_deg * unit(rng);
      spec.seed = rng();
      out.push_back({classes[c].label, sample_name(classes[c].label, i), generate(spec, sample_rate_hz)});
    }
  }
  return out;
}

// Twelve chest-to-body-part gestures with distinct endpoints and final poses.
inline std::vector<GestureClass> default_gesture_classes(double noise_sigma = 0.05) {
  struct Row {
    const char* label;
    Vec3 d;
    double pitch;
    double roll;
  };
  static constexpr Row rows[] = {
      {"Mouth", {0.00, 0.10, 0.30}, 35.0, 0.0},     {"Chest", {0.00, 0.20, 0.00}, 0.0, 0.0},
      {"Elbow", {-0.30, 0.05, -0.15}, 0.0, -40.0},  {"Navel", {0.00, 0.10, -0.25}, -10.0, 0.0},
      {"Neck", {0.00, 0.05, 0.20}, -60.0, 0.0},     {"Head", {0.00, 0.00, 0.55}, 75.0, 0.0},
      {"Back", {0.25, -0.25, -0.20}, 0.0, 70.0},    {"Ear", {0.15, 0.00, 0.40}, 10.0, 60.0},
      {"Hip", {0.30, 0.00, -0.35}, -20.0, 30.0},    {"Leg", {0.20, 0.05, -0.60}, -60.0, 10.0},
      {"Wrist", {-0.25, 0.30, -0.25}, 50.0, -20.0}, {"Eye", {0.05, 0.05, 0.42}, 55.0, 0.0},
  };
  std::vector<GestureClass> out;
  for (const auto& r : rows) {
    GestureSpec spec;
    spec.displacement = r.d;
    spec.pitch_end = r.pitch;
    spec.roll_end = r.roll;
    spec.noise_sigma = noise_sigma;
    out.push_back({r.label, spec});
  }
  return out;
}

inline std::vector<GestureClass> five_gesture_classes(double noise_sigma = 0.05) {
  std::vector<GestureClass> out;
  for (auto& c : default_gesture_classes(noise_sigma)) {
    if (c.label == "Mouth" || c.label == "Navel" || c.label == "Neck" || c.label == "Ear" || c.label == "Wrist") {
      out.push_back(std::move(c));
    }
  }
  return out;
}

// Sidecar `file,label,dx,dy,dz,pitch_end,roll_end,onset_ms,offset_ms`.
struct GroundTruthRow {
  std::string file;
  std::string label;
  GroundTruth truth;
};

inline std::string format_ground_truth(std::span<const GroundTruthRow> rows) {
  std::string out = "file,label,dx,dy,dz,pitch_end,roll_end,onset_ms,offset_ms\n";
  for (const auto& r : rows) {
    const auto& g = r.truth;
    out += r.file + ',' + r.label + ',' + text::format_double(g.displacement.x) + ',' +
           text::format_double(g.displacement.y) + ',' + text::format_double(g.displacement.z) + ',' +
           text::format_double(g.pitch_end) + ',' + text::format_double(g.roll_end) + ',' +
           text::format_double(g.onset_ms) + ',' + text::format_double(g.offset_ms) + '\n';
  }
  return out;
}

inline std::vector<GroundTruthRow> parse_ground_truth(std::string_view contents) {
  std::vector<GroundTruthRow> rows;
  bool saw_header = false;
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != "file,label,dx,dy,dz,pitch_end,roll_end,onset_ms,offset_ms") {
        throw Error(Errc::parse_error, "unexpected ground-truth header");
      }
      saw_header = true;
      continue;
    }
    const auto c = text::split(line, ',');
    if (c.size() != 9) throw Error(Errc::parse_error, "ground-truth rows need 9 columns");
    GroundTruthRow r;
    r.file = c[0];
    r.label = c[1];
    r.truth.displacement = {text::parse_double(c[2]), text::parse_double(c[3]), text::parse_double(c[4])};
    r.truth.pitch_end = text::parse_double(c[5]);
    r.truth.roll_end = text::parse_double(c[6]);
    r.truth.onset_ms = text::parse_double(c[7]);
    r.truth.offset_ms = text::parse_double(c[8]);
    rows.push_back(std::move(r));
  }
  if (!saw_header) throw Error(Errc::parse_error, "missing ground-truth header");
  return rows;
}

}  // namespace mbs::synth
