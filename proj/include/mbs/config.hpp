#pragma once

// Line-oriented `key = value` configuration for the command-line tool.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "mbs/error.hpp"
#include "mbs/feature_classifier.hpp"
#include "mbs/kinematics.hpp"
#include "mbs/motion_detectors.hpp"
#include "mbs/shortcut_engine.hpp"
#include "mbs/signal_core.hpp"
#include "mbs/text.hpp"

namespace mbs {

struct Config {
  std::optional<std::string> body_model;
  std::optional<std::string> body_map;
  std::optional<std::string> training;
  std::optional<std::string> pooled;
  std::optional<std::string> calibration;

  std::size_t k = kPolicyK;
  std::size_t smoothing_window = kDefaultSmoothingWindow;
  double baseline_ms = kDefaultBaselineMs;
  double noise_threshold = kDefaultNoiseThreshold;
  double zero_velocity = kDefaultZeroVelocity;
  double tail_ms = kDefaultTailMs;
  double tilt_threshold_deg = TiltConfig{}.threshold_deg;
  double hold_threshold = MotionConfig{}.hold_threshold;
  double walk_threshold = MotionConfig{}.walk_threshold;
  double run_threshold = MotionConfig{}.run_threshold;
  double motion_window_ms = MotionConfig{}.window_ms;
  double spike_threshold = FallConfig{}.spike_threshold;
  double fall_angle_deg = FallConfig{}.angle_threshold_deg;
  double confirm_ms = kConfirmWindowMs;
  std::uint64_t seed = 1;
};

namespace detail {

inline std::size_t parse_count(std::string_view key, std::string_view v) {
  const long long n = text::parse_int(v);
  if (n <= 0) throw Error(Errc::invalid_argument, std::string(key) + " must be positive");
  return static_cast<std::size_t>(n);
}

}  // namespace detail

// Relative paths resolve against `base_dir`. Unknown keys are errors.
inline Config parse_config(std::string_view contents, const std::filesystem::path& base_dir = {}) {
  Config c;
  auto path_of = [&](std::string_view v) {
    std::filesystem::path p{std::string(v)};
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    return p.string();
  };
  for (const auto& raw : text::lines(contents)) {
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::parse_error, "config line without '=': " + std::string(line));
    const auto key = text::trim(line.substr(0, eq));
    const auto value = text::trim(line.substr(eq + 1));
    if (key == "body_model") c.body_model = path_of(value);
    else if (key == "body_map") c.body_map = path_of(value);
    else if (key == "training") c.training = path_of(value);
    else if (key == "pooled") c.pooled = path_of(value);
    else if (key == "calibration") c.calibration = path_of(value);
    else if (key == "k") c.k = detail::parse_count(key, value);
    else if (key == "smoothing_window") c.smoothing_window = detail::parse_count(key, value);
    else if (key == "baseline_ms") c.baseline_ms = text::parse_double(value);
    else if (key == "noise_threshold") c.noise_threshold = text::parse_double(value);
    else if (key == "zero_velocity") c.zero_velocity = text::parse_double(value);
    else if (key == "tail_ms") c.tail_ms = text::parse_double(value);
    else if (key == "tilt_threshold_deg") c.tilt_threshold_deg = text::parse_double(value);
    else if (key == "hold_threshold") c.hold_threshold = text::parse_double(value);
    else if (key == "walk_threshold") c.walk_threshold = text::parse_double(value);
    else if (key == "run_threshold") c.run_threshold = text::parse_double(value);
    else if (key == "motion_window_ms") c.motion_window_ms = text::parse_double(value);
    else if (key == "spike_threshold") c.spike_threshold = text::parse_double(value);
    else if (key == "fall_angle_deg") c.fall_angle_deg = text::parse_double(value);
    else if (key == "confirm_ms") c.confirm_ms = text::parse_double(value);
    else if (key == "seed") {
      const long long v = text::parse_int(value);
      if (v < 0) throw Error(Errc::invalid_argument, "seed must be non-negative");
      c.seed = static_cast<std::uint64_t>(v);
    }
    else throw Error(Errc::parse_error, "unknown config key '" + std::string(key) + "'");
  }
  return c;
}

// Referenced files exist and every threshold is positive.
inline void validate(const Config& c) {
  for (const auto* p : {&c.body_model, &c.body_map, &c.training, &c.pooled, &c.calibration}) {
    if (*p && !std::filesystem::is_regular_file(**p)) throw Error(Errc::io_error, "config file not found: " + **p);
  }
  const std::pair<const char*, double> positive[] = {
      {"baseline_ms", c.baseline_ms},
      {"noise_threshold", c.noise_threshold},
      {"zero_velocity", c.zero_velocity},
      {"tail_ms", c.tail_ms},
      {"tilt_threshold_deg", c.tilt_threshold_deg},
      {"hold_threshold", c.hold_threshold},
      {"walk_threshold", c.walk_threshold},
      {"run_threshold", c.run_threshold},
      {"motion_window_ms", c.motion_window_ms},
      {"spike_threshold", c.spike_threshold},
      {"fall_angle_deg", c.fall_angle_deg},
      {"confirm_ms", c.confirm_ms},
      {"k", static_cast<double>(c.k)},
      {"smoothing_window", static_cast<double>(c.smoothing_window)},
  };
  for (const auto& [name, v] : positive) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(Errc::invalid_argument, std::string(name) + " must be positive");
  }
  if (c.smoothing_window % 2 == 0) throw Error(Errc::invalid_window, "smoothing_window must be odd");
  if (!(c.hold_threshold < c.walk_threshold && c.walk_threshold < c.run_threshold)) {
    throw Error(Errc::invalid_argument, "motion thresholds must increase hold < walk < run");
  }
}

inline Config load_config(const std::string& path) {
  Config c = parse_config(text::read_file(path), std::filesystem::path(path).parent_path());
  validate(c);
  return c;
}

}  // namespace mbs
