#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mbs/motion_detectors.hpp"
#include "mbs/synth_oracle.hpp"

using namespace mbs;

namespace {

constexpr double kDeg = M_PI / 180.0;

// Smooth 0 -> peak -> 0 angle profile (degrees) over [t0, t1] with ramps.
double plateau(double t, double t0, double t1, double ramp, double peak) {
  if (t <= t0 || t >= t1) return 0.0;
  if (t < t0 + ramp) return peak * synth::min_jerk((t - t0) / ramp);
  if (t > t1 - ramp) return peak * synth::min_jerk((t1 - t) / ramp);
  return peak;
}

// A trace whose centered y and z readings are g sin(angle) for the given
// per-axis angle profiles; x stays at rest.
Trace axis_angles(std::size_t n, const std::function<double(double)>& y_deg, const std::function<double(double)>& z_deg,
                  const std::function<double(double)>& x_deg = [](double) { return 0.0; }) {
  return fixture::make_trace(n, [&](double ms) {
    return Vec3{kGravity * std::sin(x_deg(ms) * kDeg), kGravity * std::sin(y_deg(ms) * kDeg),
                kGravity + kGravity * std::sin(z_deg(ms) * kDeg)};
  });
}

int rank(MotionState s) {
  switch (s) {
    case MotionState::stopped: return 0;
    case MotionState::picked:
    case MotionState::holding: return 1;
    case MotionState::walking: return 2;
    case MotionState::running: return 3;
  }
  return -1;
}

}  // namespace

TEST(Tilts, StaticTraceHasNone) { EXPECT_TRUE(detect_tilts(fixture::constant_trace(1500, {0, 0, 9.81})).empty()); }

TEST(Tilts, CleanTiltsAllDirections) {
  int detected = 0, total = 0;
  for (auto dir : {TiltDirection::up, TiltDirection::down, TiltDirection::left, TiltDirection::right}) {
    for (double angle : {30.0, 40.0, 50.0, 60.0}) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        synth::TiltSpec spec;
        spec.direction = dir;
        spec.angle_deg = angle;
        spec.noise_sigma = 0.05;
        spec.seed = seed;
        const auto events = detect_tilts(synth::generate_tilt(spec));
        ++total;
        if (events.size() == 1 && events[0].direction == dir) ++detected;
        for (const auto& e : events) {
          EXPECT_GT(e.peak_deg, 25.0);
          EXPECT_LT(e.start_ms, e.end_ms);
        }
      }
    }
  }
  EXPECT_EQ(detected, total);
}

TEST(Tilts, UpFortyIsOneUpEvent) {
  synth::TiltSpec spec;
  spec.angle_deg = 40.0;
  const auto events = detect_tilts(synth::generate_tilt(spec));
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].direction, TiltDirection::up);
  EXPECT_NEAR(events[0].peak_deg, 40.0, 1.0);
}

TEST(Tilts, NestedDownOnZIsAbsorbedByLargerUp) {
  // y carries an up 40 tilt, z a down 30 tilt inside it.
  const Trace t = axis_angles(
      1600, [](double ms) { return plateau(ms, 300, 1300, 200, 40.0); },
      [](double ms) { return plateau(ms, 500, 1100, 150, -30.0); });
  const auto events = detect_tilts(t);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].direction, TiltDirection::up);
  EXPECT_NEAR(events[0].peak_deg, 40.0, 1.0);
}

TEST(Tilts, OverlapAcrossChannelsKeepsLargerPeak) {
  const Trace up_wins = axis_angles(
      1600, [](double ms) { return plateau(ms, 300, 1200, 200, 40.0); }, [](double) { return 0.0; },
      [](double ms) { return plateau(ms, 600, 1400, 200, 30.0); });
  auto events = detect_tilts(up_wins);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].direction, TiltDirection::up);

  const Trace left_wins = axis_angles(
      1600, [](double ms) { return plateau(ms, 300, 1200, 200, -30.0); }, [](double) { return 0.0; },
      [](double ms) { return plateau(ms, 600, 1400, 200, -45.0); });
  events = detect_tilts(left_wins);
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].direction, TiltDirection::left);
  EXPECT_NEAR(events[0].peak_deg, 45.0, 1.0);
}

TEST(Tilts, SeparateTiltsBothKeptInOrder) {
  const Trace t = axis_angles(
      2400, [](double ms) { return plateau(ms, 200, 900, 200, 35.0) + plateau(ms, 1300, 2100, 200, -50.0); },
      [](double) { return 0.0; });
  const auto events = detect_tilts(t);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].direction, TiltDirection::up);
  EXPECT_EQ(events[1].direction, TiltDirection::down);
  EXPECT_LT(events[0].end_ms, events[1].start_ms);
}

TEST(Tilts, OutputNeverOverlaps) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> ang(-70, 70), start(100, 1800);
  for (int trial = 0; trial < 40; ++trial) {
    const double a1 = ang(rng), a2 = ang(rng), a3 = ang(rng);
    const double s1 = start(rng), s2 = start(rng), s3 = start(rng);
    const Trace t = axis_angles(
        2600, [&](double ms) { return plateau(ms, s1, s1 + 600, 150, a1); },
        [&](double ms) { return plateau(ms, s2, s2 + 500, 150, a2); },
        [&](double ms) { return plateau(ms, s3, s3 + 700, 150, a3); });
    const auto events = detect_tilts(t);
    for (std::size_t i = 1; i < events.size(); ++i) EXPECT_LT(events[i - 1].end_ms, events[i].start_ms);
  }
}

TEST(Motion, ConstantIsStopped) {
  EXPECT_EQ(classify_motion(fixture::constant_trace(1000, {0, 0, 9.81})), MotionState::stopped);
}

TEST(Motion, JitterBetweenHoldAndWalkIsHolding) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0.0, 0.8);
  const Trace t = fixture::make_trace(1000, [&](double) { return Vec3{0, 0, 9.81 + n(rng)}; });
  const double d = amplitude_deviation(t);
  ASSERT_GT(d, 0.3);
  ASSERT_LT(d, 1.5);
  EXPECT_EQ(classify_motion(t), MotionState::holding);
}

TEST(Motion, StrongSinusoidIsRunning) {
  // amplitude 9.81 + 8 sin(4 pi t) stays positive; its deviation is 8 / sqrt 2
  const Trace t = fixture::make_trace(1000, [](double ms) { return Vec3{0, 0, 9.81 + 8.0 * std::sin(4 * M_PI * ms / 1000)}; });
  EXPECT_NEAR(amplitude_deviation(t), 8.0 / std::sqrt(2.0), 1e-6);
  EXPECT_EQ(classify_motion(t), MotionState::running);
}

TEST(Motion, WalkingBand) {
  const Trace t = fixture::make_trace(1000, [](double ms) { return Vec3{0, 0, 9.81 + 3.0 * std::sin(4 * M_PI * ms / 1000)}; });
  EXPECT_EQ(classify_motion(t), MotionState::walking);
}

TEST(Motion, WindowTooShort) {
  try {
    classify_motion(fixture::constant_trace(500, {0, 0, 9.81}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::window_too_short);
  }
}

TEST(Motion, StreamReportsPicked) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 0.8);
  const Trace t = fixture::make_trace(3000, [&](double ms) { return Vec3{0, 0, 9.81 + (ms >= 1000 ? n(rng) : 0.0)}; });
  const auto w = classify_motion_stream(t);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[0].state, MotionState::stopped);
  EXPECT_EQ(w[1].state, MotionState::picked);
  EXPECT_EQ(w[2].state, MotionState::holding);
}

TEST(Motion, MonotoneInJitterScale) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<Vec3> jitter(1000);
    for (auto& j : jitter) j = {n(rng), n(rng), n(rng)};
    int previous = -1;
    for (double scale = 0.0; scale <= 8.0; scale += 0.1) {
      std::size_t i = 0;
      const Trace t = fixture::make_trace(1000, [&](double) { return Vec3{0, 0, 9.81} + jitter[i++] * scale; });
      const int r = rank(classify_motion(t));
      EXPECT_GE(r, previous) << "seed " << seed << " scale " << scale;
      previous = r;
    }
    EXPECT_EQ(previous, rank(MotionState::running));
  }
}

TEST(Fall, QuietTraceIsNoFall) { EXPECT_FALSE(detect_fall(fixture::constant_trace(2000, {0, 0, 9.81}))); }

TEST(Fall, SpikeWithoutTurnIsNoFall) {
  synth::FallSpec spec;
  spec.pitch_after = 0.0;
  const Trace t = synth::generate_fall(spec);
  const auto amp = amplitude_series(t);
  ASSERT_GT(*std::max_element(amp.begin(), amp.end()), 3 * kGravity);
  EXPECT_FALSE(detect_fall(t));
}

TEST(Fall, SpikeWithNinetyDegreeTurnIsFall) {
  synth::FallSpec spec;
  spec.noise_sigma = 0.05;
  spec.seed = 3;
  EXPECT_TRUE(detect_fall(synth::generate_fall(spec)));
}

TEST(Fall, NeverComingToRest) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 6.0);
  const Trace t = fixture::make_trace(2000, [&](double ms) {
    if (ms < 1000) return Vec3{0, 0, 9.81};
    if (ms < 1010) return Vec3{0, 0, 40.0};
    return Vec3{n(rng), n(rng), 9.81 + n(rng)};
  });
  try {
    detect_fall(t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_static_tail);
  }
}
