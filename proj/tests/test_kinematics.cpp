#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mbs/kinematics.hpp"
#include "mbs/synth_oracle.hpp"

using namespace mbs;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mbs::Error thrown";
  return Errc::invalid_argument;
}

}  // namespace

TEST(IsStatic, Examples) {
  EXPECT_TRUE(is_static(fixture::constant_trace(10, {0, 0, 9.81})));
  EXPECT_FALSE(is_static(fixture::constant_trace(1, {5, 5, 9})));
  EXPECT_EQ(code_of([] { is_static(Trace{}); }), Errc::empty_trace);
}

TEST(FinalRotation, ArcsinOfTailMean) {
  EXPECT_NEAR(final_rotation(fixture::constant_trace(100, {0, 0, 9.81})).x_deg, 0.0, 1e-12);
  EXPECT_NEAR(final_rotation(fixture::constant_trace(100, {9.81, 0, 0})).x_deg, 90.0, 1e-12);
  const double z = std::sqrt(9.81 * 9.81 - 4.905 * 4.905);
  const RotationAngles a = final_rotation(fixture::constant_trace(100, {4.905, 0, z}));
  EXPECT_NEAR(a.x_deg, 30.0, 1e-9);
  EXPECT_NEAR(a.roll(), 30.0, 1e-9);
}

TEST(FinalRotation, OnlyTheTailCounts) {
  // 950 ms of motion, then 50 ms resting with y reading 9.81 sin 60.
  const double s = 9.81 * std::sin(60.0 * M_PI / 180.0);
  const double c = 9.81 * std::cos(60.0 * M_PI / 180.0);
  const Trace t = fixture::make_trace(1000, [&](double ms) { return ms < 950 ? Vec3{3, 14, -2} : Vec3{0, s, c}; });
  EXPECT_NEAR(final_rotation(t, 50.0).pitch(), 60.0, 1e-9);
}

TEST(FinalRotation, DynamicTailRejected) {
  EXPECT_EQ(code_of([] { final_rotation(fixture::constant_trace(100, {0, 0, 15})); }), Errc::dynamic_tail);
  EXPECT_EQ(code_of([] { final_rotation(fixture::constant_trace(100, {0, 0, 5})); }), Errc::dynamic_tail);
}

TEST(FinalRotation, ClampedWhenNoiseExceedsGravity) {
  const RotationAngles a = final_rotation(fixture::constant_trace(100, {10.5, 0, 0}));
  EXPECT_FALSE(std::isnan(a.x_deg));
  EXPECT_LE(std::abs(a.x_deg), 90.0);
  EXPECT_NEAR(a.x_deg, 90.0, 1e-12);
}

TEST(FinalRotation, StaticGravityTailNeverDynamic) {
  // Gravity-magnitude readings in any direction pass the static test and the gate.
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ang(-M_PI, M_PI);
  for (int i = 0; i < 200; ++i) {
    const double th = ang(rng), ph = ang(rng) / 2;
    const Vec3 g{9.81 * std::cos(ph) * std::cos(th), 9.81 * std::cos(ph) * std::sin(th), 9.81 * std::sin(ph)};
    const Trace t = fixture::constant_trace(60, g);
    ASSERT_TRUE(is_static(t));
    EXPECT_NO_THROW(final_rotation(t));
  }
}

TEST(FinalRotation, RecoversSynthPitch) {
  for (double pitch : {0.0, 15.0, 30.0, 60.0, 90.0}) {
    synth::GestureSpec spec;
    spec.displacement = {0, 0.2, 0};
    spec.pitch_end = pitch;
    const auto g = synth::generate(spec);
    EXPECT_NEAR(final_rotation(g.trace).pitch(), pitch, 1.0) << pitch;
  }
}

TEST(Integrate, ZeroAccelerationStaysAtRest) {
  const MotionPath p = integrate(fixture::constant_trace(500, {0, 0, 0}), 0.0);
  ASSERT_EQ(p.position.size(), 500u);
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(p.velocity[i], Vec3{});
    EXPECT_EQ(p.position[i], Vec3{});
  }
}

TEST(Integrate, ConstantAcceleration) {
  const MotionPath p = integrate(fixture::constant_trace(1001, {1, 0, 0}), 0.0);
  EXPECT_NEAR(p.velocity.back().x, 1.0, 1e-3);
  EXPECT_NEAR(p.final_position().x, 0.5, 1e-3);
  EXPECT_EQ(p.velocity.front(), Vec3{});
  EXPECT_EQ(p.position.front(), Vec3{});
}

TEST(Integrate, SnapsSlowVelocities) {
  // v reaches only 0.01 m/s, below the 0.02 threshold: no displacement.
  const MotionPath p = integrate(fixture::constant_trace(101, {0.1, 0, 0}), 0.02);
  EXPECT_EQ(p.final_position().x, 0.0);
}

TEST(Integrate, LinearAndSignSymmetric) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0, 1);
  const Trace a = fixture::make_trace(400, [&](double) { return Vec3{n(rng), n(rng), n(rng)}; });
  const Trace b = fixture::make_trace(400, [&](double) { return Vec3{n(rng), n(rng), n(rng)}; });
  Trace sum = a, neg = a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum.samples[i].ax += b.samples[i].ax;
    sum.samples[i].ay += b.samples[i].ay;
    sum.samples[i].az += b.samples[i].az;
    neg.samples[i].ax = -neg.samples[i].ax;
    neg.samples[i].ay = -neg.samples[i].ay;
    neg.samples[i].az = -neg.samples[i].az;
  }
  const auto pa = integrate(a, 0.0), pb = integrate(b, 0.0), ps = integrate(sum, 0.0), pn = integrate(neg, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int ax = 0; ax < 3; ++ax) EXPECT_NEAR(ps.position[i][ax], pa.position[i][ax] + pb.position[i][ax], 1e-6);
  }
  EXPECT_EQ(pn.final_position(), pa.final_position() * -1.0);
}

TEST(Integrate, MinimumJerkPulse) {
  synth::GestureSpec spec;
  spec.displacement = {0, 0.5, 0};
  spec.duration_ms = 1000;
  const auto g = synth::generate(spec);
  const MotionPath p = integrate(center_baseline(g.trace), 0.0);
  EXPECT_NEAR(p.final_position().y, 0.5, 0.5 * 0.02);
}

TEST(DetectBounds, NoGestureBelowThreshold) {
  const Trace quiet = fixture::make_trace(300, [](double ms) { return Vec3{0.3 * std::sin(ms / 20.0), 0.1, -0.2}; });
  EXPECT_EQ(code_of([&] { detect_bounds(quiet); }), Errc::no_gesture);
  EXPECT_EQ(code_of([] { detect_bounds(fixture::constant_trace(1, {5, 5, 5})); }), Errc::no_gesture);
}

TEST(DetectBounds, BracketsSynthPulse) {
  synth::GestureSpec spec;
  spec.displacement = {0, 0.5, 0};
  spec.duration_ms = 500;
  spec.lead_ms = 200;
  spec.trail_ms = 300;
  const auto g = synth::generate(spec);
  ASSERT_EQ(g.trace.size(), 1000u);
  ASSERT_EQ(g.truth.onset_index, 200u);
  ASSERT_EQ(g.truth.offset_index, 700u);
  for (std::size_t w : {1u, 21u}) {
    for (auto rule : {BoundsRule::threshold_crossing, BoundsRule::settle}) {
      const Trace p = smooth(center_baseline(g.trace), {SmoothingKind::moving_average, w});
      const GestureBounds b = detect_bounds(p, 0.4, rule);
      EXPECT_NEAR(double(b.start_index), 200.0, 10.0) << w;
      EXPECT_NEAR(double(b.end_index), 700.0, 10.0) << w;
    }
  }
}

TEST(DetectBounds, PulseAtIndexZeroClampsStart) {
  const Trace t = fixture::make_trace(300, [](double ms) {
    return Vec3{ms < 100 ? 3.0 * std::cos(ms * M_PI / 100.0) : 0.0, 0, 0};
  });
  const GestureBounds b = detect_bounds(t);
  EXPECT_EQ(b.start_index, 0u);
  EXPECT_LT(b.start_index, b.end_index);
}

TEST(DetectBounds, ExtremaInsideBounds) {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0, 0.5);
  std::uniform_real_distribution<double> c(100, 800);
  for (int trial = 0; trial < 50; ++trial) {
    const double centre = c(rng);
    const Trace raw = fixture::make_trace(1000, [&](double ms) {
      const double bump = 4.0 * std::exp(-(ms - centre) * (ms - centre) / 800.0) * std::sin((ms - centre) / 15.0);
      return Vec3{n(rng), bump + n(rng), n(rng)};
    });
    const Trace p = smooth(raw, {SmoothingKind::moving_average, 21});
    const GestureBounds b = detect_bounds(p);
    ASSERT_LT(b.start_index, b.end_index);
    ASSERT_LT(b.end_index, p.size());
    int dominant = 0;
    double best = -1;
    for (int ax = 0; ax < 3; ++ax) {
      const auto s = p.axis_series(ax);
      const double r = *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end());
      if (r > best) {
        best = r;
        dominant = ax;
      }
    }
    const auto s = p.axis_series(dominant);
    const auto imax = std::size_t(std::max_element(s.begin(), s.end()) - s.begin());
    const auto imin = std::size_t(std::min_element(s.begin(), s.end()) - s.begin());
    EXPECT_GE(std::min(imax, imin), b.start_index);
    EXPECT_LE(std::max(imax, imin), b.end_index);
  }
}

TEST(GestureDisplacement, StationaryIsNoGesture) {
  EXPECT_EQ(code_of([] { gesture_displacement(fixture::constant_trace(1000, {0, 0, 9.81})); }), Errc::no_gesture);
}

TEST(GestureDisplacement, RecoversNoiselessVector) {
  synth::GestureSpec spec;
  spec.displacement = {0.3, 0.2, 0.1};
  const Vec3 d = gesture_displacement(synth::generate(spec).trace);
  for (int ax = 0; ax < 3; ++ax) EXPECT_NEAR(d[ax], spec.displacement[ax], 0.05 * spec.displacement[ax]) << ax;
}

TEST(GestureDisplacement, RecoversNoisyVector) {
  synth::GestureSpec spec;
  spec.displacement = {0.3, 0.2, 0.1};
  spec.noise_sigma = 0.05;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    spec.seed = seed;
    const Vec3 d = gesture_displacement(synth::generate(spec).trace);
    for (int ax = 0; ax < 3; ++ax) EXPECT_NEAR(d[ax], spec.displacement[ax], 0.15 * spec.displacement[ax]) << ax;
  }
}

TEST(GestureDisplacement, NeedsCalibratedTrace) {
  Trace t = fixture::constant_trace(500, {0, 0, 9.81});
  t.calibrated = false;
  EXPECT_EQ(code_of([&] { gesture_displacement(t); }), Errc::invalid_argument);
}
