#pragma once

#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "mbs/signal_core.hpp"

namespace fixture {

// Calibrated trace sampled at 1 kHz, t = 0, 1, 2, ... ms.
inline mbs::Trace make_trace(std::size_t n, const std::function<mbs::Vec3(double t_ms)>& f, double rate_hz = 1000.0) {
  mbs::Trace t;
  t.sample_rate_hz = rate_hz;
  t.calibrated = true;
  const double period = 1000.0 / rate_hz;
  for (std::size_t i = 0; i < n; ++i) {
    const double ms = static_cast<double>(i) * period;
    const mbs::Vec3 a = f(ms);
    t.samples.push_back({ms, a.x, a.y, a.z});
  }
  return t;
}

inline mbs::Trace constant_trace(std::size_t n, const mbs::Vec3& a) {
  return make_trace(n, [a](double) { return a; });
}

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n, double lo = -5.0, double hi = 5.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace fixture
