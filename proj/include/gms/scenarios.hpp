#pragma once

// Failure-time uncertainty is carried as a discrete scenario set per fault
// event: equal-probability integer failure days drawn from the event's
// normal distribution, clamped into the schedulable window.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "gms/domain.hpp"

namespace gms {

struct Scenario {
  int fail_time = 0;   // day the unit fails in this scenario
  double prob = 0.0;   // scenario probability
};

struct ScenarioSet {
  int agent = 0;
  int event_index = 0;           // 0-based position in the agent's event list
  std::vector<Scenario> items;   // ascending fail_time, probs sum to 1
  double clamped_mass = 0.0;     // probability mass moved onto a window edge
};

enum class SampleMethod { MonteCarlo, Stratified };

namespace detail {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Rational approximation of the standard normal quantile (Acklam).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile needs p in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double q, r;
  if (p < plow) {
    q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  q = p - 0.5;
  r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace detail

// Seed for the (agent, event) draw stream, independent of every other event.
inline uint64_t derive_event_seed(uint64_t master, int agent, int event_index) {
  uint64_t h = detail::splitmix64(master ^ detail::splitmix64(
                                               static_cast<uint64_t>(agent) * 0x100000001B3ULL));
  return detail::splitmix64(h ^ static_cast<uint64_t>(event_index));
}

// Draw `count` failure days for one event. Monte Carlo uses a seeded
// mt19937_64 with a Box-Muller transform (one normal per pair of uniforms,
// bit-stable across platforms); Stratified places one draw at each midpoint
// quantile. Draws are rounded to whole days, clamped into
// (detect_time, window_end], and duplicates merged.
inline ScenarioSet sample_scenarios(const FaultEvent& ev, int count, uint64_t seed,
                                    SampleMethod method = SampleMethod::MonteCarlo) {
  if (count < 1) throw std::invalid_argument("scenario count must be >= 1");
  if (ev.rul_std > 0.0 && ev.window_end <= ev.detect_time + 1)
    throw ValidationError("window too short: all failure mass would clamp to one day");

  std::vector<double> raw(static_cast<size_t>(count));
  if (ev.rul_std == 0.0) {
    for (auto& v : raw) v = ev.rul_mean;
  } else if (method == SampleMethod::Stratified) {
    for (int i = 0; i < count; ++i) {
      double p = (i + 0.5) / count;
      raw[static_cast<size_t>(i)] = ev.rul_mean + ev.rul_std * detail::normal_quantile(p);
    }
  } else {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
      // 53-bit mantissa in (0,1], avoids log(0).
      return (static_cast<double>(rng() >> 11) + 1.0) * 0x1p-53;
    };
    for (auto& v : raw) {
      double u1 = uniform();
      double u2 = uniform();
      double z = std::sqrt(-2.0 * std::log(u1)) *
                 std::cos(2.0 * 3.141592653589793238462643 * u2);
      v = ev.rul_mean + ev.rul_std * z;
    }
  }

  std::map<int, double> mass;
  double clamped = 0.0;
  const double p_each = 1.0 / count;
  for (double v : raw) {
    long day = std::lround(v);
    long lo = ev.detect_time + 1;
    long hi = ev.window_end;
    if (day < lo) {
      day = lo;
      clamped += p_each;
    } else if (day > hi) {
      day = hi;
      clamped += p_each;
    }
    mass[static_cast<int>(day)] += p_each;
  }

  ScenarioSet out;
  out.clamped_mass = clamped;
  out.items.reserve(mass.size());
  for (const auto& [day, p] : mass) out.items.push_back({day, p});
  return out;
}

// P(unit still alive at day t): scenarios failing after t count fully,
// a scenario failing exactly at t counts half.
inline double expected_indicator_alive(const ScenarioSet& scen, int t) {
  double acc = 0.0;
  for (const auto& s : scen.items)
    acc += s.prob * 0.5 * (1.0 - sign(static_cast<double>(t - s.fail_time)));
  return acc;
}

}  // namespace gms
