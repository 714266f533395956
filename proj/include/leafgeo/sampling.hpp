#pragma once

// Seeded point generators for the verification suites.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "leafgeo/chart.hpp"
#include "leafgeo/leafscape.hpp"

namespace leafgeo {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed = 42) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  AmbientPoint in_cube(double half) { return {uniform(-half, half), uniform(-half, half), uniform(-half, half)}; }

  /// On-leaf point with x in [x_lo, x_hi], z in [z_lo, z_hi] and y from the leaf equation.
  AmbientPoint on_leaf(const FunctionSpec& spec, double c, double x_lo = 0.2, double x_hi = 3.0, double z_lo = -2.0,
                       double z_hi = 2.0) {
    const double x = uniform(x_lo, x_hi);
    const double z = uniform(z_lo, z_hi);
    const Jet j = spec.jet(z);
    return {x, std::exp(-j.p) * (c - j.q) / x, z};
  }

  /// On-leaf point away from the red lines: |f| >= margin * (1 + x^2 + y^2 + W^2).
  AmbientPoint green_leaf_point(const FunctionSpec& spec, double c, double margin = 1e-3, int max_tries = 100000) {
    for (int t = 0; t < max_tries; ++t) {
      const AmbientPoint p = on_leaf(spec, c);
      const Jet j = spec.jet(p.z);
      const double w = w_at(j, p);
      if (p.finite() && std::abs(f_at(j, p)) >= margin * f_scale(p, w)) return p;
    }
    throw NumericError("no green-zone point found on the leaf");
  }

  /// A point with f = 0 off the point leaves: x, z random, xy a root of
  /// V^2 s^2 + 2(1 + UV) s + U^2 = 0.
  AmbientPoint red_point(const FunctionSpec& spec, double half = 2.0, int max_tries = 100000) {
    for (int t = 0; t < max_tries; ++t) {
      double x = uniform(0.2, half);
      if (index(2)) x = -x;
      const double z = uniform(-half, half);
      const Jet j = spec.jet(z);
      if (std::abs(j.u) < 1e-3) continue;
      double s = 0.0;
      if (j.v == 0.0) {
        s = -0.5 * j.u * j.u;
      } else {
        const double b = 1.0 + j.u * j.v;
        const double disc = 1.0 + 2.0 * j.u * j.v;
        if (disc < 0.0) continue;
        // Cancellation-free roots of V^2 s^2 + 2 b s + U^2.
        const double qq = -(b + std::copysign(std::sqrt(disc), b));
        const double r1 = qq / (j.v * j.v), r2 = j.u * j.u / qq;
        s = index(2) ? r1 : r2;
        if (!std::isfinite(s)) continue;
      }
      const AmbientPoint p{x, s / x, z};
      if (std::abs(p.y) > 10.0 * half * half) continue;
      return p;
    }
    throw NumericError("no red-zone point constructed");
  }

  /// Point well inside the M-regular set: |f| >= margin * scale.
  AmbientPoint regular_point(const FunctionSpec& spec, double half = 2.0, double margin = 1e-2,
                             int max_tries = 100000) {
    for (int t = 0; t < max_tries; ++t) {
      const AmbientPoint p = in_cube(half);
      const Jet j = spec.jet(p.z);
      const double w = w_at(j, p);
      if (std::abs(f_at(j, p)) >= margin * f_scale(p, w)) return p;
    }
    throw NumericError("no regular point found");
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace leafgeo
