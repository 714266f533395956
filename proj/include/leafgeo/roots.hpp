#pragma once

// Real-root isolation on an interval: sign changes on a uniform grid refined by
// bisection, plus even-multiplicity (touching) zeros located through sign changes
// of the derivative. The callable returns a Dual<1> carrying f and f'.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "leafgeo/dual.hpp"

namespace leafgeo {

/// Root finding, projection or integration could not produce a trustworthy number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Root {
  double z = 0.0;
  bool multiple = false;  // |f'(z)| negligible at the root
  bool touching = false;  // no sign change across the root
};

struct RootScanOptions {
  int cells = 2048;
  double xtol = 1e-12;
  /// Zero test for touching roots, relative to |f| at the enclosing cell ends.
  double touch_tol = 1e-10;
  /// Multiplicity threshold: |f'(z*)| < multiple_tol * (1 + |f''(z*)|).
  double multiple_tol = 1e-8;
  /// max |f| on the grid below this marks the function as identically zero.
  double zero_function_tol = 1e-10;
};

struct RootScan {
  std::vector<Root> roots;
  bool identically_zero = false;
  bool boundary_root = false;
  /// Cells where evaluation produced non-finite values.
  std::vector<std::pair<double, double>> failed_cells;
};

namespace detail {

template <class F>
double bisect(const F& g, double lo, double hi, double glo, double xtol) {
  for (int it = 0; it < 200 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm < 0.0) == (glo < 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

template <class F>
RootScan find_roots(const F& f, double lo, double hi, const RootScanOptions& opt = {}) {
  RootScan out;
  const int n = std::max(opt.cells, 1);
  const double h = (hi - lo) / n;
  std::vector<double> zs(n + 1), fv(n + 1), dv(n + 1);
  double fmax = 0.0;
  for (int i = 0; i <= n; ++i) {
    zs[i] = (i == n) ? hi : lo + i * h;
    const Dual<1> r = f(Dual<1>::variable(zs[i], 0));
    fv[i] = r.value;
    dv[i] = r.grad[0];
    if (std::isfinite(fv[i])) fmax = std::max(fmax, std::abs(fv[i]));
  }
  if (fmax < opt.zero_function_tol) {
    out.identically_zero = true;
    return out;
  }

  auto value = [&](double z) { return f(Dual<1>(z)).value; };
  auto slope = [&](double z) { return f(Dual<1>::variable(z, 0)).grad[0]; };
  auto classify = [&](double z, bool touching) {
    const double d1 = slope(z);
    const double hs = 1e-5 * (1.0 + std::abs(z));
    const double d2 = (slope(z + hs) - slope(z - hs)) / (2.0 * hs);
    Root r;
    r.z = z;
    r.touching = touching;
    r.multiple = touching || std::abs(d1) < opt.multiple_tol * (1.0 + std::abs(d2));
    return r;
  };

  std::vector<Root> found;
  for (int i = 0; i < n; ++i) {
    const double a = zs[i], b = zs[i + 1];
    if (!std::isfinite(fv[i]) || !std::isfinite(fv[i + 1]) || !std::isfinite(dv[i]) || !std::isfinite(dv[i + 1])) {
      out.failed_cells.emplace_back(a, b);
      continue;
    }
    if (fv[i] == 0.0) {
      found.push_back(classify(a, false));
      continue;
    }
    if (fv[i + 1] != 0.0 && (fv[i] < 0.0) != (fv[i + 1] < 0.0)) {
      found.push_back(classify(detail::bisect(value, a, b, fv[i], opt.xtol), false));
      continue;
    }
    // Touching zero: f' changes sign inside the cell while f does not.
    if (fv[i + 1] != 0.0 && dv[i] != 0.0 && dv[i + 1] != 0.0 && (dv[i] < 0.0) != (dv[i + 1] < 0.0)) {
      const double zc = detail::bisect(slope, a, b, dv[i], opt.xtol);
      const double fc = value(zc);
      const double local = std::abs(fv[i]) + std::abs(fv[i + 1]);
      const bool crosses = (fc < 0.0) != (fv[i] < 0.0);
      if (crosses) {
        // Two simple zeros closer than one cell; split at the extremum.
        found.push_back(classify(detail::bisect(value, a, zc, fv[i], opt.xtol), false));
        found.push_back(classify(detail::bisect(value, zc, b, fc, opt.xtol), false));
      } else if (std::abs(fc) <= opt.touch_tol * (1.0 + local)) {
        found.push_back(classify(zc, true));
      }
    }
  }
  if (fv[n] == 0.0) found.push_back(classify(zs[n], false));

  std::sort(found.begin(), found.end(), [](const Root& p, const Root& q) { return p.z < q.z; });
  for (const Root& r : found) {
    if (!out.roots.empty() && std::abs(r.z - out.roots.back().z) < 1e-9 * (1.0 + std::abs(r.z))) {
      out.roots.back().multiple = out.roots.back().multiple || r.multiple;
      continue;
    }
    out.roots.push_back(r);
  }
  for (const Root& r : out.roots) {
    if (std::abs(r.z - lo) <= 2.0 * opt.xtol || std::abs(r.z - hi) <= 2.0 * opt.xtol) out.boundary_root = true;
  }
  return out;
}

}  // namespace leafgeo
