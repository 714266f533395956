#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace leafgeo {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double simpson_step(const F& f, double a, double fa, double m, double fm, double b, double fb, double whole,
                    double tol, int depth, int& evals, int max_evals) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  evals += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || evals > max_evals) {
    throw QuadratureError("adaptive Simpson did not converge");
  }
  if (std::abs(delta) <= 15.0 * tol || std::abs(b - a) < 1e-15 * (1.0 + std::abs(a))) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, evals, max_evals) +
         simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, evals, max_evals);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction. Absolute tolerance `tol`
/// is scaled by max(1, |estimate|) so large integrals get a relative target.
template <class F>
double integrate_simpson(const F& f, double a, double b, double tol = 1e-12, int max_depth = 50,
                         int max_evals = 2'000'000) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double scaled = tol * std::max(1.0, std::abs(whole));
  int evals = 3;
  const double r = detail::simpson_step(f, a, fa, m, fm, b, fb, whole, scaled, max_depth, evals, max_evals);
  if (!std::isfinite(r)) throw QuadratureError("quadrature produced a non-finite value");
  return r;
}

/// Fixed 10-point Gauss-Legendre rule on [a, b].
template <class F>
double gauss_legendre10(const F& f, double a, double b) {
  static constexpr double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                  0.9739065285171717};
  static constexpr double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                  0.0666713443086881};
  const double m = 0.5 * (a + b), r = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += w[i] * (f(m - r * x[i]) + f(m + r * x[i]));
  return r * sum;
}

/// Running primitive z -> int_base^z f. Whole panels [base + k h, base + (k+1) h] are
/// integrated adaptively once and cached; the partial panel uses Gauss-Legendre.
/// Safe to share between threads.
class PrimitiveTable {
 public:
  PrimitiveTable(std::function<double(double)> f, double base, double tol, double h = 0.25)
      : f_(std::move(f)), base_(base), tol_(tol), h_(h), up_{0.0}, down_{0.0} {}

  double operator()(double z) const {
    const double d = z - base_;
    const bool up = d >= 0.0;
    const long k = static_cast<long>(std::floor(std::abs(d) / h_));
    if (k > 1'000'000) throw QuadratureError("primitive requested too far from the base point");
    const double node = base_ + (up ? 1.0 : -1.0) * static_cast<double>(k) * h_;
    const double r = node_value(up, k) + gauss_legendre10(f_, node, z);
    if (!std::isfinite(r)) throw QuadratureError("quadrature produced a non-finite value");
    return r;
  }

 private:
  double node_value(bool up, long k) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<double>& t = up ? up_ : down_;
    const double dir = up ? 1.0 : -1.0;
    while (static_cast<long>(t.size()) <= k) {
      const double a = base_ + dir * static_cast<double>(t.size() - 1) * h_;
      t.push_back(t.back() + integrate_simpson(f_, a, a + dir * h_, tol_));
    }
    return t[static_cast<std::size_t>(k)];
  }

  std::function<double(double)> f_;
  double base_, tol_, h_;
  mutable std::mutex mu_;
  mutable std::vector<double> up_, down_;
};

}  // namespace leafgeo
