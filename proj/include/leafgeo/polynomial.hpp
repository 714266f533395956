#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace leafgeo {

/// Dense real polynomial, coefficients in increasing degree.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { trim(); }

  static Polynomial constant(double v) { return Polynomial({v}); }
  static Polynomial identity() { return Polynomial({0.0, 1.0}); }

  const std::vector<double>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  /// Degree of the zero polynomial is reported as -1.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  double coeff(std::size_t k) const { return k < c_.size() ? c_[k] : 0.0; }

  /// Horner evaluation; works for any ring-like scalar (double, Dual<N>).
  template <class T>
  T operator()(const T& z) const {
    T acc(0.0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Polynomial(std::move(d));
  }

  /// Antiderivative A with A(base) = value_at_base.
  Polynomial antiderivative(double base = 0.0, double value_at_base = 0.0) const {
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k) a[k + 1] = c_[k] / static_cast<double>(k + 1);
    Polynomial out(std::move(a));
    const double shift = value_at_base - out(base);
    if (out.c_.empty()) out.c_.push_back(0.0);
    out.c_[0] += shift;
    out.trim();
    return out;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = a.coeff(k) + b.coeff(k);
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<double> r(a.c_);
    for (auto& v : r) v = -v;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(double s, const Polynomial& a) { return Polynomial::constant(s) * a; }

  Polynomial pow(unsigned n) const {
    Polynomial r = constant(1.0);
    for (unsigned i = 0; i < n; ++i) r = r * (*this);
    return r;
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

  std::string to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (std::size_t k = c_.size(); k-- > 0;) {
      if (c_[k] == 0.0) continue;
      if (!first) os << (c_[k] < 0 ? " - " : " + ");
      else if (c_[k] < 0) os << "-";
      const double a = std::abs(c_[k]);
      if (k == 0 || a != 1.0) os << a;
      if (k >= 1) os << (k == 0 || a != 1.0 ? "*z" : "z");
      if (k >= 2) os << "^" << k;
      first = false;
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
  }

  std::vector<double> c_;
};

}  // namespace leafgeo
