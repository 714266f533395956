#pragma once

// Structure functions U(z), V(z) of the bracket family {x,y} = U + V xy, {z,x} = x,
// {z,y} = -y, together with primitives P' = V and Q' = U exp(P).

#include <cctype>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "leafgeo/dual.hpp"
#include "leafgeo/expr.hpp"
#include "leafgeo/polynomial.hpp"
#include "leafgeo/quadrature.hpp"

namespace leafgeo {

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SpecKind { Polynomial, PoissonLie, Custom };

inline std::string_view to_string(SpecKind k) {
  switch (k) {
    case SpecKind::Polynomial: return "polynomial";
    case SpecKind::PoissonLie: return "poisson-lie";
    case SpecKind::Custom: return "custom";
  }
  return "?";
}

/// Values of U, V, P, Q and the first derivatives of U, V at one z.
struct Jet {
  double u = 0.0, du = 0.0;
  double v = 0.0, dv = 0.0;
  double p = 0.0;
  double q = 0.0;

  double exp_p() const { return std::exp(p); }
  /// Q'(z) = U(z) exp(P(z)).
  double dq() const { return u * std::exp(p); }
};

/// First-order extension of jet quantities to a dual argument z = z0 + dz.
template <std::size_t N>
struct LiftedJet {
  Dual<N> u, v, p, q;
};

template <std::size_t N>
LiftedJet<N> lift(const Jet& j, const Dual<N>& z) {
  LiftedJet<N> out;
  out.u = detail::chain(z, j.u, j.du);
  out.v = detail::chain(z, j.v, j.dv);
  out.p = detail::chain(z, j.p, j.v);
  out.q = detail::chain(z, j.q, j.dq());
  return out;
}

class FunctionSpec {
 public:
  /// U, V polynomials; Q(quad_base) = q0 and P(quad_base) = 0.
  static FunctionSpec polynomial(Polynomial U, Polynomial V = {}, double q0 = 0.0, double quad_base = 0.0,
                                 double quad_tol = 1e-12) {
    FunctionSpec s;
    s.kind_ = SpecKind::Polynomial;
    s.u_poly_ = std::move(U);
    s.v_poly_ = std::move(V);
    s.q0_ = q0;
    s.quad_base_ = quad_base;
    s.quad_tol_ = quad_tol;
    s.p_poly_ = s.v_poly_.antiderivative(quad_base, 0.0);
    if (s.v_poly_.is_zero()) {
      s.q_mode_ = QMode::Polynomial;
      s.q_poly_ = s.u_poly_.antiderivative(quad_base, q0);
    } else if (s.v_poly_.degree() == 0 && std::abs(s.v_poly_.coeff(0)) >= kClosedFormMinRate) {
      s.q_mode_ = QMode::ExpPolynomial;
    } else {
      s.q_mode_ = QMode::Quadrature;
      if (s.v_poly_.degree() >= 1)
        s.warnings_.push_back("V has degree >= 1: P is exact, Q = int U exp(P) is evaluated by quadrature");
      else
        s.warnings_.push_back("small constant V: Q evaluated by quadrature");
      s.build_tables();
    }
    return s;
  }

  /// Poisson-Lie group family: U = (1 - exp(-2 eta z)) / (2 eta), V = eta.
  static FunctionSpec poisson_lie(double eta, double q0 = 0.0) {
    if (!(eta != 0.0) || !std::isfinite(eta)) throw SpecError("poisson-lie family requires a finite eta != 0");
    FunctionSpec s;
    s.kind_ = SpecKind::PoissonLie;
    s.eta_ = eta;
    s.q0_ = q0;
    s.q_mode_ = QMode::Closed;
    return s;
  }

  /// Arbitrary expressions in z; primitives by adaptive quadrature from quad_base.
  static FunctionSpec custom(Expr U, Expr V, double q0 = 0.0, double quad_base = 0.0, double quad_tol = 1e-12) {
    for (int var : {0, 1}) {
      if (U.depends_on(var) || V.depends_on(var)) throw SpecError("U and V may depend on z only");
    }
    FunctionSpec s;
    s.kind_ = SpecKind::Custom;
    s.q0_ = q0;
    s.quad_base_ = quad_base;
    s.quad_tol_ = quad_tol;
    s.v_constant_ = !V.depends_on(2);
    s.u_expr_ = std::move(U);
    s.v_expr_ = std::move(V);
    s.q_mode_ = QMode::Quadrature;
    s.build_tables();
    return s;
  }

  SpecKind kind() const { return kind_; }
  double eta() const { return eta_; }
  double q0() const { return q0_; }
  double quad_base() const { return quad_base_; }
  double quad_tol() const { return quad_tol_; }
  const Polynomial& u_polynomial() const { return u_poly_; }
  const Polynomial& v_polynomial() const { return v_poly_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// True when Q is evaluated in closed form (no quadrature).
  bool q_is_exact() const { return q_mode_ != QMode::Quadrature; }
  /// True when U is a polynomial and V = 0, i.e. h_c = Q - c is a polynomial.
  bool q_is_polynomial() const { return q_mode_ == QMode::Polynomial; }
  const Polynomial& q_polynomial() const { return q_poly_; }

  /// Optional display name (builtin:...).
  const std::string& label() const { return label_; }
  FunctionSpec& with_label(std::string l) {
    label_ = std::move(l);
    return *this;
  }

  double U(double z) const { return jet_uv(z).first.value; }
  double V(double z) const { return jet_uv(z).second.value; }

  Jet jet(double z) const {
    if (!std::isfinite(z)) throw SpecError("jet requested at non-finite z");
    Jet j;
    const auto [u, v] = jet_uv(z);
    j.u = u.value;
    j.du = u.grad[0];
    j.v = v.value;
    j.dv = v.grad[0];
    j.p = P(z);
    j.q = Q(z);
    return j;
  }

  double P(double z) const {
    switch (kind_) {
      case SpecKind::Polynomial: return p_poly_(z);
      case SpecKind::PoissonLie: return eta_ * z;
      case SpecKind::Custom:
        if (v_constant_) return (*v_expr_)(0.0, 0.0, z) * (z - quad_base_);
        return (*p_table_)(z);
    }
    return 0.0;
  }

  double Q(double z) const {
    switch (q_mode_) {
      case QMode::Polynomial: return q_poly_(z);
      case QMode::Closed: {
        const double s = std::sinh(0.5 * eta_ * z);
        return 2.0 * s * s / (eta_ * eta_) + q0_;
      }
      case QMode::ExpPolynomial: return q0_ + exp_poly_primitive(z) - exp_poly_primitive(quad_base_);
      case QMode::Quadrature: break;
    }
    return q0_ + (*q_table_)(z);
  }

  /// key=value text accepted by parse_spec().
  std::string to_text() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
      case SpecKind::Polynomial:
        os << "family=polynomial U=\"" << u_poly_.to_string() << "\" V=\"" << v_poly_.to_string() << "\"";
        break;
      case SpecKind::PoissonLie: os << "family=poisson-lie eta=" << eta_; break;
      case SpecKind::Custom:
        os << "family=custom U=\"" << u_expr_->text() << "\" V=\"" << v_expr_->text() << "\"";
        break;
    }
    if (q0_ != 0.0) os << " Q0=" << q0_;
    if (quad_base_ != 0.0) os << " quad_base=" << quad_base_;
    return os.str();
  }

 private:
  enum class QMode { Polynomial, ExpPolynomial, Closed, Quadrature };
  // Below this |V| the integration-by-parts closed form loses digits to cancellation.
  static constexpr double kClosedFormMinRate = 0.5;

  // The tables capture copies of the expressions, so copied specs share them safely.
  void build_tables() {
    if (kind_ == SpecKind::Custom && !v_constant_) {
      const Expr v = *v_expr_;
      p_table_ = std::make_shared<PrimitiveTable>([v](double t) { return v(0.0, 0.0, t); }, quad_base_, quad_tol_);
    }
    std::function<double(double)> integrand;
    if (kind_ == SpecKind::Custom) {
      const Expr u = *u_expr_;
      if (p_table_) {
        auto pt = p_table_;
        integrand = [u, pt](double t) { return u(0.0, 0.0, t) * std::exp((*pt)(t)); };
      } else {
        const double a = (*v_expr_)(0.0, 0.0, 0.0), base = quad_base_;
        integrand = [u, a, base](double t) { return u(0.0, 0.0, t) * std::exp(a * (t - base)); };
      }
    } else {
      const Polynomial u = u_poly_, p = p_poly_;
      integrand = [u, p](double t) { return u(t) * std::exp(p(t)); };
    }
    q_table_ = std::make_shared<PrimitiveTable>(std::move(integrand), quad_base_, quad_tol_);
  }

  std::pair<Dual<1>, Dual<1>> jet_uv(double z) const {
    const Dual<1> zd = Dual<1>::variable(z, 0);
    switch (kind_) {
      case SpecKind::Polynomial: return {u_poly_(zd), v_poly_(zd)};
      case SpecKind::PoissonLie: {
        // -expm1 keeps U accurate for small eta z.
        const double e = std::exp(-2.0 * eta_ * z);
        Dual<1> u(-std::expm1(-2.0 * eta_ * z) / (2.0 * eta_));
        u.grad[0] = e;
        return {u, Dual<1>(eta_)};
      }
      case SpecKind::Custom: return {(*u_expr_)(Dual<1>(0.0), Dual<1>(0.0), zd), (*v_expr_)(Dual<1>(0.0), Dual<1>(0.0), zd)};
    }
    return {};
  }

  // exp(P(z)) * sum_k (-1)^k U^(k)(z) / a^(k+1), an antiderivative of U exp(P) for
  // constant V = a (P = a (z - base)).
  double exp_poly_primitive(double z) const {
    const double a = v_poly_.coeff(0);
    double sum = 0.0;
    double inv = 1.0 / a;
    double sign = 1.0;
    Polynomial d = u_poly_;
    while (!d.is_zero()) {
      sum += sign * d(z) * inv;
      inv /= a;
      sign = -sign;
      d = d.derivative();
    }
    return std::exp(a * (z - quad_base_)) * sum;
  }

  SpecKind kind_ = SpecKind::Polynomial;
  QMode q_mode_ = QMode::Polynomial;
  Polynomial u_poly_, v_poly_, p_poly_, q_poly_;
  double eta_ = 0.0;
  std::optional<Expr> u_expr_, v_expr_;
  bool v_constant_ = false;
  double q0_ = 0.0;
  double quad_base_ = 0.0;
  double quad_tol_ = 1e-12;
  std::shared_ptr<PrimitiveTable> p_table_, q_table_;
  std::vector<std::string> warnings_;
  std::string label_;
};

inline Jet eval_jet(const FunctionSpec& spec, double z) { return spec.jet(z); }

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::string unquote(std::string v) {
  v = trim(v);
  if (v.size() >= 2 && (v.front() == '"' || v.front() == '\'') && v.back() == v.front()) v = v.substr(1, v.size() - 2);
  return trim(v);
}

inline double parse_number(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw SpecError("value of " + key + " is not a number: '" + v + "'");
  }
  if (trim(v.substr(used)) != "") throw SpecError("value of " + key + " is not a number: '" + v + "'");
  return d;
}

// Split "family=polynomial U = 3z^2 - 1 V=0" into key/value pairs. Keys are recognised
// only from a fixed vocabulary, so unquoted values may contain spaces.
inline std::map<std::string, std::string> split_pairs(std::string_view text) {
  static const std::vector<std::string> kKeys = {"family", "U", "V", "eta", "Q0", "quad_tol", "quad_base"};
  struct Hit {
    std::size_t key_begin, value_begin;
    std::string key;
  };
  std::vector<Hit> hits;
  bool in_quote = false;
  char quote = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quote) {
      if (c == quote) in_quote = false;
      continue;
    }
    if (c == '"' || c == '\'') {
      in_quote = true;
      quote = c;
      continue;
    }
    if (i > 0 && !std::isspace(static_cast<unsigned char>(text[i - 1]))) continue;
    for (const auto& k : kKeys) {
      if (text.substr(i, k.size()) != k) continue;
      std::size_t j = i + k.size();
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '=') {
        hits.push_back({i, j + 1, k});
        i = j;
        break;
      }
    }
  }
  std::map<std::string, std::string> out;
  const std::string head = trim(text.substr(0, hits.empty() ? text.size() : hits.front().key_begin));
  if (!head.empty()) out["family"] = head;
  for (std::size_t h = 0; h < hits.size(); ++h) {
    const std::size_t end = h + 1 < hits.size() ? hits[h + 1].key_begin : text.size();
    if (out.count(hits[h].key)) throw SpecError("duplicate key '" + hits[h].key + "'");
    out[hits[h].key] = unquote(trim(text.substr(hits[h].value_begin, end - hits[h].value_begin)));
  }
  return out;
}

}  // namespace detail

/// Parse the key=value spec format, e.g. `family=polynomial U="3*z^2-1" V="0"`,
/// `poisson-lie eta=1`, or `family=custom U="sinh(z)" V="0"`.
inline FunctionSpec parse_spec(std::string_view text) {
  const auto kv = detail::split_pairs(text);
  auto get = [&](const std::string& k) -> std::optional<std::string> {
    auto it = kv.find(k);
    if (it == kv.end()) return std::nullopt;
    return it->second;
  };
  const std::string family = get("family").value_or("");
  const double q0 = get("Q0") ? detail::parse_number("Q0", *get("Q0")) : 0.0;
  const double base = get("quad_base") ? detail::parse_number("quad_base", *get("quad_base")) : 0.0;
  const double tol = get("quad_tol") ? detail::parse_number("quad_tol", *get("quad_tol")) : 1e-12;
  if (!(tol > 0.0)) throw SpecError("quad_tol must be positive");

  auto expr_of = [&](const std::string& key, const char* fallback) {
    const std::string src = get(key).value_or(fallback);
    if (src.empty()) throw SpecError("empty expression for " + key);
    try {
      return Expr::parse(src, "z");
    } catch (const ParseError& e) {
      throw SpecError("malformed expression for " + key + ": " + e.what());
    }
  };

  if (family == "polynomial") {
    if (!get("U")) throw SpecError("polynomial family requires U");
    const Expr u = expr_of("U", "");
    const Expr v = expr_of("V", "0");
    auto up = u.as_polynomial(2);
    auto vp = v.as_polynomial(2);
    if (!up) throw SpecError("U is not a polynomial in z: '" + u.text() + "'");
    if (!vp) throw SpecError("V is not a polynomial in z: '" + v.text() + "'");
    return FunctionSpec::polynomial(*up, *vp, q0, base, tol);
  }
  if (family == "poisson-lie") {
    if (!get("eta")) throw SpecError("poisson-lie family requires eta");
    const double eta = detail::parse_number("eta", *get("eta"));
    if (eta == 0.0) throw SpecError("poisson-lie family requires eta != 0");
    return FunctionSpec::poisson_lie(eta, q0);
  }
  if (family == "custom") {
    if (!get("U")) throw SpecError("custom family requires U");
    return FunctionSpec::custom(expr_of("U", ""), expr_of("V", "0"), q0, base, tol);
  }
  if (family.empty()) throw SpecError("spec does not name a family");
  throw SpecError("unknown family '" + family + "'");
}

/// Built-in specs: linear, quadratic, poisson-lie[(eta)], quartic, genus2 (alias quintic).
/// The quartic and quintic carry U = Q' with Q = 2(z-2)(z-1)(z+1)(z+2) and
/// Q = 2(z-2)(z-1)z(z+1)(z+2); Q0 keeps those Q exactly (no shift of the Casimir).
inline FunctionSpec builtin_spec(std::string_view name) {
  if (name.starts_with("builtin:")) name.remove_prefix(8);
  FunctionSpec s = [&]() {
    if (name == "linear") return FunctionSpec::polynomial(Polynomial::identity());
    if (name == "quadratic") return FunctionSpec::polynomial(Polynomial{-1.0, 0.0, 3.0});
    if (name.starts_with("poisson-lie")) {
      double eta = 1.0;
      std::string_view rest = name.substr(11);
      if (!rest.empty()) {
        if (rest.front() != '(' || rest.back() != ')') throw SpecError("expected builtin:poisson-lie(eta)");
        eta = detail::parse_number("eta", std::string(rest.substr(1, rest.size() - 2)));
      }
      return FunctionSpec::poisson_lie(eta);
    }
    if (name == "quartic") {
      const Polynomial q{8.0, 0.0, -10.0, 0.0, 2.0};
      return FunctionSpec::polynomial(q.derivative(), {}, q(0.0));
    }
    if (name == "genus2" || name == "quintic") {
      const Polynomial q{0.0, 8.0, 0.0, -10.0, 0.0, 2.0};
      return FunctionSpec::polynomial(q.derivative(), {}, q(0.0));
    }
    throw SpecError("unknown builtin spec '" + std::string(name) + "'");
  }();
  s.with_label("builtin:" + std::string(name));
  return s;
}

/// The built-ins exercised by verification suites.
inline std::vector<FunctionSpec> builtin_specs() {
  return {builtin_spec("linear"), builtin_spec("quadratic"), builtin_spec("poisson-lie(1)"), builtin_spec("genus2")};
}

}  // namespace leafgeo
