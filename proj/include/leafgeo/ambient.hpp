#pragma once

// The ambient pseudo-Riemannian Poisson manifold (R^3, Pi, g):
//   g  = 2 dx dy + dz^2 = -dT^2 + dX^2 + dY^2,
//   Pi = W dx^dy - x dx^dz + y dy^dz,  W = U(z) + xy V(z).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>

#include "leafgeo/expr.hpp"
#include "leafgeo/funcspec.hpp"

namespace leafgeo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

struct AmbientPoint {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 vec() const { return {x, y, z}; }
  static AmbientPoint from(const Vec3& v) { return {v[0], v[1], v[2]}; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Coordinates adapted to the metric: X = z, Y = (x+y)/sqrt 2, T = (x-y)/sqrt 2.
struct CausalPoint {
  double X = 0.0, Y = 0.0, T = 0.0;
};

inline CausalPoint causal_transform(const AmbientPoint& p) {
  constexpr double r = std::numbers::sqrt2 / 2.0;
  return {p.z, r * (p.x + p.y), r * (p.x - p.y)};
}

inline AmbientPoint ambient_from_causal(const CausalPoint& c) {
  constexpr double r = std::numbers::sqrt2 / 2.0;
  return {r * (c.Y + c.T), r * (c.Y - c.T), c.X};
}

// ---------------------------------------------------------------------------
// Metric

inline Mat3 metric_matrix() {
  Mat3 g;
  g << 0, 1, 0,
       1, 0, 0,
       0, 0, 1;
  return g;
}

inline double metric_pairing(const Vec3& v, const Vec3& w) { return v[0] * w[1] + v[1] * w[0] + v[2] * w[2]; }

/// g-flat: vector (a,b,c) -> covector (b,a,c).
inline Vec3 flat(const Vec3& v) { return {v[1], v[0], v[2]}; }
/// Inverse of flat; g is its own inverse in these coordinates.
inline Vec3 sharp(const Vec3& a) { return {a[1], a[0], a[2]}; }

enum class Variance { Bivector, Cometric, Metric };

struct TensorAtPoint {
  Mat3 m = Mat3::Zero();
  Variance variance = Variance::Bivector;
};

// ---------------------------------------------------------------------------
// Scalar fields

/// A function on R^3 with first-derivative access.
class ScalarField {
 public:
  using ValueFn = std::function<double(const AmbientPoint&)>;
  using GradFn = std::function<Vec3(const AmbientPoint&)>;

  ScalarField(std::string name, ValueFn value, GradFn grad)
      : name_(std::move(name)), value_(std::move(value)), grad_(std::move(grad)) {}

  /// Expression over x, y, z; gradient by forward-mode differentiation.
  static ScalarField from_expr(const Expr& e) {
    return ScalarField(
        e.text(), [e](const AmbientPoint& p) { return e(p.x, p.y, p.z); },
        [e](const AmbientPoint& p) {
          const Dual<3> d = e.with_gradient(p.x, p.y, p.z);
          return Vec3(d.grad[0], d.grad[1], d.grad[2]);
        });
  }

  static ScalarField parse(std::string_view text) { return from_expr(Expr::parse(text, "xyz")); }

  static ScalarField coordinate(int i) {
    static constexpr const char* kNames[] = {"x", "y", "z"};
    return ScalarField(
        kNames[i], [i](const AmbientPoint& p) { return p.vec()[i]; },
        [i](const AmbientPoint&) {
          Vec3 g = Vec3::Zero();
          g[i] = 1.0;
          return g;
        });
  }

  const std::string& name() const { return name_; }
  double operator()(const AmbientPoint& p) const { return value_(p); }
  Vec3 gradient(const AmbientPoint& p) const { return grad_(p); }

 private:
  std::string name_;
  ValueFn value_;
  GradFn grad_;
};

// ---------------------------------------------------------------------------
// Poisson structure

inline double w_at(const Jet& j, const AmbientPoint& p) { return j.u + p.x * p.y * j.v; }
inline double w_at(const FunctionSpec& spec, const AmbientPoint& p) { return w_at(spec.jet(p.z), p); }

/// Gradient of W = U(z) + xy V(z).
inline Vec3 w_gradient(const Jet& j, const AmbientPoint& p) {
  return {p.y * j.v, p.x * j.v, j.du + p.x * p.y * j.dv};
}

/// Components Pi^{ij}; Pi^{xy} = W, Pi^{xz} = -x, Pi^{yz} = y.
inline Mat3 bivector_matrix(const Jet& j, const AmbientPoint& p) {
  const double w = w_at(j, p);
  Mat3 m;
  m << 0.0, w, -p.x,
       -w, 0.0, p.y,
       p.x, -p.y, 0.0;
  return m;
}

inline TensorAtPoint bivector_at(const FunctionSpec& spec, const AmbientPoint& p) {
  return {bivector_matrix(spec.jet(p.z), p), Variance::Bivector};
}

/// {F, G}(p) = dF . Pi . dG.
inline double poisson_bracket(const FunctionSpec& spec, const ScalarField& F, const ScalarField& G,
                              const AmbientPoint& p) {
  return F.gradient(p).dot(bivector_matrix(spec.jet(p.z), p) * G.gradient(p));
}

/// C = xy exp(P(z)) + Q(z).
inline double casimir_at(const Jet& j, const AmbientPoint& p) { return p.x * p.y * std::exp(j.p) + j.q; }
inline double casimir_at(const FunctionSpec& spec, const AmbientPoint& p) { return casimir_at(spec.jet(p.z), p); }

/// dC = exp(P) (y, x, W).
inline Vec3 casimir_gradient(const Jet& j, const AmbientPoint& p) {
  return std::exp(j.p) * Vec3(p.y, p.x, w_at(j, p));
}
inline Vec3 casimir_gradient(const FunctionSpec& spec, const AmbientPoint& p) {
  return casimir_gradient(spec.jet(p.z), p);
}

inline ScalarField casimir_field(const FunctionSpec& spec) {
  return ScalarField(
      "C", [spec](const AmbientPoint& p) { return casimir_at(spec, p); },
      [spec](const AmbientPoint& p) { return casimir_gradient(spec, p); });
}

/// "C" names the Casimir of `spec`; anything else is parsed as an expression in x, y, z.
inline ScalarField parse_field(std::string_view text, const FunctionSpec& spec) {
  if (detail::trim(text) == "C") return casimir_field(spec);
  return ScalarField::parse(text);
}

/// X_G = Pi#(dG), i.e. X_G^j = dG_i Pi^{ij}.
inline Vec3 hamiltonian_field_at(const Jet& j, const Vec3& dG, const AmbientPoint& p) {
  return bivector_matrix(j, p).transpose() * dG;
}
inline Vec3 hamiltonian_field_at(const FunctionSpec& spec, const ScalarField& G, const AmbientPoint& p) {
  return hamiltonian_field_at(spec.jet(p.z), G.gradient(p), p);
}

/// Max over coordinate triples of |{x_i,{x_j,x_k}} + {x_j,{x_k,x_i}} + {x_k,{x_i,x_j}}|.
/// Inner brackets are the functions Pi^{jk}; their gradients are analytic.
inline double jacobi_residual_at(const FunctionSpec& spec, const AmbientPoint& p) {
  const Jet j = spec.jet(p.z);
  const Mat3 pi = bivector_matrix(j, p);
  // dPi[a][b] = gradient of Pi^{ab}.
  Vec3 dpi[3][3];
  for (auto& row : dpi)
    for (auto& v : row) v.setZero();
  dpi[0][1] = w_gradient(j, p);
  dpi[0][2] = Vec3(-1.0, 0.0, 0.0);
  dpi[1][2] = Vec3(0.0, 1.0, 0.0);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < a; ++b) dpi[a][b] = -dpi[b][a];

  auto nested = [&](int i, int a, int b) { return pi.row(i).dot(dpi[a][b]); };
  double worst = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) {
        const double r = nested(i, k, l) + nested(k, l, i) + nested(l, i, k);
        worst = std::max(worst, std::abs(r));
      }
  return worst;
}

}  // namespace leafgeo
