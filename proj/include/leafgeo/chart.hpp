#pragma once

// Leaf geometry in the three coordinate charts of S_c = {C = c}:
//   (x,z): y = e^{-P}(c - Q)/x      (y,z): x = e^{-P}(c - Q)/y      (x,y): z solves C = c.
// Each chart carries a tangent embedding E (3x2, columns = ambient images of the chart
// basis); ambient tangent vectors have chart components equal to their entries in the
// two chart coordinates.

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "leafgeo/metriplectic.hpp"
#include "leafgeo/roots.hpp"

namespace leafgeo {

class ChartError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Chart { XZ, YZ, XY };

inline std::string_view to_string(Chart c) {
  switch (c) {
    case Chart::XZ: return "xz";
    case Chart::YZ: return "yz";
    case Chart::XY: return "xy";
  }
  return "?";
}

/// Ambient indices (a, b) of the chart coordinates and d of the dependent one.
inline std::array<int, 3> chart_axes(Chart c) {
  switch (c) {
    case Chart::XZ: return {0, 2, 1};
    case Chart::YZ: return {1, 2, 0};
    case Chart::XY: return {0, 1, 2};
  }
  return {0, 2, 1};
}

struct ChartPoint {
  Chart chart = Chart::XZ;
  double a = 0.0, b = 0.0;
  /// Starting guess for z in the (x,y) chart.
  double z_hint = 0.0;
};

struct ChartOptions {
  double chart_tol = 1e-6;
  /// |f_S| below red_tol * (1 + x^2 + y^2 + W^2) counts as a red line.
  double red_tol = 1e-9;
  double null_tol = 1e-9;
};

using Mat32 = Eigen::Matrix<double, 3, 2>;

struct ChartFrame {
  Chart chart = Chart::XZ;
  double a = 0.0, b = 0.0;
  double dependent = 0.0;  // y, x or z according to the chart
  AmbientPoint point;
  double w = 0.0;
  Mat32 embedding = Mat32::Zero();
  Mat2 g_ind = Mat2::Zero();
  double det = 0.0;
  double omega = 0.0;
  std::optional<Mat2> tau_db;
  double f_S = 0.0;
  bool red_line = false;

  Vec2 components(const Vec3& v) const {
    const auto ax = chart_axes(chart);
    return {v[ax[0]], v[ax[1]]};
  }
  Vec3 ambient(const Vec2& v) const { return embedding * v; }
  double red_scale() const { return f_scale(point, w); }
};

namespace detail {

/// z with x y e^{P(z)} + Q(z) = c by damped Newton; dC/dz = e^P W.
inline double solve_leaf_z(const FunctionSpec& spec, double c, double x, double y, double z0) {
  double z = z0;
  auto resid = [&](double zz) {
    const Jet j = spec.jet(zz);
    return x * y * std::exp(j.p) + j.q - c;
  };
  double r = resid(z);
  for (int it = 0; it < 100; ++it) {
    if (std::abs(r) <= 1e-14 * (1.0 + std::abs(c))) return z;
    const Jet j = spec.jet(z);
    const double d = std::exp(j.p) * (j.u + x * y * j.v);
    if (d == 0.0 || !std::isfinite(d)) break;
    double step = r / d;
    double lambda = 1.0;
    bool improved = false;
    for (int k = 0; k < 40; ++k) {
      const double zn = z - lambda * step;
      const double rn = resid(zn);
      if (std::isfinite(rn) && std::abs(rn) < std::abs(r)) {
        z = zn;
        r = rn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (std::abs(r) <= 1e-10 * (1.0 + std::abs(c))) return z;
  throw ChartError("could not solve C(x, y, z) = c for z in the (x,y) chart");
}

}  // namespace detail

inline ChartFrame chart_frame_at(const FunctionSpec& spec, double c, const ChartPoint& cp, const ChartOptions& opt = {}) {
  ChartFrame fr;
  fr.chart = cp.chart;
  fr.a = cp.a;
  fr.b = cp.b;
  AmbientPoint p;
  switch (cp.chart) {
    case Chart::XZ: {
      if (!(std::abs(cp.a) > opt.chart_tol)) throw ChartError("(x,z) chart needs |x| > chart_tol");
      const Jet j = spec.jet(cp.b);
      p = {cp.a, std::exp(-j.p) * (c - j.q) / cp.a, cp.b};
      fr.dependent = p.y;
      break;
    }
    case Chart::YZ: {
      if (!(std::abs(cp.a) > opt.chart_tol)) throw ChartError("(y,z) chart needs |y| > chart_tol");
      const Jet j = spec.jet(cp.b);
      p = {std::exp(-j.p) * (c - j.q) / cp.a, cp.a, cp.b};
      fr.dependent = p.x;
      break;
    }
    case Chart::XY: {
      p = {cp.a, cp.b, detail::solve_leaf_z(spec, c, cp.a, cp.b, cp.z_hint)};
      fr.dependent = p.z;
      break;
    }
  }
  if (!p.finite()) throw ChartError("lifted point is not finite");
  fr.point = p;
  const Jet j = spec.jet(p.z);
  const double w = w_at(j, p);
  fr.w = w;

  // Tangent vectors from y dx + x dy + W dz = 0.
  Mat32& E = fr.embedding;
  double pi_ab = 0.0;
  switch (cp.chart) {
    case Chart::XZ:
      E << 1.0, 0.0,
           -p.y / p.x, -w / p.x,
           0.0, 1.0;
      pi_ab = -p.x;
      break;
    case Chart::YZ:
      E << -p.x / p.y, -w / p.y,
           1.0, 0.0,
           0.0, 1.0;
      pi_ab = p.y;
      break;
    case Chart::XY:
      if (!(std::abs(w) > opt.chart_tol)) throw ChartError("(x,y) chart needs |W| > chart_tol");
      E << 1.0, 0.0,
           0.0, 1.0,
           -p.y / w, -p.x / w;
      pi_ab = w;
      break;
  }
  fr.g_ind = E.transpose() * metric_matrix() * E;
  fr.det = fr.g_ind.determinant();
  fr.omega = -1.0 / pi_ab;
  fr.f_S = 2.0 * p.x * p.y + w * w;
  fr.red_line = std::abs(fr.f_S) < opt.red_tol * f_scale(p, w);
  if (!fr.red_line) fr.tau_db = (fr.omega * fr.omega / fr.det) * fr.g_ind;
  return fr;
}

/// Chart chosen from the ambient coordinates: (x,z) if |x| >= |y|, then (y,z), then (x,y).
inline Chart select_chart(const FunctionSpec& spec, const AmbientPoint& p, const ChartOptions& opt = {}) {
  if (std::abs(p.x) >= std::abs(p.y) && std::abs(p.x) > opt.chart_tol) return Chart::XZ;
  if (std::abs(p.y) > opt.chart_tol) return Chart::YZ;
  if (std::abs(w_at(spec, p)) > opt.chart_tol) return Chart::XY;
  throw ChartError("point is within chart_tol of a point leaf; no chart applies");
}

inline ChartPoint chart_point_of(Chart chart, const AmbientPoint& p) {
  switch (chart) {
    case Chart::XZ: return {chart, p.x, p.z, p.z};
    case Chart::YZ: return {chart, p.y, p.z, p.z};
    case Chart::XY: return {chart, p.x, p.y, p.z};
  }
  return {chart, p.x, p.z, p.z};
}

/// Frame at an (approximately) on-leaf ambient point, in the given or auto-selected chart.
inline ChartFrame frame_at_point(const FunctionSpec& spec, double c, const AmbientPoint& p,
                                 std::optional<Chart> chart = std::nullopt, const ChartOptions& opt = {}) {
  return chart_frame_at(spec, c, chart_point_of(chart ? *chart : select_chart(spec, p, opt), p), opt);
}

// ---------------------------------------------------------------------------
// Fields on the leaf

inline Vec2 gdb_on_leaf_at(const FunctionSpec& spec, const ChartFrame& fr, const ScalarField& G) {
  return fr.components(gdb_ambient_at(spec.jet(fr.point.z), G.gradient(fr.point), fr.point));
}
inline Vec2 gdb_on_leaf_at(const FunctionSpec& spec, double c, const ScalarField& G, const ChartPoint& cp,
                           const ChartOptions& opt = {}) {
  return gdb_on_leaf_at(spec, chart_frame_at(spec, c, cp, opt), G);
}

inline Vec2 hamiltonian_on_leaf_at(const FunctionSpec& spec, const ChartFrame& fr, const ScalarField& G) {
  return fr.components(hamiltonian_field_at(spec.jet(fr.point.z), G.gradient(fr.point), fr.point));
}

/// Differential of G restricted to the leaf, in the chart basis.
inline Vec2 restricted_differential(const ChartFrame& fr, const ScalarField& G) {
  return fr.embedding.transpose() * G.gradient(fr.point);
}

inline const Mat2& require_tau(const ChartFrame& fr) {
  if (!fr.tau_db) throw ChartError("point lies on a red line: the double bracket metric is not defined");
  return *fr.tau_db;
}

/// |tau_DB(d_G, .) + d(G|_S)| / (1 + |d(G|_S)|).
inline double gradient_residual_at(const FunctionSpec& spec, const ChartFrame& fr, const ScalarField& G) {
  const Mat2& tau = require_tau(fr);
  const Vec2 dg = restricted_differential(fr, G);
  return (tau * gdb_on_leaf_at(spec, fr, G) + dg).norm() / (1.0 + dg.norm());
}
inline double gradient_residual_at(const FunctionSpec& spec, double c, const ScalarField& G, const ChartPoint& cp,
                                   const ChartOptions& opt = {}) {
  return gradient_residual_at(spec, chart_frame_at(spec, c, cp, opt), G);
}

enum class CausalTag { Spacelike, Timelike, Null };

inline std::string_view to_string(CausalTag t) {
  switch (t) {
    case CausalTag::Spacelike: return "spacelike";
    case CausalTag::Timelike: return "timelike";
    case CausalTag::Null: return "null";
  }
  return "?";
}

struct CausalCharacter {
  CausalTag tag = CausalTag::Null;
  double norm2 = 0.0;
};

inline CausalCharacter causal_character_of(const Mat2& tau, const Vec2& v, double null_tol = 1e-9) {
  const double n2 = v.dot(tau * v);
  CausalCharacter out{CausalTag::Null, n2};
  if (std::abs(n2) < null_tol * (1.0 + v.squaredNorm())) return out;
  out.tag = n2 > 0.0 ? CausalTag::Spacelike : CausalTag::Timelike;
  return out;
}

inline CausalCharacter causal_character_at(const FunctionSpec& spec, const ChartFrame& fr, const ScalarField& G,
                                           double null_tol = 1e-9) {
  return causal_character_of(require_tau(fr), gdb_on_leaf_at(spec, fr, G), null_tol);
}
inline CausalCharacter causal_character_at(const FunctionSpec& spec, double c, const ScalarField& G,
                                           const ChartPoint& cp, const ChartOptions& opt = {}) {
  return causal_character_at(spec, chart_frame_at(spec, c, cp, opt), G, opt.null_tol);
}

struct RadicalDirection {
  Vec2 direction = Vec2::Zero();
  /// |g_ind . direction| / |direction|.
  double kernel_residual = 0.0;
};

/// Kernel of g_ind on a red line: chart components of x dx + y dy + W dz.
inline RadicalDirection radical_direction_at(const ChartFrame& fr, double tol = 1e-8) {
  if (!(std::abs(fr.f_S) < tol * fr.red_scale())) throw ChartError("point is not on a red line");
  RadicalDirection out;
  out.direction = fr.components(Vec3(fr.point.x, fr.point.y, fr.w));
  out.kernel_residual = (fr.g_ind * out.direction).norm() / out.direction.norm();
  return out;
}
inline RadicalDirection radical_direction_at(const FunctionSpec& spec, double c, const ChartPoint& cp,
                                             double tol = 1e-8, const ChartOptions& opt = {}) {
  return radical_direction_at(chart_frame_at(spec, c, cp, opt), tol);
}

/// Compare induced metrics of two frames at the same leaf point: with E2 = E1 J,
/// returns |g2 - J^T g1 J| / (1 + |g2|).
inline double chart_overlap_residual(const ChartFrame& f1, const ChartFrame& f2) {
  const Eigen::Matrix2d J = f1.embedding.colPivHouseholderQr().solve(f2.embedding);
  const Mat2 pulled = J.transpose() * f1.g_ind * J;
  return (f2.g_ind - pulled).norm() / (1.0 + f2.g_ind.norm());
}

}  // namespace leafgeo
