#pragma once

#include <Eigen/SVD>
#include <cmath>
#include <string_view>

#include "leafgeo/ambient.hpp"

namespace leafgeo {

struct MetriplecticAtPoint {
  Mat3 m = Mat3::Zero();
  double w = 0.0;
  double f = 0.0;
};

/// M = Pi g Pi^T, the symmetric tensor M(a, b) = g(Pi#a, Pi#b).
inline Mat3 metriplectic_matrix(double x, double y, double w) {
  Mat3 m;
  m << x * x, -x * y - w * w, x * w,
       -x * y - w * w, y * y, y * w,
       x * w, y * w, -2.0 * x * y;
  return m;
}

inline MetriplecticAtPoint metriplectic_at(const FunctionSpec& spec, const AmbientPoint& p) {
  const double w = w_at(spec, p);
  return {metriplectic_matrix(p.x, p.y, w), w, 2.0 * p.x * p.y + w * w};
}

inline double f_at(const Jet& j, const AmbientPoint& p) {
  const double w = w_at(j, p);
  return 2.0 * p.x * p.y + w * w;
}
inline double f_at(const FunctionSpec& spec, const AmbientPoint& p) { return f_at(spec.jet(p.z), p); }

/// f written as a polynomial in s = xy: U^2 + 2(1 + UV)s + V^2 s^2.
inline double f_expanded(const Jet& j, double s) { return j.u * j.u + 2.0 * (1.0 + j.u * j.v) * s + j.v * j.v * s * s; }

/// Gradient of f = 2xy + W^2.
inline Vec3 f_gradient(const Jet& j, const AmbientPoint& p) {
  return Vec3(2.0 * p.y, 2.0 * p.x, 0.0) + 2.0 * w_at(j, p) * w_gradient(j, p);
}

/// The generalized double bracket field -M#(dG).
inline Vec3 gdb_ambient_at(const Jet& j, const Vec3& dG, const AmbientPoint& p) {
  return -metriplectic_matrix(p.x, p.y, w_at(j, p)) * dG;
}
inline Vec3 gdb_ambient_at(const FunctionSpec& spec, const ScalarField& G, const AmbientPoint& p) {
  return gdb_ambient_at(spec.jet(p.z), G.gradient(p), p);
}

/// Number of singular values above rel_tol * sigma_max and above an absolute floor.
/// The floor keeps rounding residue (|W| ~ 1e-16 at a numerically computed root of U) from
/// counting as rank.
inline int matrix_rank(const Mat3& m, double rel_tol = 1e-9, double abs_floor = 1e-20) {
  const Vec3 s = Eigen::JacobiSVD<Mat3>(m).singularValues();
  int r = 0;
  for (int i = 0; i < 3; ++i)
    if (s[i] > rel_tol * s[0] && s[i] > abs_floor) ++r;
  return r;
}

enum class PointClass { Regular, Red, SingularLeaf };

inline std::string_view to_string(PointClass c) {
  switch (c) {
    case PointClass::Regular: return "regular";
    case PointClass::Red: return "red";
    case PointClass::SingularLeaf: return "singular-leaf";
  }
  return "?";
}

/// Scale used for relative tests on f.
inline double f_scale(const AmbientPoint& p, double w) { return 1.0 + p.x * p.x + p.y * p.y + w * w; }

inline PointClass classify_point(const FunctionSpec& spec, const AmbientPoint& p, double tol = 1e-10) {
  const Jet j = spec.jet(p.z);
  if (std::abs(p.x) < tol && std::abs(p.y) < tol && std::abs(j.u) < tol) return PointClass::SingularLeaf;
  const double w = w_at(j, p);
  if (std::abs(2.0 * p.x * p.y + w * w) < tol * f_scale(p, w)) return PointClass::Red;
  return PointClass::Regular;
}

/// Expected rank of M for each class: 2, 1, 0.
inline int expected_rank(PointClass c) {
  switch (c) {
    case PointClass::Regular: return 2;
    case PointClass::Red: return 1;
    case PointClass::SingularLeaf: return 0;
  }
  return -1;
}

}  // namespace leafgeo
