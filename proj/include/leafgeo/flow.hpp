#pragma once

// GDB flow on a leaf: fixed-step RK4 on the ambient field -M#(dG), each step followed by a
// Newton projection back onto C = c.

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "leafgeo/chart.hpp"

namespace leafgeo {

struct FlowOptions {
  double dt = 1e-3;
  int n_steps = 1000;
  double casimir_tol = 1e-10;
  double red_stop_tol = 1e-6;
  int projection_max_iter = 8;
  double critical_tol = 1e-10;
};

enum class Termination { StepsExhausted, CriticalPoint, RedLineApproach, ChartFailure };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::StepsExhausted: return "steps-exhausted";
    case Termination::CriticalPoint: return "critical-point";
    case Termination::RedLineApproach: return "red-line-approach";
    case Termination::ChartFailure: return "chart-failure";
  }
  return "?";
}

struct FlowSample {
  double t = 0.0;
  AmbientPoint point;
  double G = 0.0;
  double casimir = 0.0;
  double f = 0.0;
  /// Empty when the double bracket metric is undefined at the sample.
  std::optional<CausalCharacter> causal;
};

struct Trajectory {
  std::vector<FlowSample> samples;
  Termination termination = Termination::StepsExhausted;
  std::string message;

  double max_casimir_drift(double c) const {
    double m = 0.0;
    for (const auto& s : samples) m = std::max(m, std::abs(s.casimir - c));
    return m;
  }
};

/// Newton steps p <- p - (C(p) - c) dC / |dC|^2 until |C - c| <= tol.
inline AmbientPoint project_to_leaf(const FunctionSpec& spec, double c, AmbientPoint p, double tol = 1e-12,
                                    int max_iter = 8) {
  for (int it = 0; it <= max_iter; ++it) {
    const Jet j = spec.jet(p.z);
    const double r = casimir_at(j, p) - c;
    if (std::abs(r) <= tol) return p;
    if (it == max_iter) break;
    const Vec3 g = casimir_gradient(j, p);
    const double g2 = g.squaredNorm();
    if (!(g2 > 1e-24)) throw NumericError("projection: dC vanishes (point is at a point leaf)");
    p = AmbientPoint::from(p.vec() - (r / g2) * g);
    if (!p.finite()) break;
  }
  throw NumericError("projection onto the leaf did not converge");
}

namespace detail {

inline std::optional<CausalCharacter> causal_at_point(const FunctionSpec& spec, double c, const ScalarField& G,
                                                      const AmbientPoint& p) {
  try {
    const ChartFrame fr = frame_at_point(spec, c, p);
    if (!fr.tau_db) return std::nullopt;
    return causal_character_at(spec, fr, G);
  } catch (const ChartError&) {
    return std::nullopt;
  }
}

}  // namespace detail

inline Trajectory integrate_flow(const FunctionSpec& spec, double c, const ScalarField& G, const AmbientPoint& start,
                                 const FlowOptions& opt = {}) {
  if (!(opt.dt > 0.0) || !(opt.casimir_tol > 0.0) || !(opt.red_stop_tol > 0.0) || opt.n_steps < 0)
    throw std::invalid_argument("flow options: dt and tolerances must be positive");
  const double c0 = casimir_at(spec, start);
  if (!(std::abs(c0 - c) <= opt.casimir_tol))
    throw NumericError("flow start is off the leaf: |C - c| = " + std::to_string(std::abs(c0 - c)));

  // Newton target well inside the tolerance so rounding never pushes a sample over it.
  const double proj_tol = std::max(0.01 * opt.casimir_tol, 4e-16 * (1.0 + std::abs(c)));
  auto field = [&](const AmbientPoint& p) { return gdb_ambient_at(spec.jet(p.z), G.gradient(p), p); };
  auto record = [&](double t, const AmbientPoint& p) {
    FlowSample s;
    s.t = t;
    s.point = p;
    s.G = G(p);
    const Jet j = spec.jet(p.z);
    s.casimir = casimir_at(j, p);
    s.f = f_at(j, p);
    s.causal = detail::causal_at_point(spec, c, G, p);
    return s;
  };

  Trajectory tr;
  AmbientPoint p = start;
  tr.samples.push_back(record(0.0, p));
  for (int k = 0;; ++k) {
    const Jet j = spec.jet(p.z);
    const double w = w_at(j, p);
    if (std::abs(f_at(j, p)) < opt.red_stop_tol * f_scale(p, w)) {
      tr.termination = Termination::RedLineApproach;
      return tr;
    }
    const Vec3 dG = G.gradient(p);
    const Vec3 v = gdb_ambient_at(j, dG, p);
    const double mnorm = metriplectic_matrix(p.x, p.y, w).norm();
    if (v.norm() < opt.critical_tol * (1.0 + mnorm * dG.norm())) {
      tr.termination = Termination::CriticalPoint;
      return tr;
    }
    if (k == opt.n_steps) break;

    const double h = opt.dt;
    const Vec3 x0 = p.vec();
    const Vec3 k1 = v;
    const Vec3 k2 = field(AmbientPoint::from(x0 + 0.5 * h * k1));
    const Vec3 k3 = field(AmbientPoint::from(x0 + 0.5 * h * k2));
    const Vec3 k4 = field(AmbientPoint::from(x0 + h * k3));
    const AmbientPoint trial = AmbientPoint::from(x0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    try {
      if (!trial.finite()) throw NumericError("integration produced a non-finite point");
      p = project_to_leaf(spec, c, trial, proj_tol, opt.projection_max_iter);
    } catch (const NumericError& e) {
      tr.termination = Termination::ChartFailure;
      tr.message = e.what();
      return tr;
    }
    tr.samples.push_back(record((k + 1) * h, p));
  }
  tr.termination = Termination::StepsExhausted;
  return tr;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,x,y,z,G,C,f,causal\n";
  char buf[512];
  for (const auto& s : tr.samples) {
    const std::string_view tag = s.causal ? to_string(s.causal->tag) : std::string_view("undefined");
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", s.t, s.point.x, s.point.y,
                  s.point.z, s.G, s.casimir, s.f);
    os << buf << tag << '\n';
  }
}

}  // namespace leafgeo
