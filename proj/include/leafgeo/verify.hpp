#pragma once

// The invariant suite behind `leafgeo_cli verify`: each check reports the worst residual
// over seeded random points against its threshold.

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "leafgeo/chart.hpp"
#include "leafgeo/leafscape.hpp"
#include "leafgeo/sampling.hpp"

namespace leafgeo {

struct CheckResult {
  std::string module;
  std::string name;
  double max_residual = 0.0;
  double threshold = 0.0;
  int samples = 0;
  int failures = 0;
  std::string note;

  bool passed() const { return failures == 0 && max_residual <= threshold; }
};

struct VerifyReport {
  std::string spec_label;
  std::uint64_t seed = 42;
  int n = 0;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
  }
};

struct VerifyOptions {
  int n = 1000;
  std::uint64_t seed = 42;
  std::vector<double> leaf_values{-1.0, 0.5, 1.0};
  double cube_half = 2.0;
};

namespace detail {

class Accumulator {
 public:
  Accumulator(std::string module, std::string name, double threshold) {
    r_.module = std::move(module);
    r_.name = std::move(name);
    r_.threshold = threshold;
  }
  void add(double residual) {
    ++r_.samples;
    if (!std::isfinite(residual)) {
      ++r_.failures;
      return;
    }
    r_.max_residual = std::max(r_.max_residual, residual);
    if (residual > r_.threshold) ++r_.failures;
  }
  void fail(const std::string& why) {
    ++r_.samples;
    ++r_.failures;
    if (r_.note.empty()) r_.note = why;
  }
  CheckResult done() const { return r_; }

 private:
  CheckResult r_;
};

inline std::vector<ScalarField> field_basket() {
  std::vector<ScalarField> out = {ScalarField::coordinate(0), ScalarField::coordinate(1), ScalarField::coordinate(2)};
  for (const char* e : {"x*y + z", "x^2 + y^2", "x*y + z^2", "sin(x) + exp(z/3)*y"}) out.push_back(ScalarField::parse(e));
  return out;
}

inline Vec3 fd_gradient(const ScalarField& F, const AmbientPoint& p, double h = 1e-5) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 a = p.vec(), b = p.vec();
    a[i] += h;
    b[i] -= h;
    g[i] = (F(AmbientPoint::from(a)) - F(AmbientPoint::from(b))) / (2.0 * h);
  }
  return g;
}

}  // namespace detail

inline VerifyReport run_verify(const FunctionSpec& spec, const VerifyOptions& opt = {}) {
  VerifyReport rep;
  rep.spec_label = spec.label().empty() ? spec.to_text() : spec.label();
  rep.seed = opt.seed;
  rep.n = opt.n;
  Sampler rng(opt.seed);
  const Mat3 g = metric_matrix();
  const std::vector<ScalarField> basket = detail::field_basket();
  const ScalarField C = casimir_field(spec);

  // funcspec ---------------------------------------------------------------
  {
    detail::Accumulator dp("funcspec", "P' = V (central difference)", 1e-6);
    detail::Accumulator dq("funcspec", "Q' = U exp(P) (central difference)", 1e-6);
    for (int i = 0; i < std::min(opt.n, 200); ++i) {
      const double z = rng.uniform(-5.0, 5.0);
      const double h = 1e-5;
      const Jet j = spec.jet(z);
      dp.add(std::abs((spec.P(z + h) - spec.P(z - h)) / (2 * h) - j.v) / (1.0 + std::abs(j.v)));
      dq.add(std::abs((spec.Q(z + h) - spec.Q(z - h)) / (2 * h) - j.dq()) / (1.0 + std::abs(j.dq())));
    }
    rep.checks.push_back(dp.done());
    rep.checks.push_back(dq.done());
  }

  // ambient ----------------------------------------------------------------
  {
    detail::Accumulator jac("ambient", "Jacobi identity", 1e-8);
    detail::Accumulator cas("ambient", "Casimir invariance {C, x_i}", 1e-9);
    detail::Accumulator anti("ambient", "antisymmetry {F,G} + {G,F}", 1e-12);
    detail::Accumulator leib("ambient", "Leibniz rule", 1e-9);
    detail::Accumulator grad("ambient", "field gradient vs central difference", 1e-6);
    detail::Accumulator metr("ambient", "causal pairing and flat/sharp", 1e-14);
    const ScalarField F = ScalarField::parse("x^2 + z");
    const ScalarField G = ScalarField::parse("sin(y)");
    const ScalarField H = ScalarField::parse("x*z");
    const ScalarField GH = ScalarField::parse("sin(y)*(x*z)");
    for (int i = 0; i < opt.n; ++i) {
      const AmbientPoint p = rng.in_cube(opt.cube_half);
      jac.add(jacobi_residual_at(spec, p));
      const Mat3 pi = bivector_matrix(spec.jet(p.z), p);
      const Vec3 dC = casimir_gradient(spec, p);
      for (int k = 0; k < 3; ++k)
        cas.add(std::abs(poisson_bracket(spec, C, ScalarField::coordinate(k), p)) /
                (std::max(1e-300, dC.norm() * pi.norm())));
      anti.add(std::abs(poisson_bracket(spec, F, G, p) + poisson_bracket(spec, G, F, p)) /
               (1.0 + std::abs(poisson_bracket(spec, F, G, p))));
      const double lhs = poisson_bracket(spec, F, GH, p);
      const double a = G(p) * poisson_bracket(spec, F, H, p), b = H(p) * poisson_bracket(spec, F, G, p);
      leib.add(std::abs(lhs - a - b) / (1.0 + std::abs(a) + std::abs(b)));
      for (const ScalarField& K : basket) {
        const Vec3 ga = K.gradient(p);
        grad.add((ga - detail::fd_gradient(K, p)).norm() / (1.0 + ga.norm()));
      }
      const AmbientPoint q = rng.in_cube(opt.cube_half);
      const CausalPoint cp = causal_transform(p), cq = causal_transform(q);
      const double pair = metric_pairing(p.vec(), q.vec());
      const double causal = cp.X * cq.X + cp.Y * cq.Y - cp.T * cq.T;
      const double round = (ambient_from_causal(cp).vec() - p.vec()).norm();
      metr.add(std::max({std::abs(pair - causal) / (1.0 + std::abs(pair)), (sharp(flat(p.vec())) - p.vec()).norm(),
                         round / (1.0 + p.vec().norm())}));
    }
    for (const auto* acc : {&jac, &cas, &anti, &leib, &grad, &metr}) rep.checks.push_back(acc->done());
  }

  // metriplectic -----------------------------------------------------------
  {
    detail::Accumulator fac("metriplectic", "factorization M = -Pi g Pi", 1e-12);
    detail::Accumulator fxy("metriplectic", "f = 2xy + W^2 = expanded form", 1e-12);
    detail::Accumulator kerc("metriplectic", "M(dC, .) = 0", 1e-9);
    detail::Accumulator gdb("metriplectic", "GDB field = Pi# g X_G", 1e-12);
    detail::Accumulator tan("metriplectic", "GDB field tangent to leaves", 1e-9);
    detail::Accumulator img("metriplectic", "image of M inside image of Pi", 1e-9);
    detail::Accumulator rank("metriplectic", "rank law 2 / 1 / 0", 0.0);
    for (int i = 0; i < opt.n; ++i) {
      const AmbientPoint p = rng.in_cube(opt.cube_half);
      const Jet j = spec.jet(p.z);
      const Mat3 pi = bivector_matrix(j, p);
      const MetriplecticAtPoint mp = metriplectic_at(spec, p);
      fac.add((mp.m + pi * g * pi).norm() / (1.0 + mp.m.norm()));
      fxy.add(std::abs(mp.f - f_expanded(j, p.x * p.y)) / (1.0 + std::abs(mp.f)));
      const Vec3 dC = casimir_gradient(j, p);
      kerc.add((mp.m * dC).norm() / (1.0 + mp.m.norm() * dC.norm()));
      for (const ScalarField& K : basket) {
        const Vec3 dK = K.gradient(p);
        const Vec3 v = gdb_ambient_at(j, dK, p);
        const Vec3 via_x = pi.transpose() * (g * hamiltonian_field_at(j, dK, p));
        gdb.add((v - via_x).norm() / (1.0 + mp.m.norm() * dK.norm()));
        tan.add(std::abs(dC.dot(v)) / (1.0 + dC.norm() * v.norm()));
      }
      const Mat3 proj = pi * pi.completeOrthogonalDecomposition().pseudoInverse();
      img.add((mp.m - proj * mp.m).norm() / (1.0 + mp.m.norm()));
    }
    const std::vector<double> zs = [&]() {
      try {
        return singular_leaves(spec, {-opt.cube_half, opt.cube_half});
      } catch (const NumericError&) {
        return std::vector<double>{};
      }
    }();
    for (int i = 0; i < opt.n; ++i) {
      const int cls = i % 3;
      AmbientPoint p;
      PointClass want = PointClass::Regular;
      if (cls == 0) {
        p = rng.regular_point(spec, opt.cube_half);
      } else if (cls == 1) {
        p = rng.red_point(spec, opt.cube_half);
        want = PointClass::Red;
      } else {
        if (zs.empty()) continue;
        p = {0.0, 0.0, zs[static_cast<std::size_t>(rng.index(static_cast<int>(zs.size())))]};
        want = PointClass::SingularLeaf;
      }
      const PointClass got = classify_point(spec, p);
      const int r = matrix_rank(metriplectic_at(spec, p).m);
      if (got != want || r != expected_rank(want))
        rank.fail(std::string("class ") + std::string(to_string(want)) + " gave " + std::string(to_string(got)) +
                  " with rank " + std::to_string(r));
      else
        rank.add(0.0);
    }
    for (const auto* acc : {&fac, &fxy, &kerc, &gdb, &tan, &img, &rank}) rep.checks.push_back(acc->done());
  }

  // chart ------------------------------------------------------------------
  {
    detail::Accumulator onleaf("chart", "on-leaf consistency C = c", 1e-10);
    detail::Accumulator det("chart", "det g_ind = -f/x^2", 1e-10);
    detail::Accumulator tau("chart", "tau_DB (-f) = g_ind", 1e-10);
    detail::Accumulator gid("chart", "gradient identity", 1e-8);
    detail::Accumulator ortho("chart", "orthogonality tau(d_G, X_G)", 1e-9);
    detail::Accumulator rate("chart", "descent rate dG(d_G) = -tau(d_G, d_G)", 1e-9);
    detail::Accumulator overlap("chart", "(x,z)/(y,z) chart overlap", 1e-9);
    detail::Accumulator sig("chart", "signature matches zone profile", 0.0);
    std::map<double, ZoneProfile> zones;
    const int per_c = std::max(1, opt.n / static_cast<int>(opt.leaf_values.size()));
    for (double c : opt.leaf_values) {
      zones.emplace(c, zone_profile(spec, c));
      for (int i = 0; i < per_c; ++i) {
        const AmbientPoint p = rng.green_leaf_point(spec, c);
        ChartFrame fr, fy;
        try {
          fr = chart_frame_at(spec, c, {Chart::XZ, p.x, p.z});
        } catch (const ChartError& e) {
          det.fail(e.what());
          continue;
        }
        const double scale_c = 1.0 + std::abs(c) + std::abs(fr.point.x * fr.point.y) * std::exp(spec.P(p.z)) +
                               std::abs(spec.Q(p.z));
        onleaf.add(std::abs(casimir_at(spec, fr.point) - c) / scale_c);
        const double dref = std::abs(fr.g_ind(0, 0) * fr.g_ind(1, 1)) + fr.g_ind(0, 1) * fr.g_ind(0, 1);
        det.add(std::abs(fr.det + fr.f_S / (p.x * p.x)) / dref);
        if (!fr.tau_db) {
          tau.fail("red line at a green sample");
          continue;
        }
        tau.add((-fr.f_S * *fr.tau_db - fr.g_ind).norm() / fr.g_ind.norm());
        for (const ScalarField& K : basket) {
          gid.add(gradient_residual_at(spec, fr, K));
          const Vec2 v = gdb_on_leaf_at(spec, fr, K);
          const Vec2 xg = hamiltonian_on_leaf_at(spec, fr, K);
          ortho.add(std::abs(v.dot(*fr.tau_db * xg)) / (1.0 + v.norm() * xg.norm()));
          const double dg = restricted_differential(fr, K).dot(v);
          rate.add(std::abs(dg + v.dot(*fr.tau_db * v)) / (1.0 + std::abs(dg)));
        }
        if (std::abs(fr.point.y) > 1e-3) {
          fy = chart_frame_at(spec, c, {Chart::YZ, fr.point.y, fr.point.z});
          overlap.add(chart_overlap_residual(fr, fy));
        }
        const Signature zs = zones.at(c).at(p.z);
        const bool lorentz = fr.det < 0.0;
        const bool eucl = fr.det > 0.0 && fr.g_ind(0, 0) > 0.0;
        if ((zs == Signature::Lorentzian && lorentz) || (zs == Signature::Euclidean && eucl))
          sig.add(0.0);
        else
          sig.fail("signature mismatch at z = " + std::to_string(p.z));
      }
    }
    for (const auto* acc : {&onleaf, &det, &tau, &gid, &ortho, &rate, &overlap, &sig}) rep.checks.push_back(acc->done());
  }
  return rep;
}

}  // namespace leafgeo
