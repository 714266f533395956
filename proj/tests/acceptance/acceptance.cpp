// One pass/fail line per acceptance criterion; nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "leafgeo/leafgeo.hpp"

using namespace leafgeo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<ScalarField> criterion_fields() {
  return {ScalarField::coordinate(0), ScalarField::coordinate(1), ScalarField::coordinate(2),
          ScalarField::parse("x*y + z^2")};
}

Outcome gradient_identity() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const FunctionSpec& s : builtin_specs()) {
    Sampler rng(42);
    for (double c : {-1.0, 0.5, 1.0})
      for (const ScalarField& G : criterion_fields())
        for (int i = 0; i < 200; ++i) {
          const AmbientPoint p = rng.green_leaf_point(s, c);
          worst = std::max(worst, gradient_residual_at(s, c, G, {Chart::XZ, p.x, p.z}));
        }
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {worst < 1e-8 && secs < 5.0, fmt("max residual %.2e", worst) + fmt(", %.2f s", secs)};
}

Outcome red_line_values() {
  const auto t0 = Clock::now();
  const FunctionSpec s = builtin_spec("quadratic");
  const RedLines rl = red_lines(s, 0.0);
  bool ok = rl.z.size() == 2;
  std::string d = "z_red =";
  for (double z : rl.z) d += fmt(" %.12f", z);
  if (ok) {
    ok = std::abs(rl.z[0] + 0.77) <= 0.01 && std::abs(rl.z[1] + 0.30) <= 0.01;
    // Converged: F changes sign across [z - 1e-12, z + 1e-12].
    for (double z : rl.z) ok = ok && F_at(s, 0.0, z - 1e-12) * F_at(s, 0.0, z + 1e-12) <= 0.0;
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {ok && secs < 1.0, d + fmt(", %.3f s", secs)};
}

Outcome f_equals_twice_casimir() {
  const FunctionSpec s = builtin_spec("linear");
  Sampler rng(42);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const AmbientPoint p = rng.in_cube(3.0);
    worst = std::max(worst, std::abs(f_at(s, p) - 2.0 * casimir_at(s, p)));
  }
  return {worst < 1e-12, fmt("max |f - 2C| %.2e", worst)};
}

Outcome topology() {
  struct Case {
    const char* spec;
    double c;
    int genus, punctures;
  };
  bool ok = true;
  std::string d;
  for (const Case& k : {Case{"linear", 1.0, 0, 2}, Case{"quadratic", 0.0, 1, 1}, Case{"quartic", 0.0, 1, 2},
                        Case{"genus2", 0.0, 2, 1}}) {
    const LeafTopology t = leaf_topology(builtin_spec(k.spec), k.c);
    const bool hit = t.genus == k.genus && t.punctures == k.punctures;
    ok = ok && hit;
    d += std::string(d.empty() ? "" : ", ") + k.spec + " (" + (t.genus ? std::to_string(*t.genus) : "?") + "," +
         (t.punctures ? std::to_string(*t.punctures) : "?") + ")";
  }
  return {ok, d};
}

Outcome rank_law() {
  int wrong = 0, total = 0;
  for (const FunctionSpec& s : builtin_specs()) {
    Sampler rng(42);
    const std::vector<double> zs = singular_leaves(s);
    auto check = [&](const AmbientPoint& p, int want) {
      const Mat3 m = metriplectic_at(s, p).m;
      ++total;
      if (matrix_rank(m) != want || expected_rank(classify_point(s, p)) != want) ++wrong;
    };
    for (int i = 0; i < 500; ++i) check(rng.regular_point(s), 2);
    for (int i = 0; i < 500; ++i) check(rng.red_point(s), 1);
    for (int i = 0; i < 500; ++i) check({0.0, 0.0, zs[rng.index(static_cast<int>(zs.size()))]}, 0);
  }
  return {wrong == 0, std::to_string(wrong) + " misclassified of " + std::to_string(total)};
}

struct DescentRun {
  Trajectory tr;
  double c;
};

std::vector<DescentRun>& descent_runs() {
  static std::vector<DescentRun> runs = [] {
    const FunctionSpec s = builtin_spec("linear");
    FlowOptions opt;
    opt.dt = 1e-4;
    opt.n_steps = 10000;
    std::vector<DescentRun> r;
    r.push_back({integrate_flow(s, -1.0, ScalarField::coordinate(2), {1, -1, 0}, opt), -1.0});
    r.push_back({integrate_flow(s, 1.0, ScalarField::coordinate(2), {1, 1, 0}, opt), 1.0});
    return r;
  }();
  return runs;
}

Outcome descent() {
  const auto& runs = descent_runs();
  bool ok = true;
  double worst_rate = 0.0;
  for (const DescentRun& run : runs) {
    const auto& s = run.tr.samples;
    ok = ok && s.size() == 10001;
    const double sign = run.c < 0 ? -1.0 : 1.0;
    for (std::size_t k = 1; k < s.size(); ++k) ok = ok && sign * (s[k].G - s[k - 1].G) > 0.0;
    for (std::size_t k = 1; k + 1 < s.size(); ++k) {
      const double rate = (s[k + 1].G - s[k - 1].G) / (s[k + 1].t - s[k - 1].t);
      const double want = -s[k].causal->norm2;
      worst_rate = std::max(worst_rate, std::abs(rate - want) / std::abs(want));
    }
  }
  return {ok && worst_rate < 1e-3, std::string(ok ? "monotone" : "not monotone") +
                                       fmt(", max relative rate error %.2e", worst_rate)};
}

Outcome casimir_conservation() {
  double worst = 0.0;
  for (const DescentRun& run : descent_runs()) worst = std::max(worst, run.tr.max_casimir_drift(run.c));
  return {worst < 1e-10, fmt("max |C - c| %.2e", worst)};
}

Outcome orthogonality() {
  double worst = 0.0;
  const std::vector<ScalarField> fields = criterion_fields();
  const double cs[3] = {-1.0, 0.5, 1.0};
  for (const FunctionSpec& s : builtin_specs()) {
    Sampler rng(42);
    for (int i = 0; i < 1000; ++i) {
      const double c = cs[i % 3];
      const AmbientPoint p = rng.green_leaf_point(s, c);
      const ChartFrame fr = chart_frame_at(s, c, {Chart::XZ, p.x, p.z});
      for (const ScalarField& G : fields) {
        const Vec2 v = gdb_on_leaf_at(s, fr, G);
        const Vec2 xg = hamiltonian_on_leaf_at(s, fr, G);
        worst = std::max(worst, std::abs(v.dot(*fr.tau_db * xg)) / (1.0 + v.norm() * xg.norm()));
      }
    }
  }
  return {worst < 1e-9, fmt("max scaled |tau(d_G, X_G)| %.2e", worst)};
}

Outcome red_zone_components() {
  struct Case {
    const char* spec;
    int want;
  };
  bool ok = true;
  std::string d;
  for (const Case& k : {Case{"quadratic", 2}, Case{"poisson-lie(1)", 4}, Case{"linear", 2}}) {
    const auto t0 = Clock::now();
    const int got = count_components(mesh_red_zone(builtin_spec(k.spec), Box::cube(3.0), 96)).components;
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    ok = ok && got == k.want && secs < 30.0;
    d += std::string(d.empty() ? "" : ", ") + k.spec + " " + std::to_string(got) + "/" + std::to_string(k.want) +
         fmt(" (%.2f s)", secs);
  }
  return {ok, d};
}

Outcome jacobi() {
  double worst = 0.0;
  for (const FunctionSpec& s : builtin_specs()) {
    Sampler rng(42);
    for (int i = 0; i < 1000; ++i) worst = std::max(worst, jacobi_residual_at(s, rng.in_cube(2.0)));
  }
  return {worst < 1e-8, fmt("max residual %.2e", worst)};
}

Outcome determinant() {
  double worst = 0.0;
  for (const FunctionSpec& s : builtin_specs()) {
    Sampler rng(42);
    const double cs[3] = {-1.0, 0.5, 1.0};
    for (int i = 0; i < 1000; ++i) {
      const double c = cs[i % 3];
      const AmbientPoint p = rng.on_leaf(s, c);
      const ChartFrame fr = chart_frame_at(s, c, {Chart::XZ, p.x, p.z});
      const double want = -fr.f_S / (fr.point.x * fr.point.x);
      const double ref = std::abs(fr.g_ind(0, 0) * fr.g_ind(1, 1)) + fr.g_ind(0, 1) * fr.g_ind(0, 1);
      worst = std::max(worst, std::abs(fr.det - want) / ref);
    }
  }
  return {worst < 1e-10, fmt("max relative residual %.2e", worst)};
}

Outcome deformation_limit() {
  const FunctionSpec lin = builtin_spec("linear");
  const FunctionSpec grp = builtin_spec("poisson-lie(0.001)");
  Sampler rng(42);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AmbientPoint p = rng.in_cube(2.0);
    const Mat3 d = bivector_matrix(grp.jet(p.z), p) - bivector_matrix(lin.jet(p.z), p);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return {worst < 5e-3, fmt("max |Pi_grp - Pi_lin| %.3e", worst) + ", tolerance 5e-3"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "gradient identity", gradient_identity},
      {2, "red-line values", red_line_values},
      {3, "f = 2C on the linear family", f_equals_twice_casimir},
      {4, "topology dictionary", topology},
      {5, "rank law", rank_law},
      {6, "descent and trichotomy", descent},
      {7, "Casimir conservation along flows", casimir_conservation},
      {8, "orthogonality", orthogonality},
      {9, "red-zone component counts", red_zone_components},
      {10, "Jacobi identity", jacobi},
      {11, "determinant identity", determinant},
      {12, "group-to-linear deformation limit", deformation_limit},
  };
  int failed = 0;
  for (const Criterion& c : all) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %s  %s: %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
