// leafgeo_cli: verify, classify, redlines, frame, flow, mesh.
// Exit codes: 0 ok, 1 bad arguments, 2 verification failure, 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "leafgeo/leafgeo.hpp"

using namespace leafgeo;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kBadArgs = 1, kVerifyFailed = 2, kNumeric = 3 };

struct BadArgs : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// builtin:<name>, a path to a spec file, or inline key=value text.
FunctionSpec load_spec(const std::string& arg) {
  if (arg.rfind("builtin:", 0) == 0) return builtin_spec(arg);
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    std::ifstream in(arg);
    std::string text, line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      text += line + ' ';
    }
    return parse_spec(text).with_label(arg);
  }
  return parse_spec(arg);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

AmbientPoint parse_triple(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (detail::trim(tok.substr(used)) != "") throw BadArgs("bad number '" + tok + "'");
    } catch (const std::logic_error&) {
      throw BadArgs("bad number '" + tok + "' in '" + s + "'");
    }
  }
  if (v.size() != 3) throw BadArgs("expected x,y,z but got '" + s + "'");
  return {v[0], v[1], v[2]};
}

Chart parse_chart(const std::string& s) {
  if (s == "xz") return Chart::XZ;
  if (s == "yz") return Chart::YZ;
  if (s == "xy") return Chart::XY;
  throw BadArgs("chart must be xz, yz or xy");
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw BadArgs("cannot open '" + path + "' for writing");
  return file;
}

ordered_json mat_json(const Mat2& m) { return {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}}; }

// --- subcommands ------------------------------------------------------------

int run_verify_cmd(const std::string& spec_arg, int n, std::uint64_t seed, bool json) {
  const FunctionSpec spec = load_spec(spec_arg);
  VerifyOptions opt;
  opt.n = n;
  opt.seed = seed;
  const VerifyReport rep = run_verify(spec, opt);
  if (json) {
    ordered_json j;
    j["spec"] = rep.spec_label;
    j["seed"] = rep.seed;
    j["n"] = rep.n;
    j["passed"] = rep.passed();
    for (const auto& c : rep.checks)
      j["checks"].push_back({{"module", c.module},
                             {"check", c.name},
                             {"max_residual", c.max_residual},
                             {"threshold", c.threshold},
                             {"samples", c.samples},
                             {"failures", c.failures},
                             {"passed", c.passed()},
                             {"note", c.note}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::printf("spec: %s\nseed: %llu\nn: %d\n", rep.spec_label.c_str(), static_cast<unsigned long long>(rep.seed),
                rep.n);
    for (const auto& c : rep.checks)
      std::printf("%-4s %-13s %-42s max=%.3e threshold=%.0e samples=%d%s%s\n", c.passed() ? "ok" : "FAIL",
                  c.module.c_str(), c.name.c_str(), c.max_residual, c.threshold, c.samples,
                  c.note.empty() ? "" : "  note: ", c.note.c_str());
    std::printf("result: %s\n", rep.passed() ? "pass" : "fail");
  }
  return rep.passed() ? kOk : kVerifyFailed;
}

int run_classify_cmd(const std::string& spec_arg, double c, ZRange r, bool json) {
  const FunctionSpec spec = load_spec(spec_arg);
  const LeafTopology t = leaf_topology(spec, c, r);
  const ZoneProfile zp = zone_profile(spec, c, r);
  const std::vector<double> sing = singular_leaves(spec, r);
  std::vector<double> crit;
  for (double z : sing) crit.push_back(spec.Q(z));
  if (json) {
    ordered_json j;
    j["spec"] = spec.label().empty() ? spec.to_text() : spec.label();
    j["c"] = c;
    j["z_range"] = {r.lo, r.hi};
    j["singular_leaves"] = sing;
    j["critical_values"] = crit;
    j["topology"] = {{"n_zeros", t.n_zeros},
                     {"zeros", t.zeros},
                     {"degenerate", t.degenerate},
                     {"genus", t.genus ? ordered_json(*t.genus) : ordered_json(nullptr)},
                     {"punctures", t.punctures ? ordered_json(*t.punctures) : ordered_json(nullptr)},
                     {"components_note", t.components_note}};
    j["bad_leaf"] = zp.bad_leaf;
    j["red_lines"] = zp.red_lines;
    for (const auto& iv : zp.intervals)
      j["zones"].push_back({{"z_lo", iv.lo}, {"z_hi", iv.hi}, {"signature", std::string(to_string(iv.signature))}});
    j["warnings"] = spec.warnings();
    std::cout << j.dump(2) << '\n';
    return kOk;
  }
  std::printf("spec: %s\nc: %s\nz_range: [%s, %s]\n", (spec.label().empty() ? spec.to_text() : spec.label()).c_str(),
              fmt(c).c_str(), fmt(r.lo).c_str(), fmt(r.hi).c_str());
  std::printf("singular_leaves: [%s]\ncritical_values: [%s]\n", join(sing).c_str(), join(crit).c_str());
  std::printf("h_zeros: [%s]\nn_zeros: %d\ndegenerate: %s\n", join(t.zeros).c_str(), t.n_zeros,
              t.degenerate ? "true" : "false");
  std::printf("genus: %s\npunctures: %s\ncomponents: %s\n", t.genus ? std::to_string(*t.genus).c_str() : "unset",
              t.punctures ? std::to_string(*t.punctures).c_str() : "unset", t.components_note.c_str());
  std::printf("bad_leaf: %s\nred_lines: [%s]\n", zp.bad_leaf ? "true" : "false", join(zp.red_lines).c_str());
  for (const auto& iv : zp.intervals)
    std::printf("zone: [%s, %s] %s\n", fmt(iv.lo).c_str(), fmt(iv.hi).c_str(),
                std::string(to_string(iv.signature)).c_str());
  for (const auto& w : spec.warnings()) std::printf("warning: %s\n", w.c_str());
  return kOk;
}

int run_redlines_cmd(const std::string& spec_arg, double c, ZRange r, const std::string& poly_out, double half,
                     int res) {
  const FunctionSpec spec = load_spec(spec_arg);
  const RedLines rl = red_lines(spec, c, r);
  std::printf("bad_leaf: %s\n", rl.bad_leaf ? "true" : "false");
  for (std::size_t i = 0; i < rl.z.size(); ++i)
    std::printf("z_red: %.15g%s\n", rl.z[i], rl.touching[i] ? " (touching)" : "");
  if (!poly_out.empty()) {
    std::ofstream file;
    std::ostream& os = open_out(poly_out, file);
    const auto lines = red_line_polylines(spec, c, Box::cube(half), res);
    write_polylines_csv(os, lines);
    std::fprintf(stderr, "polylines: %zu\n", lines.size());
  }
  return kOk;
}

int run_frame_cmd(const std::string& spec_arg, double c, const std::string& chart_arg, double x, double y, double z,
                  const std::string& g_expr, bool json) {
  const FunctionSpec spec = load_spec(spec_arg);
  const Chart chart = parse_chart(chart_arg);
  ChartPoint cp{chart, 0.0, 0.0, z};
  switch (chart) {
    case Chart::XZ: cp.a = x, cp.b = z; break;
    case Chart::YZ: cp.a = y, cp.b = z; break;
    case Chart::XY: cp.a = x, cp.b = y; break;
  }
  const ChartFrame fr = chart_frame_at(spec, c, cp);
  ordered_json j;
  j["chart"] = std::string(to_string(fr.chart));
  j["coords"] = {fr.a, fr.b};
  j["point"] = {fr.point.x, fr.point.y, fr.point.z};
  j["dependent"] = fr.dependent;
  j["W"] = fr.w;
  j["g_ind"] = mat_json(fr.g_ind);
  j["det"] = fr.det;
  j["omega"] = fr.omega;
  j["f_S"] = fr.f_S;
  j["red_line"] = fr.red_line;
  j["tau_db"] = fr.tau_db ? mat_json(*fr.tau_db) : ordered_json(nullptr);
  if (fr.red_line) {
    const RadicalDirection rd = radical_direction_at(fr, 1e-9);
    j["radical_direction"] = {rd.direction[0], rd.direction[1]};
    j["kernel_residual"] = rd.kernel_residual;
  }
  if (!g_expr.empty()) {
    const ScalarField G = parse_field(g_expr, spec);
    const Vec2 v = gdb_on_leaf_at(spec, fr, G);
    j["G"] = G.name();
    j["gdb"] = {v[0], v[1]};
    if (fr.tau_db) {
      j["gradient_residual"] = gradient_residual_at(spec, fr, G);
      const CausalCharacter cc = causal_character_at(spec, fr, G);
      j["causal"] = std::string(to_string(cc.tag));
      j["norm2"] = cc.norm2;
    }
  }
  if (json) {
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& [k, v] : j.items()) std::cout << k << ": " << v.dump() << '\n';
  }
  return kOk;
}

int run_flow_cmd(const std::string& spec_arg, double c, const std::string& g_expr, const std::string& start_arg,
                 const FlowOptions& opt, const std::string& out) {
  const FunctionSpec spec = load_spec(spec_arg);
  const ScalarField G = parse_field(g_expr, spec);
  const AmbientPoint start = parse_triple(start_arg);
  const Trajectory tr = integrate_flow(spec, c, G, start, opt);
  std::ofstream file;
  std::ostream& os = open_out(out, file);
  write_trajectory_csv(os, tr);
  std::fprintf(stderr, "samples: %zu\ntermination: %s\nmax_casimir_drift: %.3e\n", tr.samples.size(),
               std::string(to_string(tr.termination)).c_str(), tr.max_casimir_drift(c));
  if (!tr.message.empty()) std::fprintf(stderr, "message: %s\n", tr.message.c_str());
  return tr.termination == Termination::ChartFailure ? kNumeric : kOk;
}

int run_mesh_cmd(const std::string& spec_arg, const std::string& kind, double c, double half, int res,
                 const std::string& out, const std::string& poly_out) {
  const FunctionSpec spec = load_spec(spec_arg);
  const Box box = Box::cube(half);
  Mesh mesh;
  if (kind == "leaf")
    mesh = mesh_leaf(spec, c, box, res);
  else if (kind == "red")
    mesh = mesh_red_zone(spec, box, res);
  else
    throw BadArgs("--kind must be leaf or red");
  std::ofstream file;
  std::ostream& os = open_out(out, file);
  write_obj(os, mesh);
  const ComponentCount cc = count_components(mesh);
  std::fprintf(stderr, "vertices: %zu\ntriangles: %zu\ncomponents: %d\n", mesh.vertices.size(), mesh.triangles.size(),
               cc.components);
  for (VertexTag t : {VertexTag::Euclidean, VertexTag::Lorentzian, VertexTag::RedNear, VertexTag::Excluded})
    std::fprintf(stderr, "tag %s: %zu\n", std::string(to_string(t)).c_str(), mesh.count(t));
  if (!poly_out.empty() && kind == "leaf") {
    std::ofstream pf;
    std::ostream& ps = open_out(poly_out, pf);
    write_polylines_csv(ps, red_line_polylines(spec, c, box, res));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leaf geometry of a family of Poisson structures on R^3 with the flat metric 2 dx dy + dz^2"};
  app.require_subcommand(1, 1);

  std::string spec_arg;
  double c = 0.0;
  ZRange r;
  bool json = false;
  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", spec_arg, "builtin:NAME, spec file, or inline 'family=... U=... V=...'")->required();
  };
  auto add_range = [&](CLI::App* sub) {
    sub->add_option("--zmin", r.lo, "lower end of the z-range")->capture_default_str();
    sub->add_option("--zmax", r.hi, "upper end of the z-range")->capture_default_str();
  };

  int n = 1000;
  std::uint64_t seed = 42;
  auto* verify = app.add_subcommand("verify", "run the invariant suite at seeded random points");
  add_spec(verify);
  verify->add_option("--n", n, "points per check")->capture_default_str()->check(CLI::PositiveNumber);
  verify->add_option("--seed", seed, "random seed")->capture_default_str();
  verify->add_flag("--json", json, "machine-readable report");

  auto* classify = app.add_subcommand("classify", "leaf topology and zone profile for C = c");
  add_spec(classify);
  classify->add_option("--c", c, "Casimir value")->required();
  add_range(classify);
  classify->add_flag("--json", json, "machine-readable report");

  std::string poly_out;
  double half = 3.0;
  int res = 96;
  auto* redlines = app.add_subcommand("redlines", "heights of the red lines on C = c");
  add_spec(redlines);
  redlines->add_option("--c", c, "Casimir value")->required();
  add_range(redlines);
  redlines->add_option("--polylines", poly_out, "write red-line polylines as CSV");
  redlines->add_option("--box", half, "half-width of the causal box for polylines")->capture_default_str();
  redlines->add_option("--res", res, "grid resolution for polylines")->capture_default_str();

  std::string chart = "xz", g_expr;
  double x = 1.0, y = 1.0, z = 0.0;
  auto* frame = app.add_subcommand("frame", "leaf frame at a chart point");
  add_spec(frame);
  frame->add_option("--c", c, "Casimir value")->required();
  frame->add_option("--chart", chart, "xz, yz or xy")->capture_default_str();
  frame->add_option("--x", x, "x coordinate (charts xz, xy)");
  frame->add_option("--y", y, "y coordinate (charts yz, xy)");
  frame->add_option("--z", z, "z coordinate (charts xz, yz; start guess for xy)");
  frame->add_option("--G", g_expr, "function G of x, y, z, or C for the Casimir");
  frame->add_flag("--json", json, "machine-readable output");

  FlowOptions fopt;
  std::string start, out;
  auto* flow = app.add_subcommand("flow", "integrate the GDB flow of G on C = c");
  add_spec(flow);
  flow->add_option("--c", c, "Casimir value")->required();
  flow->add_option("--G", g_expr, "function G of x, y, z")->required();
  flow->add_option("--start", start, "start point x,y,z on the leaf")->required();
  flow->add_option("--dt", fopt.dt, "time step")->capture_default_str()->check(CLI::PositiveNumber);
  flow->add_option("--steps", fopt.n_steps, "number of steps")->capture_default_str()->check(CLI::NonNegativeNumber);
  flow->add_option("--casimir-tol", fopt.casimir_tol, "projection tolerance")->capture_default_str();
  flow->add_option("--red-stop-tol", fopt.red_stop_tol, "red-line stopping tolerance")->capture_default_str();
  flow->add_option("--out", out, "CSV output path (default stdout)");

  std::string kind = "leaf";
  auto* mesh = app.add_subcommand("mesh", "export a leaf or the red zone as OBJ");
  add_spec(mesh);
  mesh->add_option("--kind", kind, "leaf or red")->capture_default_str();
  mesh->add_option("--c", c, "Casimir value (leaf meshes)");
  mesh->add_option("--box", half, "half-width of the causal box")->capture_default_str();
  mesh->add_option("--res", res, "cells per axis")->capture_default_str()->check(CLI::Range(8, 1024));
  mesh->add_option("--out", out, "OBJ output path (default stdout)");
  mesh->add_option("--polylines", poly_out, "also write red-line polylines (leaf meshes)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadArgs;
  }

  try {
    if (*verify) return run_verify_cmd(spec_arg, n, seed, json);
    if (*classify) return run_classify_cmd(spec_arg, c, r, json);
    if (*redlines) return run_redlines_cmd(spec_arg, c, r, poly_out, half, res);
    if (*frame) return run_frame_cmd(spec_arg, c, chart, x, y, z, g_expr, json);
    if (*flow) return run_flow_cmd(spec_arg, c, g_expr, start, fopt, out);
    if (*mesh) return run_mesh_cmd(spec_arg, kind, c, half, res, out, poly_out);
  } catch (const BadArgs& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const ParseError& e) {
    std::cerr << "expression error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const ChartError& e) {
    std::cerr << "chart failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const QuadratureError& e) {
    std::cerr << "quadrature failure: " << e.what() << '\n';
    return kNumeric;
  }
  return kBadArgs;
}
