#pragma once

// Global analysis of the leaves S_c = {C = c}: point leaves, topology from the zeros of
// h_c = Q - c, and the signature of the induced metric from F_c = f|_{S_c}.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leafgeo/ambient.hpp"
#include "leafgeo/roots.hpp"

namespace leafgeo {

struct ZRange {
  double lo = -10.0;
  double hi = 10.0;
};

namespace detail {

inline void require_clean(const RootScan& scan, std::string_view what) {
  if (!scan.failed_cells.empty()) {
    const auto& c = scan.failed_cells.front();
    throw NumericError(std::string(what) + ": non-finite values on [" + std::to_string(c.first) + ", " +
                       std::to_string(c.second) + "] and " + std::to_string(scan.failed_cells.size() - 1) +
                       " more cells");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Point leaves

inline RootScan scan_u(const FunctionSpec& spec, ZRange r, const RootScanOptions& opt = {}) {
  return find_roots(
      [&](const Dual<1>& z) {
        const Jet j = spec.jet(z.value);
        return detail::chain(z, j.u, j.du);
      },
      r.lo, r.hi, opt);
}

/// Heights z of the point leaves (0, 0, z), i.e. the zeros of U.
inline std::vector<double> singular_leaves(const FunctionSpec& spec, ZRange r = {}, const RootScanOptions& opt = {}) {
  const RootScan scan = scan_u(spec, r, opt);
  detail::require_clean(scan, "singular_leaves");
  if (scan.identically_zero) throw NumericError("U vanishes identically: every point of the z-axis is a point leaf");
  std::vector<double> out;
  for (const Root& root : scan.roots) out.push_back(root.z);
  return out;
}

/// Casimir values Q(z*) at the point leaves; leaves with these c contain a singular point.
inline std::vector<double> critical_values(const FunctionSpec& spec, ZRange r = {}) {
  std::vector<double> out;
  for (double z : singular_leaves(spec, r)) out.push_back(spec.Q(z));
  return out;
}

// ---------------------------------------------------------------------------
// Topology

inline double h_at(const FunctionSpec& spec, double c, double z) { return spec.Q(z) - c; }

template <std::size_t N>
Dual<N> h_dual(const FunctionSpec& spec, double c, const Dual<N>& z) {
  const Jet j = spec.jet(z.value);
  return detail::chain(z, j.q - c, j.dq());
}

struct LeafTopology {
  int n_zeros = 0;
  std::optional<int> genus;
  std::optional<int> punctures;
  bool degenerate = false;
  std::vector<double> zeros;
  std::string components_note;
};

inline LeafTopology leaf_topology(const FunctionSpec& spec, double c, ZRange r = {}, const RootScanOptions& opt = {}) {
  const RootScan scan = find_roots([&](const Dual<1>& z) { return h_dual(spec, c, z); }, r.lo, r.hi, opt);
  detail::require_clean(scan, "leaf_topology");
  if (scan.identically_zero) throw NumericError("h_c vanishes identically on the range");
  if (scan.boundary_root) throw NumericError("a zero of h_c lies on the boundary of the z-range; widen the range");

  LeafTopology t;
  for (const Root& root : scan.roots) {
    t.zeros.push_back(root.z);
    if (root.multiple)
      t.degenerate = true;
    else
      ++t.n_zeros;
  }
  if (t.degenerate) {
    t.components_note = "h_c has a multiple zero: the level set contains a singular point leaf";
    return t;
  }
  const int n = t.n_zeros;
  if (n == 0) {
    t.genus = 0;
    t.punctures = 1;
    t.components_note = "two planar symplectic leaves";
  } else {
    t.genus = (n + 1) / 2 - 1;
    t.punctures = (n % 2 == 1) ? 1 : 2;
    t.components_note = "one connected leaf";
  }
  return t;
}

// ---------------------------------------------------------------------------
// Red lines

/// F_c = U^2 + 2(1 + UV) e^{-P}(c - Q) + V^2 e^{-2P}(c - Q)^2, the value of f on S_c at height z.
template <std::size_t N>
Dual<N> F_dual(const FunctionSpec& spec, double c, const Dual<N>& z) {
  const LiftedJet<N> j = lift(spec.jet(z.value), z);
  const Dual<N> s = exp(-j.p) * (c - j.q);  // xy on the leaf
  return j.u * j.u + 2.0 * (1.0 + j.u * j.v) * s + j.v * j.v * s * s;
}

inline double F_at(const FunctionSpec& spec, double c, double z) { return F_dual(spec, c, Dual<1>(z)).value; }

struct RedLines {
  std::vector<double> z;
  /// F_c vanishes identically: the whole leaf is degenerate.
  bool bad_leaf = false;
  /// Zeros where F_c touches zero without changing sign.
  std::vector<bool> touching;
};

inline RedLines red_lines(const FunctionSpec& spec, double c, ZRange r = {}, const RootScanOptions& opt = {}) {
  const RootScan scan = find_roots([&](const Dual<1>& z) { return F_dual(spec, c, z); }, r.lo, r.hi, opt);
  detail::require_clean(scan, "red_lines");
  RedLines out;
  if (scan.identically_zero) {
    out.bad_leaf = true;
    return out;
  }
  for (const Root& root : scan.roots) {
    out.z.push_back(root.z);
    out.touching.push_back(root.touching);
  }
  return out;
}

enum class Signature { Euclidean, Lorentzian, Degenerate };

inline std::string_view to_string(Signature s) {
  switch (s) {
    case Signature::Euclidean: return "euclidean";
    case Signature::Lorentzian: return "lorentzian";
    case Signature::Degenerate: return "degenerate";
  }
  return "?";
}

struct ZoneInterval {
  double lo = 0.0, hi = 0.0;
  Signature signature = Signature::Degenerate;
};

struct ZoneProfile {
  std::vector<double> red_lines;
  std::vector<ZoneInterval> intervals;
  bool bad_leaf = false;

  /// Signature at height z (Degenerate exactly on a red line).
  Signature at(double z) const {
    for (double zr : red_lines)
      if (z == zr) return Signature::Degenerate;
    for (const auto& iv : intervals)
      if (z >= iv.lo && z <= iv.hi) return iv.signature;
    return Signature::Degenerate;
  }
};

inline Signature signature_from_F(double F) {
  if (F > 0.0) return Signature::Lorentzian;
  if (F < 0.0) return Signature::Euclidean;
  return Signature::Degenerate;
}

inline ZoneProfile zone_profile(const FunctionSpec& spec, double c, ZRange r = {}, const RootScanOptions& opt = {}) {
  const RedLines rl = red_lines(spec, c, r, opt);
  ZoneProfile zp;
  zp.red_lines = rl.z;
  zp.bad_leaf = rl.bad_leaf;
  if (rl.bad_leaf) {
    zp.intervals.push_back({r.lo, r.hi, Signature::Degenerate});
    return zp;
  }
  std::vector<double> cuts{r.lo};
  for (double z : rl.z)
    if (z > r.lo && z < r.hi) cuts.push_back(z);
  cuts.push_back(r.hi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const Signature s = signature_from_F(F_at(spec, c, mid));
    if (!zp.intervals.empty() && zp.intervals.back().signature == s)
      zp.intervals.back().hi = cuts[i + 1];
    else
      zp.intervals.push_back({cuts[i], cuts[i + 1], s});
  }
  return zp;
}

}  // namespace leafgeo
