// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "favard/cloud.hpp"
#include "favard/errors.hpp"
#include "favard/geom_core.hpp"
#include "favard/parallel.hpp"

namespace favard {

inline constexpr double tol_density = 1e-9;

// Slack used when testing whether a direction lies in a closed angular arc.
inline constexpr double kArcSlack = 1e-12;

// Closed arc of normal angles {theta : wrap(theta - start) <= len}, len < pi.
struct ThetaArc {
  double start = 0.0;
  double len = 0.0;

  bool contains(double theta) const {
    if (len >= kPi) return true;
    const double u = IntervalUnion::wrap(theta - start);
    return u <= len + kArcSlack || u >= kPi - kArcSlack;
  }
  double mid() const { return start + 0.5 * len; }
  IntervalUnion as_union() const { return IntervalUnion::arc(start, len); }
};

// Normal angle of the line through the origin spanned by v.
inline double theta_of(Vec2 v) { return std::atan2(v.y, v.x) + kPi / 2; }

// C_beta(apex): |component along axis| >= beta * |orthogonal component|.
struct Cone {
  Vec2 apex;
  double beta = 1.0;
  Angle axis{kPi / 2};

  Cone() = default;
  Cone(Vec2 x, double b, Angle a = Angle(kPi / 2)) : apex(x), beta(b), axis(a) {
    if (!(b > 0 && b <= 1)) throw ValidationError("cone", "beta must lie in (0, 1]");
  }

  bool contains(Vec2 p) const {
    const Vec2 v = p - apex;
    const Vec2 u = unit_vector(axis);
    return std::abs(v.dot(u)) >= beta * std::abs(v.cross(u));
  }

  // J(beta): normal angles theta with l_{0,theta} inside the cone.
  ThetaArc directions() const {
    const double half = std::atan(1.0 / beta);
    return {axis.value() + kPi / 2 - half, 2 * half};
  }
};

// Pieces (parameter intervals of s) of s inside the double wedge
// {x + v : theta_of(v) in arc} ∪ {x}, optionally intersected with B(x, r).
inline std::vector<Interval> clip_to_wedge(const Segment& s, Vec2 x, const ThetaArc& arc,
                                           double r = std::numeric_limits<double>::infinity()) {
  std::vector<double> cuts{0.0, 1.0};
  const Vec2 a = s.a() - x, d = s.b() - s.a();
  if (arc.len < kPi) {
    for (double psi : {arc.start - kPi / 2, arc.start + arc.len - kPi / 2}) {
      const Vec2 u = unit_vector(psi);
      const double den = u.cross(d);
      if (std::abs(den) > 1e-300) {
        const double t = -u.cross(a) / den;
        if (t > 0 && t < 1) cuts.push_back(t);
      }
    }
  }
  // Closest point to x; direction is monotone on either side of it.
  const double dd = d.dot(d);
  const double foot = -a.dot(d) / dd;
  if (foot > 0 && foot < 1) cuts.push_back(foot);
  if (std::isfinite(r)) {
    // b^2 - dd (|a|^2 - r^2) written without cancellation.
    const double b = a.dot(d), cr = a.cross(d);
    const double disc = dd * r * r - cr * cr;
    if (disc > 0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-b - sq) / dd, (-b + sq) / dd})
        if (t > 0 && t < 1) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    if (hi - lo <= 0) continue;
    const Vec2 v = a + d * (0.5 * (lo + hi));
    // A sliver around x itself carries no length.
    if (v.norm() > r || v.norm() <= geom_eps) continue;
    if (arc.contains(theta_of(v))) {
      if (!out.empty() && out.back().hi >= lo) out.back().hi = hi;
      else out.push_back({lo, hi});
    }
  }
  return out;
}

inline double wedge_mass(const SegmentSet& E, Vec2 x, const ThetaArc& arc, double r) {
  double m = 0.0;
  for (const auto& s : E.segments())
    for (const auto& iv : clip_to_wedge(s, x, arc, r)) m += (iv.hi - iv.lo) * s.length();
  return m;
}

inline double conical_mass(const SegmentSet& E, Vec2 x, double beta, double r, Angle axis = Angle(kPi / 2)) {
  if (!(r > 0)) throw ValidationError("conical_mass", "r must be positive");
  return wedge_mass(E, x, Cone(x, beta, axis).directions(), r);
}

namespace detail {

// E ∩ C(arc) cut into straight pieces, with H^1(piece ∩ B(x, r)) in closed form.
struct RadialMass {
  struct Piece {
    Vec2 a, d;  // relative to the apex; p(t) = a + t d, t in [0, 1]
    double len;
  };
  std::vector<Piece> pieces;

  RadialMass(const SegmentSet& E, Vec2 x, const ThetaArc& arc) {
    for (const auto& s : E.segments())
      for (const auto& iv : clip_to_wedge(s, x, arc)) {
        const Vec2 p = s.at(iv.lo) - x, q = s.at(iv.hi) - x;
        pieces.push_back({p, q - p, (q - p).norm()});
      }
  }

  double operator()(double r) const {
    double m = 0.0;
    for (const auto& p : pieces) {
      const double dd = p.d.dot(p.d), b = p.a.dot(p.d), cr = p.a.cross(p.d);
      const double disc = dd * r * r - cr * cr;
      if (disc <= 0) continue;
      const double sq = std::sqrt(disc);
      const double lo = std::max(0.0, (-b - sq) / dd), hi = std::min(1.0, (-b + sq) / dd);
      if (hi > lo) m += (hi - lo) * p.len;
    }
    return m;
  }

  std::vector<double> critical_radii() const {
    std::vector<double> r;
    for (const auto& p : pieces) {
      r.push_back(p.a.norm());
      r.push_back((p.a + p.d).norm());
      const double t = -p.a.dot(p.d) / p.d.dot(p.d);
      if (t > 0 && t < 1) r.push_back((p.a + p.d * t).norm());
    }
    std::sort(r.begin(), r.end());
    std::vector<double> out;
    for (double v : r)
      if (v > geom_eps && (out.empty() || v > out.back() * (1 + 1e-15))) out.push_back(v);
    return out;
  }
};

}  // namespace detail

struct DensityMaximum {
  double theta_star = 0.0;
  double radius = 0.0;  // a radius attaining theta_star within tol_density
};

inline DensityMaximum max_conical_density_at(const SegmentSet& E, Vec2 x, const ThetaArc& arc) {
  const detail::RadialMass mass(E, x, arc);
  const auto radii = mass.critical_radii();
  DensityMaximum best;
  auto consider = [&](double r) {
    const double g = mass(r) / r;
    if (g > best.theta_star) best = {g, r};
  };
  for (double r : radii) consider(r);
  // On (0, radii[0]] only pieces through x contribute, linearly in r, so the
  // ratio is constant there and already sampled at radii[0].
  const double phi = (std::sqrt(5.0) - 1) / 2;
  for (std::size_t i = 0; i + 1 < radii.size(); ++i) {
    double lo = radii[i], hi = radii[i + 1];
    auto g = [&](double r) { return mass(r) / r; };
    // Coarse scan first so golden-section starts near the largest interior bump.
    constexpr int kScan = 8;
    int arg = 0;
    double gmax = -1;
    for (int k = 1; k < kScan; ++k) {
      const double v = g(lo + (hi - lo) * k / kScan);
      if (v > gmax) { gmax = v; arg = k; }
    }
    const double a0 = lo + (hi - lo) * (arg - 1) / kScan, b0 = lo + (hi - lo) * (arg + 1) / kScan;
    double a = a0, b = b0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > tol_density * b) {
      if (gc >= gd) {
        b = d; d = c; gd = gc;
        c = b - phi * (b - a); gc = g(c);
      } else {
        a = c; c = d; gc = gd;
        d = a + phi * (b - a); gd = g(d);
      }
    }
    consider(0.5 * (a + b));
    consider(lo + (hi - lo) * arg / kScan);
  }
  return best;
}

inline DensityMaximum max_conical_density_arg(const SegmentSet& E, Vec2 x, double beta, Angle axis = Angle(kPi / 2)) {
  return max_conical_density_at(E, x, Cone(x, beta, axis).directions());
}

inline double max_conical_density(const SegmentSet& E, Vec2 x, double beta, Angle axis = Angle(kPi / 2)) {
  return max_conical_density_arg(E, x, beta, axis).theta_star;
}

inline IntervalUnion double_direction_set(Vec2 x, const SegmentSet& G) {
  IntervalUnion u(Domain::AngleCircle);
  for (const auto& s : G.segments()) u = u.unite(subtended_directions(x, s));
  u.canonicalize();
  return u;
}

struct CertifiedTube {
  double theta = 0.0;
  Tube tube;
  double interval_length = 0.0;  // |I| of the stopped dyadic interval
  double cone_mass = 0.0;        // H^1(E ∩ C(I) ∩ B(x, r))
  double tube_mass = 0.0;        // H^1(E ∩ T)
  double bound = 0.0;            // (1/4) theta_star H |I| r
  bool holds() const { return tube_mass >= bound; }
};

struct AlternativeOutcome {
  enum class Tag { A1, A2 } tag = Tag::A1;
  IntervalUnion I_x{Domain::AngleCircle};
  IntervalUnion J_x{Domain::AngleCircle};
  std::vector<CertifiedTube> tubes;
  double theta_star = 0.0;
  double radius = 0.0;
};

namespace detail {

// Dyadic sub-interval of J at `level`, index `idx`, in coordinates u = theta - J.start.
struct DyadicCell {
  int level;
  std::uint64_t idx;
  bool operator<(const DyadicCell& o) const { return level < o.level || (level == o.level && idx < o.idx); }
  bool operator==(const DyadicCell& o) const { return level == o.level && idx == o.idx; }
  DyadicCell parent() const { return {level - 1, idx >> 1}; }
  bool inside(const DyadicCell& o) const {
    return o.level <= level && (idx >> (level - o.level)) == o.idx;
  }
};

inline ThetaArc dyadic_arc(const ThetaArc& J, DyadicCell c) {
  const double len = std::ldexp(J.len, -c.level);
  return {J.start + len * static_cast<double>(c.idx), len};
}

inline constexpr int kMaxDyadicDepth = 40;

// Smallest-level-first cover of [u0, u1] subset of [0, |J|] by at most two cells.
inline void cover_component(double Jlen, double u0, double u1, std::vector<DyadicCell>& out) {
  const double L = std::max(u1 - u0, std::ldexp(Jlen, -kMaxDyadicDepth));
  int level = static_cast<int>(std::floor(std::log2(Jlen / L)));
  level = std::clamp(level, 0, kMaxDyadicDepth);
  while (level > 0 && std::ldexp(Jlen, -level) < L) --level;
  const double cell = std::ldexp(Jlen, -level);
  const std::uint64_t cap = (std::uint64_t{1} << level) - 1;
  auto index = [&](double u) { return std::min<std::uint64_t>(cap, static_cast<std::uint64_t>(std::max(0.0, std::floor(u / cell)))); };
  const std::uint64_t i0 = index(u0);
  std::uint64_t i1 = index(u1);
  if (i1 > i0 && u1 / cell == std::floor(u1 / cell)) --i1;
  for (std::uint64_t i = i0; i <= i1; ++i) out.push_back({level, i});
}

inline std::vector<DyadicCell> keep_maximal(std::vector<DyadicCell> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<DyadicCell> out;
  for (const auto& c : v) {
    bool nested = false;
    for (const auto& o : out)
      if (c.inside(o)) { nested = true; break; }
    if (!nested) out.push_back(c);
  }
  return out;
}

}  // namespace detail

// Either a set of directions of measure >= 1/H whose lines through x meet E
// twice (A1), or tubes through x each carrying mass >= (1/4) theta_star H w/2 (A2).
inline AlternativeOutcome besicovitch_alternative(const SegmentSet& E, Vec2 x, double beta, double H,
                                                  Angle axis = Angle(kPi / 2)) {
  if (!(H >= 1)) throw ValidationError("besicovitch_alternative", "H must be >= 1");
  const ThetaArc J = Cone(x, beta, axis).directions();
  const auto dm = max_conical_density_at(E, x, J);
  if (!(dm.theta_star > 0)) throw DegenerateInput("besicovitch_alternative", "maximal conical density vanishes at x");

  AlternativeOutcome out;
  out.theta_star = dm.theta_star;
  out.radius = dm.radius;

  // Lines through x meet a segment through x only at x (or contain it), so
  // only segments away from x contribute a second intersection.
  IntervalUnion ix(Domain::AngleCircle);
  for (const auto& s : E.segments())
    if (s.distance_to(x) > geom_eps) ix = ix.unite(subtended_directions(x, s));
  out.I_x = ix.intersect(J.as_union());
  if (out.I_x.measure() >= 1.0 / H) {
    out.tag = AlternativeOutcome::Tag::A1;
    return out;
  }

  out.tag = AlternativeOutcome::Tag::A2;
  const double r = dm.radius, th = dm.theta_star;
  // Directions of E ∩ C_beta(x, r) \ {x}, as intervals in u = theta - J.start.
  std::vector<detail::DyadicCell> cells;
  for (const auto& s : E.segments())
    for (const auto& iv : clip_to_wedge(s, x, J, r)) {
      const Vec2 p = s.at(iv.lo) - x, q = s.at(iv.hi) - x;
      double u0, u1;
      if (Segment(s.at(iv.lo), s.at(iv.hi)).distance_to(x) <= geom_eps) {
        const Vec2 v = p.norm() > q.norm() ? p : q;
        u0 = u1 = IntervalUnion::wrap(theta_of(v) - J.start);
      } else {
        const double a = IntervalUnion::wrap(theta_of(p) - J.start), b = IntervalUnion::wrap(theta_of(q) - J.start);
        u0 = std::min(a, b);
        u1 = std::max(a, b);
      }
      // Directions just below J.start wrap to ~pi; they belong at 0.
      if (u0 > J.len + kArcSlack) u0 = 0.0;
      if (u1 > J.len + kArcSlack) u1 = u0;
      detail::cover_component(J.len, std::min(u0, J.len), std::min(u1, J.len), cells);
    }
  cells = detail::keep_maximal(std::move(cells));

  std::vector<detail::DyadicCell> stopped;
  for (const auto& c : cells) {
    const ThetaArc I = detail::dyadic_arc(J, c);
    if (wedge_mass(E, x, I, r) < 0.25 * th * H * I.len * r) continue;
    detail::DyadicCell cur = c;
    while (cur.level > 0) {
      const ThetaArc Ic = detail::dyadic_arc(J, cur);
      if (wedge_mass(E, x, Ic, r) <= th * H * Ic.len * r) break;
      cur = cur.parent();
    }
    stopped.push_back(cur);
  }
  stopped = detail::keep_maximal(std::move(stopped));

  for (const auto& c : stopped) {
    const ThetaArc I = detail::dyadic_arc(J, c);
    CertifiedTube t;
    t.theta = Angle(I.mid()).value();
    t.tube = Tube{AffineLine::through(x, t.theta), 2 * I.len * r};
    t.interval_length = I.len;
    t.cone_mass = wedge_mass(E, x, I, r);
    t.tube_mass = length_in_tube(E, t.tube);
    t.bound = 0.25 * th * H * I.len * r;
    out.J_x = out.J_x.unite(I.as_union());
    out.tubes.push_back(t);
  }
  out.J_x.canonicalize();
  return out;
}

// Samples of E (cell centres, spacing <= step) with maximal conical density
// >= eps. Ordered by arclength.
inline WeightedCloud high_density_points(const SegmentSet& E, double beta, double eps, double step,
                                         Angle axis = Angle(kPi / 2)) {
  if (!(eps > 0)) throw ValidationError("high_density_points", "eps must be positive");
  WeightedCloud all = sample_cloud(E, step);
  std::vector<char> keep(all.size(), 0);
  parallel_for(all.size(), [&](std::size_t i) {
    keep[i] = max_conical_density(E, all.points[i].p, beta, axis) >= eps;
  });
  WeightedCloud out;
  for (std::size_t i = 0; i < all.size(); ++i)
    if (keep[i]) out.points.push_back(all.points[i]);
  return out;
}

struct DensityRow {
  double s, x, y, theta_star;
};

inline std::vector<DensityRow> density_profile(const SegmentSet& E, double beta, double step,
                                               Angle axis = Angle(kPi / 2)) {
  const WeightedCloud c = sample_cloud(E, step);
  std::vector<DensityRow> rows(c.size());
  parallel_for(c.size(), [&](std::size_t i) {
    const auto& q = c.points[i];
    rows[i] = {q.arclength, q.p.x, q.p.y, max_conical_density(E, q.p, beta, axis)};
  });
  return rows;
}

inline void write_density_csv(std::ostream& os, const std::vector<DensityRow>& rows) {
  os << "s,x,y,theta_star\n";
  os.precision(17);
  for (const auto& r : rows) os << r.s << ',' << r.x << ',' << r.y << ',' << r.theta_star << '\n';
}

}  // namespace favard
