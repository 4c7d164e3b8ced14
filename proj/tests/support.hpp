// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and independent reference computations for the test suites.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "favard/geom_core.hpp"
#include "favard/rng.hpp"

namespace favard::testing {

inline SegmentSet unit_segment() { return SegmentSet::from_segments({Segment({0, 0}, {1, 0})}); }

// Two unit segments crossing at their midpoints.
inline SegmentSet plus_sign() {
  return SegmentSet::from_segments({Segment({-0.5, 0}, {0.5, 0}), Segment({0, -0.5}, {0, 0.5})});
}

// Unit-length polyline with one vertex at the origin; the arms meet at
// interior angle pi - t.
inline SegmentSet bent_segment(double t) {
  const Vec2 l = unit_vector(kPi - t / 2) * 0.5;
  const Vec2 r = unit_vector(t / 2) * 0.5;
  return SegmentSet({Polyline({l, {0, 0}, r})});
}

// Up to max_segments random segments inside B(1).
inline SegmentSet random_segment_set(Rng& rng, int max_segments = 50) {
  const int n = 1 + static_cast<int>(rng.below(max_segments));
  std::vector<Segment> segs;
  auto in_disk = [&] {
    while (true) {
      Vec2 p{rng.uniform(-1, 1), rng.uniform(-1, 1)};
      if (p.norm() <= 0.999) return p;
    }
  };
  while (static_cast<int>(segs.size()) < n) {
    Vec2 a = in_disk(), b = in_disk();
    if ((b - a).norm() < 1e-3) continue;
    segs.emplace_back(a, b);
  }
  return SegmentSet::from_segments(segs, 1.0);
}

// Exact Favard-type integrals by splitting [0, pi] at every angle where two
// endpoint projections coincide. Between breakpoints the union of projected
// intervals has fixed combinatorics, so its measure is V . (cos, sin) for a
// constant vector V and integrates in closed form.
struct ExactAngleIntegrals {
  double favard = 0.0;
  double sum_projections = 0.0;
};

inline ExactAngleIntegrals exact_angle_integrals(const SegmentSet& E) {
  std::vector<Vec2> pts;
  for (const auto& s : E.segments()) {
    pts.push_back(s.a());
    pts.push_back(s.b());
  }
  std::vector<double> brk{0.0, kPi};
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec2 d = pts[j] - pts[i];
      if (d.norm() < 1e-14) continue;
      double th = std::atan2(d.y, d.x) + kPi / 2;
      th = std::fmod(th, kPi);
      if (th < 0) th += kPi;
      brk.push_back(th);
    }
  std::sort(brk.begin(), brk.end());
  ExactAngleIntegrals out;
  struct End {
    double v;
    Vec2 p;
  };
  for (std::size_t k = 0; k + 1 < brk.size(); ++k) {
    const double t0 = brk[k], t1 = brk[k + 1];
    if (t1 - t0 <= 0) continue;
    const double tm = 0.5 * (t0 + t1);
    const Vec2 n = unit_vector(tm);
    std::vector<std::pair<End, End>> iv;
    Vec2 vsum{0, 0};
    for (const auto& s : E.segments()) {
      End ea{s.a().dot(n), s.a()}, eb{s.b().dot(n), s.b()};
      if (ea.v > eb.v) std::swap(ea, eb);
      iv.push_back({ea, eb});
      vsum = vsum + (eb.p - ea.p);
    }
    std::sort(iv.begin(), iv.end(), [](const auto& a, const auto& b) { return a.first.v < b.first.v; });
    Vec2 vu{0, 0};
    if (!iv.empty()) {
      End lo = iv[0].first, hi = iv[0].second;
      for (std::size_t i = 1; i < iv.size(); ++i) {
        if (iv[i].first.v > hi.v) {
          vu = vu + (hi.p - lo.p);
          lo = iv[i].first;
          hi = iv[i].second;
        } else if (iv[i].second.v > hi.v) {
          hi = iv[i].second;
        }
      }
      vu = vu + (hi.p - lo.p);
    }
    auto integ = [&](Vec2 V) { return V.x * (std::sin(t1) - std::sin(t0)) - V.y * (std::cos(t1) - std::cos(t0)); };
    out.favard += integ(vu);
    out.sum_projections += integ(vsum);
  }
  return out;
}

// Midpoint rule on a dense theta grid with a direct interval sweep.
inline double dense_grid_favard(const SegmentSet& E, int n_theta) {
  double acc = 0.0;
  for (int k = 0; k < n_theta; ++k) {
    const double th = (k + 0.5) * kPi / n_theta;
    std::vector<Interval> iv;
    for (const auto& s : E.segments()) iv.push_back(project_segment(s, th));
    std::sort(iv.begin(), iv.end(), [](auto a, auto b) { return a.lo < b.lo; });
    double m = 0, lo = 0, hi = 0;
    bool open = false;
    for (const auto& v : iv) {
      if (!open) { lo = v.lo; hi = v.hi; open = true; }
      else if (v.lo > hi) { m += hi - lo; lo = v.lo; hi = v.hi; }
      else hi = std::max(hi, v.hi);
    }
    if (open) m += hi - lo;
    acc += m;
  }
  return acc * kPi / n_theta;
}

}  // namespace favard::testing
