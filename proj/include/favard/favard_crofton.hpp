// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <limits>
#include <cmath>
#include <ostream>
#include <vector>

#include "favard/geom_core.hpp"
#include "favard/quadrature.hpp"

namespace favard {

struct FavardReport {
  double favard = 0.0;
  double crofton = 0.0;
  double h1_length = 0.0;
  double defect = 0.0;  // 2 * h1_length - favard
  double quadrature_error_estimate = 0.0;
};

// Measure of a union of intervals. Sorts `iv` in place.
inline double union_measure(std::vector<Interval>& iv) {
  if (iv.empty()) return 0.0;
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  double total = 0.0, lo = iv[0].lo, hi = iv[0].hi;
  for (std::size_t i = 1; i < iv.size(); ++i) {
    if (iv[i].lo > hi) {
      total += hi - lo;
      lo = iv[i].lo;
      hi = iv[i].hi;
    } else if (iv[i].hi > hi) {
      hi = iv[i].hi;
    }
  }
  return total + (hi - lo);
}

namespace detail {
// Endpoint data cached so the per-angle work is a few multiply-adds. A
// polyline is connected, so its shadow is the single interval between its
// extreme vertex projections; only those intervals are sorted.
struct ProjectionKernel {
  std::vector<Vec2> a, b;
  std::vector<std::size_t> first;  // segments of polyline p are [first[p], first[p + 1])

  explicit ProjectionKernel(const SegmentSet& E) {
    a.reserve(E.size());
    b.reserve(E.size());
    for (std::size_t i = 0; i < E.size(); ++i) {
      if (i == 0 || E.polyline_of(i) != E.polyline_of(i - 1)) first.push_back(i);
      a.push_back(E.segments()[i].a());
      b.push_back(E.segments()[i].b());
    }
    first.push_back(E.size());
  }

  // Returns {H^1(pi_theta E), sum_i H^1(pi_theta S_i)}.
  std::array<double, 2> operator()(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    thread_local std::vector<Interval> iv;
    iv.clear();
    double sum = 0.0;
    for (std::size_t p = 0; p + 1 < first.size(); ++p) {
      Interval u{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
      for (std::size_t i = first[p]; i < first[p + 1]; ++i) {
        const double pa = a[i].x * c + a[i].y * s;
        const double pb = b[i].x * c + b[i].y * s;
        sum += std::abs(pb - pa);
        u.lo = std::min({u.lo, pa, pb});
        u.hi = std::max({u.hi, pa, pb});
      }
      iv.push_back(u);
    }
    return {union_measure(iv), sum};
  }
};
}  // namespace detail

inline double projection_measure(const SegmentSet& E, double theta) {
  return detail::ProjectionKernel(E)(theta)[0];
}

// Integrates {|pi_theta E|, sum_i |pi_theta S_i|} on shared nodes, refining
// until both components settle. Favard length and defect are read off the
// same run, so their sum is the quadrature of the sum of segment shadows.
inline QuadratureResultK<2> favard_integrals(const SegmentSet& E, const QuadratureConfig& q = {}) {
  const detail::ProjectionKernel k(E);
  return integrate_halving<2>(k, 0.0, kPi, q);
}

inline QuadratureResult favard_length(const SegmentSet& E, const QuadratureConfig& q = {}) {
  const auto r = favard_integrals(E, q);
  return {r.value[0], r.error_estimate[0], r.panels};
}

inline double crofton_integral(const SegmentSet& E) { return E.total_length(); }

// Crofton integral evaluated by quadrature: (1/2) sum_i int len_i |cos(theta - phi_i)|.
inline QuadratureResult crofton_integral_quadrature(const SegmentSet& E, const QuadratureConfig& q = {}) {
  const detail::ProjectionKernel k(E);
  auto r = integrate_angles([&](double t) { return k(t)[1]; }, q);
  r.value *= 0.5;
  r.error_estimate *= 0.5;
  return r;
}

// int_0^pi [sum_i |pi_theta S_i| - |pi_theta E|] dtheta, i.e. the integral of
// (#(E cap l) - 1) over lines meeting E.
inline QuadratureResult favard_defect(const SegmentSet& E, const QuadratureConfig& q = {}) {
  const auto r = favard_integrals(E, q);
  return {r.value[1] - r.value[0], r.error_estimate[0] + r.error_estimate[1], r.panels};
}

// Measure of the set of lines meeting E under d(theta) x dt.
inline QuadratureResult eta_measure_hitting(const SegmentSet& E, const QuadratureConfig& q = {}) {
  return favard_length(E, q);
}

inline FavardReport favard_report(const SegmentSet& E, const QuadratureConfig& q = {}) {
  const auto r = favard_length(E, q);
  FavardReport rep;
  rep.favard = r.value;
  rep.quadrature_error_estimate = r.error_estimate;
  rep.h1_length = E.total_length();
  rep.crofton = crofton_integral(E);
  rep.defect = 2.0 * rep.h1_length - rep.favard;
  return rep;
}

struct ProfileRow {
  double theta, projection_measure, multiplicity_excess;
};

inline std::vector<ProfileRow> favard_profile(const SegmentSet& E, int panels, int order = 8) {
  const detail::ProjectionKernel k(E);
  std::vector<ProfileRow> rows;
  for (double t : quadrature_nodes(panels, order)) {
    const auto v = k(t);
    rows.push_back({t, v[0], v[1] - v[0]});
  }
  return rows;
}

inline void write_profile_csv(std::ostream& os, const std::vector<ProfileRow>& rows) {
  os << "theta,projection_measure,multiplicity_excess\n";
  os.precision(17);
  for (const auto& r : rows) os << r.theta << ',' << r.projection_measure << ',' << r.multiplicity_excess << '\n';
}

}  // namespace favard
