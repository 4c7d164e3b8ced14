// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <queue>
#include <vector>

#include "favard/errors.hpp"
#include "favard/geom_core.hpp"
#include "favard/parallel.hpp"
#include "favard/quadrature.hpp"
#include "favard/rng.hpp"

namespace favard {

inline constexpr double tol_pair = 1e-6;

// Piecewise-linear curve parametrized by arclength.
class CurveWithTangents {
 public:
  struct Sample {
    double s;
    Vec2 point;
    Vec2 tangent;
  };

  CurveWithTangents() = default;
  explicit CurveWithTangents(const Segment& s) : pieces_{s}, starts_{0.0} { length_ = s.length(); }
  explicit CurveWithTangents(const Polyline& p) : pieces_(p.edges()) {
    for (const auto& e : pieces_) {
      starts_.push_back(length_);
      length_ += e.length();
    }
  }
  explicit CurveWithTangents(std::vector<Segment> segs) : pieces_(std::move(segs)) {
    for (const auto& e : pieces_) {
      starts_.push_back(length_);
      length_ += e.length();
    }
  }

  const std::vector<Segment>& pieces() const { return pieces_; }
  double length() const { return length_; }

  // n samples at piece-wise uniform arclength positions (cell centres).
  std::vector<Sample> samples(int n) const {
    std::vector<Sample> out;
    for (int i = 0; i < n; ++i) {
      const double s = length_ * (i + 0.5) / n;
      std::size_t k = std::upper_bound(starts_.begin(), starts_.end(), s) - starts_.begin() - 1;
      const Segment& e = pieces_[k];
      out.push_back({s, e.at((s - starts_[k]) / e.length()), e.unit_tangent()});
    }
    return out;
  }

  double distance_to(const CurveWithTangents& o) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& a : pieces_)
      for (const auto& b : o.pieces_) d = std::min(d, segment_distance(a, b));
    return d;
  }

  // Number of points where the line meets the curve (pieces counted once each).
  int crossings(const AffineLine& l) const {
    int c = 0;
    for (const auto& e : pieces_) {
      const double fa = l.signed_distance(e.a()), fb = l.signed_distance(e.b());
      if ((fa <= 0 && fb > 0) || (fa > 0 && fb <= 0)) ++c;
    }
    return c;
  }

  double max_norm() const {
    double r = 0.0;
    for (const auto& e : pieces_) r = std::max({r, e.a().norm(), e.b().norm()});
    return r;
  }

 private:
  std::vector<Segment> pieces_;
  std::vector<double> starts_;
  double length_ = 0.0;
};

// The theta in [0, pi) with pi_theta(x1) = pi_theta(x2).
inline Angle connecting_angle(Vec2 x1, Vec2 x2) {
  const Vec2 d = x2 - x1;
  if (d.norm() < geom_eps) throw DegeneratePair("connecting_angle", "points coincide");
  return Angle(std::atan2(d.y, d.x) + kPi / 2);
}

// |pi_theta(t1)| |pi_theta(t2)| / |x1 - x2| with theta the connecting angle.
inline double pair_jacobian(Vec2 x1, Vec2 t1, Vec2 x2, Vec2 t2) {
  const Vec2 d = x2 - x1;
  const double n = d.norm();
  // e_theta is d rotated by a quarter turn, so |t . e_theta| = |t x d| / |d|.
  return std::abs(t1.cross(d)) * std::abs(t2.cross(d)) / (n * n * n);
}

struct PairMeasureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int cells = 0;
};

namespace detail {

struct PairCell {
  int pair;
  double a1, b1, a2, b2;  // segment parameters in [0, 1]
  double value, err;
  std::uint64_t id;
};

}  // namespace detail

// Double integral of the pair Jacobian over G1 x G2 by adaptive tensor
// Gauss-Legendre cells. Each cell is compared against its four children and
// the worst cell is split until the summed error is below tol relative.
inline PairMeasureResult pair_line_measure_formula(const CurveWithTangents& G1, const CurveWithTangents& G2,
                                                   double tol = tol_pair, int max_cells = 400000) {
  const double dist = G1.distance_to(G2);
  if (dist < 10 * geom_eps) throw CurvesTooClose("pair_line_measure_formula", "curves are closer than 10*geom_eps");
  const GaussRule& g = gauss_rule(8);
  struct PairData {
    Segment s1, s2;
    Vec2 t1, t2;
  };
  std::vector<PairData> pairs;
  for (const auto& a : G1.pieces())
    for (const auto& b : G2.pieces()) pairs.push_back({a, b, a.unit_tangent(), b.unit_tangent()});

  auto rule = [&](int p, double a1, double b1, double a2, double b2) {
    const PairData& d = pairs[p];
    const double h1 = 0.5 * (b1 - a1), h2 = 0.5 * (b2 - a2);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
      const Vec2 x1 = d.s1.at(a1 + h1 * (g.x[i] + 1));
      double row = 0.0;
      for (std::size_t j = 0; j < g.x.size(); ++j)
        row += g.w[j] * pair_jacobian(x1, d.t1, d.s2.at(a2 + h2 * (g.x[j] + 1)), d.t2);
      sum += g.w[i] * row;
    }
    return sum * h1 * h2 * d.s1.length() * d.s2.length();
  };

  std::uint64_t next_id = 0;
  auto make = [&](int p, double a1, double b1, double a2, double b2) {
    const double coarse = rule(p, a1, b1, a2, b2);
    const double m1 = 0.5 * (a1 + b1), m2 = 0.5 * (a2 + b2);
    const double fine = rule(p, a1, m1, a2, m2) + rule(p, m1, b1, a2, m2) + rule(p, a1, m1, m2, b2) +
                        rule(p, m1, b1, m2, b2);
    return detail::PairCell{p, a1, b1, a2, b2, fine, std::abs(fine - coarse), next_id++};
  };
  auto worse = [](const detail::PairCell& x, const detail::PairCell& y) {
    return x.err < y.err || (x.err == y.err && x.id > y.id);
  };
  std::priority_queue<detail::PairCell, std::vector<detail::PairCell>, decltype(worse)> heap(worse);

  double total = 0.0, err = 0.0;
  for (int p = 0; p < static_cast<int>(pairs.size()); ++p) {
    // Start from cells no longer than the separation of the two pieces.
    const double sep = std::max(segment_distance(pairs[p].s1, pairs[p].s2), 1e-3);
    const int n1 = std::clamp(static_cast<int>(std::ceil(pairs[p].s1.length() / sep)), 1, 64);
    const int n2 = std::clamp(static_cast<int>(std::ceil(pairs[p].s2.length() / sep)), 1, 64);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) {
        auto c = make(p, double(i) / n1, double(i + 1) / n1, double(j) / n2, double(j + 1) / n2);
        total += c.value;
        err += c.err;
        heap.push(c);
      }
  }
  while (!heap.empty() && err > tol * std::abs(total)) {
    if (static_cast<int>(heap.size()) >= max_cells)
      throw QuadratureNotConverged("pair_line_measure_formula", "cell budget exhausted");
    const auto c = heap.top();
    heap.pop();
    total -= c.value;
    err -= c.err;
    const double m1 = 0.5 * (c.a1 + c.b1), m2 = 0.5 * (c.a2 + c.b2);
    for (const auto& k : {make(c.pair, c.a1, m1, c.a2, m2), make(c.pair, m1, c.b1, c.a2, m2),
                          make(c.pair, c.a1, m1, m2, c.b2), make(c.pair, m1, c.b1, m2, c.b2)}) {
      total += k.value;
      err += k.err;
      heap.push(k);
    }
  }
  // Re-sum in id order so the result does not carry the running-sum drift.
  std::vector<detail::PairCell> cells;
  cells.reserve(heap.size());
  while (!heap.empty()) {
    cells.push_back(heap.top());
    heap.pop();
  }
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  std::vector<double> vals, errs;
  for (const auto& c : cells) {
    vals.push_back(c.value);
    errs.push_back(c.err);
  }
  return {pairwise_sum(vals), pairwise_sum(errs), static_cast<int>(cells.size())};
}

// Measure of pi_theta(S1) ∩ pi_theta(S2).
inline double projection_overlap(const Segment& S1, const Segment& S2, double theta) {
  const Interval a = project_segment(S1, theta), b = project_segment(S2, theta);
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

// Each segment meets a line at most once, so the pair count on l_{theta,t} is
// the indicator of t lying in both projections.
inline QuadratureResult pair_line_measure_oracle(const Segment& S1, const Segment& S2, const QuadratureConfig& q = {}) {
  return integrate_angles([&](double th) { return projection_overlap(S1, S2, th); }, q);
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
  double t_min = 0.0, t_max = 0.0;
};

inline constexpr int kMonteCarloShards = 64;

// Lines drawn uniformly from [0, pi) x [t_min, t_max]; each contributes the
// number of (point on G1, point on G2) pairs it carries.
inline MonteCarloEstimate monte_carlo_pair_measure(const CurveWithTangents& G1, const CurveWithTangents& G2,
                                                   std::int64_t n, std::uint64_t seed) {
  if (n < 10000) throw ValidationError("monte_carlo_pair_measure", "n must be at least 1e4");
  const double R = std::max(G1.max_norm(), G2.max_norm());
  MonteCarloEstimate out;
  out.t_min = -R - 0.01;
  out.t_max = R + 0.01;
  const double area = kPi * (out.t_max - out.t_min);
  std::vector<double> sum(kMonteCarloShards), sum_sq(kMonteCarloShards);
  parallel_for(kMonteCarloShards, [&](std::size_t k) {
    Rng rng(seed, k);
    const std::int64_t lo = n * static_cast<std::int64_t>(k) / kMonteCarloShards;
    const std::int64_t hi = n * static_cast<std::int64_t>(k + 1) / kMonteCarloShards;
    double s = 0.0, s2 = 0.0;
    for (std::int64_t i = lo; i < hi; ++i) {
      const AffineLine l{Angle(rng.uniform(0, kPi)), rng.uniform(out.t_min, out.t_max)};
      const double c = static_cast<double>(G1.crossings(l)) * G2.crossings(l);
      s += c;
      s2 += c * c;
    }
    sum[k] = s;
    sum_sq[k] = s2;
  });
  const double mean = pairwise_sum(sum) / static_cast<double>(n);
  const double var = std::max(0.0, pairwise_sum(sum_sq) / static_cast<double>(n) - mean * mean);
  out.estimate = area * mean;
  out.stderr_ = area * std::sqrt(var / static_cast<double>(n));
  return out;
}

struct OverlapRow {
  double theta, overlap_measure;
};

inline std::vector<OverlapRow> overlap_profile(const Segment& S1, const Segment& S2, int panels, int order = 8) {
  std::vector<OverlapRow> rows;
  for (double t : quadrature_nodes(panels, order)) rows.push_back({t, projection_overlap(S1, S2, t)});
  return rows;
}

inline void write_overlap_csv(std::ostream& os, const std::vector<OverlapRow>& rows) {
  os << "theta,overlap_measure\n";
  os.precision(17);
  for (const auto& r : rows) os << r.theta << ',' << r.overlap_measure << '\n';
}

}  // namespace favard
