// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <utility>
#include <vector>

#include "favard/cloud.hpp"
#include "favard/conical_density.hpp"
#include "favard/config.hpp"
#include "favard/errors.hpp"
#include "favard/geom_core.hpp"
#include "favard/parallel.hpp"

namespace favard {

// y in C_beta(x) for any beta > 0 (no upper bound, unlike Cone).
inline bool in_cone(Vec2 x, Vec2 y, double beta, Angle axis) {
  const Vec2 v = y - x, u = unit_vector(axis);
  return std::abs(v.dot(u)) >= beta * std::abs(v.cross(u));
}

struct ConeCheck {
  bool ok = true;
  std::vector<std::pair<std::size_t, std::size_t>> violations;  // i < j
};

inline ConeCheck cone_condition_check(const WeightedCloud& c, double beta, Angle axis = Angle(kPi / 2)) {
  if (!(beta > 0)) throw ValidationError("cone_condition_check", "beta must be positive");
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> rows(c.size());
  parallel_for(c.size(), [&](std::size_t i) {
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (in_cone(c.points[i].p, c.points[j].p, beta, axis)) rows[i].push_back({i, j});
  });
  ConeCheck out;
  for (auto& r : rows) out.violations.insert(out.violations.end(), r.begin(), r.end());
  out.ok = out.violations.empty();
  return out;
}

// Lipschitz extension f(t) = min_i (h_i + L |t - t_i|) of heights h_i given
// at base coordinates t_i.
struct McShaneExtension {
  double L = 0.0;
  std::vector<double> t, h;  // sorted by t

  double operator()(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < t.size(); ++i) best = std::min(best, h[i] + L * std::abs(x - t[i]));
    return best;
  }
};

struct GraphCover {
  WeightedCloud graph_points;
  WeightedCloud removed;
  double removed_high_density_mass = 0.0;  // part of `removed` dropped before extraction
  double lipschitz_constant = 0.0;
  Angle base_line_angle;  // direction of the base line L
  McShaneExtension extension;
  double beta = 0.0;
  double eps = 0.0;

  double total_mass() const { return graph_points.total_mass() + removed.total_mass(); }
  double removed_mass() const { return removed.total_mass(); }
  Angle axis() const { return Angle(base_line_angle + kPi / 2); }
};

// Base coordinate and height of p for a base line of direction `base`.
inline std::pair<double, double> base_coordinates(Vec2 p, Angle base) {
  const Vec2 b = unit_vector(base);
  return {p.dot(b), b.cross(p)};
}

// Removes every point having another point in its 2*beta cone; the rest is a
// (2 beta)-Lipschitz graph over the line perpendicular to `axis`.
inline GraphCover two_cones_extract(const WeightedCloud& cloud, double beta, double eps, Angle axis = Angle(kPi / 2)) {
  if (!(beta > 0)) throw ValidationError("two_cones_extract", "beta must be positive");
  if (cloud.empty()) throw EmptyResult("two_cones_extract", "empty cloud");
  const double b2 = 2 * beta;
  std::vector<char> bad(cloud.size(), 0);
  parallel_for(cloud.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < cloud.size(); ++j)
      if (j != i && in_cone(cloud.points[i].p, cloud.points[j].p, b2, axis)) {
        bad[i] = 1;
        break;
      }
  });
  GraphCover g;
  g.beta = beta;
  g.eps = eps;
  g.lipschitz_constant = b2;
  g.base_line_angle = Angle(axis - kPi / 2);
  for (std::size_t i = 0; i < cloud.size(); ++i) (bad[i] ? g.removed : g.graph_points).points.push_back(cloud.points[i]);
  if (g.graph_points.empty()) throw EmptyResult("two_cones_extract", "every point has a cone partner");
  if (!cone_condition_check(g.graph_points, b2, axis).ok)
    throw Error("two_cones_extract", "internal: extracted set violates the cone condition");

  std::vector<std::pair<double, double>> th;
  for (const auto& q : g.graph_points.points) th.push_back(base_coordinates(q.p, g.base_line_angle));
  std::sort(th.begin(), th.end());
  g.extension.L = b2;
  for (const auto& [t, h] : th) {
    g.extension.t.push_back(t);
    g.extension.h.push_back(h);
  }
  return g;
}

// Largest angle between any edge of E and the base line, over pi/2.
inline double max_edge_angle(const SegmentSet& E, Angle base) {
  double m = 0.0;
  for (const auto& s : E.segments()) m = std::max(m, angle_distance(s.direction_angle(), base));
  return m;
}

// Single C_lip * alpha Lipschitz graph over `base` covering all but the
// high-density and two-cone bad parts of E.
inline GraphCover cover_by_single_graph(const SegmentSet& E, double alpha, double eps, Angle base,
                                        const AnalysisConfig& cfg) {
  if (max_edge_angle(E, base) > std::atan(alpha) + geom_eps)
    throw AssumptionViolated("cover_by_single_graph", "an edge is steeper than atan(alpha) over the base line");
  const double beta = cfg.C_lip * alpha / 2;
  if (beta > 1) throw AssumptionViolated("cover_by_single_graph", "C_lip * alpha / 2 exceeds 1");
  const double eps1 = alpha * eps / cfg.C_pipeline;
  const Angle axis(base + kPi / 2);
  const double step = cfg.step_for(E);
  const WeightedCloud all = sample_cloud(E, step);
  std::vector<char> dense(all.size(), 0);
  parallel_for(all.size(), [&](std::size_t i) { dense[i] = max_conical_density(E, all.points[i].p, beta, axis) >= eps1; });
  WeightedCloud low, high;
  for (std::size_t i = 0; i < all.size(); ++i) (dense[i] ? high : low).points.push_back(all.points[i]);
  GraphCover g = two_cones_extract(low, beta, eps1, axis);
  g.removed_high_density_mass = high.total_mass();
  g.removed.points.insert(g.removed.points.end(), high.points.begin(), high.points.end());
  std::sort(g.removed.points.begin(), g.removed.points.end(),
            [](const CloudPoint& a, const CloudPoint& b) { return a.arclength < b.arclength; });
  g.eps = eps;
  return g;
}

struct CoareaSides {
  double lhs = 0.0;  // H^1 of the covered set
  double rhs = 0.0;  // sqrt(1 + alpha^2) * integral of the base-line multiplicity
};

inline CoareaSides coarea_check(const GraphCover& cover, double alpha) {
  const Vec2 b = unit_vector(cover.base_line_angle);
  CoareaSides s;
  double proj = 0.0;
  for (const auto& q : cover.graph_points.points) {
    s.lhs += q.weight;
    proj += q.weight * std::abs(q.tangent.dot(b));
  }
  s.rhs = std::sqrt(1 + alpha * alpha) * proj;
  return s;
}

// Smallest L such that some line carries the whole cloud as an L-Lipschitz
// graph: tan of half the shortest arc holding every chord direction.
struct MinimalGraph {
  double constant = 0.0;
  Angle base;
};

inline MinimalGraph minimal_graph_constant(const WeightedCloud& c) {
  std::vector<double> ang;
  ang.reserve(c.size() * (c.size() - (c.size() > 0)) / 2);
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      const Vec2 d = c.points[j].p - c.points[i].p;
      if (d.norm() > geom_eps) ang.push_back(Angle(std::atan2(d.y, d.x)).value());
    }
  if (ang.empty()) return {0.0, Angle(0.0)};
  std::sort(ang.begin(), ang.end());
  double gap = ang.front() + kPi - ang.back();
  double gap_end = ang.front();  // the largest gap ends here
  for (std::size_t i = 1; i < ang.size(); ++i)
    if (ang[i] - ang[i - 1] > gap) {
      gap = ang[i] - ang[i - 1];
      gap_end = ang[i];
    }
  const double arc = kPi - gap;
  return {std::tan(arc / 2), Angle(gap_end + arc / 2)};
}

inline void write_cover_csv(std::ostream& os, const std::vector<GraphCover>& covers) {
  os << "beta,eps,total_mass,removed_mass,lipschitz_constant\n";
  os.precision(17);
  for (const auto& g : covers)
    os << g.beta << ',' << g.eps << ',' << g.total_mass() << ',' << g.removed_mass() << ',' << g.lipschitz_constant
       << '\n';
}

}  // namespace favard
