// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "favard/geom_core.hpp"

namespace favard {

// One sample of a segment set. The sample stands for the arclength cell
// [s0, s1] (segment parameters in [0, 1]) of segment `segment`; `weight` is
// the cell length.
struct CloudPoint {
  Vec2 p;
  double weight = 0.0;
  int segment = -1;
  double s0 = 0.0, s1 = 0.0;
  Vec2 tangent;
  double arclength = 0.0;  // position of the sample along the whole set
};

struct WeightedCloud {
  std::vector<CloudPoint> points;

  double total_mass() const {
    double m = 0.0;
    for (const auto& q : points) m += q.weight;
    return m;
  }
  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Cell-centre samples at arclength spacing <= step; weights sum to H^1(E).
inline WeightedCloud sample_cloud(const SegmentSet& E, double step) {
  if (!(step > 0)) throw ValidationError("sample_cloud", "step must be positive");
  WeightedCloud c;
  double run = 0.0;
  for (std::size_t i = 0; i < E.segments().size(); ++i) {
    const Segment& s = E.segments()[i];
    const int n = std::max(1, static_cast<int>(std::ceil(s.length() / step - 1e-9)));
    const double w = s.length() / n;
    for (int k = 0; k < n; ++k) {
      CloudPoint q;
      q.s0 = static_cast<double>(k) / n;
      q.s1 = static_cast<double>(k + 1) / n;
      q.p = s.at(0.5 * (q.s0 + q.s1));
      q.weight = w;
      q.segment = static_cast<int>(i);
      q.tangent = s.unit_tangent();
      q.arclength = run + (k + 0.5) * w;
      c.points.push_back(q);
    }
    run += s.length();
  }
  return c;
}

// Merges the cells of a cloud back into maximal segment pieces.
inline std::vector<Segment> cloud_pieces(const WeightedCloud& c, const SegmentSet& E) {
  std::vector<Segment> out;
  std::vector<CloudPoint> pts = c.points;
  std::sort(pts.begin(), pts.end(), [](const CloudPoint& a, const CloudPoint& b) {
    return a.segment < b.segment || (a.segment == b.segment && a.s0 < b.s0);
  });
  for (std::size_t i = 0; i < pts.size();) {
    std::size_t j = i;
    double hi = pts[i].s1;
    while (j + 1 < pts.size() && pts[j + 1].segment == pts[i].segment && std::abs(pts[j + 1].s0 - hi) < 1e-12) {
      ++j;
      hi = pts[j].s1;
    }
    const Segment& s = E.segments()[pts[i].segment];
    out.emplace_back(s.at(pts[i].s0), s.at(hi));
    i = j + 1;
  }
  return out;
}

}  // namespace favard
