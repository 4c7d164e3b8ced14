// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "favard/graph_extract.hpp"
#include "support.hpp"

using namespace favard;
namespace ft = favard::testing;

namespace {

WeightedCloud cloud_of(std::vector<Vec2> pts) {
  WeightedCloud c;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CloudPoint q;
    q.p = pts[i];
    q.weight = 1.0;
    q.arclength = static_cast<double>(i);
    c.points.push_back(q);
  }
  return c;
}

// Random alpha-Lipschitz polyline over the horizontal axis.
SegmentSet lipschitz_polyline(Rng& rng, double alpha, int n = 12) {
  std::vector<Vec2> v{{-0.9, 0}};
  for (int i = 1; i <= n; ++i) v.push_back({-0.9 + 1.8 * i / n, v.back().y + rng.uniform(-alpha, alpha) * 1.8 / n});
  return SegmentSet({Polyline(v)});
}

// Indices with a partner y != x satisfying |dy| >= b |dx| (vertical axis).
std::set<std::size_t> brute_bad(const WeightedCloud& c, double b) {
  std::set<std::size_t> out;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (i == j) continue;
      const Vec2 d = c.points[j].p - c.points[i].p;
      if (std::abs(d.y) >= b * std::abs(d.x)) {
        out.insert(i);
        break;
      }
    }
  return out;
}

std::set<double> arclengths(const WeightedCloud& c) {
  std::set<double> s;
  for (const auto& q : c.points) s.insert(q.arclength);
  return s;
}

void expect_extension_lipschitz(const GraphCover& g) {
  const auto& e = g.extension;
  std::vector<double> f(e.t.size());
  for (std::size_t i = 0; i < e.t.size(); ++i) {
    f[i] = e(e.t[i]);
    EXPECT_EQ(f[i], e.h[i]);
  }
  for (std::size_t i = 0; i < f.size(); ++i)
    for (std::size_t j = i + 1; j < f.size(); ++j)
      ASSERT_LE(std::abs(f[i] - f[j]), e.L * std::abs(e.t[i] - e.t[j]) * (1 + 1e-12) + 1e-15);
}

}  // namespace

TEST(ConeCondition, Examples) {
  Rng rng(51);
  const auto E = lipschitz_polyline(rng, 0.1);
  const auto c = sample_cloud(E, 1.8 / 100);
  EXPECT_TRUE(cone_condition_check(c, 0.3).ok);
  const auto stacked = cone_condition_check(cloud_of({{0, 0}, {0, 1}}), 0.9);
  EXPECT_FALSE(stacked.ok);
  ASSERT_EQ(stacked.violations.size(), 1u);
  EXPECT_TRUE(cone_condition_check(cloud_of({{0.3, 0.2}}), 0.5).ok);
}

TEST(ConeCondition, ViolationsAreExhaustive) {
  Rng rng(52);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec2> pts;
    for (int i = 0; i < 60; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const auto c = cloud_of(pts);
    const double beta = rng.uniform(0.2, 3.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (std::abs(pts[j].y - pts[i].y) >= beta * std::abs(pts[j].x - pts[i].x)) ++count;
    EXPECT_EQ(cone_condition_check(c, beta).violations.size(), count);
  }
}

TEST(TwoConesExtract, LipschitzGraphIsKeptWhole) {
  Rng rng(53);
  const auto E = lipschitz_polyline(rng, 0.05);
  const auto c = sample_cloud(E, 0.01);
  const auto g = two_cones_extract(c, 0.05, 0.1);
  EXPECT_TRUE(g.removed.empty());
  EXPECT_EQ(g.graph_points.size(), c.size());
  EXPECT_DOUBLE_EQ(g.lipschitz_constant, 0.1);
  expect_extension_lipschitz(g);
}

TEST(TwoConesExtract, OffsetParallelSegmentsMatchBruteForce) {
  const double h = 0.1, beta = 0.5, step = 0.001;
  const auto E = SegmentSet::from_segments({Segment({-0.9, 0}, {0.1, 0}), Segment({0.15, h}, {0.9, h})});
  const auto c = sample_cloud(E, step);
  const auto g = two_cones_extract(c, beta, 0.1);
  const auto bad = brute_bad(c, 2 * beta);
  EXPECT_EQ(g.removed.size(), bad.size());
  std::set<double> expect;
  for (auto i : bad) expect.insert(c.points[i].arclength);
  EXPECT_EQ(arclengths(g.removed), expect);
  // Points within horizontal distance h / (2 beta) = 0.1 of the other span:
  // [0.05, 0.1] below and [0.15, 0.2] above.
  EXPECT_NEAR(g.removed_mass(), 0.1, 2 * step);
  EXPECT_TRUE(cone_condition_check(g.graph_points, 2 * beta).ok);
  expect_extension_lipschitz(g);
}

TEST(TwoConesExtract, SinglePointAndEmpty) {
  const auto c = cloud_of({{0.1, 0.2}});
  const auto g = two_cones_extract(c, 0.3, 0.1);
  EXPECT_EQ(g.graph_points.size(), 1u);
  EXPECT_THROW(two_cones_extract(WeightedCloud{}, 0.3, 0.1), EmptyResult);
  EXPECT_THROW(two_cones_extract(cloud_of({{0, 0}, {0, 1}}), 0.3, 0.1), EmptyResult);
}

TEST(TwoConesExtract, RandomCloudsSoundAndMonotoneInBeta) {
  Rng rng(54);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec2> pts;
    const int n = 20 + static_cast<int>(rng.below(80));
    for (int i = 0; i < n; ++i) pts.push_back({rng.uniform(-1, 1), rng.uniform(-0.2, 0.2)});
    const auto c = cloud_of(pts);
    std::set<double> prev;
    bool first = true;
    for (double beta : {0.02, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      GraphCover g;
      try {
        g = two_cones_extract(c, beta, 0.1);
      } catch (const EmptyResult&) {
        // All points removed: B is the whole cloud.
        EXPECT_TRUE(first || prev.size() == c.size());
        prev = arclengths(c);
        first = false;
        continue;
      }
      EXPECT_TRUE(cone_condition_check(g.graph_points, 2 * beta).ok);
      EXPECT_EQ(g.removed.size(), brute_bad(c, 2 * beta).size());
      EXPECT_EQ(g.removed_mass(), static_cast<double>(g.removed.size()));
      expect_extension_lipschitz(g);
      const auto cur = arclengths(g.removed);
      if (!first) EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end())) << trial;
      prev = cur;
      first = false;
    }
  }
}

TEST(CoverBySingleGraph, LipschitzPolylineFullyCovered) {
  Rng rng(55);
  AnalysisConfig cfg;
  const double alpha = 0.02;
  const auto E = lipschitz_polyline(rng, alpha);
  const auto g = cover_by_single_graph(E, alpha, 0.1, Angle(0.0), cfg);
  EXPECT_EQ(g.removed_mass(), 0.0);
  EXPECT_NEAR(g.graph_points.total_mass(), E.total_length(), 1e-12);
  EXPECT_DOUBLE_EQ(g.lipschitz_constant, cfg.C_lip * alpha);
  EXPECT_TRUE(cone_condition_check(g.graph_points, g.lipschitz_constant).ok);
}

TEST(CoverBySingleGraph, NearlyCollinearSegmentsFitOneGraph) {
  AnalysisConfig cfg;
  const auto E = SegmentSet::from_segments({Segment({-0.9, 0}, {-0.05, 0.001}), Segment({0.05, 0.002}, {0.9, 0.0})});
  const auto g = cover_by_single_graph(E, 0.01, 0.1, Angle(0.0), cfg);
  EXPECT_EQ(g.removed_mass(), 0.0);
  EXPECT_TRUE(cone_condition_check(g.graph_points, g.lipschitz_constant).ok);
  EXPECT_TRUE(brute_bad(g.graph_points, g.lipschitz_constant).empty());
}

TEST(CoverBySingleGraph, StackedSegmentsLoseTheShadowedPart) {
  AnalysisConfig cfg;
  cfg.sample_step = 0.005;
  const double alpha = 0.01;
  const auto E = SegmentSet::from_segments({Segment({-0.9, 0}, {0.9, 0}), Segment({-0.9, 0.05}, {-0.4, 0.05})});
  const auto g = cover_by_single_graph(E, alpha, 0.1, Angle(0.0), cfg);
  EXPECT_GE(g.removed_mass(), 0.5 - 1e-12);
  EXPECT_TRUE(cone_condition_check(g.graph_points, g.lipschitz_constant).ok);
  EXPECT_NEAR(g.total_mass(), E.total_length(), 1e-12);
  // Independent oracle for the high-density filter: a point is dense iff the
  // short segment enters its C_beta cone, i.e. |dx| <= h / beta of its span.
  const double beta = cfg.C_lip * alpha / 2;
  for (const auto& q : g.graph_points.points) EXPECT_TRUE(q.p.y == 0.0 && q.p.x > -0.4 + 0.05 / beta - cfg.sample_step);
}

TEST(CoverBySingleGraph, RejectsSteepEdges) {
  AnalysisConfig cfg;
  EXPECT_THROW(cover_by_single_graph(ft::plus_sign(), 0.01, 0.1, Angle(0.0), cfg), AssumptionViolated);
  EXPECT_THROW(cover_by_single_graph(ft::unit_segment(), 0.3, 0.1, Angle(0.0), cfg), AssumptionViolated);
}

TEST(Coarea, Examples) {
  GraphCover g;
  g.graph_points = sample_cloud(ft::unit_segment(), 0.01);
  auto s = coarea_check(g, 0.0);
  EXPECT_NEAR(s.lhs, 1.0, 1e-12);
  EXPECT_NEAR(s.rhs, 1.0, 1e-12);

  const double a = 0.05;
  g.graph_points = sample_cloud(SegmentSet::from_segments({Segment({0, 0}, {0.8, 0.8 * a})}), 0.01);
  s = coarea_check(g, a);
  EXPECT_NEAR(s.lhs, std::sqrt(1 + a * a) * 0.8, 1e-12);
  EXPECT_NEAR(s.rhs, std::sqrt(1 + a * a) * 0.8, 1e-12);

  g.graph_points = sample_cloud(SegmentSet::from_segments({Segment({0, 0}, {1, 0}), Segment({0, 0.5}, {1, 0.5})}), 0.01);
  s = coarea_check(g, 0.0);
  EXPECT_NEAR(s.lhs, 2.0, 1e-12);
  EXPECT_NEAR(s.rhs, 2.0, 1e-12);
}

TEST(Coarea, InequalityHoldsForRandomDecompositions) {
  Rng rng(56);
  AnalysisConfig cfg;
  for (int trial = 0; trial < 10; ++trial) {
    const double alpha = rng.uniform(0.005, 0.05);
    const auto E = lipschitz_polyline(rng, alpha);
    const auto g = cover_by_single_graph(E, alpha, 0.1, Angle(0.0), cfg);
    const auto s = coarea_check(g, alpha);
    EXPECT_LE(s.lhs, s.rhs + 1e-12);
  }
}

TEST(MinimalGraphConstant, BentSegment) {
  for (double t : {0.4, 0.1, 0.025}) {
    const auto c = sample_cloud(ft::bent_segment(t), 0.01);
    const auto m = minimal_graph_constant(c);
    EXPECT_NEAR(m.constant, std::tan(t / 2), 1e-9) << t;
    EXPECT_LT(angle_distance(m.base, 0.0), 1e-9);
    // Cross-check with the cone extraction over the returned base.
    const Angle axis(m.base + kPi / 2);
    EXPECT_TRUE(two_cones_extract(c, m.constant * 1.001 / 2, 0.1, axis).removed.empty());
    // Slightly narrower: chords inside each arm now sit in each other's cones.
    bool removed_some = true;
    try {
      removed_some = !two_cones_extract(c, m.constant * 0.999 / 2, 0.1, axis).removed.empty();
    } catch (const EmptyResult&) {
    }
    EXPECT_TRUE(removed_some);
  }
  EXPECT_NEAR(minimal_graph_constant(sample_cloud(ft::unit_segment(), 0.1)).constant, 0.0, 1e-12);
}

TEST(CoverCsv, Header) {
  std::ostringstream os;
  GraphCover g;
  write_cover_csv(os, {g});
  EXPECT_EQ(os.str().rfind("beta,eps,total_mass,removed_mass,lipschitz_constant\n", 0), 0u);
}
