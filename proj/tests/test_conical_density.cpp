// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "favard/conical_density.hpp"
#include "favard/rng.hpp"
#include "support.hpp"

using namespace favard;
namespace ft = favard::testing;

namespace {

SegmentSet vertical_unit() { return SegmentSet::from_segments({Segment({0, -0.5}, {0, 0.5})}); }

// Midpoint-rule mass of E ∩ C_beta(x, r), using only the cone predicate.
double brute_conical_mass(const SegmentSet& E, Vec2 x, double beta, double r, int n = 20000) {
  const Cone C(x, beta);
  double m = 0.0;
  for (const auto& s : E.segments())
    for (int i = 0; i < n; ++i) {
      const Vec2 p = s.at((i + 0.5) / n);
      if ((p - x).norm() <= r && C.contains(p)) m += s.length() / n;
    }
  return m;
}

// Maximum of exact mass(r)/r over a log-spaced radius grid.
double grid_density(const SegmentSet& E, Vec2 x, double beta, int n = 4000) {
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = std::exp(std::log(1e-4) + (std::log(4.0) - std::log(1e-4)) * i / (n - 1));
    best = std::max(best, conical_mass(E, x, beta, r) / r);
  }
  return best;
}

}  // namespace

TEST(Cone, MembershipAndDirections) {
  const Cone C({0, 0}, 0.5);
  EXPECT_TRUE(C.contains({0, 1}));
  EXPECT_TRUE(C.contains({1, 0.5}));
  EXPECT_FALSE(C.contains({1, 0.49}));
  const ThetaArc J = C.directions();
  EXPECT_NEAR(J.len, 2 * std::atan(2.0), 1e-15);
  // theta = 0 is the vertical line; theta = pi/2 the horizontal one.
  EXPECT_TRUE(J.contains(0.0));
  EXPECT_FALSE(J.contains(kPi / 2));
}

TEST(ConicalMass, Examples) {
  const auto E = vertical_unit();
  EXPECT_NEAR(conical_mass(E, {0, 0}, 0.5, 0.25), 0.5, 1e-15);
  EXPECT_NEAR(conical_mass(E, {0, 0}, 0.5, 10), 1.0, 1e-15);
  const auto H = SegmentSet::from_segments({Segment({-0.5, 0}, {0.5, 0})});
  for (double r : {0.01, 0.3, 5.0}) EXPECT_EQ(conical_mass(H, {0, 0}, 0.7, r), 0.0);
  EXPECT_THROW(conical_mass(E, {0, 0}, 0.5, 0.0), ValidationError);
  EXPECT_THROW(conical_mass(E, {0, 0}, 1.5, 1.0), ValidationError);
}

TEST(ConicalMass, AgreesWithPointwiseConePredicate) {
  Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const auto E = ft::random_segment_set(rng, 8);
    const Vec2 x{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
    const double beta = rng.uniform(0.05, 1.0), r = rng.uniform(0.05, 1.5);
    const double exact = conical_mass(E, x, beta, r);
    // Midpoint rule misclassifies at most one cell per boundary crossing.
    const double cells = 2e4;
    double slack = 0.0;
    for (const auto& s : E.segments()) slack += 6 * s.length() / cells;
    EXPECT_NEAR(exact, brute_conical_mass(E, x, beta, r), slack) << trial;
  }
}

TEST(ConicalMass, MonotoneInRadiusAndWidth) {
  Rng rng(32);
  for (int trial = 0; trial < 30; ++trial) {
    const auto E = ft::random_segment_set(rng, 12);
    const Vec2 x{rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)};
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double m = conical_mass(E, x, 0.4, 0.05 * i);
      EXPECT_GE(m, prev);
      prev = m;
    }
    prev = 0.0;
    for (int i = 20; i >= 1; --i) {
      const double m = conical_mass(E, x, 0.05 * i, 0.9);
      EXPECT_GE(m, prev);
      prev = m;
    }
  }
}

TEST(MaxConicalDensity, Examples) {
  const auto E = vertical_unit();
  EXPECT_NEAR(max_conical_density(E, {0, 0}, 0.5), 2.0, 1e-12);
  EXPECT_NEAR(grid_density(E, {0, 0}, 0.5), 2.0, 1e-12);
  const auto H = SegmentSet::from_segments({Segment({-0.5, 0}, {0.5, 0})});
  EXPECT_EQ(max_conical_density(H, {0, 0}, 0.5), 0.0);
  const auto far = SegmentSet::from_segments({Segment({2, 0}, {3, 0.1})});
  EXPECT_EQ(max_conical_density(far, {0, 0}, 0.5), 0.0);
}

TEST(MaxConicalDensity, DominatesRadiusGridAndIsAttained) {
  Rng rng(33);
  for (int trial = 0; trial < 25; ++trial) {
    const auto E = ft::random_segment_set(rng, 6);
    const Vec2 x = E.segments()[0].at(rng.uniform(0, 1));
    const double beta = rng.uniform(0.1, 1.0);
    const auto dm = max_conical_density_arg(E, x, beta);
    const double grid = grid_density(E, x, beta);
    EXPECT_GE(dm.theta_star, grid * (1 - tol_density) - 1e-12) << trial;
    // The grid is fine enough to come within 0.5% of the supremum.
    EXPECT_LE(dm.theta_star, grid * 1.005 + 1e-12) << trial;
    if (dm.theta_star > 0)
      EXPECT_NEAR(conical_mass(E, x, beta, dm.radius) / dm.radius, dm.theta_star, 1e-12);
  }
}

TEST(DoubleDirectionSet, Examples) {
  const auto G = SegmentSet::from_segments({Segment({1, -1}, {1, 1})});
  EXPECT_NEAR(double_direction_set({0, 0}, G).measure(), kPi / 2, 1e-14);
  EXPECT_EQ(double_direction_set({0, 0}, SegmentSet()).measure(), 0.0);
  const auto two = SegmentSet::from_segments({Segment({3, 0}, {3, 1}), Segment({3.5, 0}, {3.5, 1})});
  const auto one = SegmentSet::from_segments({Segment({3, 0}, {3, 1})});
  // Nested shadows: the nearer segment subtends every direction the farther one does.
  EXPECT_NEAR(double_direction_set({0, 0}, two).measure(),
              std::max(double_direction_set({0, 0}, one).measure(),
                       subtended_directions({0, 0}, two.segments()[1]).measure()),
              1e-14);
}

// Fraction of lines through x with direction in J that meet E at two or more points.
double monte_carlo_double_hits(const SegmentSet& E, Vec2 x, const ThetaArc& J, Rng& rng, int n, double& se) {
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    const double th = J.start + J.len * rng.uniform();
    try {
      if (line_set_intersection(E, AffineLine::through(x, th)).count >= 2) ++hits;
    } catch (const CollinearOverlap&) {
    }
  }
  const double p = static_cast<double>(hits) / n;
  se = J.len * std::sqrt(std::max(p * (1 - p), 1e-12) / n);
  return J.len * p;
}

TEST(BesicovitchAlternative, ParallelSegmentsGiveA1) {
  const auto E = SegmentSet::from_segments({Segment({0, -1}, {0, 1}), Segment({0.3, -1}, {0.3, 1})});
  const Vec2 x{0, 0};
  const auto out = besicovitch_alternative(E, x, 0.1, 2.0);
  ASSERT_EQ(out.tag, AlternativeOutcome::Tag::A1);
  EXPECT_GE(out.I_x.measure(), 0.5);
  // Lines through x meeting the far segment, clipped to directions within atan(1/beta) of vertical.
  EXPECT_NEAR(out.I_x.measure(), 2 * (std::atan(1 / 0.3) - std::atan(0.1)), 1e-12);
  Rng rng(34);
  double se = 0;
  const double mc = monte_carlo_double_hits(E, x, Cone(x, 0.1).directions(), rng, 200000, se);
  EXPECT_NEAR(out.I_x.measure(), mc, 3 * se);
}

TEST(BesicovitchAlternative, ExactIxMatchesMonteCarloOnRandomSets) {
  Rng rng(35);
  for (int trial = 0; trial < 15; ++trial) {
    const auto E = ft::random_segment_set(rng, 10);
    const Vec2 x = E.segments()[0].at(rng.uniform(0.1, 0.9));
    const double beta = rng.uniform(0.1, 1.0);
    if (max_conical_density(E, x, beta) == 0.0) continue;
    // I_x is filled in for both outcomes.
    const auto out = besicovitch_alternative(E, x, beta, 1.0);
    double se = 0;
    const double mc = monte_carlo_double_hits(E, x, Cone(x, beta).directions(), rng, 40000, se);
    EXPECT_NEAR(out.I_x.measure(), mc, 3 * se + 1e-12) << trial;
  }
}

TEST(BesicovitchAlternative, SingleSegmentGivesOneCertifiedTube) {
  const auto E = vertical_unit();
  const auto out = besicovitch_alternative(E, {0, 0}, 0.5, 2.0);
  ASSERT_EQ(out.tag, AlternativeOutcome::Tag::A2);
  ASSERT_EQ(out.tubes.size(), 1u);
  const auto& t = out.tubes[0];
  EXPECT_NEAR(out.theta_star, 2.0, 1e-12);
  EXPECT_NEAR(t.tube_mass, 1.0, 1e-12);
  EXPECT_GE(t.tube_mass, 0.25 * out.theta_star * 2.0 * t.tube.w / 2);
  EXPECT_TRUE(t.holds());
  EXPECT_LT(t.tube.center.distance({0, 0}), 1e-15);
  EXPECT_TRUE(out.J_x.contains(t.theta));
}

TEST(BesicovitchAlternative, DegenerateWhenDensityVanishes) {
  const auto H = SegmentSet::from_segments({Segment({-0.5, 0}, {0.5, 0})});
  EXPECT_THROW(besicovitch_alternative(H, {0, 0}, 0.5, 2.0), DegenerateInput);
}

// Tube mass re-measured by sampling points and testing distance to the centre line.
double brute_tube_mass(const SegmentSet& E, const Tube& T, int n = 20000) {
  double m = 0.0;
  const Vec2 dir = T.center.direction();
  const Vec2 on = T.center.normal() * T.center.t;
  for (const auto& s : E.segments())
    for (int i = 0; i < n; ++i) {
      const Vec2 p = s.at((i + 0.5) / n);
      const Vec2 v = p - on;
      if (std::abs(v.cross(dir)) <= T.w) m += s.length() / n;
    }
  return m;
}

TEST(BesicovitchAlternative, A2CertificatesHoldOnRandomSets) {
  Rng rng(36);
  int a2 = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto E = ft::random_segment_set(rng, 8);
    const Vec2 x = E.segments()[rng.below(E.size())].at(rng.uniform(0.05, 0.95));
    const double beta = rng.uniform(0.2, 1.0);
    if (max_conical_density(E, x, beta) == 0.0) continue;
    const double H = rng.uniform(1, 40);
    const auto out = besicovitch_alternative(E, x, beta, H);
    const ThetaArc J = Cone(x, beta).directions();
    for (const auto& iv : out.I_x.intervals()) {
      EXPECT_TRUE(J.contains(iv.lo));
      EXPECT_TRUE(J.contains(iv.hi));
    }
    if (out.tag == AlternativeOutcome::Tag::A1) continue;
    ++a2;
    EXPECT_FALSE(out.tubes.empty()) << trial;
    for (const auto& t : out.tubes) {
      EXPECT_TRUE(t.holds()) << trial;
      EXPECT_TRUE(J.contains(t.theta));
      EXPECT_LT(t.tube.center.distance(x), 1e-12);
      const double bm = brute_tube_mass(E, t.tube);
      EXPECT_GE(bm + 1e-3, t.bound) << trial;
      EXPECT_NEAR(bm, t.tube_mass, 1e-3) << trial;
    }
  }
  EXPECT_GT(a2, 5);
}

TEST(HighDensityPoints, ZigZagUnderSteepConeIsEmpty) {
  std::vector<Vec2> v;
  for (int i = 0; i <= 20; ++i) v.push_back({-0.5 + 0.05 * i, (i % 2) * 0.05 * 0.05});
  const SegmentSet E({Polyline(v)});
  EXPECT_TRUE(high_density_points(E, 0.5, 0.5, 0.01).empty());
  // Per-point oracle: every sample has density exactly zero.
  for (const auto& q : sample_cloud(E, 0.05).points) EXPECT_EQ(grid_density(E, q.p, 0.5, 200), 0.0);
}

TEST(HighDensityPoints, CrossingSegmentsNearCrossing) {
  const auto E = ft::plus_sign();
  const auto R = high_density_points(E, 0.5, 0.5, 0.01);
  ASSERT_FALSE(R.empty());
  bool near = false;
  for (const auto& q : R.points) {
    EXPECT_GE(grid_density(E, q.p, 0.5, 400), 0.5 * (1 - 0.01));
    if (q.p.norm() < 0.02) near = true;
  }
  EXPECT_TRUE(near);
  EXPECT_NEAR(R.total_mass(), static_cast<double>(R.size()) * 0.01, 1e-12);
  for (std::size_t i = 1; i < R.size(); ++i) EXPECT_LT(R.points[i - 1].arclength, R.points[i].arclength);
}

TEST(HighDensityPoints, LargeThresholdIsEmpty) {
  Rng rng(37);
  const auto E = ft::random_segment_set(rng, 5);
  EXPECT_TRUE(high_density_points(E, 0.3, 2.0 * E.size() + 0.1, 0.05).empty());
}

TEST(DensityProfile, CsvAndThreadIndependence) {
  const auto E = ft::plus_sign();
  set_thread_count(1);
  const auto a = density_profile(E, 0.5, 0.1);
  set_thread_count(3);
  const auto b = density_profile(E, 0.5, 0.1);
  set_thread_count(1);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].theta_star, b[i].theta_star);
  std::ostringstream os;
  write_density_csv(os, a);
  EXPECT_EQ(os.str().rfind("s,x,y,theta_star\n", 0), 0u);
}
