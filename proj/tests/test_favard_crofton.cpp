// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "favard/favard_crofton.hpp"
#include "support.hpp"

using namespace favard;
namespace ft = favard::testing;

namespace {
const double kPlusFavard = 2.0 * std::sqrt(2.0);
const double kPlusDefect = 4.0 - 2.0 * std::sqrt(2.0);
}  // namespace

TEST(ProjectionMeasure, Examples) {
  EXPECT_DOUBLE_EQ(projection_measure(ft::unit_segment(), 0.0), 1.0);
  EXPECT_DOUBLE_EQ(projection_measure(SegmentSet(), 0.3), 0.0);
  const auto plus = ft::plus_sign();
  for (int i = 0; i < 50; ++i) {
    const double th = 0.0123 + i * kPi / 50;
    EXPECT_NEAR(projection_measure(plus, th), std::max(std::abs(std::cos(th)), std::abs(std::sin(th))), 1e-15);
  }
}

TEST(ExactOracle, ClosedFormsOfReferenceSets) {
  // The breakpoint-exact integrator itself is checked against closed forms
  // before it is used as a reference for the quadrature engine.
  EXPECT_NEAR(ft::exact_angle_integrals(ft::unit_segment()).favard, 2.0, 1e-14);
  const auto p = ft::exact_angle_integrals(ft::plus_sign());
  EXPECT_NEAR(p.favard, kPlusFavard, 1e-13);
  EXPECT_NEAR(p.sum_projections - p.favard, kPlusDefect, 1e-13);
  EXPECT_NEAR(ft::dense_grid_favard(ft::plus_sign(), 200000), kPlusFavard, 1e-8);
}

TEST(FavardLength, UnitSegmentIsTwo) {
  const auto r = favard_length(ft::unit_segment());
  EXPECT_NEAR(r.value, 2.0, 1e-8);
  EXPECT_LT(r.error_estimate, 1e-8);
}

TEST(FavardLength, PlusSign) {
  EXPECT_NEAR(favard_length(ft::plus_sign()).value, kPlusFavard, 1e-6);
}

TEST(FavardLength, StackedSegmentsAgreeWithDenseGrid) {
  // Unit segments at heights 0 and 2: projections overlap for most angles,
  // so the value is well below 4.
  const auto E = SegmentSet::from_segments({Segment({-0.5, -1}, {0.5, -1}), Segment({-0.5, 1}, {0.5, 1})});
  const double v = favard_length(E).value;
  EXPECT_NEAR(v, ft::exact_angle_integrals(E).favard, 1e-8);
  EXPECT_NEAR(v, ft::dense_grid_favard(E, 200000), 1e-7);
  // Far apart along the segment direction the projections are disjoint
  // except near one angle, and the value approaches 4.
  const auto F = SegmentSet::from_segments({Segment({-50, 0}, {-49, 0}), Segment({49, 0}, {50, 0})});
  EXPECT_NEAR(favard_length(F).value, 4.0, 1e-8);
}

TEST(FavardLength, EmptySetAndEta) {
  EXPECT_DOUBLE_EQ(favard_length(SegmentSet()).value, 0.0);
  EXPECT_NEAR(eta_measure_hitting(ft::unit_segment()).value, 2.0, 1e-8);
  EXPECT_NEAR(eta_measure_hitting(ft::plus_sign()).value, kPlusFavard, 1e-6);
  EXPECT_DOUBLE_EQ(eta_measure_hitting(SegmentSet()).value, 0.0);
}

TEST(FavardLength, TightBudgetReportsNonConvergence) {
  QuadratureConfig q;
  q.tol = 1e-15;
  q.max_panels = 256;
  EXPECT_THROW(favard_length(ft::bent_segment(0.3), q), QuadratureNotConverged);
}

TEST(Crofton, ClosedFormAndQuadrature) {
  EXPECT_DOUBLE_EQ(crofton_integral(ft::unit_segment()), 1.0);
  EXPECT_DOUBLE_EQ(crofton_integral(ft::plus_sign()), 2.0);
  EXPECT_DOUBLE_EQ(crofton_integral(SegmentSet()), 0.0);
  EXPECT_NEAR(crofton_integral_quadrature(ft::plus_sign()).value, 2.0, 1e-8);
}

TEST(FavardDefect, Examples) {
  EXPECT_NEAR(favard_defect(ft::unit_segment()).value, 0.0, 1e-12);
  EXPECT_NEAR(favard_defect(ft::plus_sign()).value, kPlusDefect, 1e-6);
  const auto collinear = SegmentSet::from_segments({Segment({0, 0}, {0.4, 0}), Segment({0.6, 0}, {1, 0})});
  EXPECT_NEAR(favard_defect(collinear).value, 0.0, 1e-8);
}

class RandomSetProperties : public ::testing::Test {
 protected:
  static constexpr int kSets = 40;
  static constexpr std::uint64_t kSeed = 20240611;
};

TEST_F(RandomSetProperties, CroftonDefectMaximalityAndExactOracle) {
  Rng rng(kSeed);
  const QuadratureConfig q;
  for (int i = 0; i < kSets; ++i) {
    const auto E = ft::random_segment_set(rng, 50);
    const double h1 = E.total_length();
    EXPECT_EQ(crofton_integral(E), h1);
    EXPECT_NEAR(crofton_integral_quadrature(E, q).value, h1, 1e-6);
    const double fav = favard_length(E, q).value;
    const double def = favard_defect(E, q).value;
    EXPECT_LE(fav, 2 * h1 + 1e-6);
    EXPECT_LE(std::abs(def - (2 * h1 - fav)), 2 * q.tol) << "set " << i;
    const auto exact = ft::exact_angle_integrals(E);
    EXPECT_NEAR(fav, exact.favard, 1e-7) << "set " << i;
  }
}

TEST_F(RandomSetProperties, RigidMotionInvariance) {
  Rng rng(kSeed + 1);
  for (int i = 0; i < 10; ++i) {
    const auto E = ft::random_segment_set(rng, 30);
    const RigidMotion m{rng.uniform(0, 2 * kPi), {rng.uniform(-2, 2), rng.uniform(-2, 2)}};
    EXPECT_NEAR(favard_length(E).value, favard_length(m.apply(E)).value, 1e-6);
  }
}

TEST(FavardReport, DefectIdentityHolds) {
  const auto r = favard_report(ft::plus_sign());
  EXPECT_NEAR(r.defect, 2 * r.h1_length - r.favard, 1e-10);
  EXPECT_NEAR(r.defect, kPlusDefect, 1e-6);
  EXPECT_DOUBLE_EQ(r.crofton, 2.0);
}

TEST(FavardLength, ThreadCountDoesNotChangeBits) {
  Rng rng(77);
  const auto E = ft::random_segment_set(rng, 40);
  set_thread_count(1);
  const double a = favard_length(E).value;
  set_thread_count(3);
  const double b = favard_length(E).value;
  set_thread_count(1);
  EXPECT_EQ(a, b);
}

TEST(Profile, CsvHeaderAndRows) {
  std::ostringstream os;
  write_profile_csv(os, favard_profile(ft::plus_sign(), 4));
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("theta,projection_measure,multiplicity_excess\n", 0), 0u);
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 1 + 4 * 8);
}
