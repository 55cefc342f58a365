#include <gtest/gtest.h>

#include "hts/blob.hpp"

using namespace hts;

TEST(Grunsky, DiskAtHalf) {
  auto d = grunsky_disk(0.5);
  EXPECT_NEAR(d.center.real(), 0.2876820724517809, 1e-15);
  EXPECT_EQ(d.center.imag(), 0.0);
  EXPECT_NEAR(d.radius, 1.0986122886681098, 1e-15);
}

TEST(Grunsky, DegenerateAtZero) {
  auto d = grunsky_disk(0);
  EXPECT_EQ(d.center, Point(0, 0));
  EXPECT_EQ(d.radius, 0.0);
}

TEST(Grunsky, RejectsOutsideDisk) {
  EXPECT_THROW(grunsky_disk(1.0), PreconditionError);
  EXPECT_THROW(grunsky_disk(Point(0.8, 0.7)), PreconditionError);
}

TEST(Grunsky, KoebeOnBoundary) {
  for (int k = 1; k <= 9; ++k) {
    double x = k / 10.0;
    auto d = grunsky_disk(x);
    Point w = koebe_log_ratio(1, x);
    EXPECT_NEAR(w.real(), -2 * std::log(1 - x), 1e-15);
    EXPECT_NEAR(std::abs(w - d.center), d.radius, 1e-12);
  }
}

TEST(Grunsky, RotatedKoebeOnBoundary) {
  Point z = std::polar(0.6, 1.1);
  auto d = grunsky_disk(z);
  Point a = std::conj(z) / std::abs(z);
  EXPECT_NEAR(std::abs(koebe_log_ratio(a, z) - d.center), d.radius, 1e-12);
}

TEST(Grunsky, LogRatioMatchesDirectQuotient) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.7, 0.7);
  for (int i = 0; i < 200; ++i) {
    Point a(u(rng), u(rng)), z(u(rng), u(rng));
    Point w = std::log(koebe_value(a, z) / z);
    EXPECT_NEAR(std::abs(w - koebe_log_ratio(a, z)), 0, 1e-12);
  }
}

TEST(Grunsky, SamplesStayInside) {
  auto c = sample_class_S_check(0.5, 4000);
  EXPECT_TRUE(c.passed());
  EXPECT_EQ(c.samples, 4000u);
  EXPECT_NEAR(c.max_excess, 0, 1e-12);  // a = 1 is on the boundary
}

TEST(Grunsky, SpecialValues) {
  auto d = grunsky_disk(0.5);
  EXPECT_EQ(koebe_log_ratio(0, 0.5), Point(0, 0));
  EXPECT_LT(std::abs(koebe_log_ratio(0, 0.5) - d.center), d.radius);
  for (Point a : {Point(0.5, 0), Point(-0.5, 0), Point(0, 0.7), Point(0, -0.7)})
    EXPECT_LT(std::abs(koebe_log_ratio(a, 0.5) - d.center), d.radius);
}

TEST(Residue, ModelValue) {
  ResiduePole q{0, 1, {}};
  EXPECT_EQ(residue_pairing(q, -1), Point(-1, 0));
  EXPECT_EQ(residue_pairing(q, Point(0, 1)), Point(0, 1));
  EXPECT_EQ(residue_pairing({0, 2, {}}, 3), Point(6, 0));
}

TEST(Residue, Bilinear) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 50; ++i) {
    Point c(u(rng), u(rng)), v(u(rng), u(rng)), w(u(rng), u(rng)), s(u(rng), u(rng));
    ResiduePole q{0, c, {}};
    EXPECT_NEAR(std::abs(residue_pairing(q, s * v + w) - (s * residue_pairing(q, v) + residue_pairing(q, w))), 0,
                1e-13);
  }
}

TEST(Residue, QuadratureReproducesMinusPi) {
  ResiduePole q{0, 1, {}};
  auto r = pairing_quadrature_check(q, 1, {}, 512);
  EXPECT_NEAR(r.predicted, -kPi, 1e-15);
  EXPECT_LT(r.relative_error, 0.01);
}

TEST(Residue, QuadratureErrorHalves) {
  ResiduePole q{Point(0.3, -0.2), Point(0.5, 1.5), {}};
  double prev = 1e9;
  for (int n : {64, 128, 256, 512}) {
    auto r = pairing_quadrature_check(q, Point(1, 0.25), {}, n);
    EXPECT_LT(r.error, prev / 2) << n;
    prev = r.error;
  }
}

TEST(Residue, ImaginaryDirectionPairsToZero) {
  auto r = pairing_quadrature_check({0, 1, {}}, Point(0, 1), {}, 256);
  EXPECT_EQ(r.predicted, 0.0);
  EXPECT_LT(std::abs(r.numeric), 1e-6);
}

TEST(Residue, HolomorphicPairsToZero) {
  ResiduePole q{0, 0, {Point(1, 0), Point(0.5, -1)}};
  auto r = pairing_quadrature_check(q, 1, {}, 256);
  EXPECT_EQ(r.predicted, 0.0);
  EXPECT_LT(std::abs(r.numeric), 1e-6);
}

TEST(Residue, PolePartDominatesHolomorphicPart) {
  ResiduePole q{0, 1, {Point(3, 1), Point(0, 2)}};
  auto r = pairing_quadrature_check(q, 1, {}, 512);
  EXPECT_LT(r.relative_error, 0.01);
}

TEST(Residue, CoarseResolutionReported) {
  EXPECT_THROW(pairing_quadrature_check({0, 1, {}}, 1, {}, 4), PreconditionError);
  EXPECT_THROW(pairing_quadrature_check({0, 1, {}}, 1, {0.5, 0.25}, 64), PreconditionError);
}

TEST(Vertical, Examples) {
  EXPECT_EQ(vertical_direction({0, 1, {}}), Point(-1, 0));
  Point v = vertical_direction({0, Point(0, 1), {}});
  EXPECT_NEAR(std::abs(v - Point(0, 1)), 0, 1e-16);
  EXPECT_THROW(vertical_direction({0, 0, {}}), PreconditionError);
}

TEST(Vertical, SectorFlipsAtRightAngles) {
  for (Point c : {Point(1, 0), Point(0, 1), Point(-2, 0.5), std::polar(3.0, 2.0)}) {
    auto s = vertical_sector_scan({0, c, {}});
    EXPECT_TRUE(s.matches) << c;
    ASSERT_EQ(s.sign_changes.size(), 2u);
    EXPECT_NEAR(s.sign_changes[0], -kPi / 2, 1e-15);
    EXPECT_NEAR(s.sign_changes[1], kPi / 2, 1e-15);
  }
}

TEST(RayPath, Examples) {
  auto g = disk_ray_path(0, 1, 0.8);
  EXPECT_EQ(g(0.25), Point(0.8, 0));
  EXPECT_NEAR(std::abs(g(0.75) - 0.4), 0, 1e-16);
  EXPECT_EQ(g(1), Point(0, 0));
  auto c = disk_ray_path(Point(1, 1), 2, Point(1, 1));
  for (double t : {0.0, 0.6, 1.0}) EXPECT_EQ(c(t), Point(1, 1));
  auto d = grunsky_disk(0.5);
  auto k = disk_ray_path(d, koebe_log_ratio(1, 0.5));
  EXPECT_NEAR(k(1).real(), 0.2876820724517809, 1e-15);
  EXPECT_THROW(disk_ray_path(0, 1, 1.5), PreconditionError);
}

TEST(SlitCylinder, NoSlitIsExact) {
  EXPECT_NEAR(slit_cylinder_modulus(2, 1, 0).modulus, 2.0, 1e-12);
}

TEST(SlitCylinder, MonotoneAndBracketed) {
  double prev = 2.0;
  for (double s : {0.25, 0.5, 1.0, 1.5, 1.9}) {
    double m = slit_cylinder_modulus(2, 1, s).modulus;
    EXPECT_LT(m, prev);
    EXPECT_GT(m, 2 - s);  // the uncut part above the slit is in the class
    prev = m;
  }
}

TEST(SlitCylinder, GridConvergence) {
  double a = slit_cylinder_modulus(2, 1, 1.0, 64).modulus, b = slit_cylinder_modulus(2, 1, 1.0, 128).modulus,
         c = slit_cylinder_modulus(2, 1, 1.0, 256).modulus;
  EXPECT_LT(std::abs(c - b), std::abs(b - a));
  EXPECT_LT(std::abs(c - b) / c, 0.01);
}

TEST(Exclusion, Examples) {
  EXPECT_EQ(el_exclusion_test(1, 2, 0.5, 1.9).verdict, Exclusion::excluded);
  EXPECT_EQ(el_exclusion_test(1, 2, 0.5, 0.5).verdict, Exclusion::undecided);
  EXPECT_EQ(el_exclusion_test(1, 2, 0.5, 1.0).verdict, Exclusion::undecided);
  EXPECT_EQ(el_exclusion_test(1, 2, 0.5, 1.5).verdict, Exclusion::undecided);
  EXPECT_EQ(el_exclusion_test(1, 2, 0.5, 0.05).verdict, Exclusion::excluded);
  EXPECT_THROW(el_exclusion_test(1, 2, 1.5, 1.0), PreconditionError);
  EXPECT_THROW(el_exclusion_test(1, 2, 0.5, 2.0), PreconditionError);
}

TEST(Blob, CylinderExample) {
  auto b = cylinder_blob_estimate(1, 2, 0.5);
  EXPECT_EQ(b.inner.lo, 0.5);
  EXPECT_EQ(b.inner.hi, 1.5);
  EXPECT_TRUE(b.inner_in_outer);
  EXPECT_TRUE(b.rotation_invariant);
  EXPECT_TRUE(b.connected);
  EXPECT_LT(b.outer.hi, 1.9);
  EXPECT_GT(b.outer.lo, 0.05);
  EXPECT_NEAR(b.inner.hi - b.inner.lo, 1.0, 1e-15);
}

TEST(Blob, RigidFit) {
  auto b = cylinder_blob_estimate(1, 1, 0.3);
  EXPECT_EQ(b.inner.lo, b.inner.hi);
  EXPECT_TRUE(b.inner_in_outer);
}

TEST(Blob, ParameterOrder) {
  EXPECT_THROW(cylinder_blob_estimate(2, 1, 0.5), PreconditionError);
  EXPECT_THROW(cylinder_blob_estimate(1, 2, 1.0), PreconditionError);
}
