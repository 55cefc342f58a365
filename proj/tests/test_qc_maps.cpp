#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "hts/corpus.hpp"
#include "hts/qc_maps.hpp"
#include "hts/surface_io.hpp"

using namespace hts;

namespace {

// Independent singular-value ratio via Eigen's SVD.
double svd_ratio(const Mat2& A) {
  Eigen::Matrix2d M;
  M << A.a, A.b, A.c, A.d;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(M);
  auto s = svd.singularValues();
  return s(0) / s(1);
}

std::vector<double> edge_lengths(const HalfTranslationSurface& s) {
  std::vector<double> r;
  for (auto& P : s.polygons)
    for (std::size_t e = 0; e < P.size(); ++e) r.push_back(std::abs(P.edge_vector(e)));
  std::sort(r.begin(), r.end());
  return r;
}

HalfTranslationSurface horizontal_slit_cylinder() {
  HalfTranslationSurface s;
  s.polygons.push_back({"lo", {{0, 0}, {1, 0}, {1, 1}, {0.75, 1}, {0.25, 1}, {0, 1}}});
  s.polygons.push_back({"hi", {{0, 1}, {0.25, 1}, {0.75, 1}, {1, 1}, {1, 2}, {0, 2}}});
  s.pairings = {{{0, 2}, {1, 2}, 1}, {{0, 4}, {1, 0}, 1}, {{0, 1}, {0, 5}, 1}, {{1, 3}, {1, 5}, 1}};
  for (EdgeRef e : {EdgeRef{0, 0}, EdgeRef{0, 3}, EdgeRef{1, 1}, EdgeRef{1, 4}})
    s.boundary.push_back({e, BoundaryKind::horizontal});
  return s;
}

HalfTranslationSurface vertical_slit_cylinder() {
  HalfTranslationSurface s;
  s.polygons.push_back({"l", {{0, 0}, {0.5, 0}, {0.5, 0.5}, {0.5, 1.5}, {0.5, 2}, {0, 2}}});
  s.polygons.push_back({"r", {{0.5, 0}, {1, 0}, {1, 2}, {0.5, 2}, {0.5, 1.5}, {0.5, 0.5}}});
  s.pairings = {{{0, 1}, {1, 5}, 1}, {{0, 3}, {1, 3}, 1}, {{0, 5}, {1, 1}, 1}};
  s.boundary = {{{0, 0}, BoundaryKind::horizontal}, {{0, 4}, BoundaryKind::horizontal},
                {{1, 0}, BoundaryKind::horizontal}, {{1, 2}, BoundaryKind::horizontal},
                {{0, 2}, BoundaryKind::free},       {{1, 4}, BoundaryKind::free}};
  return s;
}

PiecewiseAffineMap inclusion(const HalfTranslationSurface& dom, const HalfTranslationSurface& cod) {
  PiecewiseAffineMap m;
  m.domain = dom;
  m.codomain = cod;
  for (std::size_t k = 0; k < dom.polygons.size(); ++k) m.faces.push_back({Mat2{}, {}, 0});
  return m;
}

}  // namespace

TEST(Dilatation, IdentityIsOne) { EXPECT_DOUBLE_EQ(dilatation_of(identity_map(make_octagon())), 1.0); }

TEST(Dilatation, DiagonalStretch) {
  EXPECT_NEAR(dilatation_of(stretch_map(make_torus(), 2).map), 2.0, 1e-15);
  EXPECT_NEAR(face_dilatation(Mat2::diag(2, 1)), 2.0, 1e-15);
}

TEST(Dilatation, ShearMatchesClosedFormAndSvd) {
  Mat2 S{1, 0.1, 0, 1};
  EXPECT_NEAR(face_dilatation(S), 1.105124, 1e-6);
  EXPECT_NEAR(face_dilatation(S), shear_dilatation(0.1), 1e-13);
  EXPECT_NEAR(face_dilatation(S), svd_ratio(S), 1e-13);
}

TEST(Dilatation, RandomMatricesAgreeWithSvd) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 200; ++k) {
    Mat2 A{u(rng), u(rng), u(rng), u(rng)};
    if (A.det() <= 1e-3) continue;
    EXPECT_NEAR(face_dilatation(A), svd_ratio(A), 1e-9 * svd_ratio(A));
  }
}

TEST(Dilatation, CompositionBound) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  auto draw = [&] {
    for (;;) {
      Mat2 A{1 + u(rng), u(rng) * 0.5, u(rng) * 0.5, 1 + u(rng)};
      if (A.det() > 0.05) return A;
    }
  };
  auto s = make_cylinder(1, 1);
  for (int k = 0; k < 100; ++k) {
    Mat2 A = draw(), B = draw();
    // keep horizontal boundary horizontal
    A.c = 0;
    B.c = 0;
    if (A.det() <= 0.05 || B.det() <= 0.05) continue;
    auto m1 = affine_image(s, A);
    auto m2 = affine_image(m1.surface, B);
    auto m = compose(m2.map, m1.map);
    EXPECT_LE(dilatation_of(m), dilatation_of(m1.map) * dilatation_of(m2.map) + 1e-9);
    EXPECT_TRUE(check_map(m).ok());
  }
}

TEST(Beltrami, StretchIsOneThird) {
  for (auto mu : beltrami_of(stretch_map(make_octagon(), 2).map)) {
    EXPECT_NEAR(mu.real(), 1.0 / 3, 1e-15);
    EXPECT_NEAR(mu.imag(), 0.0, 1e-15);
  }
}

TEST(Beltrami, IdentityIsZero) { EXPECT_EQ(beltrami_of(Mat2{}), std::complex<double>(0, 0)); }

TEST(Beltrami, FlipDoesNotChangeMu) {
  for (double K : {1.5, 2.0, 5.0}) {
    auto mu = beltrami_of(Mat2::diag(-1, -1) * Mat2::diag(K, 1));
    EXPECT_NEAR(mu.real(), (K - 1) / (K + 1), 1e-15);
    EXPECT_NEAR(std::abs(mu), (K - 1) / (K + 1), 1e-15);
  }
}

TEST(Beltrami, ModulusMatchesDilatation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int k = 0; k < 100; ++k) {
    Mat2 A{2 + u(rng), u(rng), u(rng), 2 + u(rng)};
    double K = face_dilatation(A), m = std::abs(beltrami_of(A));
    EXPECT_NEAR(m, (K - 1) / (K + 1), 1e-12);
  }
}

TEST(Stretch, TorusAreaDoubles) {
  auto r = stretch_map(make_torus(), 2);
  EXPECT_NEAR(area(r.surface), 2.0, 1e-15);
  EXPECT_TRUE(validate_surface(r.surface).ok());
  EXPECT_NEAR(std::abs(r.surface.polygons[0].edge_vector(0)), 2.0, 1e-15);
}

TEST(Stretch, CylinderCircumference) {
  auto r = stretch_map(make_cylinder(2, 1), 3);
  EXPECT_NEAR(std::abs(r.surface.polygons[0].edge_vector(0)), 3.0, 1e-15);
  EXPECT_NEAR(std::abs(r.surface.polygons[0].edge_vector(1)), 2.0, 1e-15);
  EXPECT_NEAR(area(r.surface), 6.0, 1e-14);
  EXPECT_NEAR(dilatation_of(r.map), 3.0, 1e-15);
}

TEST(Stretch, UnitFactorIsIsometric) {
  auto s = make_tripod();
  EXPECT_TRUE(surfaces_equal(stretch_map(s, 1).surface, s));
}

TEST(Stretch, RejectsFactorBelowOne) { EXPECT_THROW(stretch_map(make_torus(), 0.5), PreconditionError); }

TEST(Stretch, InverseStretchRestoresEdgeLengths) {
  for (auto s : {make_torus(), make_octagon(), make_tripod(), make_cylinder(2, 1)}) {
    auto a = stretch_map(s, 2.5);
    auto b = affine_image(a.surface, Mat2::diag(1 / 2.5, 1));
    auto la = edge_lengths(s), lb = edge_lengths(b.surface);
    ASSERT_EQ(la.size(), lb.size());
    for (std::size_t k = 0; k < la.size(); ++k) EXPECT_NEAR(la[k], lb[k], 1e-12);
  }
}

TEST(Stretch, MapIsContinuous) {
  for (auto s : {make_torus(), make_octagon(), make_tripod()}) EXPECT_TRUE(check_map(stretch_map(s, 2).map).ok());
}

TEST(Embedding, HorizontalSlitInclusionPasses) {
  auto dom = horizontal_slit_cylinder();
  ASSERT_TRUE(validate_surface(dom).ok());
  auto v = teichmuller_embedding_check(inclusion(dom, make_cylinder(2, 1)), 1);
  EXPECT_TRUE(v.passed);
  ASSERT_EQ(v.complement.size(), 1u);
  EXPECT_TRUE(v.complement[0].horizontal);
  double len = std::abs(v.complement[0].b.position - v.complement[0].a.position);
  EXPECT_NEAR(len, 0.5, 1e-12);
}

TEST(Embedding, VerticalSlitFails) {
  auto dom = vertical_slit_cylinder();
  ASSERT_TRUE(validate_surface(dom).ok());
  auto v = teichmuller_embedding_check(inclusion(dom, make_cylinder(2, 1)), 1);
  EXPECT_FALSE(v.passed);
  EXPECT_TRUE(v.matrices_ok);
  EXPECT_FALSE(v.complement_horizontal);
}

TEST(Embedding, StretchOntoCodomainHasEmptyComplement) {
  auto v = teichmuller_embedding_check(stretch_map(make_cylinder(2, 1), 2).map, 2);
  EXPECT_TRUE(v.passed);
  EXPECT_TRUE(v.complement.empty());
  EXPECT_NEAR(v.complement_area, 0, 1e-12);
}

TEST(Embedding, WrongFactorFails) {
  auto v = teichmuller_embedding_check(stretch_map(make_torus(), 2).map, 3);
  EXPECT_FALSE(v.passed);
  EXPECT_FALSE(v.matrices_ok);
}

TEST(Embedding, MissingAreaFails) {
  auto m = inclusion(make_cylinder(1, 1), make_cylinder(2, 1));
  auto v = teichmuller_embedding_check(m, 1);
  EXPECT_FALSE(v.complement_null);
  EXPECT_FALSE(v.passed);
}

TEST(ShearGadget, KnownValue) {
  auto g = shear_gadget(2, 0.1);
  EXPECT_DOUBLE_EQ(g.matrix.b, 0.1);
  EXPECT_NEAR(g.dilatation, 1.105124, 1e-6);
}

TEST(ShearGadget, DecreasesToOne) {
  double prev = 1e300;
  for (int k = 1; k <= 6; ++k) {
    double d = shear_gadget(2, std::pow(10.0, -k)).dilatation;
    EXPECT_LT(d, prev);
    EXPECT_GT(d, 1.0);
    prev = d;
  }
  EXPECT_LT(prev - 1, 1e-5);
}

TEST(ShearGadget, UnitFactorIsIdentity) {
  auto g = shear_gadget(1, 0.3);
  EXPECT_EQ(g.matrix.b, 0.0);
  EXPECT_EQ(g.dilatation, 1.0);
}

TEST(ShearGadget, RejectsBadArguments) {
  EXPECT_THROW(shear_gadget(2, 0), PreconditionError);
  EXPECT_THROW(shear_gadget(0.5, 0.1), PreconditionError);
}

TEST(PushPoint, ZeroDisplacementIsIdentity) {
  auto p = push_point(1, 0);
  EXPECT_NEAR(p.dilatation, 1.0, 1e-12);
}

TEST(PushPoint, DilatationMatchesPerTriangleSvd) {
  auto p = push_point(1, {0.5, 0});
  double brute = 1;
  for (std::size_t t = 0; t < p.map.domain.polygons.size(); ++t) {
    const auto& P = p.map.domain.polygons[t];
    auto img = [&](std::size_t i) { return p.map.apply({t, P.vertex(i)}).position; };
    Eigen::Matrix2d E, F;
    Point e1 = P.vertex(1) - P.vertex(0), e2 = P.vertex(2) - P.vertex(0);
    Point f1 = img(1) - img(0), f2 = img(2) - img(0);
    E << e1.real(), e2.real(), e1.imag(), e2.imag();
    F << f1.real(), f2.real(), f1.imag(), f2.imag();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(F * E.inverse());
    brute = std::max(brute, svd.singularValues()(0) / svd.singularValues()(1));
  }
  EXPECT_NEAR(p.dilatation, brute, 1e-10);
  EXPECT_GT(p.dilatation, 1.0);
}

TEST(PushPoint, FixesBoundaryAndMovesCenter) {
  Point d{0.3, -0.2};
  auto p = push_point(2, d);
  EXPECT_TRUE(check_map(p.map).ok());
  Topology t(p.map.domain);
  for (std::size_t f = 0; f < p.map.domain.polygons.size(); ++f)
    for (std::size_t k = 0; k < 3; ++k) {
      Point z = p.map.domain.polygons[f].vertex(k);
      Point w = p.map.apply({f, z}).position;
      if (std::abs(std::abs(z) - 2) < 1e-12) {
        EXPECT_NEAR(std::abs(w - z), 0, 1e-12);
      }
      if (std::abs(z) < 1e-15) {
        EXPECT_NEAR(std::abs(w - d), 0, 1e-15);
      }
    }
  for (auto& b : p.map.domain.boundary) EXPECT_TRUE(t.is_boundary(b.edge));
}

TEST(PushPoint, MonotoneInDisplacement) {
  double prev = 1;
  for (double d : {0.05, 0.1, 0.25, 0.5}) {
    double k = push_point(1, {d, 0}).dilatation;
    EXPECT_GT(k, prev);
    prev = k;
  }
  EXPECT_LT(push_point(1, {0.25, 0}).dilatation, push_point(1, {0.5, 0}).dilatation);
}

TEST(PushPoint, TendsToOne) { EXPECT_LT(push_point(1, {1e-6, 0}).dilatation - 1, 1e-4); }

TEST(PushPoint, RejectsLargeDisplacement) {
  EXPECT_THROW(push_point(1, {1.0, 0}), PreconditionError);
  EXPECT_THROW(push_point(1, {0, 1.5}), PreconditionError);
  EXPECT_NO_THROW(push_point(1, {0.8, 0}));
}

TEST(JitterMap, ValidAndBounded) {
  std::mt19937_64 rng(5);
  auto g = fixture::grid_cylinder(1, 1, 6, 6);
  ASSERT_TRUE(validate_surface(g).ok());
  auto m = fixture::jitter_map(g, 1, 1, 6, 6, 0.3, rng);
  EXPECT_TRUE(check_map(m).ok());
  EXPECT_GT(dilatation_of(m), 1.0);
}
