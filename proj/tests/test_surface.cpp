#include <gtest/gtest.h>

#include <random>

#include "hts/corpus.hpp"
#include "hts/surface.hpp"
#include "hts/surface_io.hpp"

using namespace hts;

namespace {

std::vector<std::pair<double, bool>> cone_signature(const HalfTranslationSurface& s) {
  std::vector<std::pair<double, bool>> r;
  for (auto& c : cone_points(s)) r.emplace_back(c.total_angle, c.location == ConeLocation::boundary);
  std::sort(r.begin(), r.end());
  return r;
}

std::vector<HalfTranslationSurface> corpus() {
  return {make_torus(), make_octagon(), make_cylinder(2), make_cylinder(0.5), make_tripod(), make_star_torus(),
          make_torus(2, 0.5)};
}

}  // namespace

TEST(Validate, SquareTorusPasses) {
  auto r = validate_surface(make_torus());
  EXPECT_TRUE(r.ok());
}

TEST(Validate, LengthMismatchFails) {
  auto s = make_torus();
  s.polygons[0].vertices = {{0, 0}, {1, 0}, {1, 1}, {0.1, 1}};
  auto r = validate_surface(s);
  EXPECT_FALSE(r.ok());
  EXPECT_FALSE(r.passed("pairing.length"));
}

TEST(Validate, CylinderPasses) {
  auto s = make_cylinder(2);
  auto r = validate_surface(s);
  EXPECT_TRUE(r.ok());
  auto cones = cone_points(s);
  ASSERT_EQ(cones.size(), 2u);
  for (auto& c : cones) {
    EXPECT_EQ(c.location, ConeLocation::boundary);
    EXPECT_NEAR(c.total_angle, kPi, 1e-12);
    EXPECT_FALSE(c.singular);
  }
}

TEST(Validate, DanglingEdgeAndWrongOrientation) {
  auto s = make_torus();
  s.pairings.pop_back();
  EXPECT_FALSE(validate_surface(s).passed("edge.coverage"));
  auto t = make_torus();
  t.pairings[0].sign = -1;
  EXPECT_FALSE(validate_surface(t).passed("pairing.orientation"));
}

TEST(Validate, NonHorizontalBoundaryFlag) {
  HalfTranslationSurface s;
  s.polygons.push_back({"P0", {{0, 0}, {1, 0.2}, {1, 1.2}, {0, 1}}});
  s.pairings.push_back({{0, 1}, {0, 3}, 1});
  s.boundary.push_back({{0, 0}, BoundaryKind::horizontal});
  s.boundary.push_back({{0, 2}, BoundaryKind::horizontal});
  EXPECT_FALSE(validate_surface(s).passed("boundary.horizontal"));
  s.boundary[0].kind = s.boundary[1].kind = BoundaryKind::free;
  EXPECT_TRUE(validate_surface(s).ok());
}

TEST(ConePoints, TorusOctagonTripod) {
  auto t = cone_points(make_torus());
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0].total_angle, 2 * kPi, 1e-12);
  EXPECT_EQ(t[0].prongs, 2);
  EXPECT_FALSE(t[0].singular);

  auto o = cone_points(make_octagon());
  ASSERT_EQ(o.size(), 1u);
  EXPECT_NEAR(o[0].total_angle, 6 * kPi, 1e-9);
  EXPECT_EQ(o[0].prongs, 6);
  EXPECT_TRUE(o[0].singular);

  auto p = cone_points(make_tripod());
  int three = 0;
  for (auto& c : p)
    if (c.location == ConeLocation::interior) {
      EXPECT_EQ(c.prongs, 3);
      ++three;
    }
  EXPECT_EQ(three, 2);
}

TEST(ConePoints, NonMultipleIsStructuralError) {
  HalfTranslationSurface s;
  s.polygons.push_back({"P0", {{0, 0}, {1, 0}, {1.3, 1}, {0.3, 1}}});
  s.pairings.push_back({{0, 0}, {0, 2}, 1});
  s.pairings.push_back({{0, 1}, {0, 3}, 1});
  // a parallelogram torus is fine
  EXPECT_NO_THROW(cone_points(s));
  HalfTranslationSurface k;
  k.polygons.push_back({"P0", {{0, 0}, {1, 0}, {0.5, 0.8}}});
  k.polygons.push_back({"P1", {{0, 0}, {0.5, -0.8}, {1, 0}}});
  k.pairings.push_back({{0, 0}, {1, 2}, 1});
  k.boundary.push_back({{0, 1}, BoundaryKind::free});
  k.boundary.push_back({{0, 2}, BoundaryKind::free});
  k.boundary.push_back({{1, 0}, BoundaryKind::free});
  k.boundary.push_back({{1, 1}, BoundaryKind::free});
  EXPECT_THROW(cone_points(k), StructuralError);
}

TEST(GaussBonnet, Corpus) {
  auto t = gauss_bonnet_global(make_torus());
  EXPECT_NEAR(t.lhs, 0, 1e-12);
  EXPECT_EQ(t.chi, 0);
  auto o = gauss_bonnet_global(make_octagon());
  EXPECT_NEAR(o.lhs, -4 * kPi, 1e-9);
  EXPECT_EQ(o.chi, -2);
  EXPECT_NEAR(o.residual, 0, 1e-9);
  auto c = gauss_bonnet_global(make_cylinder(2));
  EXPECT_EQ(c.chi, 0);
  EXPECT_NEAR(c.residual, 0, 1e-12);
  auto p = gauss_bonnet_global(make_tripod());
  EXPECT_EQ(p.chi, -1);
  EXPECT_NEAR(p.residual, 0, 1e-12);
}

TEST(Area, Values) {
  EXPECT_NEAR(area(make_torus()), 1, 1e-15);
  EXPECT_NEAR(area(make_cylinder(2)), 2, 1e-15);
  EXPECT_NEAR(area(make_octagon()), 2 * (1 + std::sqrt(2.0)), 1e-12);
}

TEST(Subdivision, InvariantsUnderRandomCuts) {
  std::mt19937_64 rng(7);
  for (auto& s : corpus()) {
    auto sig = cone_signature(s);
    double a = area(s);
    for (int k = 0; k < 20; ++k) {
      auto t = random_subdivision(s, rng, 1 + k % 5);
      ASSERT_TRUE(validate_surface(t).ok());
      auto sig2 = cone_signature(t);
      ASSERT_EQ(sig.size(), sig2.size());
      for (std::size_t i = 0; i < sig.size(); ++i) {
        EXPECT_NEAR(sig[i].first, sig2[i].first, 1e-9);
        EXPECT_EQ(sig[i].second, sig2[i].second);
      }
      EXPECT_NEAR(area(t), a, 1e-12 * a);
      EXPECT_NEAR(gauss_bonnet_global(t).residual, 0, 1e-9);
    }
  }
}

TEST(Subdivision, RelabelAndTriangulate) {
  for (auto& s : corpus()) {
    std::vector<std::size_t> perm(s.polygons.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    auto r = relabel(s, perm);
    EXPECT_TRUE(validate_surface(r).ok());
    EXPECT_NEAR(area(r), area(s), 1e-12);
    auto tri = triangulate(s);
    EXPECT_TRUE(validate_surface(tri.surface).ok());
    for (auto& P : tri.surface.polygons) EXPECT_EQ(P.size(), 3u);
    EXPECT_NEAR(area(tri.surface), area(s), 1e-12);
    EXPECT_NEAR(gauss_bonnet_global(tri.surface).residual, 0, 1e-9);
    EXPECT_EQ(gauss_bonnet_global(tri.surface).chi, gauss_bonnet_global(s).chi);
  }
}

TEST(Builder, SplitEdgeAndStar) {
  auto s = make_torus();
  SurfaceBuilder b(s);
  b.split_edge(0, 0, {0.3, 0});
  auto t = b.build();
  ASSERT_TRUE(validate_surface(t).ok()) << validate_surface(t).issues.front().detail;
  EXPECT_EQ(cone_points(t).size(), 2u);
  SurfaceBuilder b2(t);
  b2.star_split(0, {0.5, 0.5});
  auto u = b2.build();
  ASSERT_TRUE(validate_surface(u).ok());
  EXPECT_EQ(cone_points(u).size(), 3u);
  EXPECT_NEAR(gauss_bonnet_global(u).residual, 0, 1e-12);
  // self-paired polygon whose partner edge precedes the split edge
  SurfaceBuilder b3(make_torus());
  b3.split_edge(0, 2, {0.25, 1});
  auto w = b3.build();
  ASSERT_TRUE(validate_surface(w).ok());
}

TEST(Points, Canonicalization) {
  auto s = make_torus();
  Topology t(s);
  EXPECT_TRUE(same_point(t, {0, {0.3, 0}}, {0, {0.3, 1}}));
  EXPECT_TRUE(same_point(t, {0, {0, 0}}, {0, {1, 1}}));
  EXPECT_FALSE(same_point(t, {0, {0.3, 0}}, {0, {0.7, 1}}));
  auto c = canonical_point(t, {0, {0.3, 1}});
  EXPECT_NEAR(std::abs(c.position - Point(0.3, 0)), 0, 1e-12);
}

TEST(IO, RoundTrip) {
  for (auto& s : corpus()) {
    auto text = serialize_surface(s);
    auto p = parse_surface_string(text);
    EXPECT_TRUE(surfaces_equal(s, p));
    EXPECT_EQ(serialize_surface(p), text);
  }
}

TEST(IO, Errors) {
  EXPECT_THROW(parse_surface_string("polygon A\n0 0\n1 zero\n"), ParseError);
  EXPECT_THROW(parse_surface_string("pair A.0 A.1 sign=+1\n"), ParseError);
  auto s = parse_surface_string("polygon A\n0 0\n1 0\n1 1\n0 1\npair A.0 A.7 sign=+1\n");
  auto r = validate_surface(s);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.issues.front().element, "A.7");
}

TEST(IO, LocaleIndependentAndComments) {
  auto s = parse_surface_string(
      "# cylinder\npolygon P0  # rectangle\n0 0\n1 0\n1 2\n0 2\npair P0.1 P0.3 sign=+1\n"
      "boundary P0.0 horizontal\nboundary P0.2 horizontal\nmark puncture P0 0.5 1.0\n");
  EXPECT_TRUE(validate_surface(s).ok());
  EXPECT_EQ(s.boundary.size(), 2u);
  EXPECT_EQ(s.marks.size(), 1u);
}
