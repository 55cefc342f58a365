#include <gtest/gtest.h>

#include "hts/corpus.hpp"
#include "hts/foliation.hpp"
#include "hts/surgery.hpp"

using namespace hts;

namespace {

HalfTranslationSurface slit_cylinder() { return cut_slit(make_cylinder(1, 1), {{0, {0, 0.5}}, 0.6, 1}); }

// Boundary vertex cycles that are not straight (angle != pi).
std::vector<double> boundary_turns(const HalfTranslationSurface& s) {
  Topology t(s);
  std::vector<double> r;
  for (auto& cy : t.cycles())
    if (cy.boundary && std::abs(cy.angle - kPi) > 1e-9) r.push_back(cy.angle);
  std::sort(r.begin(), r.end());
  return r;
}

HalfTranslationSurface marked_star_torus() {
  auto s = make_star_torus();
  s.marks.push_back({{0, {0.5, 0.5}}, MarkRole::puncture});
  s.marks.push_back({{0, {1, 0}}, MarkRole::puncture});
  return s;
}

}  // namespace

TEST(CutSlit, CylinderSlit) {
  auto s = slit_cylinder();
  EXPECT_TRUE(validate_surface(s).ok());
  EXPECT_NEAR(area(s), 1.0, 1e-15);
  EXPECT_EQ(s.boundary.size(), 4u);
  int slit_edges = 0;
  for (auto& b : s.boundary) {
    Point a = s.polygons[b.edge.polygon].edge_start(b.edge.edge);
    Point d = s.polygons[b.edge.polygon].edge_vector(b.edge.edge);
    EXPECT_EQ(b.kind, BoundaryKind::horizontal);
    if (std::abs(a.imag() - 0.5) < 1e-12) {
      ++slit_edges;
      EXPECT_NEAR(std::abs(d), 0.6, 1e-15);
    }
  }
  EXPECT_EQ(slit_edges, 2);
  auto turns = boundary_turns(s);
  ASSERT_EQ(turns.size(), 2u);
  for (double a : turns) EXPECT_NEAR(a, kTwoPi, 1e-12);
  auto gb = gauss_bonnet_global(s);
  EXPECT_LT(std::abs(gb.residual), 1e-9);
}

TEST(CutSlit, WrapsAcrossSeam) {
  auto s = cut_slit(make_cylinder(1, 1), {{0, {0.7, 0.25}}, 0.5, 1});
  EXPECT_TRUE(validate_surface(s).ok());
  EXPECT_NEAR(area(s), 1.0, 1e-15);
  EXPECT_EQ(boundary_turns(s).size(), 2u);
  EXPECT_EQ(s.boundary.size(), 6u);  // two pieces on each side
}

TEST(CutSlit, NegativeDirection) {
  auto s = cut_slit(make_torus(), {{0, {0.8, 0.3}}, 0.5, -1});
  EXPECT_TRUE(validate_surface(s).ok());
  EXPECT_EQ(gauss_bonnet_global(s).chi, -1);
}

TEST(CutSlit, ZeroLengthRejected) {
  EXPECT_THROW(cut_slit(make_cylinder(1, 1), {{0, {0, 0.5}}, 0, 1}), PreconditionError);
}

TEST(CutSlit, ThroughConePointRejected) {
  double y = std::sqrt(0.5);
  EXPECT_THROW(cut_slit(make_octagon(), {{0, {0, y}}, 2.0, 1}), PreconditionError);
}

TEST(CutSlit, TouchingBoundaryRejected) {
  EXPECT_THROW(cut_slit(make_cylinder(1, 1), {{0, {0.2, 0}}, 0.3, 1}), PreconditionError);
}

TEST(CutSlit, SelfOverlapRejected) {
  EXPECT_THROW(cut_slit(make_cylinder(1, 1), {{0, {0, 0.5}}, 1.2, 1}), PreconditionError);
}

TEST(CutSlit, FromConePointAlongEdge) {
  auto s = cut_slit(make_tripod(), {{0, {0, 0}}, 0.5, 1});
  EXPECT_TRUE(validate_surface(s).ok());
  auto turns = boundary_turns(s);
  ASSERT_EQ(turns.size(), 2u);
  EXPECT_NEAR(turns[0], 2 * kPi, 1e-12);
  EXPECT_NEAR(turns[1], 3 * kPi, 1e-12);
}

TEST(Unfold, RegularTip) {
  auto r = unfold_slit(slit_cylinder(), {0, {0.6, 0.5}});
  EXPECT_EQ(r.original_prongs, 2);
  EXPECT_EQ(r.unfolded_prongs, 4);
  EXPECT_EQ(r.unfolded_zero_order, 2);
  EXPECT_TRUE(r.consistent);
}

TEST(Unfold, ProngDoublingAtConePoints) {
  for (int n : {2, 3, 4}) {
    HalfTranslationSurface s = n == 2 ? make_cylinder(1, 1) : make_pod(n);
    Point start = n == 2 ? Point(0.2, 0.5) : Point(0, 0);
    Point tip = start;
    auto cut = cut_slit(s, {{0, start}, 0.5, 1});
    auto r = unfold_slit(cut, {0, tip});
    EXPECT_EQ(r.original_prongs, n);
    EXPECT_EQ(r.unfolded_prongs, 2 * n);
    EXPECT_NEAR(r.unfolded_cone_angle, 2 * n * kPi, 1e-12);
    EXPECT_TRUE(r.consistent);
  }
}

TEST(Unfold, PullbackOfDz2BySquare) {
  auto q = pullback_quadratic_differential({1.0}, 2);
  ASSERT_EQ(q.size(), 3u);
  EXPECT_EQ(q[0], 0.0);
  EXPECT_EQ(q[1], 0.0);
  EXPECT_EQ(q[2], 4.0);
}

TEST(Unfold, PullbackOrders) {
  for (int k = 0; k < 5; ++k) {
    Polynomial z(std::size_t(k) + 1, 0.0);
    z.back() = 1;
    EXPECT_EQ(vanishing_order(pullback_quadratic_differential(z, 2)), 2 * k + 2);
  }
}

TEST(Unfold, RejectsNonTips) {
  auto s = slit_cylinder();
  EXPECT_THROW(unfold_slit(s, {0, {0.3, 0.2}}), PreconditionError);
  EXPECT_THROW(unfold_slit(make_cylinder(1, 1), {0, {0, 0}}), PreconditionError);
}

TEST(Enlarge, CylinderBecomesTaller) {
  auto g = glue_cylinders(make_cylinder(1, 1), 0.5);
  EXPECT_TRUE(validate_surface(g).ok());
  EXPECT_TRUE(invariants_match(isometry_invariants(g), isometry_invariants(make_cylinder(2, 1))));
  EXPECT_NEAR(cylinder_modulus(g), 2.0, 1e-15);
}

TEST(Enlarge, ZeroIsIdentity) {
  auto s = make_tripod();
  auto g = glue_cylinders(s, 0);
  EXPECT_EQ(g.polygons.size(), s.polygons.size());
  EXPECT_TRUE(invariants_match(isometry_invariants(g), isometry_invariants(s)));
}

TEST(Enlarge, AreaFormula) {
  auto s = make_tripod();
  auto g = glue_cylinders(s, 0.5);
  EXPECT_TRUE(validate_surface(g).ok());
  EXPECT_NEAR(area(g), area(s) + 3 * 0.5 * 4, 1e-12);
}

TEST(Enlarge, SlitBoundaryRejected) { EXPECT_THROW(glue_cylinders(slit_cylinder(), 0.5), PreconditionError); }

TEST(Enlarge, Additive) {
  for (auto s : {make_cylinder(1, 1), make_tripod(), make_cylinder(0.3, 2)}) {
    auto a = glue_cylinders(glue_cylinders(s, 0.3), 0.4);
    auto b = glue_cylinders(s, 0.7);
    EXPECT_TRUE(invariants_match(isometry_invariants(a), isometry_invariants(b)));
  }
}

TEST(Enlarge, GeodesicAcrossCollar) {
  // the distance between the two boundary circles of C(1) enlarged by r is 1 + 2r
  auto g = glue_cylinders(make_cylinder(1, 1), 0.25);
  std::size_t lo = 0, hi = 0;
  for (std::size_t p = 0; p < g.polygons.size(); ++p) {
    double y0 = 1e9, y1 = -1e9;
    for (auto z : g.polygons[p].vertices) {
      y0 = std::min(y0, z.imag());
      y1 = std::max(y1, z.imag());
    }
    if (y0 < -0.2) lo = p;
    if (y1 > 1.2) hi = p;
  }
  auto path = geodesic_between(g, {lo, {0.5, -0.25}}, {hi, {0.5, 1.25}});
  EXPECT_NEAR(path.length, 1.5, 1e-12);
}

TEST(Extension, ClosedForm) {
  EXPECT_DOUBLE_EQ(modulus_of_extension_cylinder(1, 3), 1.0);
  EXPECT_DOUBLE_EQ(modulus_of_extension_cylinder(2, 2), 0.0);
  EXPECT_THROW(modulus_of_extension_cylinder(2, 1), PreconditionError);
}

TEST(Extension, Monotone) {
  EXPECT_LT(modulus_of_extension_cylinder(1, 2), modulus_of_extension_cylinder(1, 3));
  EXPECT_GT(modulus_of_extension_cylinder(0.5, 3), modulus_of_extension_cylinder(1, 3));
}

TEST(Extension, SearchAgreesAndFillsCodomain) {
  for (auto [hx, hy] : {std::pair{1.0, 3.0}, {0.5, 0.7}, {2.0, 2.0}, {0.1, 9.0}}) {
    auto r = extension_search(hx, hy);
    EXPECT_NEAR(r.searched, r.closed_form, hx == hy ? 1e-7 : 1e-9);
    EXPECT_NEAR(r.complement_area, 0, 1e-12);
    EXPECT_TRUE(r.slit_mapping);
  }
}

TEST(Cover, TorusWithTwoBranchPoints) {
  auto s = marked_star_torus();
  auto c = double_cover_branched(s, {{0, 1}, {{{0, 1}}}});
  EXPECT_TRUE(validate_surface(c.surface).ok());
  EXPECT_EQ(c.report.chi_cover, -2);
  EXPECT_TRUE(c.report.riemann_hurwitz);
  EXPECT_NEAR(c.report.gauss_bonnet_chi, -2, 1e-9);
  EXPECT_TRUE(c.report.local_degree_ok);
  EXPECT_TRUE(c.report.deck_ok);
  ASSERT_EQ(c.report.branch_angles.size(), 2u);
  for (double a : c.report.branch_angles) EXPECT_NEAR(a, 4 * kPi, 1e-12);
}

TEST(Cover, UnbranchedLoop) {
  auto c = double_cover_branched(make_torus(), {{}, {{{0, 0}}}});
  EXPECT_EQ(c.report.chi_cover, 0);
  EXPECT_TRUE(c.report.riemann_hurwitz);
  EXPECT_TRUE(c.report.deck_ok);
  EXPECT_NEAR(area(c.surface), 2.0, 1e-15);
}

TEST(Cover, EnergyDoubles) {
  auto s = marked_star_torus();
  auto c = double_cover_branched(s, {{0, 1}, {{{0, 1}}}});
  for (auto o : {Orientation::horizontal, Orientation::vertical}) {
    double base = dirichlet_energy(foliation_from_differential(s, o));
    double up = dirichlet_energy(foliation_from_differential(c.surface, o));
    EXPECT_EQ(up, 2 * base);
  }
}

TEST(Cover, OddBranchSetRejected) {
  EXPECT_THROW(double_cover_branched(marked_star_torus(), {{0}, {{{0, 1}}}}), PreconditionError);
}

TEST(Cover, IntersectingArcsRejected) {
  auto s = marked_star_torus();
  s.marks.push_back({{1, {1, 1}}, MarkRole::puncture});
  s.marks.push_back({{2, {0, 1}}, MarkRole::puncture});
  // all four outer corners are one vertex on the torus, so these arcs meet there
  EXPECT_THROW(double_cover_branched(s, {{0, 1, 2, 3}, {{{0, 1}}, {{2, 1}}}}), PreconditionError);
}

TEST(Cover, ArcMustEndAtBranchPoints) {
  auto s = marked_star_torus();
  EXPECT_THROW(double_cover_branched(s, {{0, 1}, {{{0, 0}}}}), PreconditionError);
}

TEST(Flow, FigureModelPasses) {
  FlowModel m{1, 1, {{0.5, 0, 0.6}}};
  auto r = horizontal_flow_family(m, 0.2);
  EXPECT_TRUE(r.verdict.passed());
  ASSERT_EQ(r.verdict.complement.size(), 1u);
  auto seg = r.verdict.complement[0];
  EXPECT_TRUE(seg.horizontal);
  EXPECT_NEAR(std::abs(seg.b.position - seg.a.position), 0.6, 1e-12);
  EXPECT_NEAR(std::min(seg.a.position.real(), seg.b.position.real()), 0.2, 1e-12);
  EXPECT_NEAR(r.verdict.clearance, 0.4, 1e-15);
}

TEST(Flow, TimeZeroIsIdentity) {
  FlowModel m{1, 1, {{0.5, 0, 0.6}}};
  auto r = horizontal_flow_family(m, 0);
  EXPECT_TRUE(r.verdict.passed());
  for (auto& f : r.map.faces) EXPECT_EQ(f.b, Point(0, 0));
}

TEST(Flow, CollisionPastClearance) {
  FlowModel m{1, 1, {{0.5, 0, 0.6}}};
  EXPECT_THROW(horizontal_flow_family(m, 0.45), PreconditionError);
  EXPECT_THROW(horizontal_flow_family(m, 0.4), PreconditionError);
  EXPECT_NO_THROW(horizontal_flow_family(m, 0.4 - 1e-9));
}

TEST(Flow, TwoSlitsOnOneLine) {
  FlowModel m{2, 1, {{0.5, 0.1, 0.2}, {0.5, 0.6, 0.1}, {1.5, 0.0, 0.9}}};
  auto c = flow_clearance(m);
  EXPECT_NEAR(c.value, 0.1, 1e-15);
  EXPECT_EQ(c.moving, 2u);
  auto r = horizontal_flow_family(m, 0.05);
  EXPECT_TRUE(r.verdict.passed());
  EXPECT_EQ(r.verdict.complement.size(), 3u);
}

TEST(Flow, EvaluationInjectiveInTime) {
  FlowModel m{1, 1, {{0.5, 0, 0.6}}};
  SurfacePoint x{0, {0.3, 0.2}};
  std::vector<Point> images;
  for (int k = 0; k < 20; ++k) {
    double t = 0.39 * k / 19;
    auto r = horizontal_flow_family(m, t, 5);
    ASSERT_TRUE(r.verdict.passed());
    std::size_t poly = 0;
    for (std::size_t p = 0; p < r.domain.polygons.size(); ++p)
      if (locate_point(r.domain.polygons[p], x.position).kind != PointLocation::Kind::outside) poly = p;
    images.push_back(r.map.apply({poly, x.position}).position);
  }
  for (std::size_t i = 0; i < images.size(); ++i)
    for (std::size_t j = i + 1; j < images.size(); ++j) EXPECT_GT(std::abs(images[i] - images[j]), 1e-6);
}
