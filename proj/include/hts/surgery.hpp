#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hts/corpus.hpp"
#include "hts/geodesics.hpp"
#include "hts/qc_maps.hpp"
#include "hts/surface_io.hpp"

namespace hts {

// ---------------------------------------------------------------------------
// Slits

// Horizontal slit starting at `start`, running in direction `direction` (+1 or -1 along x of the start polygon).
struct SlitSpec {
  SurfacePoint start;
  double length = 0;
  int direction = 1;
};

namespace detail {

inline std::optional<std::size_t> vertex_at(const SurfaceBuilder::Face& F, Point z, double tol) {
  for (std::size_t i = 0; i < F.v.size(); ++i)
    if (std::abs(F.v[i] - z) <= tol) return i;
  return std::nullopt;
}

// Makes z a vertex of face f (z on its boundary); returns its index.
inline std::size_t ensure_vertex(SurfaceBuilder& b, std::size_t f, Point z, double tol) {
  if (auto i = vertex_at(b.face(f), z, tol)) return *i;
  const auto& F = b.face(f);
  for (std::size_t e = 0; e < F.v.size(); ++e)
    if (on_segment(z, F.v[e], F.v[(e + 1) % F.v.size()], tol)) {
      b.split_edge(f, e, z, tol);
      return *vertex_at(b.face(f), z, tol);
    }
  throw PreconditionError("point is not on the face boundary");
}

// First boundary point of face F hit by the ray z + s*d, s > 0.
inline Point ray_exit(const std::vector<Point>& v, Point z, Point d) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < v.size(); ++e) {
    auto h = line_intersection(z, z + d, v[e], v[(e + 1) % v.size()]);
    if (!h) continue;
    auto [t, mu] = *h;
    if (t > 1e-12 && mu >= -1e-12 && mu <= 1 + 1e-12) best = std::min(best, t);
  }
  if (!std::isfinite(best)) throw StructuralError("ray does not leave the face");
  return z + best * d;
}

// Open interiors of two simple polygons intersect.
inline bool interiors_overlap(const std::vector<Point>& P, const std::vector<Point>& Q, double tol = 1e-12) {
  auto proper = [&](Point a, Point b, Point c, Point d) {
    double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a), d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol));
  };
  for (std::size_t i = 0; i < P.size(); ++i)
    for (std::size_t j = 0; j < Q.size(); ++j)
      if (proper(P[i], P[(i + 1) % P.size()], Q[j], Q[(j + 1) % Q.size()])) return true;
  if (locate_in_polygon(Q, centroid(P), tol) == Containment::inside) return true;
  if (locate_in_polygon(P, centroid(Q), tol) == Containment::inside) return true;
  return false;
}

inline bool on_face_boundary(const std::vector<Point>& v, Point z, double tol) {
  for (std::size_t e = 0; e < v.size(); ++e)
    if (on_segment(z, v[e], v[(e + 1) % v.size()], tol)) return true;
  return false;
}

}  // namespace detail

inline HalfTranslationSurface cut_slit(const HalfTranslationSurface& s, const SlitSpec& slit) {
  if (!(slit.length > 0)) throw PreconditionError("slit length must be positive");
  if (slit.direction != 1 && slit.direction != -1) throw PreconditionError("slit direction must be +1 or -1");
  Topology top(s);
  if (slit.start.polygon >= s.polygons.size()) throw PreconditionError("slit starts in an unknown polygon");
  const double tol = 1e-10;
  auto start_loc = locate_point(s.polygons[slit.start.polygon], slit.start.position, tol);
  if (start_loc.kind == PointLocation::Kind::outside) throw PreconditionError("slit start lies outside its polygon");
  if (start_loc.kind == PointLocation::Kind::edge && top.is_boundary({slit.start.polygon, start_loc.index}))
    throw PreconditionError("slit touches existing boundary at its start");
  if (start_loc.kind == PointLocation::Kind::vertex &&
      top.cycles()[top.cycle_of({slit.start.polygon, start_loc.index})].boundary)
    throw PreconditionError("slit touches existing boundary at its start");
  Point dir(slit.direction, 0);
  TraceResult tr;
  try {
    tr = trace_straight(top, slit.start, dir, slit.length);
  } catch (const PreconditionError& e) {
    std::string w = e.what();
    if (w.find("boundary") != std::string::npos) throw PreconditionError("slit touches existing boundary");
    throw PreconditionError("slit passes through a vertex (cone point) in its interior");
  }
  {
    auto end_loc = locate_point(s.polygons[tr.end.polygon], tr.end.position, tol);
    if (end_loc.kind == PointLocation::Kind::edge && top.is_boundary({tr.end.polygon, end_loc.index}))
      throw PreconditionError("slit touches existing boundary at its end");
    if (end_loc.kind == PointLocation::Kind::vertex &&
        top.cycles()[top.cycle_of({tr.end.polygon, end_loc.index})].boundary)
      throw PreconditionError("slit touches existing boundary at its end");
  }
  SurfaceBuilder b(s);
  for (const auto& seg : tr.segments) {
    Point a = seg.a.position, c = seg.b.position;
    if (std::abs(c - a) <= tol) continue;
    Point d = (c - a) / std::abs(c - a);
    Point mid = 0.5 * (a + c);
    // face holding the piece: interior midpoint, or an existing edge carrying it
    std::optional<std::size_t> face;
    bool along_edge = false;
    for (std::size_t f = 0; f < b.face_count() && !face; ++f) {
      const auto& F = b.face(f);
      if (F.parent != seg.a.polygon) continue;
      auto in = locate_in_polygon(F.v, mid, tol);
      if (in == Containment::inside) face = f;
      if (in == Containment::boundary) {
        for (std::size_t e = 0; e < F.v.size(); ++e)
          if (on_segment(a, F.v[e], F.v[(e + 1) % F.v.size()], tol) &&
              on_segment(c, F.v[e], F.v[(e + 1) % F.v.size()], tol)) {
            if (F.links[e].kind == EdgeLink::Kind::boundary) throw PreconditionError("slit overlaps a boundary edge");
            face = f;
            along_edge = true;
          }
      }
    }
    if (!face) throw StructuralError("slit piece not found in the working surface");
    std::size_t f = *face;
    if (!along_edge) {
      Point c0 = detail::on_face_boundary(b.face(f).v, a, tol) ? a : detail::ray_exit(b.face(f).v, a, -d);
      Point c1 = detail::on_face_boundary(b.face(f).v, c, tol) ? c : detail::ray_exit(b.face(f).v, c, d);
      detail::ensure_vertex(b, f, c0, tol);
      detail::ensure_vertex(b, f, c1, tol);
      std::size_t i0 = *detail::vertex_at(b.face(f), c0, tol), i1 = *detail::vertex_at(b.face(f), c1, tol);
      std::size_t n = b.face(f).v.size();
      if ((i0 + 1) % n != i1 && (i1 + 1) % n != i0) b.split_polygon(f, std::min(i0, i1), std::max(i0, i1));
    }
    // the chord now is an edge of f; put vertices at the slit ends and mark the piece as boundary
    detail::ensure_vertex(b, f, a, tol);
    detail::ensure_vertex(b, f, c, tol);
    const auto& F = b.face(f);
    std::size_t ia = *detail::vertex_at(F, a, tol), ic = *detail::vertex_at(F, c, tol);
    std::size_t n = F.v.size();
    std::optional<std::size_t> edge;
    if ((ia + 1) % n == ic) edge = ia;
    if ((ic + 1) % n == ia) edge = ic;
    if (!edge) throw StructuralError("slit piece is not a single edge after splitting");
    if (F.links[*edge].kind == EdgeLink::Kind::boundary) throw PreconditionError("slit overlaps itself");
    b.set_boundary({f, *edge}, BoundaryKind::horizontal);
  }
  HalfTranslationSurface r = b.build();
  require_valid(r);
  return r;
}

// ---------------------------------------------------------------------------
// Unfolding bookkeeping

// Polynomial q(z) as coefficients c[k] of z^k.
using Polynomial = std::vector<double>;

// Pull back q(z) dz^2 under z = zeta^m: q(zeta^m) (m zeta^(m-1))^2 dzeta^2.
inline Polynomial pullback_quadratic_differential(const Polynomial& q, int m) {
  if (m < 1) throw PreconditionError("pullback degree must be positive");
  Polynomial r;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (q[k] == 0) continue;
    std::size_t deg = k * std::size_t(m) + 2 * std::size_t(m - 1);
    if (r.size() <= deg) r.resize(deg + 1, 0.0);
    r[deg] += q[k] * double(m) * double(m);
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

inline int vanishing_order(const Polynomial& q) {
  for (std::size_t k = 0; k < q.size(); ++k)
    if (q[k] != 0) return int(k);
  throw PreconditionError("zero differential");
}

struct UnfoldReport {
  int original_prongs = 0;        // n: tip angle is n*pi
  double tip_angle = 0;
  int unfolded_prongs = 0;        // 2n
  int unfolded_zero_order = 0;    // 2n - 2
  double unfolded_cone_angle = 0;  // 2n*pi
  int pullback_order = 0;          // order of z^(n-2) dz^2 pulled back by z = zeta^2
  bool consistent = false;
};

// Local model at a slit tip: a boundary vertex with both adjacent boundary edges horizontal.
inline UnfoldReport unfold_slit(const HalfTranslationSurface& s, SurfacePoint tip) {
  Topology t(s);
  if (tip.polygon >= s.polygons.size()) throw PreconditionError("tip references an unknown polygon");
  auto loc = locate_point(s.polygons[tip.polygon], tip.position, 1e-9);
  if (loc.kind != PointLocation::Kind::vertex) throw PreconditionError("tip is not a vertex, so not a slit endpoint");
  const VertexCycle& cy = t.cycles()[t.cycle_of({tip.polygon, loc.index})];
  if (!cy.boundary) throw PreconditionError("tip is not a slit endpoint (interior point)");
  Corner first = cy.corners.front(), last = cy.corners.back();
  const Polygon& P0 = s.polygons[first.polygon];
  const Polygon& P1 = s.polygons[last.polygon];
  EdgeRef in{first.polygon, (first.vertex + P0.size() - 1) % P0.size()};
  EdgeRef out{last.polygon, last.vertex};
  auto horizontal = [&](EdgeRef e) {
    Point d = s.polygons[e.polygon].edge_vector(e.edge);
    return t.link(e).boundary == BoundaryKind::horizontal && std::abs(d.imag()) <= 1e-12 * std::abs(d);
  };
  (void)P1;
  if (!horizontal(in) || !horizontal(out)) throw PreconditionError("tip is not a slit endpoint (boundary not horizontal)");
  double n_real = cy.angle / kPi;
  int n = int(std::lround(n_real));
  if (std::abs(n_real - n) > 1e-9 || n < 2) throw PreconditionError("tip is not a slit endpoint (angle below 2pi)");
  UnfoldReport r;
  r.original_prongs = n;
  r.tip_angle = cy.angle;
  r.unfolded_prongs = 2 * n;
  r.unfolded_zero_order = 2 * n - 2;
  r.unfolded_cone_angle = 2 * n * kPi;
  Polynomial q(std::size_t(n - 2) + 1, 0.0);
  q.back() = 1;
  r.pullback_order = vanishing_order(pullback_quadratic_differential(q, 2));
  r.consistent = r.pullback_order == r.unfolded_zero_order && r.unfolded_prongs == r.unfolded_zero_order + 2;
  return r;
}

// ---------------------------------------------------------------------------
// Cylinder enlargement

struct BoundaryCircle {
  std::vector<EdgeRef> edges;  // in order along the boundary
  double circumference = 0;
};

// Boundary components that develop to closed horizontal circles; throws otherwise.
inline std::vector<BoundaryCircle> boundary_circles(const HalfTranslationSurface& s) {
  Topology t(s);
  std::vector<BoundaryCircle> out;
  std::set<EdgeRef> seen;
  for (auto& be : s.boundary) {
    if (seen.count(be.edge)) continue;
    BoundaryCircle c;
    EdgeRef e = be.edge;
    for (std::size_t guard = 0; guard <= s.boundary.size(); ++guard) {
      if (t.link(e).boundary != BoundaryKind::horizontal)
        throw PreconditionError("boundary edge " + edge_name(s, e) + " is free, not circle-developable");
      Point d = s.polygons[e.polygon].edge_vector(e.edge);
      if (std::abs(d.imag()) > 1e-12 * std::abs(d))
        throw PreconditionError("boundary edge " + edge_name(s, e) + " is not horizontal");
      seen.insert(e);
      c.edges.push_back(e);
      c.circumference += std::abs(d);
      const Polygon& P = s.polygons[e.polygon];
      Corner end{e.polygon, (e.edge + 1) % P.size()};
      const VertexCycle& cy = t.cycles()[t.cycle_of(end)];
      if (std::abs(cy.angle - kPi) > 1e-9)
        throw PreconditionError("boundary component through " + edge_name(s, e) +
                                " turns at a vertex (angle " + std::to_string(cy.angle / kPi) +
                                " pi): not a round circle (slit boundary?)");
      Corner last = cy.corners.back();
      EdgeRef next{last.polygon, last.vertex};
      if (next == c.edges.front()) break;
      e = next;
    }
    out.push_back(std::move(c));
  }
  return out;
}

// X_r: a flat cylinder of modulus r (height r * circumference) glued onto every boundary circle.
inline HalfTranslationSurface glue_cylinders(const HalfTranslationSurface& s, double r) {
  if (!(r >= 0)) throw PreconditionError("enlargement modulus must be nonnegative");
  auto circles = boundary_circles(s);
  if (r == 0) return s;
  const HalfTranslationSurface& base = s;
  std::vector<Polygon> polys = base.polygons;
  std::vector<Pairing> pairs = base.pairings;
  std::vector<BoundaryEdge> bound;
  std::set<EdgeRef> replaced;
  for (std::size_t k = 0; k < circles.size(); ++k) {
    const auto& C = circles[k];
    const double H = r * C.circumference;
    std::vector<std::size_t> ids;
    for (std::size_t j = 0; j < C.edges.size(); ++j) {
      EdgeRef e = C.edges[j];
      const Polygon& P = s.polygons[e.polygon];
      Point a = P.edge_start(e.edge), bb = P.edge_end(e.edge);
      Point d = (bb - a) / std::abs(bb - a);
      Point n = d * Point(0, -1);  // outward
      std::size_t id = polys.size();
      polys.push_back({"cyl" + std::to_string(k) + "_" + std::to_string(j), {bb, a, a + H * n, bb + H * n}});
      ids.push_back(id);
      pairs.push_back({e, {id, 0}, 1});
      bound.push_back({{id, 2}, BoundaryKind::horizontal});
      replaced.insert(e);
    }
    for (std::size_t j = 0; j < ids.size(); ++j) {
      std::size_t cur = ids[j], nxt = ids[(j + 1) % ids.size()];
      // side at the far end of edge j meets the side at the near end of edge j+1
      Point va = polys[cur].edge_vector(3), vb = polys[nxt].edge_vector(1);
      int sign = std::abs(va + vb) <= 1e-9 * std::abs(va) ? 1 : -1;
      if (ids.size() == 1) {
        pairs.push_back({{cur, 3}, {cur, 1}, sign});
      } else {
        pairs.push_back({{cur, 3}, {nxt, 1}, sign});
      }
    }
  }
  for (auto& be : base.boundary)
    if (!replaced.count(be.edge)) bound.push_back(be);
  HalfTranslationSurface out;
  out.polygons = polys;
  out.pairings = pairs;
  out.boundary = bound;
  out.marks = base.marks;
  require_valid(out);
  return out;
}

// Flat-geometry invariants used to compare surfaces up to isometry without a common cell structure.
struct IsometryInvariants {
  double area = 0;
  int chi = 0;
  std::vector<double> cone_angles;     // singular cycles only
  std::vector<double> boundary_lengths;
};

inline IsometryInvariants isometry_invariants(const HalfTranslationSurface& s) {
  IsometryInvariants v;
  v.area = area(s);
  Topology t(s);
  v.chi = t.euler_characteristic();
  for (auto& cy : t.cycles()) {
    bool regular = cy.boundary ? std::abs(cy.angle - kPi) < 1e-9 : std::abs(cy.angle - kTwoPi) < 1e-9;
    if (!regular) v.cone_angles.push_back(cy.angle);
  }
  std::sort(v.cone_angles.begin(), v.cone_angles.end());
  // boundary lengths per component (components traced through vertex cycles)
  std::set<EdgeRef> seen;
  for (auto& be : s.boundary) {
    if (seen.count(be.edge)) continue;
    double len = 0;
    EdgeRef e = be.edge;
    for (std::size_t guard = 0; guard <= s.boundary.size(); ++guard) {
      if (!seen.insert(e).second) break;
      len += std::abs(s.polygons[e.polygon].edge_vector(e.edge));
      const Polygon& P = s.polygons[e.polygon];
      const VertexCycle& cy = t.cycles()[t.cycle_of({e.polygon, (e.edge + 1) % P.size()})];
      Corner last = cy.corners.back();
      e = {last.polygon, last.vertex};
    }
    v.boundary_lengths.push_back(len);
  }
  std::sort(v.boundary_lengths.begin(), v.boundary_lengths.end());
  return v;
}

inline bool invariants_match(const IsometryInvariants& a, const IsometryInvariants& b, double tol = 1e-12) {
  auto close = [&](const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (std::abs(x[k] - y[k]) > tol * std::max(1.0, std::abs(x[k]))) return false;
    return true;
  };
  return std::abs(a.area - b.area) <= tol * std::max(1.0, a.area) && a.chi == b.chi &&
         close(a.cone_angles, b.cone_angles) && close(a.boundary_lengths, b.boundary_lengths);
}

// ---------------------------------------------------------------------------
// Modulus of extension for flat cylinders of circumference 1

struct ExtensionReport {
  double closed_form = 0;
  double searched = 0;
  int iterations = 0;
  double complement_area = 0;
  bool slit_mapping = false;
};

inline double cylinder_modulus(const HalfTranslationSurface& c) {
  auto circles = boundary_circles(c);
  if (circles.size() != 2 || std::abs(circles[0].circumference - circles[1].circumference) > 1e-12)
    throw PreconditionError("surface is not a flat cylinder");
  return area(c) / (circles[0].circumference * circles[0].circumference);
}

inline double modulus_of_extension_cylinder(double hX, double hY) {
  if (!(hX > 0) || !(hY > 0)) throw PreconditionError("cylinder heights must be positive");
  if (hX > hY) throw PreconditionError("no conformal embedding: C(hX) has larger modulus than C(hY)");
  return (hY - hX) / 2;
}

// Bisection for the largest r with modulus(X_r) <= modulus(Y), then the slit-mapping check at that r.
inline ExtensionReport extension_search(double hX, double hY, double tol = 1e-13) {
  ExtensionReport rep;
  rep.closed_form = modulus_of_extension_cylinder(hX, hY);
  auto X = make_cylinder(hX, 1);
  const double mY = cylinder_modulus(make_cylinder(hY, 1));
  auto fits = [&](double r) { return cylinder_modulus(glue_cylinders(X, r)) <= mY * (1 + 1e-15); };
  double lo = 0, hi = 1;
  while (fits(hi)) hi *= 2;
  // collars near the vertex tolerance cannot be built; such r count as 0
  while (hi - lo > tol * std::max(1.0, hi) && hi > 16 * kLengthTol && rep.iterations < 200) {
    double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
    ++rep.iterations;
  }
  rep.searched = lo;
  // embed X_r into Y by the vertical translation that centres it
  auto Xr = glue_cylinders(X, rep.closed_form);
  PiecewiseAffineMap m;
  m.domain = Xr;
  m.codomain = make_cylinder(hY, 1);
  for (std::size_t k = 0; k < Xr.polygons.size(); ++k) m.faces.push_back({Mat2{}, {0, rep.closed_form}, 0});
  auto v = teichmuller_embedding_check(m, 1);
  rep.complement_area = v.complement_area;
  rep.slit_mapping = v.passed;
  return rep;
}

// ---------------------------------------------------------------------------
// Branched double covers

struct CoverSpec {
  std::vector<std::size_t> branch_marks;      // indices into s.marks (punctures at vertices)
  std::vector<std::vector<EdgeRef>> arcs;      // edge paths; closed loops allowed when unbranched
};

struct CoverReport {
  int degree = 2;
  int chi_base = 0;
  int chi_cover = 0;
  int branch_count = 0;
  double gauss_bonnet_chi = 0;  // chi(W) recomputed from cone angles
  bool riemann_hurwitz = false;
  bool local_degree_ok = false;
  bool deck_ok = false;
  std::vector<double> branch_angles;  // total angle of each lifted branch point
};

struct CoverResult {
  HalfTranslationSurface surface;
  CoverReport report;
  std::vector<std::size_t> deck;  // polygon involution
};

inline CoverResult double_cover_branched(const HalfTranslationSurface& s, const CoverSpec& spec) {
  if (spec.branch_marks.size() % 2 != 0) throw PreconditionError("branch set must have even cardinality");
  Topology t(s);
  // branch points as vertex cycles
  std::vector<std::size_t> branch_cycles;
  for (std::size_t m : spec.branch_marks) {
    if (m >= s.marks.size()) throw PreconditionError("branch point refers to an unknown mark");
    const auto& mk = s.marks[m];
    if (mk.role != MarkRole::puncture) throw PreconditionError("branch points must be marked punctures");
    auto loc = locate_point(s.polygons[mk.point.polygon], mk.point.position, 1e-9);
    if (loc.kind != PointLocation::Kind::vertex) throw PreconditionError("branch point must be a polygon vertex");
    std::size_t c = t.cycle_of({mk.point.polygon, loc.index});
    if (std::find(branch_cycles.begin(), branch_cycles.end(), c) != branch_cycles.end())
      throw PreconditionError("branch point listed twice");
    branch_cycles.push_back(c);
  }
  // arcs: connected edge paths, pairwise disjoint, endpoints exactly the branch points
  std::set<EdgeRef> cut;
  std::map<std::size_t, int> endpoint_use;
  std::set<std::size_t> used_vertices;
  auto canon = [&](EdgeRef e) {
    const EdgeLink& l = t.link(e);
    return (l.kind == EdgeLink::Kind::paired && l.partner < e) ? l.partner : e;
  };
  auto ends = [&](EdgeRef e) {
    const Polygon& P = s.polygons[e.polygon];
    return std::make_pair(t.cycle_of({e.polygon, e.edge}), t.cycle_of({e.polygon, (e.edge + 1) % P.size()}));
  };
  for (const auto& arc : spec.arcs) {
    if (arc.empty()) throw PreconditionError("empty cut arc");
    std::map<std::size_t, int> deg;
    for (EdgeRef e : arc) {
      if (e.polygon >= s.polygons.size() || e.edge >= s.polygons[e.polygon].size())
        throw PreconditionError("cut arc references an unknown edge");
      if (t.link(e).kind != EdgeLink::Kind::paired) throw PreconditionError("cut arcs must run along interior edges");
      if (!cut.insert(canon(e)).second) throw PreconditionError("arcs intersect (shared edge " + edge_name(s, e) + ")");
      auto [u, v] = ends(e);
      deg[u]++;
      deg[v]++;
    }
    std::vector<std::size_t> odd;
    for (auto [v, d] : deg) {
      if (d > 2) throw PreconditionError("cut arc is not a simple path");
      if (d % 2) odd.push_back(v);
      if (!used_vertices.insert(v).second) throw PreconditionError("arcs intersect at a vertex");
    }
    if (odd.size() != 0 && odd.size() != 2) throw PreconditionError("cut arc is not a path");
    for (auto v : odd) {
      if (std::find(branch_cycles.begin(), branch_cycles.end(), v) == branch_cycles.end())
        throw PreconditionError("cut arc ends at a point that is not a branch point");
      endpoint_use[v]++;
    }
    // connectivity of the arc
    std::map<std::size_t, std::vector<std::size_t>> adj;
    for (EdgeRef e : arc) {
      auto [u, v] = ends(e);
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    std::set<std::size_t> reach{adj.begin()->first};
    std::vector<std::size_t> stack{adj.begin()->first};
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto v : adj[u])
        if (reach.insert(v).second) stack.push_back(v);
    }
    if (reach.size() != adj.size()) throw PreconditionError("cut arc is not connected");
  }
  for (auto c : branch_cycles)
    if (endpoint_use[c] != 1) throw PreconditionError("every branch point must end exactly one cut arc");

  const std::size_t n = s.polygons.size();
  CoverResult res;
  auto& W = res.surface;
  for (int copy = 0; copy < 2; ++copy)
    for (auto& P : s.polygons) W.polygons.push_back({P.name + (copy == 0 ? "_a" : "_b"), P.vertices});
  auto lift = [&](EdgeRef e, int copy) { return EdgeRef{e.polygon + std::size_t(copy) * n, e.edge}; };
  for (auto& pr : s.pairings) {
    bool swap = cut.count(canon(pr.a)) > 0;
    for (int copy = 0; copy < 2; ++copy) W.pairings.push_back({lift(pr.a, copy), lift(pr.b, swap ? 1 - copy : copy), pr.sign});
  }
  for (auto& b : s.boundary)
    for (int copy = 0; copy < 2; ++copy) W.boundary.push_back({lift(b.edge, copy), b.kind});
  for (auto& mk : s.marks)
    for (std::size_t copy = 0; copy < 2; ++copy) {
      auto loc = locate_point(s.polygons[mk.point.polygon], mk.point.position, 1e-9);
      bool branch = false;
      if (loc.kind == PointLocation::Kind::vertex)
        branch = std::find(branch_cycles.begin(), branch_cycles.end(), t.cycle_of({mk.point.polygon, loc.index})) !=
                 branch_cycles.end();
      if (branch && copy == 1) continue;
      W.marks.push_back({{mk.point.polygon + copy * n, mk.point.position}, mk.role});
    }
  res.deck.resize(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    res.deck[k] = k + n;
    res.deck[k + n] = k;
  }
  require_valid(W);

  auto& R = res.report;
  Topology tw(W);
  R.chi_base = t.euler_characteristic();
  R.chi_cover = tw.euler_characteristic();
  R.branch_count = int(branch_cycles.size());
  auto gb = gauss_bonnet_global(W);
  R.gauss_bonnet_chi = gb.lhs / kTwoPi;
  R.riemann_hurwitz = R.chi_cover == 2 * R.chi_base - R.branch_count &&
                      std::abs(R.gauss_bonnet_chi - (2 * R.chi_base - R.branch_count)) < 1e-9;
  // local degree: each lifted cycle covers its base cycle once (regular) or twice (branch)
  R.local_degree_ok = true;
  std::vector<int> preimages(t.cycles().size(), 0);
  for (const auto& cy : tw.cycles()) {
    Corner c0 = cy.corners.front();
    std::size_t base = t.cycle_of({c0.polygon % n, c0.vertex});
    preimages[base]++;
    bool is_branch = std::find(branch_cycles.begin(), branch_cycles.end(), base) != branch_cycles.end();
    double expect = (is_branch ? 2 : 1) * t.cycles()[base].angle;
    if (std::abs(cy.angle - expect) > 1e-9) R.local_degree_ok = false;
    if (is_branch) R.branch_angles.push_back(cy.angle);
  }
  for (std::size_t c = 0; c < preimages.size(); ++c) {
    bool is_branch = std::find(branch_cycles.begin(), branch_cycles.end(), c) != branch_cycles.end();
    if (preimages[c] != (is_branch ? 1 : 2)) R.local_degree_ok = false;
  }
  // deck involution: preserves the gluing pattern, fixes no polygon, fixes only branch vertices
  std::set<std::pair<EdgeRef, EdgeRef>> pset;
  for (auto& pr : W.pairings) pset.insert(std::minmax(pr.a, pr.b));
  R.deck_ok = true;
  for (auto& pr : W.pairings) {
    EdgeRef a{res.deck[pr.a.polygon], pr.a.edge}, b{res.deck[pr.b.polygon], pr.b.edge};
    if (!pset.count(std::minmax(a, b))) R.deck_ok = false;
  }
  int fixed = 0;
  for (const auto& cy : tw.cycles()) {
    Corner c0 = cy.corners.front();
    if (tw.cycle_of({res.deck[c0.polygon], c0.vertex}) == tw.cycle_of(c0)) ++fixed;
  }
  if (fixed != R.branch_count) R.deck_ok = false;
  return res;
}

// ---------------------------------------------------------------------------
// Horizontal flow on a slit cylinder

struct HorizontalSlit {
  double y = 0, x0 = 0, length = 0;
};

// Flat cylinder [0,c) x [0,h] with horizontal slits; the flow of 1/omega is translation in +x.
struct FlowModel {
  double height = 1, circumference = 1;
  std::vector<HorizontalSlit> slits;
};

struct FlowClearance {
  double value = std::numeric_limits<double>::infinity();
  std::size_t moving = 0;      // slit whose leading tip runs ahead
  std::size_t obstructed = 0;  // slit whose trailing tip is hit
};

// Distance the slit set can be translated forward before a leading tip reaches a slit.
inline FlowClearance flow_clearance(const FlowModel& m) {
  FlowClearance c;
  const double C = m.circumference;
  for (std::size_t i = 0; i < m.slits.size(); ++i)
    for (std::size_t j = 0; j < m.slits.size(); ++j) {
      const auto& a = m.slits[i];
      const auto& b = m.slits[j];
      if (std::abs(a.y - b.y) > 1e-12) continue;
      double lead = a.x0 + a.length;
      double gap = std::fmod(b.x0 - lead, C);
      if (gap < 0) gap += C;
      if (gap < c.value) c = {gap, i, j};
    }
  return c;
}

inline HalfTranslationSurface flow_domain(const FlowModel& m) {
  if (!(m.height > 0) || !(m.circumference > 0)) throw PreconditionError("cylinder must have positive size");
  HalfTranslationSurface X = make_cylinder(m.height, m.circumference);
  for (std::size_t i = 0; i < m.slits.size(); ++i) {
    const auto& sl = m.slits[i];
    if (!(sl.y > 0 && sl.y < m.height)) throw PreconditionError("slit " + std::to_string(i) + " touches the boundary");
    if (!(sl.length > 0) || sl.length >= m.circumference)
      throw PreconditionError("slit " + std::to_string(i) + " must be shorter than the circumference");
    double x0 = std::fmod(sl.x0, m.circumference);
    if (x0 < 0) x0 += m.circumference;
    // start from the polygon copy of the current working surface that contains the start point
    SurfacePoint start{0, {x0, sl.y}};
    bool found = false;
    for (std::size_t p = 0; p < X.polygons.size() && !found; ++p)
      if (locate_point(X.polygons[p], start.position, 1e-10).kind != PointLocation::Kind::outside) {
        start.polygon = p;
        found = true;
      }
    if (!found) throw StructuralError("slit start not found");
    X = cut_slit(X, {start, sl.length, 1});
  }
  return X;
}

struct FlowVerdict {
  double t = 0;
  double clearance = 0;
  bool injective = false;
  bool conformal = false;
  bool complement_horizontal = false;
  bool embedding_passed = false;
  bool flow_length_constant = false;
  double flow_length_spread = 0;
  std::vector<ComplementSegment> complement;
  bool passed() const { return injective && conformal && complement_horizontal && embedding_passed && flow_length_constant; }
};

struct FlowResult {
  HalfTranslationSurface domain;
  PiecewiseAffineMap map;
  FlowVerdict verdict;
};

inline FlowResult horizontal_flow_family(const FlowModel& model, double t, int samples = 100, std::uint64_t seed = 1) {
  if (!(t >= 0)) throw PreconditionError("flow time must be nonnegative");
  FlowClearance cl = flow_clearance(model);
  if (t >= cl.value)
    throw PreconditionError("collision: after time " + detail::format_double(cl.value) + " the leading tip of slit " +
                            std::to_string(cl.moving) + " reaches the trailing tip of slit " +
                            std::to_string(cl.obstructed) + " at (" +
                            detail::format_double(std::fmod(model.slits[cl.obstructed].x0, model.circumference)) + ", " +
                            detail::format_double(model.slits[cl.obstructed].y) + ")");
  FlowResult res;
  res.domain = flow_domain(model);
  // codomain: the same cylinder with its fundamental polygon shifted by t
  const double C = model.circumference, H = model.height;
  HalfTranslationSurface Y;
  Y.polygons.push_back({"Y", {{t, 0}, {C + t, 0}, {C + t, H}, {t, H}}});
  Y.pairings.push_back({{0, 1}, {0, 3}, 1});
  Y.boundary = {{{0, 0}, BoundaryKind::horizontal}, {{0, 2}, BoundaryKind::horizontal}};
  res.map.domain = res.domain;
  res.map.codomain = Y;
  for (std::size_t k = 0; k < res.domain.polygons.size(); ++k) res.map.faces.push_back({Mat2{}, {t, 0}, 0});
  auto& v = res.verdict;
  v.t = t;
  v.clearance = cl.value;
  v.conformal = std::abs(dilatation_of(res.map) - 1) == 0 && check_map(res.map).ok();
  auto ev = teichmuller_embedding_check(res.map, 1);
  v.embedding_passed = ev.passed;
  v.complement_horizontal = ev.complement_horizontal;
  v.complement = ev.complement;
  // injectivity: face images lie in the fundamental polygon of Y with pairwise disjoint interiors
  v.injective = true;
  std::vector<std::vector<Point>> imgs;
  for (std::size_t k = 0; k < res.domain.polygons.size(); ++k) {
    std::vector<Point> w;
    for (auto z : res.domain.polygons[k].vertices) {
      Point q = res.map.faces[k].A.apply(z) + res.map.faces[k].b;
      if (locate_in_polygon(Y.polygons[0].vertices, q, 1e-12) == Containment::outside) v.injective = false;
      w.push_back(q);
    }
    imgs.push_back(std::move(w));
  }
  for (std::size_t i = 0; i < imgs.size(); ++i)
    for (std::size_t j = i + 1; j < imgs.size(); ++j)
      if (detail::interiors_overlap(imgs[i], imgs[j])) v.injective = false;
  // flow length along the horizontal trajectory of Y from x to f_t(x)
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0, C), uy(0, H);
  Topology ty(Y);
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < samples; ++k) {
    Point x{ux(rng), uy(rng)};
    SurfacePoint xs{0, x.real() < t ? x + Point(C, 0) : x};
    SurfacePoint fx{0, x + Point(t, 0)};
    double L = 0;
    if (t > 0) {
      auto tr = trace_straight(ty, xs, {1, 0}, t);
      for (auto& sg : tr.segments) L += std::abs(sg.b.position - sg.a.position);
      if (!same_point(ty, tr.end, fx, 1e-9)) L = -1;
    }
    lo = std::min(lo, L);
    hi = std::max(hi, L);
  }
  v.flow_length_spread = samples > 0 ? hi - lo : 0;
  v.flow_length_constant = samples > 0 && std::abs(lo - t) <= 1e-12 * std::max(1.0, t) &&
                           std::abs(hi - t) <= 1e-12 * std::max(1.0, t);
  return res;
}

}  // namespace hts
