#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hts/error.hpp"
#include "hts/geometry.hpp"

namespace hts {

struct Polygon {
  std::string name;
  std::vector<Point> vertices;  // counterclockwise

  std::size_t size() const { return vertices.size(); }
  Point vertex(std::size_t i) const { return vertices[i % vertices.size()]; }
  Point edge_start(std::size_t e) const { return vertex(e); }
  Point edge_end(std::size_t e) const { return vertex(e + 1); }
  Point edge_vector(std::size_t e) const { return edge_end(e) - edge_start(e); }
  double area() const { return signed_area(vertices); }
};

struct EdgeRef {
  std::size_t polygon = 0;
  std::size_t edge = 0;
  auto operator<=>(const EdgeRef&) const = default;
};

struct Corner {
  std::size_t polygon = 0;
  std::size_t vertex = 0;
  auto operator<=>(const Corner&) const = default;
};

struct Pairing {
  EdgeRef a, b;
  int sign = 1;
};

enum class BoundaryKind { horizontal, free };

struct BoundaryEdge {
  EdgeRef edge;
  BoundaryKind kind = BoundaryKind::horizontal;
};

enum class MarkRole { puncture, cone, plain };

struct SurfacePoint {
  std::size_t polygon = 0;
  Point position{};
};

struct MarkedPoint {
  SurfacePoint point;
  MarkRole role = MarkRole::plain;
};

struct HalfTranslationSurface {
  std::vector<Polygon> polygons;
  std::vector<Pairing> pairings;
  std::vector<BoundaryEdge> boundary;
  std::vector<MarkedPoint> marks;

  std::size_t polygon_index(std::string_view name) const {
    for (std::size_t i = 0; i < polygons.size(); ++i)
      if (polygons[i].name == name) return i;
    throw PreconditionError("unknown polygon '" + std::string(name) + "'");
  }
  std::size_t edge_count() const {
    std::size_t n = 0;
    for (auto& p : polygons) n += p.size();
    return n;
  }
  bool has_free_boundary() const {
    return std::any_of(boundary.begin(), boundary.end(), [](auto& b) { return b.kind == BoundaryKind::free; });
  }
};

inline std::string edge_name(const HalfTranslationSurface& s, EdgeRef e) {
  if (e.polygon < s.polygons.size()) return s.polygons[e.polygon].name + "." + std::to_string(e.edge);
  return "#" + std::to_string(e.polygon) + "." + std::to_string(e.edge);
}

// ---------------------------------------------------------------------------
// Combinatorics of the identification

struct EdgeLink {
  enum class Kind { unset, paired, boundary } kind = Kind::unset;
  EdgeRef partner;
  int sign = 1;
  BoundaryKind boundary = BoundaryKind::horizontal;
};

struct VertexCycle {
  std::vector<Corner> corners;  // clockwise order
  double angle = 0;
  bool boundary = false;
};

class Topology {
 public:
  // Requires every edge to be assigned exactly once; throws StructuralError otherwise.
  explicit Topology(const HalfTranslationSurface& s) : s_(&s) {
    links_.resize(s.polygons.size());
    for (std::size_t p = 0; p < s.polygons.size(); ++p) links_[p].resize(s.polygons[p].size());
    auto claim = [&](EdgeRef e) -> EdgeLink& {
      if (e.polygon >= links_.size() || e.edge >= links_[e.polygon].size())
        throw StructuralError("edge reference out of range: " + edge_name(s, e));
      EdgeLink& l = links_[e.polygon][e.edge];
      if (l.kind != EdgeLink::Kind::unset) throw StructuralError("edge used twice: " + edge_name(s, e));
      return l;
    };
    for (auto& pr : s.pairings) {
      if (pr.a == pr.b) throw StructuralError("edge paired with itself: " + edge_name(s, pr.a));
      EdgeLink& la = claim(pr.a);
      la = {EdgeLink::Kind::paired, pr.b, pr.sign, {}};
      EdgeLink& lb = claim(pr.b);
      lb = {EdgeLink::Kind::paired, pr.a, pr.sign, {}};
    }
    for (auto& b : s.boundary) {
      EdgeLink& l = claim(b.edge);
      l.kind = EdgeLink::Kind::boundary;
      l.boundary = b.kind;
    }
    for (std::size_t p = 0; p < links_.size(); ++p)
      for (std::size_t e = 0; e < links_[p].size(); ++e)
        if (links_[p][e].kind == EdgeLink::Kind::unset)
          throw StructuralError("dangling edge " + edge_name(s, {p, e}));
    build_cycles();
  }

  const HalfTranslationSurface& surface() const { return *s_; }
  const EdgeLink& link(EdgeRef e) const { return links_[e.polygon][e.edge]; }
  bool is_boundary(EdgeRef e) const { return link(e).kind == EdgeLink::Kind::boundary; }

  // Isometry taking the partner polygon's coordinates into the coordinates of e's polygon.
  Isometry gluing(EdgeRef e) const {
    const EdgeLink& l = link(e);
    if (l.kind != EdgeLink::Kind::paired) throw PreconditionError("edge is not paired: " + edge_name(*s_, e));
    const Polygon& A = s_->polygons[e.polygon];
    const Polygon& B = s_->polygons[l.partner.polygon];
    Point a1 = A.edge_end(e.edge), b0 = B.edge_start(l.partner.edge);
    if (l.sign > 0) return {1, a1 - b0};
    return {-1, a1 + b0};
  }

  double corner_angle(Corner c) const { return angles_[c.polygon][c.vertex]; }
  std::size_t cycle_of(Corner c) const { return cycle_of_[c.polygon][c.vertex]; }
  // Angular coordinate of the corner's out-edge within its cycle.
  double corner_offset(Corner c) const { return offset_[c.polygon][c.vertex]; }
  const std::vector<VertexCycle>& cycles() const { return cycles_; }

  // Counterclockwise angle of direction d measured from the corner's out-edge, clamped into the corner.
  double local_angle(Corner c, Point d) const {
    const Polygon& P = s_->polygons[c.polygon];
    double lam = angle_ccw(P.edge_vector(c.vertex), d);
    double a = corner_angle(c);
    if (lam > a) lam = (lam - a < kTwoPi - lam) ? a : 0.0;
    return lam;
  }
  // Cycle coordinate of direction d leaving the vertex inside corner c.
  double theta(Corner c, Point d) const {
    double t = corner_offset(c) + local_angle(c, d);
    const VertexCycle& cy = cycles_[cycle_of(c)];
    return cy.boundary ? t : wrap_angle(t, cy.angle);
  }
  // Corner and local angle holding cycle coordinate t.
  std::pair<Corner, double> corner_at(std::size_t cycle, double t) const {
    const VertexCycle& cy = cycles_[cycle];
    if (!cy.boundary) t = wrap_angle(t, cy.angle);
    Corner best = cy.corners.front();
    double best_err = 1e300, best_lam = 0;
    for (const Corner& c : cy.corners) {
      double lam = t - corner_offset(c);
      if (!cy.boundary) lam = wrap_angle(lam, cy.angle);
      double a = corner_angle(c);
      double err = lam < 0 ? -lam : (lam > a ? lam - a : 0.0);
      if (err < best_err - 1e-15) {
        best_err = err;
        best = c;
        best_lam = std::clamp(lam, 0.0, a);
      }
    }
    return {best, best_lam};
  }

  std::optional<Corner> next_corner(Corner c) const {
    const EdgeLink& l = link({c.polygon, c.vertex});
    if (l.kind != EdgeLink::Kind::paired) return std::nullopt;
    std::size_t n = s_->polygons[l.partner.polygon].size();
    return Corner{l.partner.polygon, (l.partner.edge + 1) % n};
  }
  std::optional<Corner> prev_corner(Corner c) const {
    std::size_t n = s_->polygons[c.polygon].size();
    const EdgeLink& l = link({c.polygon, (c.vertex + n - 1) % n});
    if (l.kind != EdgeLink::Kind::paired) return std::nullopt;
    return Corner{l.partner.polygon, l.partner.edge};
  }

  int euler_characteristic() const {
    long v = long(cycles_.size());
    long e = long(s_->pairings.size() + s_->boundary.size());
    long f = long(s_->polygons.size());
    return int(v - e + f);
  }

 private:
  void build_cycles() {
    const auto& P = s_->polygons;
    angles_.resize(P.size());
    cycle_of_.resize(P.size());
    offset_.resize(P.size());
    for (std::size_t p = 0; p < P.size(); ++p) {
      std::size_t n = P[p].size();
      angles_[p].resize(n);
      cycle_of_[p].assign(n, SIZE_MAX);
      offset_[p].assign(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        angles_[p][i] = angle_ccw(P[p].edge_vector(i), P[p].vertex(i + n - 1) - P[p].vertex(i));
    }
    for (std::size_t p = 0; p < P.size(); ++p) {
      for (std::size_t i = 0; i < P[p].size(); ++i) {
        if (cycle_of_[p][i] != SIZE_MAX) continue;
        Corner start{p, i};
        bool boundary = false;
        for (std::size_t guard = 0;; ++guard) {
          auto pc = prev_corner(start);
          if (!pc) {
            boundary = true;
            break;
          }
          if (*pc == Corner{p, i} || guard > 100000) break;
          start = *pc;
        }
        VertexCycle cy;
        cy.boundary = boundary;
        Corner c = start;
        double off = 0;
        for (std::size_t guard = 0; guard < 100000; ++guard) {
          if (!cy.corners.empty()) off -= angles_[c.polygon][c.vertex];
          cy.corners.push_back(c);
          cycle_of_[c.polygon][c.vertex] = cycles_.size();
          offset_[c.polygon][c.vertex] = off;
          cy.angle += angles_[c.polygon][c.vertex];
          auto nc = next_corner(c);
          if (!nc || *nc == start) break;
          c = *nc;
        }
        cycles_.push_back(std::move(cy));
      }
    }
    // interior cycles: make offsets nonnegative
    for (auto& cy : cycles_) {
      if (cy.boundary) continue;
      for (auto& c : cy.corners) offset_[c.polygon][c.vertex] = wrap_angle(offset_[c.polygon][c.vertex], cy.angle);
    }
  }

  const HalfTranslationSurface* s_;
  std::vector<std::vector<EdgeLink>> links_;
  std::vector<std::vector<double>> angles_;
  std::vector<std::vector<std::size_t>> cycle_of_;
  std::vector<std::vector<double>> offset_;
  std::vector<VertexCycle> cycles_;
};

// ---------------------------------------------------------------------------
// Validation

struct ValidationIssue {
  std::string invariant;
  std::string element;
  std::string detail;
};

struct ValidationReport {
  std::vector<std::pair<std::string, bool>> checks;
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  bool passed(std::string_view invariant) const {
    for (auto& [n, ok] : checks)
      if (n == invariant) return ok;
    return true;
  }
};

inline ValidationReport validate_surface(const HalfTranslationSurface& s, double tol = kLengthTol) {
  ValidationReport r;
  std::map<std::string, bool> status;
  const char* names[] = {"polygon.vertex_count", "polygon.distinct_vertices", "polygon.positive_area",
                         "polygon.simple",       "edge.index_range",          "edge.coverage",
                         "pairing.length",       "pairing.orientation",       "vertex.interior_angle",
                         "vertex.boundary_angle", "boundary.horizontal",      "area.positive",
                         "mark.inside"};
  for (auto n : names) status[n] = true;
  auto fail = [&](const std::string& inv, const std::string& el, const std::string& d) {
    status[inv] = false;
    r.issues.push_back({inv, el, d});
  };
  bool geometry_ok = true;
  for (std::size_t p = 0; p < s.polygons.size(); ++p) {
    const Polygon& P = s.polygons[p];
    if (P.size() < 3) {
      fail("polygon.vertex_count", P.name, "fewer than 3 vertices");
      geometry_ok = false;
      continue;
    }
    for (std::size_t i = 0; i < P.size(); ++i)
      if (std::abs(P.edge_vector(i)) <= tol) {
        fail("polygon.distinct_vertices", P.name, "repeated vertex " + std::to_string(i));
        geometry_ok = false;
      }
    if (!(P.area() > 0)) {
      fail("polygon.positive_area", P.name, "signed area " + std::to_string(P.area()));
      geometry_ok = false;
    }
    if (!polygon_is_simple(P.vertices, tol)) {
      fail("polygon.simple", P.name, "edges intersect");
      geometry_ok = false;
    }
  }
  // edge usage
  std::vector<std::vector<int>> used(s.polygons.size());
  for (std::size_t p = 0; p < s.polygons.size(); ++p) used[p].assign(s.polygons[p].size(), 0);
  auto in_range = [&](EdgeRef e) {
    return e.polygon < s.polygons.size() && e.edge < s.polygons[e.polygon].size();
  };
  bool refs_ok = true;
  auto use = [&](EdgeRef e) {
    if (!in_range(e)) {
      fail("edge.index_range", edge_name(s, e), "index out of range");
      refs_ok = false;
      return;
    }
    ++used[e.polygon][e.edge];
  };
  for (auto& pr : s.pairings) {
    use(pr.a);
    use(pr.b);
    if (pr.sign != 1 && pr.sign != -1) fail("pairing.orientation", edge_name(s, pr.a), "sign must be +1 or -1");
    if (pr.a == pr.b) fail("edge.coverage", edge_name(s, pr.a), "edge paired with itself");
  }
  for (auto& b : s.boundary) use(b.edge);
  for (std::size_t p = 0; p < s.polygons.size(); ++p)
    for (std::size_t e = 0; e < used[p].size(); ++e) {
      if (used[p][e] == 0) fail("edge.coverage", edge_name(s, {p, e}), "edge is neither paired nor boundary");
      if (used[p][e] > 1) fail("edge.coverage", edge_name(s, {p, e}), "edge used more than once");
    }
  for (auto& pr : s.pairings) {
    if (!in_range(pr.a) || !in_range(pr.b)) continue;
    Point va = s.polygons[pr.a.polygon].edge_vector(pr.a.edge);
    Point vb = s.polygons[pr.b.polygon].edge_vector(pr.b.edge);
    if (std::abs(std::abs(va) - std::abs(vb)) > tol)
      fail("pairing.length", edge_name(s, pr.a) + "~" + edge_name(s, pr.b),
           "lengths " + std::to_string(std::abs(va)) + " vs " + std::to_string(std::abs(vb)));
    else if (std::abs(vb + double(pr.sign) * va) > tol)
      fail("pairing.orientation", edge_name(s, pr.a) + "~" + edge_name(s, pr.b),
           "edge vectors incompatible with sign " + std::to_string(pr.sign));
  }
  for (auto& b : s.boundary) {
    if (!in_range(b.edge) || b.kind != BoundaryKind::horizontal) continue;
    if (std::abs(s.polygons[b.edge.polygon].edge_vector(b.edge.edge).imag()) > tol)
      fail("boundary.horizontal", edge_name(s, b.edge), "horizontal flag on a non-horizontal edge");
  }
  double total = 0;
  for (auto& P : s.polygons) total += P.area();
  if (!(total > 0) || !std::isfinite(total)) fail("area.positive", "surface", "total area not positive");
  for (std::size_t m = 0; m < s.marks.size(); ++m) {
    const auto& mp = s.marks[m].point;
    if (mp.polygon >= s.polygons.size() ||
        locate_in_polygon(s.polygons[mp.polygon].vertices, mp.position, tol) == Containment::outside)
      fail("mark.inside", "mark " + std::to_string(m), "marked point outside its polygon");
  }
  if (geometry_ok && refs_ok && status["edge.coverage"]) {
    Topology t(s);
    for (std::size_t c = 0; c < t.cycles().size(); ++c) {
      const auto& cy = t.cycles()[c];
      Corner c0 = cy.corners.front();
      std::string el = s.polygons[c0.polygon].name + ".v" + std::to_string(c0.vertex);
      double n = cy.angle / kPi;
      bool mult = std::abs(cy.angle - std::round(n) * kPi) <= tol && std::round(n) >= 1;
      if (!cy.boundary && !mult) fail("vertex.interior_angle", el, "angle " + std::to_string(cy.angle));
      if (cy.boundary && !mult) {
        const Polygon& Pf = s.polygons[c0.polygon];
        const Corner cl = cy.corners.back();
        bool horiz = t.link({c0.polygon, (c0.vertex + Pf.size() - 1) % Pf.size()}).boundary ==
                         BoundaryKind::horizontal &&
                     t.link({cl.polygon, cl.vertex}).boundary == BoundaryKind::horizontal;
        if (horiz) fail("vertex.boundary_angle", el, "angle " + std::to_string(cy.angle));
      }
    }
  }
  for (auto& [n, ok] : status) r.checks.emplace_back(n, ok);
  return r;
}

inline void require_valid(const HalfTranslationSurface& s) {
  auto r = validate_surface(s);
  if (!r.ok()) {
    const auto& i = r.issues.front();
    throw StructuralError("invalid surface: " + i.invariant + " at " + i.element + " (" + i.detail + ")");
  }
}

// ---------------------------------------------------------------------------
// Cone points, Gauss-Bonnet, area

enum class ConeLocation { interior, boundary };

struct ConePointReport {
  std::vector<Corner> vertex_cycle;
  double total_angle = 0;
  int prongs = 0;
  ConeLocation location = ConeLocation::interior;
  bool singular = false;
};

inline std::vector<ConePointReport> cone_points(const HalfTranslationSurface& s, const Topology& t,
                                                double tol = kAngleTol) {
  std::vector<ConePointReport> out;
  for (const auto& cy : t.cycles()) {
    ConePointReport r;
    r.vertex_cycle = cy.corners;
    r.total_angle = cy.angle;
    r.location = cy.boundary ? ConeLocation::boundary : ConeLocation::interior;
    double n = std::round(cy.angle / kPi);
    if (std::abs(cy.angle - n * kPi) > tol || n < 1) {
      Corner c = cy.corners.front();
      throw StructuralError("vertex cycle at " + s.polygons[c.polygon].name + ".v" + std::to_string(c.vertex) +
                            " has angle " + std::to_string(cy.angle) + ", not a multiple of pi");
    }
    r.prongs = int(n);
    r.singular = cy.boundary ? r.prongs != 1 : r.prongs != 2;
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ConePointReport> cone_points(const HalfTranslationSurface& s) {
  Topology t(s);
  return cone_points(s, t);
}

struct GaussBonnetReport {
  double lhs = 0;
  int chi = 0;
  double residual = 0;
};

inline GaussBonnetReport gauss_bonnet_global(const HalfTranslationSurface& s) {
  Topology t(s);
  GaussBonnetReport r;
  for (const auto& cy : t.cycles()) r.lhs += cy.boundary ? (kPi - cy.angle) : (kTwoPi - cy.angle);
  r.chi = t.euler_characteristic();
  r.residual = r.lhs - kTwoPi * r.chi;
  return r;
}

inline double area(const HalfTranslationSurface& s) {
  double a = 0;
  for (auto& P : s.polygons) a += P.area();
  return a;
}

// ---------------------------------------------------------------------------
// Points

struct PointLocation {
  enum class Kind { interior, edge, vertex, outside } kind = Kind::outside;
  std::size_t index = 0;  // edge or vertex index
};

inline PointLocation locate_point(const Polygon& P, Point z, double tol = kLengthTol) {
  for (std::size_t i = 0; i < P.size(); ++i)
    if (std::abs(z - P.vertex(i)) <= tol) return {PointLocation::Kind::vertex, i};
  for (std::size_t i = 0; i < P.size(); ++i)
    if (on_segment(z, P.edge_start(i), P.edge_end(i), tol)) return {PointLocation::Kind::edge, i};
  if (locate_in_polygon(P.vertices, z, tol) == Containment::inside) return {PointLocation::Kind::interior, 0};
  return {};
}

// Lowest (polygon, edge) or (polygon, vertex) representative of a point.
inline SurfacePoint canonical_point(const Topology& t, SurfacePoint x, double tol = kLengthTol) {
  const auto& s = t.surface();
  if (x.polygon >= s.polygons.size()) throw PreconditionError("point references unknown polygon");
  auto loc = locate_point(s.polygons[x.polygon], x.position, tol);
  switch (loc.kind) {
    case PointLocation::Kind::outside: throw PreconditionError("point lies outside its polygon");
    case PointLocation::Kind::interior: return x;
    case PointLocation::Kind::vertex: {
      const auto& cy = t.cycles()[t.cycle_of({x.polygon, loc.index})];
      Corner c = *std::min_element(cy.corners.begin(), cy.corners.end());
      return {c.polygon, s.polygons[c.polygon].vertex(c.vertex)};
    }
    case PointLocation::Kind::edge: {
      EdgeRef e{x.polygon, loc.index};
      const EdgeLink& l = t.link(e);
      if (l.kind == EdgeLink::Kind::paired && l.partner < e) {
        Isometry g = t.gluing(l.partner);
        return {l.partner.polygon, g.apply(x.position)};
      }
      return x;
    }
  }
  return x;
}

inline bool same_point(const Topology& t, SurfacePoint a, SurfacePoint b, double tol = 1e-8) {
  SurfacePoint ca = canonical_point(t, a, tol), cb = canonical_point(t, b, tol);
  return ca.polygon == cb.polygon && std::abs(ca.position - cb.position) <= tol;
}

// ---------------------------------------------------------------------------
// Editing

struct EdgeOrigin {
  bool original = false;
  EdgeRef edge;
};

// Mutable working copy used by subdivision, triangulation and surgery.
class SurfaceBuilder {
 public:
  struct Face {
    std::string name;
    std::vector<Point> v;
    std::vector<EdgeLink> links;
    std::vector<EdgeOrigin> origin;
    std::size_t parent = 0;
  };

  explicit SurfaceBuilder(const HalfTranslationSurface& s) {
    Topology t(s);
    for (std::size_t p = 0; p < s.polygons.size(); ++p) {
      Face f;
      f.name = s.polygons[p].name;
      f.v = s.polygons[p].vertices;
      f.parent = p;
      for (std::size_t e = 0; e < f.v.size(); ++e) {
        f.links.push_back(t.link({p, e}));
        f.origin.push_back({true, {p, e}});
      }
      names_.insert(f.name);
      faces_.push_back(std::move(f));
    }
    for (auto& m : s.marks) marks_.push_back(m);
  }

  std::size_t face_count() const { return faces_.size(); }
  const Face& face(std::size_t i) const { return faces_[i]; }
  const std::vector<Face>& faces() const { return faces_; }

  // Inserts a vertex on edge (p,e) at point z (p's coordinates); the partner edge is split to match.
  // Returns the index of the new vertex in p, or the existing vertex if z coincides with an endpoint.
  std::size_t split_edge(std::size_t p, std::size_t e, Point z, double tol = 1e-12) {
    Face& F = faces_[p];
    std::size_t n = F.v.size();
    Point a0 = F.v[e], a1 = F.v[(e + 1) % n];
    if (std::abs(z - a0) <= tol) return e;
    if (std::abs(z - a1) <= tol) return (e + 1) % n;
    double t = std::clamp(project_param(z, a0, a1), 0.0, 1.0);
    EdgeLink link = F.links[e];
    insert_vertex(p, e, z);
    std::size_t fresh = e + 1;
    if (link.kind == EdgeLink::Kind::paired) {
      EdgeRef q = link.partner;
      if (q.polygon == p && q.edge > e) q.edge += 1;
      const Face& G = faces_[q.polygon];
      std::size_t m = G.v.size();
      Point b0 = G.v[q.edge], b1 = G.v[(q.edge + 1) % m];
      insert_vertex(q.polygon, q.edge, b0 + (1.0 - t) * (b1 - b0));
      EdgeRef first{p, e}, second{p, e + 1};
      if (q.polygon == p && q.edge < e) {
        first.edge += 1;
        second.edge += 1;
        fresh += 1;
      }
      set_pair(first, {q.polygon, q.edge + 1}, link.sign);
      set_pair(second, {q.polygon, q.edge}, link.sign);
    }
    return fresh;
  }

  // Cuts polygon p along the chord from vertex i to vertex j; the chord is paired with sign +1.
  // Returns the index of the new polygon (holding vertices j..i); p keeps vertices i..j.
  std::size_t split_polygon(std::size_t p, std::size_t i, std::size_t j) {
    Face old = faces_[p];
    std::size_t n = old.v.size();
    if (i == j || (i + 1) % n == j || (j + 1) % n == i)
      throw PreconditionError("chord endpoints must be non-adjacent vertices");
    Face A, B;
    A.parent = B.parent = old.parent;
    A.name = old.name;
    B.name = fresh_name(old.name);
    std::vector<std::size_t> map_edge(n);
    std::vector<bool> in_a(n);
    for (std::size_t k = i; k != j; k = (k + 1) % n) {
      map_edge[k] = A.v.size();
      in_a[k] = true;
      A.v.push_back(old.v[k]);
      A.links.push_back(old.links[k]);
      A.origin.push_back(old.origin[k]);
    }
    A.v.push_back(old.v[j]);
    A.links.push_back({});
    A.origin.push_back({});
    for (std::size_t k = j; k != i; k = (k + 1) % n) {
      map_edge[k] = B.v.size();
      in_a[k] = false;
      B.v.push_back(old.v[k]);
      B.links.push_back(old.links[k]);
      B.origin.push_back(old.origin[k]);
    }
    B.v.push_back(old.v[i]);
    B.links.push_back({});
    B.origin.push_back({});
    std::size_t q = faces_.size();
    faces_[p] = std::move(A);
    faces_.push_back(std::move(B));
    auto remap = [&](EdgeRef e) -> EdgeRef {
      if (e.polygon != p) return e;
      return {in_a[e.edge] ? p : q, map_edge[e.edge]};
    };
    for (auto& F : faces_)
      for (auto& l : F.links)
        if (l.kind == EdgeLink::Kind::paired) l.partner = remap(l.partner);
    set_pair({p, faces_[p].v.size() - 1}, {q, faces_[q].v.size() - 1}, 1);
    for (auto& m : marks_)
      if (m.point.polygon == p &&
          locate_in_polygon(faces_[p].v, m.point.position, 1e-12) == Containment::outside)
        m.point.polygon = q;
    return q;
  }

  // Cone over an interior point z of polygon p: p becomes n triangles around z.
  std::vector<std::size_t> star_split(std::size_t p, Point z) {
    Face old = faces_[p];
    std::size_t n = old.v.size();
    std::vector<std::size_t> ids(n);
    for (std::size_t k = 0; k < n; ++k) ids[k] = k == 0 ? p : faces_.size() + k - 1;
    auto remap = [&](EdgeLink& l) {
      if (l.kind == EdgeLink::Kind::paired && l.partner.polygon == p) l.partner = {ids[l.partner.edge], 0};
    };
    for (std::size_t f = 0; f < faces_.size(); ++f)
      if (f != p)
        for (auto& l : faces_[f].links) remap(l);
    std::vector<Face> tris(n);
    for (std::size_t k = 0; k < n; ++k) {
      Face& T = tris[k];
      T.parent = old.parent;
      T.name = k == 0 ? old.name : fresh_name(old.name);
      T.v = {old.v[k], old.v[(k + 1) % n], z};
      T.links = {old.links[k], {}, {}};
      remap(T.links[0]);
      T.origin = {old.origin[k], {}, {}};
    }
    faces_[p] = tris[0];
    for (std::size_t k = 1; k < n; ++k) faces_.push_back(tris[k]);
    for (std::size_t k = 0; k < n; ++k) set_pair({ids[k], 1}, {ids[(k + 1) % n], 2}, 1);
    for (auto& m : marks_)
      if (m.point.polygon == p)
        for (std::size_t k = 0; k < n; ++k)
          if (locate_in_polygon(faces_[ids[k]].v, m.point.position, 1e-12) != Containment::outside) {
            m.point.polygon = ids[k];
            break;
          }
    return ids;
  }

  void set_boundary(EdgeRef e, BoundaryKind kind) {
    EdgeLink& l = faces_[e.polygon].links[e.edge];
    if (l.kind == EdgeLink::Kind::paired) {
      EdgeLink& m = faces_[l.partner.polygon].links[l.partner.edge];
      m = {EdgeLink::Kind::boundary, {}, 1, kind};
    }
    l = {EdgeLink::Kind::boundary, {}, 1, kind};
  }

  void set_pair(EdgeRef a, EdgeRef b, int sign) {
    faces_[a.polygon].links[a.edge] = {EdgeLink::Kind::paired, b, sign, {}};
    faces_[b.polygon].links[b.edge] = {EdgeLink::Kind::paired, a, sign, {}};
  }

  void add_mark(MarkedPoint m) { marks_.push_back(m); }
  std::vector<MarkedPoint>& marks() { return marks_; }

  HalfTranslationSurface build() const {
    HalfTranslationSurface s;
    for (auto& F : faces_) s.polygons.push_back({F.name, F.v});
    for (std::size_t p = 0; p < faces_.size(); ++p)
      for (std::size_t e = 0; e < faces_[p].links.size(); ++e) {
        const EdgeLink& l = faces_[p].links[e];
        EdgeRef me{p, e};
        if (l.kind == EdgeLink::Kind::paired) {
          if (me < l.partner) s.pairings.push_back({me, l.partner, l.sign});
        } else if (l.kind == EdgeLink::Kind::boundary) {
          s.boundary.push_back({me, l.boundary});
        } else {
          throw StructuralError("builder left edge " + F_name(p) + "." + std::to_string(e) + " unassigned");
        }
      }
    s.marks = marks_;
    return s;
  }

  std::vector<std::size_t> parents() const {
    std::vector<std::size_t> r;
    for (auto& F : faces_) r.push_back(F.parent);
    return r;
  }

 private:
  std::string F_name(std::size_t p) const { return faces_[p].name; }

  std::string fresh_name(const std::string& base) {
    for (std::size_t k = names_.size();; ++k) {
      std::string n = base + "_" + std::to_string(k);
      if (names_.insert(n).second) return n;
    }
  }

  // Inserts z after vertex e of polygon p and shifts edge references.
  void insert_vertex(std::size_t p, std::size_t e, Point z) {
    Face& F = faces_[p];
    F.v.insert(F.v.begin() + long(e) + 1, z);
    EdgeLink l = F.links[e];
    F.links.insert(F.links.begin() + long(e) + 1, l);
    F.origin.insert(F.origin.begin() + long(e) + 1, F.origin[e]);
    for (auto& G : faces_)
      for (auto& m : G.links)
        if (m.kind == EdgeLink::Kind::paired && m.partner.polygon == p && m.partner.edge > e) m.partner.edge += 1;
  }

  std::vector<Face> faces_;
  std::vector<MarkedPoint> marks_;
  std::set<std::string> names_;
};

inline HalfTranslationSurface subdivide(const HalfTranslationSurface& s, std::size_t polygon, std::size_t i,
                                        std::size_t j) {
  SurfaceBuilder b(s);
  b.split_polygon(polygon, i, j);
  return b.build();
}

// Diagonal (i,j) lies inside polygon P.
inline bool is_diagonal(const std::vector<Point>& v, std::size_t i, std::size_t j, double tol = 1e-12) {
  std::size_t n = v.size();
  if (i == j || (i + 1) % n == j || (j + 1) % n == i) return false;
  Point a = v[i], b = v[j];
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t k1 = (k + 1) % n;
    if (k == i || k == j || k1 == i || k1 == j) {
      // touching at a shared endpoint is fine; collinear overlap is not
      Point c = v[k], d = v[k1];
      Point other = (k == i || k == j) ? d : c;
      if (other != a && other != b && on_segment(other, a, b, tol)) return false;
      continue;
    }
    if (segments_intersect(a, b, v[k], v[k1], tol)) return false;
  }
  return locate_in_polygon(v, 0.5 * (a + b), tol) == Containment::inside;
}

inline HalfTranslationSurface random_subdivision(const HalfTranslationSurface& s, std::mt19937_64& rng,
                                                 int cuts) {
  SurfaceBuilder b(s);
  for (int c = 0; c < cuts; ++c) {
    std::vector<std::size_t> cand;
    for (std::size_t p = 0; p < b.face_count(); ++p)
      if (b.face(p).v.size() >= 4) cand.push_back(p);
    if (cand.empty()) break;
    std::size_t p = cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)];
    const auto& v = b.face(p).v;
    std::vector<std::pair<std::size_t, std::size_t>> diags;
    for (std::size_t i = 0; i < v.size(); ++i)
      for (std::size_t j = i + 2; j < v.size(); ++j)
        if (is_diagonal(v, i, j)) diags.emplace_back(i, j);
    if (diags.empty()) continue;
    auto [i, j] = diags[std::uniform_int_distribution<std::size_t>(0, diags.size() - 1)(rng)];
    b.split_polygon(p, i, j);
  }
  return b.build();
}

// Polygons permuted by perm (new index k holds old polygon perm[k]).
inline HalfTranslationSurface relabel(const HalfTranslationSurface& s, const std::vector<std::size_t>& perm) {
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  HalfTranslationSurface r;
  for (std::size_t k = 0; k < perm.size(); ++k) r.polygons.push_back(s.polygons[perm[k]]);
  for (auto pr : s.pairings) {
    pr.a.polygon = inv[pr.a.polygon];
    pr.b.polygon = inv[pr.b.polygon];
    r.pairings.push_back(pr);
  }
  for (auto b : s.boundary) {
    b.edge.polygon = inv[b.edge.polygon];
    r.boundary.push_back(b);
  }
  for (auto m : s.marks) {
    m.point.polygon = inv[m.point.polygon];
    r.marks.push_back(m);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Triangulation

struct Triangulation {
  HalfTranslationSurface surface;          // every polygon a triangle, same coordinates as its parent
  std::vector<std::size_t> parent;         // triangle -> original polygon
  std::vector<std::array<EdgeOrigin, 3>> edge_origin;
  std::map<EdgeRef, EdgeRef> from_original;  // original edge -> triangle edge (unsplit edges only)
};

inline bool is_ear(const std::vector<Point>& v, std::size_t i) {
  std::size_t n = v.size();
  Point a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
  if (cross(b - a, c - b) <= 1e-14 * std::abs(b - a) * std::abs(c - b)) return false;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == i || k == (i + n - 1) % n || k == (i + 1) % n) continue;
    Point p = v[k];
    std::array<Point, 3> tri{a, b, c};
    if (locate_in_polygon(tri, p, 1e-12) != Containment::outside) return false;
  }
  return true;
}

inline Triangulation triangulate_builder(SurfaceBuilder& b) {
  for (std::size_t p = 0; p < b.face_count(); ++p) {
    while (b.face(p).v.size() > 3) {
      const auto& v = b.face(p).v;
      std::size_t n = v.size(), ear = n;
      for (std::size_t i = 0; i < n && ear == n; ++i)
        if (is_ear(v, i)) ear = i;
      if (ear == n) throw StructuralError("triangulation failed: no ear in polygon " + b.face(p).name);
      std::size_t i0 = (ear + n - 1) % n, i1 = (ear + 1) % n;
      // keep the ear as the new polygon so p shrinks
      b.split_polygon(p, std::min(i0, i1), std::max(i0, i1));
    }
  }
  Triangulation t;
  t.surface = b.build();
  t.parent = b.parents();
  for (std::size_t f = 0; f < b.face_count(); ++f) {
    std::array<EdgeOrigin, 3> o{b.face(f).origin[0], b.face(f).origin[1], b.face(f).origin[2]};
    t.edge_origin.push_back(o);
    for (std::size_t e = 0; e < 3; ++e)
      if (o[e].original) t.from_original[o[e].edge] = {f, e};
  }
  return t;
}

inline Triangulation triangulate(const HalfTranslationSurface& s) {
  SurfaceBuilder b(s);
  return triangulate_builder(b);
}

}  // namespace hts
