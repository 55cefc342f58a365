#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "hts/surface.hpp"

namespace hts {

struct PathSegment {
  SurfacePoint a, b;
};

struct ConeHit {
  std::size_t cycle = 0;  // index into Topology::cycles() of the input surface
  Corner corner;
  double total_angle = 0;
  double left = 0, right = 0;  // infinity on the outer side of a boundary vertex
  bool boundary = false;
  bool passed = false;
};

struct DevelopedLeg {
  std::vector<std::array<Point, 3>> triangles;
  std::vector<std::size_t> polygons;
  Point from{}, to{};
};

struct GeodesicPath {
  SurfacePoint from, to;  // canonical representatives
  std::vector<PathSegment> segments;
  double length = 0;
  std::vector<ConeHit> cone_hits;
  std::vector<EdgeRef> chain;  // original edges crossed, in order
  std::vector<DevelopedLeg> legs;
  Point start_direction{}, end_direction{};  // unit; canonical frames of from / to
  std::optional<double> start_theta, end_theta;
};

// ---------------------------------------------------------------------------
// Developing along a chain of edges

struct DevelopedChain {
  std::vector<Polygon> copies;
  std::vector<std::size_t> source;  // polygon of each copy
  std::vector<Isometry> maps;       // polygon coordinates -> plane
};

inline DevelopedChain develop_path(const HalfTranslationSurface& s, const std::vector<EdgeRef>& chain) {
  Topology t(s);
  DevelopedChain out;
  if (chain.empty()) return out;
  std::size_t cur = chain.front().polygon;
  if (cur >= s.polygons.size()) throw PreconditionError("chain starts at an unknown polygon");
  Isometry m{};
  auto place = [&](std::size_t p, const Isometry& g) {
    Polygon c = s.polygons[p];
    for (auto& v : c.vertices) v = g.apply(v);
    out.copies.push_back(std::move(c));
    out.source.push_back(p);
    out.maps.push_back(g);
  };
  place(cur, m);
  for (std::size_t k = 0; k < chain.size(); ++k) {
    EdgeRef e = chain[k];
    if (e.polygon != cur || e.edge >= s.polygons[cur].size())
      throw PreconditionError("chain edge " + std::to_string(k) + " is not an edge of the current copy");
    if (t.is_boundary(e)) throw PreconditionError("chain crosses boundary edge " + edge_name(s, e));
    m = m.compose(t.gluing(e));
    cur = t.link(e).partner.polygon;
    place(cur, m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Straight-line tracing

struct TraceResult {
  SurfacePoint end;
  Point end_direction{};
  std::vector<PathSegment> segments;
  std::vector<EdgeRef> crossed;
};

// Follows the straight ray from start in direction dir (start polygon frame) for the given length.
inline TraceResult trace_straight(const Topology& top, SurfacePoint start, Point dir, double length) {
  const auto& s = top.surface();
  TraceResult r;
  dir /= std::abs(dir);
  std::size_t p = start.polygon;
  Point z = start.position;
  double remaining = length;
  for (int guard = 0; guard < 100000; ++guard) {
    const Polygon& P = s.polygons[p];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_e = 0;
    double best_mu = 0;
    for (std::size_t e = 0; e < P.size(); ++e) {
      Point a = P.edge_start(e), b = P.edge_end(e);
      if (cross(b - a, dir) >= 0) continue;  // only edges the ray exits through (polygon is to the left)
      auto hit = line_intersection(z, z + dir, a, b);
      if (!hit) continue;
      auto [t, mu] = *hit;
      if (t <= 1e-12 || mu < -1e-12 || mu > 1 + 1e-12) continue;
      if (t < best) {
        best = t;
        best_e = e;
        best_mu = mu;
      }
    }
    if (best >= remaining || !std::isfinite(best)) {
      Point end = z + remaining * dir;
      r.segments.push_back({{p, z}, {p, end}});
      r.end = {p, end};
      r.end_direction = dir;
      return r;
    }
    Point h = z + best * dir;
    r.segments.push_back({{p, z}, {p, h}});
    double elen = std::abs(P.edge_vector(best_e));
    if (best_mu * elen < 1e-10 || (1 - best_mu) * elen < 1e-10)
      throw PreconditionError("straight line runs into a vertex");
    EdgeRef e{p, best_e};
    if (top.is_boundary(e)) throw PreconditionError("straight line reaches the boundary at " + edge_name(s, e));
    r.crossed.push_back(e);
    Isometry g = top.gluing(e).inverse();
    z = g.apply(h);
    dir = g.linear(dir);
    p = top.link(e).partner.polygon;
    remaining -= best;
  }
  throw BudgetError("straight-line trace did not terminate");
}

// Point at flat distance r from a vertex, leaving it in cycle direction theta.
inline SurfacePoint exp_from_vertex(const Topology& top, std::size_t cycle, double theta, double r) {
  auto [c, lam] = top.corner_at(cycle, theta);
  const Polygon& P = top.surface().polygons[c.polygon];
  Point d = P.edge_vector(c.vertex);
  d = d / std::abs(d) * std::polar(1.0, lam);
  return trace_straight(top, {c.polygon, P.vertex(c.vertex)}, d, r).end;
}

// ---------------------------------------------------------------------------
// Angle condition

struct AngleReport {
  std::vector<ConeHit> hits;
  std::vector<std::string> problems;
  bool passed = true;
};

namespace detail {

// Direction of a segment at its endpoint, pointing along the segment.
inline Point seg_dir(const PathSegment& g) {
  Point d = g.b.position - g.a.position;
  return d / std::abs(d);
}

// Maps a direction from polygon pa (at point za on pa's boundary) into polygon pb's frame.
inline std::optional<Point> transfer_direction(const Topology& top, std::size_t pa, Point za, std::size_t pb,
                                               Point zb, Point d, double tol = 1e-8) {
  if (pa == pb && std::abs(za - zb) <= tol) return d;
  const Polygon& P = top.surface().polygons[pa];
  for (std::size_t e = 0; e < P.size(); ++e) {
    if (!on_segment(za, P.edge_start(e), P.edge_end(e), tol)) continue;
    const EdgeLink& l = top.link({pa, e});
    if (l.kind != EdgeLink::Kind::paired || l.partner.polygon != pb) continue;
    Isometry g = top.gluing(l.partner);  // pa -> pb
    if (std::abs(g.apply(za) - zb) <= tol) return g.linear(d);
  }
  return std::nullopt;
}

}  // namespace detail

inline AngleReport check_angle_condition(const Topology& top, const std::vector<PathSegment>& segs,
                                         double tol = kAngleTol) {
  const auto& s = top.surface();
  AngleReport rep;
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < segs.size(); ++k) {
    const PathSegment& g0 = segs[k];
    const PathSegment& g1 = segs[k + 1];
    if (std::abs(g0.b.position - g0.a.position) < 1e-15 || std::abs(g1.b.position - g1.a.position) < 1e-15) continue;
    auto loc = locate_point(s.polygons[g0.b.polygon], g0.b.position, 1e-8);
    if (loc.kind == PointLocation::Kind::vertex) {
      auto loc1 = locate_point(s.polygons[g1.a.polygon], g1.a.position, 1e-8);
      if (loc1.kind != PointLocation::Kind::vertex) {
        rep.problems.push_back("segments " + std::to_string(k) + "/" + std::to_string(k + 1) + " do not meet");
        rep.passed = false;
        continue;
      }
      Corner cin{g0.b.polygon, loc.index}, cout{g1.a.polygon, loc1.index};
      std::size_t cy = top.cycle_of(cin);
      if (top.cycle_of(cout) != cy) {
        rep.problems.push_back("segments " + std::to_string(k) + "/" + std::to_string(k + 1) + " do not meet");
        rep.passed = false;
        continue;
      }
      const VertexCycle& C = top.cycles()[cy];
      double tin = top.theta(cin, -detail::seg_dir(g0));
      double tout = top.theta(cout, detail::seg_dir(g1));
      ConeHit h;
      h.cycle = cy;
      h.corner = *std::min_element(C.corners.begin(), C.corners.end());
      h.total_angle = C.angle;
      h.boundary = C.boundary;
      if (!C.boundary) {
        h.right = wrap_angle(tout - tin, C.angle);
        h.left = C.angle - h.right;
      } else if (tout >= tin) {
        h.right = tout - tin;
        h.left = inf;
      } else {
        h.left = tin - tout;
        h.right = inf;
      }
      h.passed = h.left >= kPi - tol && h.right >= kPi - tol;
      if (!h.passed) rep.passed = false;
      rep.hits.push_back(h);
    } else {
      auto d = detail::transfer_direction(top, g0.b.polygon, g0.b.position, g1.a.polygon, g1.a.position,
                                          detail::seg_dir(g0));
      if (!d) {
        rep.problems.push_back("segments " + std::to_string(k) + "/" + std::to_string(k + 1) + " do not meet");
        rep.passed = false;
        continue;
      }
      double bend = std::abs(std::arg(detail::seg_dir(g1) / *d));
      if (bend > tol) {
        rep.problems.push_back("bend of " + std::to_string(bend) + " rad at a regular point after segment " +
                               std::to_string(k));
        rep.passed = false;
      }
    }
  }
  return rep;
}

inline AngleReport check_angle_condition(const HalfTranslationSurface& s, const GeodesicPath& path,
                                         double tol = kAngleTol) {
  Topology top(s);
  return check_angle_condition(top, path.segments, tol);
}

// ---------------------------------------------------------------------------
// Shortest geodesics

class GeodesicSolver {
 public:
  explicit GeodesicSolver(const HalfTranslationSurface& s, int budget = 12)
      : s_(s), top_(s_), tri_(triangulate(s_)), ttop_(tri_.surface), budget_(budget) {
    if (budget < 1) throw PreconditionError("budget must be at least 1");
    if (s_.has_free_boundary()) throw PreconditionError("geodesics need horizontal (not free) boundary");
    // triangulation cycles -> original cycles
    tcycle_.assign(ttop_.cycles().size(), 0);
    pivot_.assign(ttop_.cycles().size(), false);
    for (std::size_t c = 0; c < ttop_.cycles().size(); ++c) {
      Corner tc = ttop_.cycles()[c].corners.front();
      std::size_t par = tri_.parent[tc.polygon];
      Point z = tri_.surface.polygons[tc.polygon].vertex(tc.vertex);
      const Polygon& P = s_.polygons[par];
      for (std::size_t i = 0; i < P.size(); ++i)
        if (P.vertex(i) == z) tcycle_[c] = top_.cycle_of({par, i});
      const VertexCycle& C = ttop_.cycles()[c];
      if (C.angle > 20 * kPi + 1e-6) throw PreconditionError("cone angle exceeds the 20-prong cap");
      pivot_[c] = C.boundary ? C.angle >= kPi - 1e-9 : C.angle >= kTwoPi - 1e-9;
    }
  }
  GeodesicSolver(const GeodesicSolver&) = delete;
  GeodesicSolver& operator=(const GeodesicSolver&) = delete;

  const Topology& topology() const { return top_; }
  const HalfTranslationSurface& surface() const { return s_; }

  GeodesicPath shortest(SurfacePoint p, SurfacePoint q) const {
    SurfacePoint cp = canonical_point(top_, p), cq = canonical_point(top_, q);
    GeodesicPath out;
    out.from = cp;
    out.to = cq;
    if (same_point(top_, cp, cq)) return out;
    Site src = make_site(cp), dst = make_site(cq);
    const std::size_t C = ttop_.cycles().size();
    const std::size_t SRC = C, DST = C + 1;
    std::size_t target_node = dst.vertex ? dst.cycle : DST;
    struct NodeState {
      double dist = std::numeric_limits<double>::infinity();
      std::vector<EdgeRef> chain;
      std::size_t pred = SIZE_MAX;
      Leg leg;
      bool done = false;
    };
    std::vector<NodeState> st(C + 2);
    std::size_t source_node = src.vertex ? src.cycle : SRC;
    st[source_node].dist = 0;
    using QE = std::pair<double, std::size_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    pq.push({0.0, source_node});
    auto better = [](double d, const std::vector<EdgeRef>& ch, const NodeState& ns) {
      if (!std::isfinite(ns.dist)) return true;
      double scale = 1e-12 * std::max(1.0, ns.dist);
      if (d < ns.dist - scale) return true;
      if (d > ns.dist + scale) return false;
      return ch < ns.chain;
    };
    bool exhausted = false;
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (st[u].done || d > st[u].dist) continue;
      st[u].done = true;
      if (u == target_node) break;
      if (u < C && !pivot_[u] && u != source_node) continue;
      Site here = (u == SRC) ? src : vertex_site(u);
      double bound = st[target_node].dist - st[u].dist;
      propagate(here, dst, bound, exhausted, [&](std::size_t node, double len, Leg&& leg) {
        if (node == SIZE_MAX) node = DST;
        if (node != target_node && (node >= C || !pivot_[node])) return;
        double nd = st[u].dist + len;
        std::vector<EdgeRef> ch = st[u].chain;
        ch.insert(ch.end(), leg.chain.begin(), leg.chain.end());
        if (st[node].done || !better(nd, ch, st[node])) return;
        st[node].dist = nd;
        st[node].chain = std::move(ch);
        st[node].pred = u;
        st[node].leg = std::move(leg);
        pq.push({nd, node});
        if (node == target_node) bound = std::min(bound, len);
      });
    }
    if (!std::isfinite(st[target_node].dist))
      throw BudgetError("no geodesic found within a budget of " + std::to_string(budget_) + " unfoldings");
    std::vector<Leg> legs;
    for (std::size_t v = target_node; v != source_node; v = st[v].pred) legs.push_back(st[v].leg);
    std::reverse(legs.begin(), legs.end());
    out.length = st[target_node].dist;
    out.chain = st[target_node].chain;
    assemble(out, legs, src, dst);
    AngleReport ar = check_angle_condition(top_, out.segments);
    out.cone_hits = ar.hits;
    if (!ar.passed)
      throw BudgetError("shortest candidate within a budget of " + std::to_string(budget_) +
                        " unfoldings violates the angle condition");
    return out;
  }

 private:
  struct Frame {
    std::size_t tri = 0;
    Isometry map;  // triangle coordinates -> developed plane
  };
  struct Root {
    Frame frame;
    Point S{};
    int corner = -1;  // vertex index in the triangle for vertex sites
    std::optional<EdgeRef> crossed;
  };
  struct Site {
    bool vertex = false;
    std::size_t cycle = 0;
    std::vector<Root> roots;
    std::vector<std::pair<std::size_t, Point>> copies;  // (triangle, local position) for point sites
  };
  struct Leg {
    std::vector<Frame> frames;
    Point S{}, E{};
    std::vector<EdgeRef> chain;
    int root_corner = -1;
  };
  struct Win {
    Frame frame;
    int entry = -1;
    Point S{}, dr{}, dl{};
    double dmin = 0;
    int depth = 0;
    int parent = -1;
    std::optional<EdgeRef> crossed;
    int root_corner = -1;
  };

  std::vector<Root> roots_for(std::size_t poly, Point z, Isometry into, std::optional<EdgeRef> crossed) const {
    std::vector<Root> r;
    for (std::size_t t = 0; t < tri_.surface.polygons.size(); ++t) {
      if (tri_.parent[t] != poly) continue;
      if (locate_in_polygon(tri_.surface.polygons[t].vertices, z, 1e-12) == Containment::outside) continue;
      r.push_back({{t, into}, into.apply(z), -1, crossed});
    }
    return r;
  }

  Site make_site(SurfacePoint cp) const {
    Site site;
    const Polygon& P = s_.polygons[cp.polygon];
    auto loc = locate_point(P, cp.position, kLengthTol);
    if (loc.kind == PointLocation::Kind::vertex) {
      std::size_t oc = top_.cycle_of({cp.polygon, loc.index});
      for (std::size_t c = 0; c < tcycle_.size(); ++c)
        if (tcycle_[c] == oc) return vertex_site(c);
      throw StructuralError("vertex lost in triangulation");
    }
    site.roots = roots_for(cp.polygon, cp.position, Isometry{}, std::nullopt);
    for (auto& r : site.roots) site.copies.push_back({r.frame.tri, cp.position});
    if (loc.kind == PointLocation::Kind::edge) {
      EdgeRef e{cp.polygon, loc.index};
      const EdgeLink& l = top_.link(e);
      if (l.kind == EdgeLink::Kind::paired) {
        Isometry into = top_.gluing(e);  // partner -> canonical polygon
        Point zq = into.inverse().apply(cp.position);
        auto more = roots_for(l.partner.polygon, zq, into, e);
        for (auto& r : more) site.copies.push_back({r.frame.tri, zq});
        site.roots.insert(site.roots.end(), more.begin(), more.end());
      }
    }
    if (site.roots.empty()) throw PreconditionError("point not found on the surface");
    return site;
  }

  Site vertex_site(std::size_t c) const {
    Site site;
    site.vertex = true;
    site.cycle = c;
    for (const Corner& k : ttop_.cycles()[c].corners) {
      Point z = tri_.surface.polygons[k.polygon].vertex(k.vertex);
      site.roots.push_back({{k.polygon, Isometry{}}, z, int(k.vertex), std::nullopt});
    }
    return site;
  }

  static bool in_wedge(Point S, Point dr, Point dl, Point X) {
    Point v = X - S;
    double n = std::abs(v);
    if (n < 1e-14) return false;
    return cross(dr, v) >= -1e-12 * std::abs(dr) * n && cross(v, dl) >= -1e-12 * std::abs(dl) * n;
  }

  Point tri_vertex(std::size_t t, std::size_t k) const { return tri_.surface.polygons[t].vertex(k); }

  template <class Visit>
  void propagate(const Site& src, const Site& dst, double& bound, bool& exhausted, Visit&& visit) const {
    std::vector<Win> arena;
    using QE = std::pair<double, int>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    constexpr std::size_t kMaxWindows = 4000000;

    auto make_leg = [&](int wi, Point S, Point E, int root_corner, const Frame* root_frame,
                        const std::optional<EdgeRef>& root_crossed) {
      Leg leg;
      leg.S = S;
      leg.E = E;
      leg.root_corner = root_corner;
      std::vector<std::optional<EdgeRef>> crossings;
      for (int w = wi; w >= 0; w = arena[w].parent) {
        leg.frames.push_back(arena[w].frame);
        crossings.push_back(arena[w].crossed);
      }
      if (root_frame) {
        leg.frames.push_back(*root_frame);
        crossings.push_back(root_crossed);
      }
      std::reverse(leg.frames.begin(), leg.frames.end());
      std::reverse(crossings.begin(), crossings.end());
      for (auto& c : crossings)
        if (c) leg.chain.push_back(*c);
      return leg;
    };

    auto report_content = [&](std::size_t t, const Isometry& F, Point S, int skip_corner, auto&& wedge,
                              auto&& leg_of) {
      for (int k = 0; k < 3; ++k) {
        if (k == skip_corner) continue;
        Point W = F.apply(tri_vertex(t, std::size_t(k)));
        if (!wedge(W)) continue;
        double len = std::abs(W - S);
        if (len < 1e-14) continue;
        std::size_t cyc = ttop_.cycle_of({t, std::size_t(k)});
        if (dst.vertex ? (cyc != dst.cycle && !pivot_[cyc]) : !pivot_[cyc]) continue;
        visit(cyc, len, leg_of(W));
      }
      if (!dst.vertex)
        for (auto& [tt, z] : dst.copies) {
          if (tt != t) continue;
          Point Z = F.apply(z);
          if (!wedge(Z)) continue;
          double len = std::abs(Z - S);
          if (len < 1e-14) continue;
          visit(SIZE_MAX, len, leg_of(Z));
        }
    };

    auto spawn = [&](int parent, const Frame& fr, std::size_t e, Point S, Point dr, Point dl, int depth,
                     int root_corner) {
      EdgeRef te{fr.tri, e};
      const EdgeLink& l = ttop_.link(te);
      if (l.kind != EdgeLink::Kind::paired) return;
      const EdgeOrigin& o = tri_.edge_origin[fr.tri][e];
      int nd = depth + (o.original ? 1 : 0);
      if (nd > budget_) {
        exhausted = true;
        return;
      }
      Point P = fr.map.apply(tri_vertex(fr.tri, e)), Q = fr.map.apply(tri_vertex(fr.tri, e + 1));
      double mr = 0, ml = 1;
      if (auto h = line_intersection(S, S + dr, P, Q)) mr = std::clamp(h->second, 0.0, 1.0);
      if (auto h = line_intersection(S, S + dl, P, Q)) ml = std::clamp(h->second, 0.0, 1.0);
      double dmin = point_segment_distance(S, P + mr * (Q - P), P + ml * (Q - P));
      if (dmin >= bound) return;
      Win w;
      w.frame = {l.partner.polygon, fr.map.compose(ttop_.gluing(te))};
      w.entry = int(l.partner.edge);
      w.S = S;
      w.dr = dr;
      w.dl = dl;
      w.dmin = dmin;
      w.depth = nd;
      w.parent = parent;
      if (o.original) w.crossed = o.edge;
      w.root_corner = root_corner;
      if (arena.size() >= kMaxWindows) throw BudgetError("window propagation exceeded its size limit");
      arena.push_back(w);
      pq.push({dmin, int(arena.size() - 1)});
    };

    // roots: everything in the root triangle is directly visible
    std::vector<int> root_of;  // arena index -> root index
    for (std::size_t ri = 0; ri < src.roots.size(); ++ri) {
      const Root& r = src.roots[ri];
      std::size_t t = r.frame.tri;
      const Isometry& F = r.frame.map;
      Point S = r.S;
      auto all = [&](Point) { return true; };
      auto leg_of = [&](Point E) {
        Leg leg;
        leg.S = S;
        leg.E = E;
        leg.frames.push_back(r.frame);
        if (r.crossed) leg.chain.push_back(*r.crossed);
        leg.root_corner = r.corner;
        return leg;
      };
      report_content(t, F, S, r.corner, all, leg_of);
      std::size_t before = arena.size();
      for (std::size_t e = 0; e < 3; ++e) {
        Point P = F.apply(tri_vertex(t, e)), Q = F.apply(tri_vertex(t, e + 1));
        if (r.corner >= 0 && (int(e) == r.corner || int((e + 1) % 3) == r.corner)) continue;
        if (r.corner < 0 && on_segment(S, P, Q, 1e-12)) continue;
        spawn(-1, r.frame, e, S, P - S, Q - S, 0, r.corner);
      }
      for (std::size_t k = before; k < arena.size(); ++k) {
        root_of.resize(arena.size(), -1);
        root_of[k] = int(ri);
      }
    }
    root_of.resize(arena.size(), -1);

    auto root_index = [&](int w) {
      while (arena[w].parent >= 0) w = arena[w].parent;
      return root_of[w];
    };

    while (!pq.empty()) {
      auto [d, wi] = pq.top();
      pq.pop();
      if (d >= bound) break;
      const Win w = arena[wi];
      std::size_t t = w.frame.tri;
      const Isometry& F = w.frame.map;
      int ri = root_index(wi);
      const Root& root = src.roots[ri];
      auto wedge = [&](Point X) { return in_wedge(w.S, w.dr, w.dl, X); };
      auto leg_of = [&](Point E) { return make_leg(wi, w.S, E, w.root_corner, &root.frame, root.crossed); };
      report_content(t, F, w.S, -1, wedge, leg_of);
      std::size_t e = std::size_t(w.entry);
      for (std::size_t f : {(e + 1) % 3, (e + 2) % 3}) {
        Point P = F.apply(tri_vertex(t, f)), Q = F.apply(tri_vertex(t, f + 1));
        Point r = cross(w.dr, P - w.S) > 0 ? P - w.S : w.dr;
        Point l = cross(w.dl, Q - w.S) > 0 ? w.dl : Q - w.S;
        if (cross(r, l) <= 1e-13 * std::abs(r) * std::abs(l)) continue;
        std::size_t before = arena.size();
        spawn(wi, w.frame, f, w.S, r, l, w.depth, w.root_corner);
        root_of.resize(arena.size(), -1);
        (void)before;
      }
    }
  }

  void assemble(GeodesicPath& out, const std::vector<Leg>& legs, const Site& src, const Site& dst) const {
    for (std::size_t li = 0; li < legs.size(); ++li) {
      const Leg& leg = legs[li];
      DevelopedLeg dl;
      dl.from = leg.S;
      dl.to = leg.E;
      for (const Frame& fr : leg.frames) {
        std::array<Point, 3> tri;
        for (std::size_t k = 0; k < 3; ++k) tri[k] = fr.map.apply(tri_vertex(fr.tri, k));
        dl.triangles.push_back(tri);
        dl.polygons.push_back(tri_.parent[fr.tri]);
        auto clip = clip_segment_convex(leg.S, leg.E, tri, 1e-12);
        if (!clip) continue;
        auto [t0, t1] = *clip;
        if ((t1 - t0) * std::abs(leg.E - leg.S) < 1e-12) continue;
        Isometry inv = fr.map.inverse();
        std::size_t par = tri_.parent[fr.tri];
        SurfacePoint a{par, inv.apply(leg.S + t0 * (leg.E - leg.S))};
        SurfacePoint b{par, inv.apply(leg.S + t1 * (leg.E - leg.S))};
        if (!out.segments.empty()) {
          PathSegment& last = out.segments.back();
          if (last.b.polygon == par && std::abs(last.b.position - a.position) < 1e-9 &&
              std::abs(cross(last.b.position - last.a.position, b.position - a.position)) <
                  1e-12 * std::abs(last.b.position - last.a.position) * std::abs(b.position - a.position) &&
              dot(last.b.position - last.a.position, b.position - a.position) > 0) {
            last.b = b;
            continue;
          }
        }
        out.segments.push_back({a, b});
      }
      out.legs.push_back(std::move(dl));
      if (li == 0) {
        Point d = (leg.E - leg.S) / std::abs(leg.E - leg.S);
        const Frame& fr = leg.frames.front();
        if (src.vertex) {
          Point ld = fr.map.inverse().linear(d);
          std::size_t t = fr.tri;
          Corner tc{t, std::size_t(leg.root_corner)};
          // express in the original polygon corner
          out.start_theta = original_theta(tc, ld);
          out.start_direction = d;
        } else {
          out.start_direction = d;
        }
      }
      if (li + 1 == legs.size()) {
        Point d = (leg.E - leg.S) / std::abs(leg.E - leg.S);
        const Frame& fr = leg.frames.back();
        Point ld = fr.map.inverse().linear(d);
        std::size_t par = tri_.parent[fr.tri];
        Point zl = fr.map.inverse().apply(leg.E);
        if (dst.vertex) {
          for (std::size_t k = 0; k < 3; ++k)
            if (std::abs(tri_vertex(fr.tri, k) - zl) < 1e-9) out.end_theta = original_theta({fr.tri, k}, -ld);
          out.end_direction = ld;
        } else {
          auto m = detail::transfer_direction(top_, par, zl, out.to.polygon, out.to.position, ld);
          out.end_direction = m ? *m : ld;
        }
      }
    }
  }

  // Cycle coordinate (original surface) of a direction leaving a triangle corner.
  double original_theta(Corner tc, Point local_dir) const {
    std::size_t par = tri_.parent[tc.polygon];
    Point z = tri_vertex(tc.polygon, tc.vertex);
    const Polygon& P = s_.polygons[par];
    // the triangle corner lies inside exactly one original corner
    for (std::size_t i = 0; i < P.size(); ++i)
      if (P.vertex(i) == z) return top_.theta({par, i}, local_dir);
    throw StructuralError("corner lost in triangulation");
  }

  HalfTranslationSurface s_;
  Topology top_;
  Triangulation tri_;
  Topology ttop_;
  int budget_;
  std::vector<std::size_t> tcycle_;
  std::vector<bool> pivot_;
};

inline GeodesicPath geodesic_between(const HalfTranslationSurface& s, SurfacePoint p, SurfacePoint q,
                                     int budget = 12) {
  GeodesicSolver g(s, budget);
  return g.shortest(p, q);
}

// ---------------------------------------------------------------------------
// Polygon Gauss-Bonnet

struct PolygonGaussBonnetReport {
  double residual = 0;
  double interior_term = 0;       // sum over enclosed vertices of (2pi - angle)
  double corner_term = 0;         // sum over corners of (pi - interior angle)
  std::vector<double> corner_angles;
  std::vector<double> enclosed_cone_angles;  // enclosed vertices with angle != 2pi
};

namespace detail {

struct Chord {
  std::size_t face;
  Point a, b;
};

inline std::vector<std::vector<Point>> split_convex(const std::vector<Point>& poly, Point a, Point b, double eps) {
  Point d = b - a;
  double len = std::abs(d);
  std::vector<double> side(poly.size());
  bool pos = false, neg = false;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    side[i] = cross(d, poly[i] - a) / len;
    if (side[i] > eps) pos = true;
    if (side[i] < -eps) neg = true;
  }
  if (!pos || !neg) return {poly};
  std::vector<Point> L, R;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    std::size_t j = (i + 1) % poly.size();
    Point p = poly[i], q = poly[j];
    double sp = std::abs(side[i]) <= eps ? 0 : side[i], sq = std::abs(side[j]) <= eps ? 0 : side[j];
    if (sp >= 0) L.push_back(p);
    if (sp <= 0) R.push_back(p);
    if ((sp > 0 && sq < 0) || (sp < 0 && sq > 0)) {
      Point x = p + (sp / (sp - sq)) * (q - p);
      L.push_back(x);
      R.push_back(x);
    }
  }
  return {L, R};
}

}  // namespace detail

inline PolygonGaussBonnetReport polygon_gauss_bonnet(const HalfTranslationSurface& s,
                                                     const std::vector<GeodesicPath>& sides,
                                                     double tol = 1e-8) {
  Topology top(s);
  std::vector<PathSegment> segs;
  for (std::size_t k = 0; k < sides.size(); ++k) {
    const auto& side = sides[k];
    if (side.segments.empty()) throw PreconditionError("side " + std::to_string(k) + " is degenerate");
    const auto& next = sides[(k + 1) % sides.size()];
    if (next.segments.empty() || !same_point(top, side.segments.back().b, next.segments.front().a, 1e-7))
      throw PreconditionError("sides do not close up after side " + std::to_string(k));
    for (auto& g : side.segments)
      if (std::abs(g.b.position - g.a.position) > 1e-13) segs.push_back(g);
  }
  if (segs.size() < 2) throw PreconditionError("closed curve needs at least two segments");

  // corner angles on the original surface (region on the left)
  PolygonGaussBonnetReport rep;
  std::size_t n = segs.size();
  for (std::size_t k = 0; k < n; ++k) {
    const PathSegment& g0 = segs[k];
    const PathSegment& g1 = segs[(k + 1) % n];
    Point din = -detail::seg_dir(g0), dout = detail::seg_dir(g1);
    auto loc = locate_point(s.polygons[g0.b.polygon], g0.b.position, 1e-8);
    double ang;
    if (loc.kind == PointLocation::Kind::vertex) {
      auto loc1 = locate_point(s.polygons[g1.a.polygon], g1.a.position, 1e-8);
      if (loc1.kind != PointLocation::Kind::vertex) throw PreconditionError("segments do not meet at a vertex");
      Corner cin{g0.b.polygon, loc.index}, cout{g1.a.polygon, loc1.index};
      const VertexCycle& C = top.cycles()[top.cycle_of(cin)];
      if (C.boundary) throw PreconditionError("curve passes through the surface boundary");
      ang = wrap_angle(top.theta(cin, din) - top.theta(cout, dout), C.angle);
      if (ang < tol || ang > C.angle - tol) throw PreconditionError("degenerate corner (curve retraces itself)");
    } else {
      auto d = detail::transfer_direction(top, g0.b.polygon, g0.b.position, g1.a.polygon, g1.a.position, din);
      if (!d) throw PreconditionError("segments do not meet");
      ang = angle_ccw(dout, *d);
      if (ang < tol || ang > kTwoPi - tol) throw PreconditionError("degenerate corner (curve retraces itself)");
    }
    rep.corner_angles.push_back(ang);
    rep.corner_term += kPi - ang;
  }

  // refine a triangulation so every curve corner is a mesh vertex
  SurfaceBuilder b(s);
  triangulate_builder(b);
  auto find_face = [&](std::size_t parent, Point z) -> std::optional<std::size_t> {
    for (std::size_t f = 0; f < b.face_count(); ++f)
      if (b.face(f).parent == parent && locate_in_polygon(b.face(f).v, z, 1e-10) != Containment::outside)
        return f;
    return std::nullopt;
  };
  for (auto& g : segs)
    for (const SurfacePoint& x : {g.a, g.b}) {
      auto f = find_face(x.polygon, x.position);
      if (!f) throw PreconditionError("curve point outside its polygon");
      auto loc = locate_point({"", b.face(*f).v}, x.position, 1e-10);
      if (loc.kind == PointLocation::Kind::vertex) continue;
      if (loc.kind == PointLocation::Kind::edge) {
        b.split_edge(*f, loc.index, x.position, 1e-10);
        triangulate_builder(b);
      } else {
        b.star_split(*f, x.position);
      }
    }
  HalfTranslationSurface M = b.build();
  std::vector<std::size_t> parent = b.parents();
  Topology tm(M);

  // chords per face
  std::vector<detail::Chord> chords;
  std::set<Corner> on_curve;
  std::vector<std::vector<bool>> blocked(M.polygons.size(), std::vector<bool>(3, false));
  for (auto& g : segs) {
    Point a = g.a.position, d = g.b.position - g.a.position;
    std::vector<std::pair<double, detail::Chord>> pieces;
    for (std::size_t f = 0; f < M.polygons.size(); ++f) {
      if (parent[f] != g.a.polygon) continue;
      const auto& v = M.polygons[f].vertices;
      auto c = clip_segment_convex(a, g.b.position, v, 1e-11);
      if (!c || (c->second - c->first) * std::abs(d) < 1e-9) continue;
      Point pa = a + c->first * d, pb = a + c->second * d;
      bool along = false;
      for (std::size_t e = 0; e < 3; ++e)
        if (on_segment(pa, v[e], v[(e + 1) % 3], 1e-9) && on_segment(pb, v[e], v[(e + 1) % 3], 1e-9)) {
          blocked[f][e] = true;
          const EdgeLink& l = tm.link({f, e});
          if (l.kind == EdgeLink::Kind::paired) blocked[l.partner.polygon][l.partner.edge] = true;
          along = true;
        }
      for (std::size_t k = 0; k < 3; ++k)
        if (std::abs(v[k] - pa) < 1e-9 || std::abs(v[k] - pb) < 1e-9) on_curve.insert({f, k});
      if (!along) pieces.push_back({c->first, {f, pa, pb}});
    }
    std::sort(pieces.begin(), pieces.end(), [](auto& x, auto& y) { return x.first < y.first; });
    for (auto& pc : pieces) chords.push_back(pc.second);
  }
  if (chords.empty()) throw PreconditionError("curve runs entirely along mesh edges; cannot seed the region");
  std::set<std::size_t> curve_cycles;
  for (auto& c : on_curve) curve_cycles.insert(tm.cycle_of(c));

  // simplicity within faces
  for (std::size_t i = 0; i < chords.size(); ++i)
    for (std::size_t j = i + 1; j < chords.size(); ++j) {
      if (chords[i].face != chords[j].face) continue;
      Point a = chords[i].a, bb = chords[i].b, c = chords[j].a, d = chords[j].b;
      auto h = line_intersection(a, bb, c, d);
      if (!h) {
        if (std::abs(cross(bb - a, c - a)) < 1e-12 && (on_segment(c, a, bb, 1e-10) || on_segment(a, c, d, 1e-10)))
          throw PreconditionError("curve overlaps itself");
        continue;
      }
      auto [t, u] = *h;
      if (t > 1e-9 && t < 1 - 1e-9 && u > 1e-9 && u < 1 - 1e-9) throw PreconditionError("curve is not simple");
    }

  // pieces
  struct Piece {
    std::size_t face;
    std::vector<Point> v;
  };
  std::vector<Piece> pieces;
  std::vector<std::vector<std::size_t>> face_pieces(M.polygons.size());
  for (std::size_t f = 0; f < M.polygons.size(); ++f) {
    std::vector<std::vector<Point>> cur{M.polygons[f].vertices};
    for (auto& c : chords) {
      if (c.face != f) continue;
      std::vector<std::vector<Point>> next;
      for (auto& pc : cur)
        for (auto& q : detail::split_convex(pc, c.a, c.b, 1e-12)) next.push_back(q);
      cur = std::move(next);
    }
    for (auto& pc : cur) {
      face_pieces[f].push_back(pieces.size());
      pieces.push_back({f, pc});
    }
  }
  auto piece_at = [&](std::size_t f, Point z) -> std::size_t {
    for (std::size_t id : face_pieces[f])
      if (locate_in_polygon(pieces[id].v, z, 0) == Containment::inside) return id;
    throw PreconditionError("seed point not inside any piece");
  };
  // adjacency across face edges
  auto intervals = [&](const Piece& p, std::size_t e) {
    const auto& fv = M.polygons[p.face].vertices;
    Point A = fv[e], B = fv[(e + 1) % 3];
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < p.v.size(); ++i) {
      Point x = p.v[i], y = p.v[(i + 1) % p.v.size()];
      double scale = std::abs(B - A);
      if (std::abs(cross(B - A, x - A)) / scale < 1e-10 && std::abs(cross(B - A, y - A)) / scale < 1e-10) {
        double s0 = project_param(x, A, B), s1 = project_param(y, A, B);
        if (std::abs(s1 - s0) > 1e-12) out.push_back({std::min(s0, s1), std::max(s0, s1)});
      }
    }
    return out;
  };
  std::vector<std::vector<std::size_t>> adj(pieces.size());
  std::vector<bool> touches_boundary(pieces.size(), false);
  for (std::size_t f = 0; f < M.polygons.size(); ++f)
    for (std::size_t e = 0; e < 3; ++e) {
      const EdgeLink& l = tm.link({f, e});
      for (std::size_t a : face_pieces[f]) {
        auto ia = intervals(pieces[a], e);
        if (ia.empty()) continue;
        if (l.kind != EdgeLink::Kind::paired) {
          if (!blocked[f][e]) touches_boundary[a] = true;
          continue;
        }
        if (blocked[f][e]) continue;
        for (std::size_t bq : face_pieces[l.partner.polygon]) {
          auto ib = intervals(pieces[bq], l.partner.edge);
          bool touch = false;
          for (auto& x : ia)
            for (auto& y : ib) {
              double lo = std::max(x.first, 1 - y.second), hi = std::min(x.second, 1 - y.first);
              if (hi - lo > 1e-9) touch = true;
            }
          if (touch) adj[a].push_back(bq);
        }
      }
    }
  const auto& c0 = chords.front();
  Point mid = 0.5 * (c0.a + c0.b), nrm = Point(0, 1) * (c0.b - c0.a) / std::abs(c0.b - c0.a);
  double eps = 1e-7 * std::abs(c0.b - c0.a);
  std::size_t left = piece_at(c0.face, mid + eps * nrm), right = piece_at(c0.face, mid - eps * nrm);
  std::vector<bool> in(pieces.size(), false);
  std::vector<std::size_t> stack{left};
  in[left] = true;
  while (!stack.empty()) {
    std::size_t x = stack.back();
    stack.pop_back();
    if (touches_boundary[x]) throw PreconditionError("enclosed region meets the surface boundary");
    for (std::size_t y : adj[x])
      if (!in[y]) {
        in[y] = true;
        stack.push_back(y);
      }
  }
  if (in[right]) throw PreconditionError("curve does not separate the surface (not the boundary of a disk)");

  for (std::size_t c = 0; c < tm.cycles().size(); ++c) {
    if (curve_cycles.count(c)) continue;
    const VertexCycle& C = tm.cycles()[c];
    Corner k = C.corners.front();
    const auto& fv = M.polygons[k.polygon].vertices;
    Point z = fv[k.vertex];
    Point x = z + 1e-6 * (centroid(fv) - z);
    if (!in[piece_at(k.polygon, x)]) continue;
    if (C.boundary) throw PreconditionError("enclosed region contains a boundary vertex");
    rep.interior_term += kTwoPi - C.angle;
    if (std::abs(C.angle - kTwoPi) > 1e-9) rep.enclosed_cone_angles.push_back(C.angle);
  }
  rep.residual = rep.interior_term + rep.corner_term - kTwoPi;
  return rep;
}

// ---------------------------------------------------------------------------
// Quadrilateral divergence

struct QuadDivergenceReport {
  double d_x = 0, d_y = 0;
  double side0 = 0, side1 = 0;
  double angle_x0 = 0, angle_x1 = 0;
  bool holds = false;
  bool equality = false;
  bool parallelogram = false;
  double tolerance = 1e-8;
};

namespace detail {

inline QuadDivergenceReport quad_verdict(QuadDivergenceReport r, Point x0, Point x1, Point y0, Point y1,
                                         double tol_len) {
  if (std::abs(r.side0 - r.side1) > tol_len)
    throw PreconditionError("hypothesis failed: sides [x0,y0] and [x1,y1] have different lengths");
  if (r.angle_x0 + r.angle_x1 < kPi - 1e-9)
    throw PreconditionError("hypothesis failed: interior angles at x0 and x1 sum to less than pi");
  r.holds = r.d_y >= r.d_x - r.tolerance;
  r.equality = std::abs(r.d_y - r.d_x) <= r.tolerance;
  if (r.equality)
    r.parallelogram = std::abs((y1 - y0) - (x1 - x0)) <= 1e-7 && std::abs(r.angle_x0 + r.angle_x1 - kPi) <= 1e-7;
  return r;
}

}  // namespace detail

inline QuadDivergenceReport quad_divergence_planar(Point x0, Point x1, Point y0, Point y1) {
  QuadDivergenceReport r;
  r.d_x = std::abs(x1 - x0);
  r.d_y = std::abs(y1 - y0);
  r.side0 = std::abs(y0 - x0);
  r.side1 = std::abs(y1 - x1);
  r.angle_x0 = angle_ccw(x1 - x0, y0 - x0);
  r.angle_x1 = angle_ccw(y1 - x1, x0 - x1);
  return detail::quad_verdict(r, x0, x1, y0, y1, 1e-9);
}

inline QuadDivergenceReport quad_divergence(const GeodesicSolver& g, SurfacePoint x0, SurfacePoint x1,
                                            SurfacePoint y0, SurfacePoint y1) {
  GeodesicPath gx = g.shortest(x0, x1);
  GeodesicPath gy = g.shortest(y0, y1);
  GeodesicPath a = g.shortest(x0, y0);
  GeodesicPath b = g.shortest(x1, y1);
  if (gx.start_theta || gx.end_theta || a.start_theta || b.start_theta)
    throw PreconditionError("quadrilateral corners x0, x1 must not be cone points");
  QuadDivergenceReport r;
  r.d_x = gx.length;
  r.d_y = gy.length;
  r.side0 = a.length;
  r.side1 = b.length;
  // developed in x0's frame; holonomy along [x0,x1] is +-1
  Point hol = gx.end_direction / gx.start_direction;
  double sgn = hol.real() >= 0 ? 1.0 : -1.0;
  Point X0{0, 0};
  Point X1 = gx.length * gx.start_direction;
  Point Y0 = a.length * a.start_direction;
  Point Y1 = X1 + sgn * b.length * b.start_direction;
  r.angle_x0 = angle_ccw(gx.start_direction, a.start_direction);
  r.angle_x1 = angle_ccw(b.start_direction, -gx.end_direction);
  return detail::quad_verdict(r, X0, X1, Y0, Y1, 1e-9);
}

}  // namespace hts
