#pragma once

#include <deque>
#include <set>
#include <string>
#include <vector>

#include "hts/qc_maps.hpp"
#include "hts/surface.hpp"

namespace hts {

enum class Orientation { horizontal, vertical };

inline Orientation parse_orientation(const std::string& s) {
  if (s == "horizontal") return Orientation::horizontal;
  if (s == "vertical") return Orientation::vertical;
  throw PreconditionError("orientation must be horizontal or vertical");
}

// Face-wise affine potentials v(z) = <gradient, z> + offset on a polygon mesh.
struct PartialFoliation {
  HalfTranslationSurface mesh;
  std::vector<Point> gradient;
  std::vector<double> offset;
  std::vector<std::size_t> parent;                 // mesh face -> polygon of the originating surface
  std::map<EdgeRef, EdgeRef> from_surface_edge;  // originating surface edge -> mesh edge
  bool structural = false;

  double value(std::size_t face, Point z) const { return dot(gradient[face], z) + offset[face]; }
  // |dv| along the mesh edge
  double edge_measure(EdgeRef e) const {
    return std::abs(dot(gradient[e.polygon], mesh.polygons[e.polygon].edge_vector(e.edge)));
  }
};

inline PartialFoliation foliation_from_differential(const HalfTranslationSurface& s, Orientation o) {
  Triangulation t = triangulate(s);
  PartialFoliation f;
  f.mesh = t.surface;
  f.parent = t.parent;
  f.from_surface_edge = t.from_original;
  Point g = o == Orientation::horizontal ? Point(0, 1) : Point(1, 0);
  f.gradient.assign(f.mesh.polygons.size(), g);
  f.offset.assign(f.mesh.polygons.size(), 0.0);
  f.structural = true;
  return f;
}

inline PartialFoliation scale(PartialFoliation f, double lambda) {
  for (auto& g : f.gradient) g *= lambda;
  for (auto& c : f.offset) c *= lambda;
  f.structural = f.structural && lambda == 1;
  return f;
}

inline double dirichlet_energy(const PartialFoliation& f) {
  double e = 0;
  for (std::size_t k = 0; k < f.mesh.polygons.size(); ++k) e += std::norm(f.gradient[k]) * f.mesh.polygons[k].area();
  return e;
}

// Transition check on every pairing: v_a = +-v_b + c along the shared edge.
inline MapCheck check_compatibility(const PartialFoliation& f, double tol = 1e-9) {
  MapCheck r;
  Topology t(f.mesh);
  for (auto& pr : f.mesh.pairings) {
    Isometry g = t.gluing(pr.a);
    const Polygon& Q = f.mesh.polygons[pr.b.polygon];
    Point q0 = Q.edge_start(pr.b.edge), q1 = Q.edge_end(pr.b.edge);
    double b0 = f.value(pr.b.polygon, q0), b1 = f.value(pr.b.polygon, q1);
    double a0 = f.value(pr.a.polygon, g.apply(q0)), a1 = f.value(pr.a.polygon, g.apply(q1));
    double scale = std::max({1.0, std::abs(a0), std::abs(a1)});
    bool plus = std::abs((a1 - a0) - (b1 - b0)) <= tol * scale;
    bool minus = std::abs((a1 - a0) + (b1 - b0)) <= tol * scale;
    if (!plus && !minus) r.issues.push_back("potentials disagree along " + edge_name(f.mesh, pr.a));
  }
  return r;
}

struct ExtremalLengthReport {
  double el = 0;
  double energy = 0;
  double area = 0;
};

inline ExtremalLengthReport extremal_length_of_structure(const HalfTranslationSurface& s, Orientation o) {
  if (s.has_free_boundary()) throw PreconditionError("extremal length of the structure needs horizontal boundary");
  ExtremalLengthReport r;
  r.energy = dirichlet_energy(foliation_from_differential(s, o));
  r.area = area(s);
  if (std::abs(r.energy - r.area) > 1e-12 * std::max(1.0, r.area))
    throw StructuralError("energy of the structure foliation differs from the area");
  r.el = r.energy;
  return r;
}

// ---------------------------------------------------------------------------
// Heights

struct MeshStep {
  EdgeRef edge;
  bool forward = true;
  auto operator<=>(const MeshStep&) const = default;
};

struct CurveClass {
  enum class Kind { closed, crosscut } kind = Kind::closed;
  std::vector<MeshStep> steps;
};

namespace detail {

class PathMoves {
 public:
  explicit PathMoves(const PartialFoliation& f) : f_(f), t_(f.mesh) {}

  MeshStep canon(MeshStep s) const {
    const EdgeLink& l = t_.link(s.edge);
    if (l.kind == EdgeLink::Kind::paired && l.partner < s.edge) return {l.partner, !s.forward};
    return s;
  }
  MeshStep reverse(MeshStep s) const { return {s.edge, !s.forward}; }
  std::size_t tail(MeshStep s) const {
    return t_.cycle_of({s.edge.polygon, s.forward ? s.edge.edge : (s.edge.edge + 1) % 3});
  }
  std::size_t head(MeshStep s) const { return tail(reverse(s)); }
  double cost(MeshStep s) const { return f_.edge_measure(s.edge); }
  bool boundary(MeshStep s) const { return t_.is_boundary(s.edge); }
  bool boundary_vertex(std::size_t cycle) const { return t_.cycles()[cycle].boundary; }

  // the (up to two) triangle-local representations of a step
  std::vector<MeshStep> sides(MeshStep s) const {
    std::vector<MeshStep> r{s};
    const EdgeLink& l = t_.link(s.edge);
    if (l.kind == EdgeLink::Kind::paired) r.push_back({l.partner, !s.forward});
    return r;
  }

  std::vector<MeshStep> normalize(std::vector<MeshStep> p, bool closed) const {
    for (auto& s : p) s = canon(s);
    std::vector<MeshStep> out;
    for (auto& s : p) {
      if (!out.empty() && out.back() == reverse(s))
        out.pop_back();
      else
        out.push_back(s);
    }
    if (closed) {
      while (out.size() >= 2 && out.front() == reverse(out.back())) {
        out.erase(out.begin());
        out.pop_back();
      }
      if (!out.empty()) std::rotate(out.begin(), std::min_element(out.begin(), out.end()), out.end());
    }
    return out;
  }

  double total(const std::vector<MeshStep>& p) const {
    double c = 0;
    for (auto& s : p) c += cost(s);
    return c;
  }

  // all paths one move away
  std::vector<std::vector<MeshStep>> neighbors(const std::vector<MeshStep>& p, bool closed) const {
    std::vector<std::vector<MeshStep>> out;
    const std::size_t n = p.size();
    auto emit = [&](std::vector<MeshStep> q) { out.push_back(normalize(std::move(q), closed)); };
    // face slides
    for (std::size_t k = 0; k < n; ++k)
      for (MeshStep s : sides(p[k])) {
        std::size_t t = s.edge.polygon, e = s.edge.edge;
        std::vector<MeshStep> rep;
        if (s.forward)
          rep = {{{t, (e + 2) % 3}, false}, {{t, (e + 1) % 3}, false}};
        else
          rep = {{{t, (e + 1) % 3}, true}, {{t, (e + 2) % 3}, true}};
        std::vector<MeshStep> q(p.begin(), p.begin() + k);
        q.insert(q.end(), rep.begin(), rep.end());
        q.insert(q.end(), p.begin() + k + 1, p.end());
        emit(std::move(q));
      }
    // shortcuts across a triangle
    std::size_t lim = closed ? n : (n == 0 ? 0 : n - 1);
    for (std::size_t k = 0; k < lim && n >= 2; ++k) {
      std::size_t k1 = (k + 1) % n;
      for (MeshStep a : sides(p[k]))
        for (MeshStep b : sides(p[k1])) {
          if (a.edge.polygon != b.edge.polygon || a.edge.edge == b.edge.edge) continue;
          std::size_t t = a.edge.polygon;
          std::size_t ah = a.forward ? (a.edge.edge + 1) % 3 : a.edge.edge;
          std::size_t bt = b.forward ? b.edge.edge : (b.edge.edge + 1) % 3;
          if (ah != bt) continue;
          std::size_t at = a.forward ? a.edge.edge : (a.edge.edge + 1) % 3;
          std::size_t f = 3 - a.edge.edge - b.edge.edge;
          MeshStep c{{t, f}, f == at};
          std::vector<MeshStep> q;
          if (closed && k1 == 0) {
            q.assign(p.begin() + 1, p.end() - 1);
            q.push_back(c);
          } else {
            q.assign(p.begin(), p.begin() + k);
            q.push_back(c);
            q.insert(q.end(), p.begin() + k + 2, p.end());
          }
          emit(std::move(q));
        }
    }
    // cross-cut endpoints slide along the boundary
    if (!closed && n > 0) {
      for (std::size_t t = 0; t < f_.mesh.polygons.size(); ++t)
        for (std::size_t e = 0; e < 3; ++e) {
          if (!t_.is_boundary({t, e})) continue;
          for (bool fw : {true, false}) {
            MeshStep b{{t, e}, fw};
            if (head(b) == tail(p.front())) {
              std::vector<MeshStep> q{b};
              q.insert(q.end(), p.begin(), p.end());
              emit(std::move(q));
            }
            if (tail(b) == head(p.back())) {
              std::vector<MeshStep> q = p;
              q.push_back(b);
              emit(std::move(q));
            }
          }
        }
      if (boundary(p.front()) && n > 1) emit(std::vector<MeshStep>(p.begin() + 1, p.end()));
      if (boundary(p.back()) && n > 1) emit(std::vector<MeshStep>(p.begin(), p.end() - 1));
    }
    return out;
  }

  void validate(const CurveClass& c) const {
    const auto& p = c.steps;
    if (p.empty()) throw PreconditionError("curve representative is empty");
    for (auto& s : p)
      if (s.edge.polygon >= f_.mesh.polygons.size() || s.edge.edge >= 3)
        throw PreconditionError("curve step outside the mesh");
    for (std::size_t k = 0; k + 1 < p.size(); ++k)
      if (head(p[k]) != tail(p[k + 1])) throw PreconditionError("curve representative is not connected");
    if (c.kind == CurveClass::Kind::closed && head(p.back()) != tail(p.front()))
      throw PreconditionError("closed curve does not close up");
    if (c.kind == CurveClass::Kind::crosscut &&
        (!boundary_vertex(tail(p.front())) || !boundary_vertex(head(p.back()))))
      throw PreconditionError("cross-cut endpoints must lie on the boundary");
  }

 private:
  const PartialFoliation& f_;
  Topology t_;
};

}  // namespace detail

// Curve given by steps along edges of the originating surface.
inline CurveClass curve_from_surface_edges(const PartialFoliation& f, CurveClass::Kind kind,
                                           const std::vector<MeshStep>& surface_steps) {
  CurveClass c;
  c.kind = kind;
  for (auto& s : surface_steps) {
    auto it = f.from_surface_edge.find(s.edge);
    if (it == f.from_surface_edge.end()) throw PreconditionError("edge is not part of the mesh");
    c.steps.push_back({it->second, s.forward});
  }
  return c;
}

struct HeightReport {
  double height = 0;
  CurveClass representative;
  std::vector<double> best_by_depth;
  std::size_t states = 0;
};

inline HeightReport height_of_class(const PartialFoliation& f, const CurveClass& c, int budget = 6,
                                    std::size_t max_states = 400000) {
  if (budget < 1) throw PreconditionError("budget must be at least 1");
  detail::PathMoves mv(f);
  mv.validate(c);
  bool closed = c.kind == CurveClass::Kind::closed;
  auto start = mv.normalize(c.steps, closed);
  std::set<std::vector<MeshStep>> seen{start};
  std::vector<std::vector<MeshStep>> layer{start};
  HeightReport r;
  double best = mv.total(start);
  std::vector<MeshStep> arg = start;
  r.best_by_depth.push_back(best);
  const std::size_t max_len = c.steps.size() + std::size_t(budget) + 2;
  for (int d = 1; d <= budget; ++d) {
    std::vector<std::vector<MeshStep>> next;
    for (auto& p : layer)
      for (auto& q : mv.neighbors(p, closed)) {
        if (q.size() > max_len || (!closed && q.empty())) continue;
        if (!seen.insert(q).second) continue;
        if (seen.size() > max_states) throw BudgetError("height search exceeded its state limit");
        double v = mv.total(q);
        if (v < best - 1e-12) {
          best = v;
          arg = q;
        }
        next.push_back(std::move(q));
      }
    layer = std::move(next);
    r.best_by_depth.push_back(best);
  }
  r.states = seen.size();
  if (r.best_by_depth[budget] < r.best_by_depth[budget - 1] - 1e-12)
    throw BudgetError("height did not stabilize within " + std::to_string(budget) + " moves");
  r.height = best;
  r.representative.kind = c.kind;
  r.representative.steps = arg;
  return r;
}

// ---------------------------------------------------------------------------
// Push-forward and monotonicity

inline PartialFoliation pushforward_foliation(const PartialFoliation& f, const PiecewiseAffineMap& m) {
  if (m.faces.size() != m.domain.polygons.size()) throw PreconditionError("map has the wrong number of faces");
  PartialFoliation r;
  r.mesh = f.mesh;
  r.parent.resize(f.mesh.polygons.size());
  for (std::size_t k = 0; k < f.mesh.polygons.size(); ++k) {
    std::size_t p = f.parent.at(k);
    const FaceMap& fm = m.faces.at(p);
    if (!(fm.A.det() > 0)) throw PreconditionError("map is not injective on face " + std::to_string(p));
    for (auto& v : r.mesh.polygons[k].vertices) v = fm.A.apply(v) + fm.b;
    Mat2 Ai = fm.A.inverse();
    Mat2 AiT = Ai.transpose();
    Point g = f.gradient[k];
    r.gradient.push_back(AiT.apply(g));
    r.offset.push_back(f.offset[k] - dot(g, Ai.apply(fm.b)));
    r.parent[k] = fm.target;
  }
  for (auto& mk : r.mesh.marks) {
    const FaceMap& fm = m.faces.at(f.parent.at(mk.point.polygon));
    mk.point.position = fm.A.apply(mk.point.position) + fm.b;
  }
  // pairing signs of the image mesh
  for (auto& pr : r.mesh.pairings) {
    Point va = r.mesh.polygons[pr.a.polygon].edge_vector(pr.a.edge);
    Point vb = r.mesh.polygons[pr.b.polygon].edge_vector(pr.b.edge);
    double sc = std::max(std::abs(va), 1.0);
    if (std::abs(va + vb) <= 1e-9 * sc)
      pr.sign = 1;
    else if (std::abs(va - vb) <= 1e-9 * sc)
      pr.sign = -1;
    else
      throw PreconditionError("map is not continuous across " + edge_name(f.mesh, pr.a));
  }
  for (auto& b : r.mesh.boundary) {
    Point d = r.mesh.polygons[b.edge.polygon].edge_vector(b.edge.edge);
    if (b.kind == BoundaryKind::horizontal && std::abs(d.imag()) > 1e-9 * std::abs(d)) b.kind = BoundaryKind::free;
  }
  r.from_surface_edge = f.from_surface_edge;
  r.structural = false;
  return r;
}

struct MonotonicityVerdict {
  double energy_before = 0, energy_after = 0;
  double K = 1, dilatation = 1;
  bool holds = false;
  bool equality_case = false;   // Teichmuller stretch along the foliation
  bool equality_holds = false;
};

inline MonotonicityVerdict el_monotonicity_check(const PartialFoliation& f, const PiecewiseAffineMap& m, double K) {
  MonotonicityVerdict v;
  v.K = K;
  v.dilatation = dilatation_of(m);
  if (v.dilatation > K + 1e-9) throw PreconditionError("map dilatation exceeds K");
  v.energy_before = dirichlet_energy(f);
  v.energy_after = dirichlet_energy(pushforward_foliation(f, m));
  v.holds = v.energy_after <= K * v.energy_before + 1e-8;
  bool stretch = true;
  for (auto& fm : m.faces) {
    double sg = fm.A.a >= 0 ? 1 : -1;
    if (std::abs(fm.A.a - sg * K) > 1e-12 * K || fm.A.b != 0 || fm.A.c != 0 || std::abs(fm.A.d - sg) > 1e-12)
      stretch = false;
  }
  bool vertical_gradient = true;  // leaves horizontal
  for (auto g : f.gradient)
    if (std::abs(g.real()) > 1e-15 * std::abs(g)) vertical_gradient = false;
  v.equality_case = stretch && vertical_gradient;
  if (v.equality_case)
    v.equality_holds = std::abs(v.energy_after - K * v.energy_before) <= 1e-12 * std::max(1.0, K * v.energy_before);
  return v;
}

}  // namespace hts
