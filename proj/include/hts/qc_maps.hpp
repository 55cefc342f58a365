#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hts/surface.hpp"

namespace hts {

struct FaceMap {
  Mat2 A;
  Point b{};
  std::size_t target = 0;  // codomain polygon holding the image
};

// Face-wise affine map; face k of the domain goes to codomain polygon faces[k].target.
struct PiecewiseAffineMap {
  HalfTranslationSurface domain, codomain;
  std::vector<FaceMap> faces;

  SurfacePoint apply(SurfacePoint x) const {
    const FaceMap& f = faces.at(x.polygon);
    return {f.target, f.A.apply(x.position) + f.b};
  }
};

struct MapCheck {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Orientation and continuity across paired domain edges.
inline MapCheck check_map(const PiecewiseAffineMap& m, double tol = 1e-9) {
  MapCheck r;
  if (m.faces.size() != m.domain.polygons.size()) {
    r.issues.push_back("face count differs from domain polygon count");
    return r;
  }
  for (std::size_t k = 0; k < m.faces.size(); ++k) {
    if (!(m.faces[k].A.det() > 0)) r.issues.push_back("face " + std::to_string(k) + " has det <= 0");
    if (m.faces[k].target >= m.codomain.polygons.size())
      r.issues.push_back("face " + std::to_string(k) + " targets an unknown polygon");
  }
  if (!r.ok()) return r;
  Topology td(m.domain), tc(m.codomain);
  for (auto& pr : m.domain.pairings) {
    const Polygon& P = m.domain.polygons[pr.a.polygon];
    Isometry g = td.gluing(pr.a);  // b-polygon coords -> a-polygon coords
    const Polygon& Q = m.domain.polygons[pr.b.polygon];
    for (double t : {0.0, 0.5, 1.0}) {
      Point zq = Q.edge_start(pr.b.edge) + t * Q.edge_vector(pr.b.edge);
      Point zp = g.apply(zq);
      SurfacePoint ia = m.apply({pr.a.polygon, zp}), ib = m.apply({pr.b.polygon, zq});
      bool same = false;
      try {
        same = same_point(tc, ia, ib, tol * std::max(1.0, std::abs(ia.position)));
      } catch (const Error&) {
        same = false;
      }
      if (!same) {
        r.issues.push_back("images disagree along " + edge_name(m.domain, pr.a));
        break;
      }
    }
    (void)P;
  }
  return r;
}

inline double face_dilatation(const Mat2& A) {
  auto [s1, s2] = singular_values(A);
  return s1 / s2;
}

inline double dilatation_of(const PiecewiseAffineMap& m) {
  double K = 1;
  for (auto& f : m.faces) {
    if (!(f.A.det() > 0)) throw PreconditionError("map is not orientation preserving");
    K = std::max(K, face_dilatation(f.A));
  }
  return K;
}

// Beltrami coefficient of z -> A z.
inline std::complex<double> beltrami_of(const Mat2& A) {
  std::complex<double> dz{A.a + A.d, A.c - A.b}, dzbar{A.a - A.d, A.c + A.b};
  if (std::abs(dz) == 0) throw PreconditionError("derivative in z vanishes");
  return dzbar / dz;
}

inline std::vector<std::complex<double>> beltrami_of(const PiecewiseAffineMap& m) {
  std::vector<std::complex<double>> mu;
  for (auto& f : m.faces) mu.push_back(beltrami_of(f.A));
  return mu;
}

// Image of a surface under a linear map of the natural coordinates.
inline HalfTranslationSurface linear_image(const HalfTranslationSurface& s, const Mat2& M) {
  if (!(M.det() > 0)) throw PreconditionError("linear map must preserve orientation");
  HalfTranslationSurface r = s;
  for (auto& P : r.polygons)
    for (auto& v : P.vertices) v = M.apply(v);
  for (auto& mk : r.marks) mk.point.position = M.apply(mk.point.position);
  for (auto& b : r.boundary) {
    if (b.kind != BoundaryKind::horizontal) continue;
    Point d = r.polygons[b.edge.polygon].edge_vector(b.edge.edge);
    if (std::abs(d.imag()) > 1e-12 * std::abs(d)) throw PreconditionError("map tilts a horizontal boundary edge");
  }
  return r;
}

struct AffineImage {
  HalfTranslationSurface surface;
  PiecewiseAffineMap map;
};

inline AffineImage affine_image(const HalfTranslationSurface& s, const Mat2& M) {
  AffineImage r;
  r.surface = linear_image(s, M);
  r.map.domain = s;
  r.map.codomain = r.surface;
  for (std::size_t p = 0; p < s.polygons.size(); ++p) r.map.faces.push_back({M, {}, p});
  return r;
}

inline AffineImage stretch_map(const HalfTranslationSurface& s, double K) {
  if (!(K >= 1)) throw PreconditionError("stretch factor must be at least 1");
  return affine_image(s, Mat2::diag(K, 1));
}

inline PiecewiseAffineMap identity_map(const HalfTranslationSurface& s) { return affine_image(s, Mat2{}).map; }

// m2 after m1; m1's face images must lie in m2's domain faces.
inline PiecewiseAffineMap compose(const PiecewiseAffineMap& m2, const PiecewiseAffineMap& m1) {
  if (m1.codomain.polygons.size() != m2.domain.polygons.size() || m2.faces.size() != m2.domain.polygons.size())
    throw PreconditionError("maps are not composable");
  PiecewiseAffineMap r;
  r.domain = m1.domain;
  r.codomain = m2.codomain;
  for (auto& f1 : m1.faces) {
    const FaceMap& f2 = m2.faces[f1.target];
    r.faces.push_back({f2.A * f1.A, f2.A.apply(f1.b) + f2.b, f2.target});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Teichmuller embedding predicate

struct ComplementSegment {
  SurfacePoint a, b;
  bool horizontal = false;
};

struct EmbeddingVerdict {
  bool passed = false;
  bool matrices_ok = false;
  bool complement_null = false;
  bool complement_horizontal = false;
  double complement_area = 0;
  std::vector<std::size_t> bad_faces;
  std::vector<ComplementSegment> complement;
};

inline EmbeddingVerdict teichmuller_embedding_check(const PiecewiseAffineMap& m, double K, double tol = 1e-9) {
  EmbeddingVerdict v;
  v.matrices_ok = true;
  for (std::size_t k = 0; k < m.faces.size(); ++k) {
    const Mat2& A = m.faces[k].A;
    double sg = A.a >= 0 ? 1 : -1;
    if (std::abs(A.a - sg * K) > tol * K || std::abs(A.b) > tol || std::abs(A.c) > tol || std::abs(A.d - sg) > tol) {
      v.matrices_ok = false;
      v.bad_faces.push_back(k);
    }
  }
  double img = 0;
  for (std::size_t k = 0; k < m.faces.size(); ++k) img += m.domain.polygons[k].area() * m.faces[k].A.det();
  double total = area(m.codomain);
  v.complement_area = total - img;
  v.complement_null = std::abs(v.complement_area) <= 1e-9 * std::max(1.0, total);
  // images of domain boundary edges that are not on the codomain boundary
  Topology tc(m.codomain);
  Topology td(m.domain);
  v.complement_horizontal = true;
  std::vector<std::pair<SurfacePoint, SurfacePoint>> seen;
  for (auto& b : m.domain.boundary) {
    const Polygon& P = m.domain.polygons[b.edge.polygon];
    SurfacePoint a = m.apply({b.edge.polygon, P.edge_start(b.edge.edge)});
    SurfacePoint c = m.apply({b.edge.polygon, P.edge_end(b.edge.edge)});
    const Polygon& T = m.codomain.polygons[a.polygon];
    bool on_codomain_boundary = false;
    for (std::size_t e = 0; e < T.size(); ++e) {
      if (!tc.is_boundary({a.polygon, e})) continue;
      if (on_segment(a.position, T.edge_start(e), T.edge_end(e), 1e-9) &&
          on_segment(c.position, T.edge_start(e), T.edge_end(e), 1e-9))
        on_codomain_boundary = true;
    }
    if (on_codomain_boundary) continue;
    bool dup = false;
    for (auto& [x, y] : seen)
      if ((same_point(tc, x, a) && same_point(tc, y, c)) || (same_point(tc, x, c) && same_point(tc, y, a))) dup = true;
    if (dup) continue;
    seen.push_back({a, c});
    ComplementSegment seg{a, c, std::abs((c.position - a.position).imag()) <= tol * std::max(1.0, std::abs(c.position - a.position))};
    if (!seg.horizontal) v.complement_horizontal = false;
    v.complement.push_back(seg);
  }
  (void)td;
  v.passed = v.matrices_ok && v.complement_null && v.complement_horizontal;
  return v;
}

// ---------------------------------------------------------------------------
// Gadgets

struct ShearGadget {
  Mat2 matrix;
  double dilatation = 1;
};

inline ShearGadget shear_gadget(double K, double delta) {
  if (!(K >= 1) || !(delta > 0)) throw PreconditionError("shear gadget needs K >= 1 and delta > 0");
  ShearGadget g;
  g.matrix = {1, (K - 1) * delta, 0, 1};
  g.dilatation = face_dilatation(g.matrix);
  return g;
}

// Closed form of the shear dilatation for off-diagonal entry b.
inline double shear_dilatation(double b) { return ((2 + b * b) + std::abs(b) * std::sqrt(4 + b * b)) / 2; }

struct PushPoint {
  PiecewiseAffineMap map;
  double dilatation = 1;
  Point center_image{};
};

// Two-ring cone construction: center and inner ring translated, outer ring fixed.
// Inner radius min(R/4, (R-|d|)/2).
inline PushPoint push_point(double R, Point d, int N = 64) {
  if (!(R > 0)) throw PreconditionError("disk radius must be positive");
  if (N < 8) throw PreconditionError("push map needs at least 8 boundary vertices");
  if (!(std::abs(d) < R)) throw PreconditionError("displacement too large: must be smaller than the radius");
  const double rho = std::min(R / 4, (R - std::abs(d)) / 2);
  std::vector<Point> in(N), out(N);
  for (int k = 0; k < N; ++k) {
    in[k] = std::polar(rho, kTwoPi * k / N);
    out[k] = std::polar(R, kTwoPi * k / N);
  }
  HalfTranslationSurface D, C;
  C.polygons.push_back({"D", out});
  for (int k = 0; k < N; ++k) C.boundary.push_back({{0, std::size_t(k)}, BoundaryKind::free});
  struct Tri {
    std::array<Point, 3> v, w;
  };
  std::vector<Tri> tris;
  for (int k = 0; k < N; ++k) {
    int k1 = (k + 1) % N;
    tris.push_back({{Point{}, in[k], in[k1]}, {d, in[k] + d, in[k1] + d}});
    tris.push_back({{in[k], out[k], out[k1]}, {in[k] + d, out[k], out[k1]}});
    tris.push_back({{in[k], out[k1], in[k1]}, {in[k] + d, out[k1], in[k1] + d}});
  }
  PushPoint r;
  for (std::size_t t = 0; t < tris.size(); ++t) {
    const auto& T = tris[t];
    D.polygons.push_back({"T" + std::to_string(t), {T.v[0], T.v[1], T.v[2]}});
    Point e1 = T.v[1] - T.v[0], e2 = T.v[2] - T.v[0];
    Point f1 = T.w[1] - T.w[0], f2 = T.w[2] - T.w[0];
    Mat2 E{e1.real(), e2.real(), e1.imag(), e2.imag()};
    Mat2 F{f1.real(), f2.real(), f1.imag(), f2.imag()};
    Mat2 A = F * E.inverse();
    if (!(A.det() > 0)) throw PreconditionError("push map folds triangle " + std::to_string(t));
    r.map.faces.push_back({A, T.w[0] - A.apply(T.v[0]), 0});
  }
  // pair coincident edges
  std::map<std::pair<std::pair<double, double>, std::pair<double, double>>, EdgeRef> open;
  auto key = [](Point a, Point b) {
    auto rd = [](double x) { return std::round(x * 1e9) / 1e9; };
    return std::make_pair(std::make_pair(rd(a.real()), rd(a.imag())), std::make_pair(rd(b.real()), rd(b.imag())));
  };
  for (std::size_t t = 0; t < D.polygons.size(); ++t)
    for (std::size_t e = 0; e < 3; ++e) {
      Point a = D.polygons[t].edge_start(e), b = D.polygons[t].edge_end(e);
      auto it = open.find(key(b, a));
      if (it != open.end()) {
        D.pairings.push_back({it->second, {t, e}, 1});
        open.erase(it);
      } else {
        open[key(a, b)] = {t, e};
      }
    }
  for (auto& [k, e] : open) D.boundary.push_back({e, BoundaryKind::free});
  r.map.domain = D;
  r.map.codomain = C;
  r.dilatation = dilatation_of(r.map);
  r.center_image = d;
  return r;
}

}  // namespace hts
