#pragma once
// Semi-smooth planar sets (normal cones, local charts) and convergence of closed curve sequences
// (Hausdorff distance, collapsing fingers, winding-number reparametrization).

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hts/error.hpp"
#include "hts/geometry.hpp"
#include "hts/surface_io.hpp"

namespace hts {

// ---------------------------------------------------------------------------
// Planar sets

// Outer loops counterclockwise, holes clockwise; the set lies to the left of every loop. Zero-width spikes and
// notches (an edge immediately retraced) are allowed.
struct PlanarSet {
  std::vector<std::vector<Point>> loops;
};

inline PlanarSet parse_planar_set(std::istream& in) {
  PlanarSet B;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "loop") {
      if (tok.size() != 1) throw ParseError("expected 'loop'", line);
      B.loops.emplace_back();
      continue;
    }
    if (B.loops.empty()) throw ParseError("vertex before the first 'loop'", line);
    if (tok.size() != 2 && tok.size() != 3) throw ParseError("expected '<x> <y> [label]'", line);
    B.loops.back().emplace_back(detail::parse_double(tok[0], line), detail::parse_double(tok[1], line));
  }
  if (B.loops.empty()) throw ParseError("no loops", line);
  for (auto& L : B.loops)
    if (L.size() < 3) throw ParseError("loop with fewer than 3 vertices", line);
  return B;
}

inline PlanarSet parse_planar_set_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  return parse_planar_set(f);
}

namespace detail {

inline bool proper_crossing(Point a, Point b, Point c, Point d, double tol) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  double sa = tol * std::abs(b - a), sc = tol * std::abs(d - c);
  return ((d1 > sa && d2 < -sa) || (d1 < -sa && d2 > sa)) && ((d3 > sc && d4 < -sc) || (d3 < -sc && d4 > sc));
}

}  // namespace detail

inline void require_valid_set(const PlanarSet& B, double tol = kLengthTol) {
  if (B.loops.empty()) throw PreconditionError("planar set has no boundary loops");
  std::vector<std::pair<Point, Point>> edges;
  for (std::size_t l = 0; l < B.loops.size(); ++l) {
    auto& L = B.loops[l];
    if (L.size() < 3) throw PreconditionError("loop " + std::to_string(l) + " has fewer than 3 vertices");
    for (std::size_t i = 0; i < L.size(); ++i) {
      if (std::abs(L[(i + 1) % L.size()] - L[i]) <= tol)
        throw PreconditionError("loop " + std::to_string(l) + " repeats vertex " + std::to_string(i));
      edges.push_back({L[i], L[(i + 1) % L.size()]});
    }
  }
  for (std::size_t i = 0; i < edges.size(); ++i)
    for (std::size_t j = i + 1; j < edges.size(); ++j)
      if (detail::proper_crossing(edges[i].first, edges[i].second, edges[j].first, edges[j].second, tol))
        throw PreconditionError("boundary loops cross themselves or each other");
  int outer = 0;
  for (auto& L : B.loops)
    if (signed_area(L) > 0) ++outer;
  if (outer == 0) throw PreconditionError("no counterclockwise outer loop");
}

inline Containment locate_in_set(const PlanarSet& B, Point p, double tol = kLengthTol) {
  for (auto& L : B.loops)
    for (std::size_t i = 0; i < L.size(); ++i)
      if (on_segment(p, L[i], L[(i + 1) % L.size()], tol)) return Containment::boundary;
  int w = 0;
  for (auto& L : B.loops) {
    for (std::size_t i = 0; i < L.size(); ++i) {
      Point a = L[i], b = L[(i + 1) % L.size()];
      if (a.imag() <= p.imag()) {
        if (b.imag() > p.imag() && cross(b - a, p - a) > 0) ++w;
      } else if (b.imag() <= p.imag() && cross(b - a, p - a) < 0) {
        --w;
      }
    }
  }
  return w > 0 ? Containment::inside : Containment::outside;
}

// ---------------------------------------------------------------------------
// Normal cones

struct NormalCone {
  Point base{};
  bool empty = false;
  double theta1 = 0;       // directions theta1 .. theta1 + angle (counterclockwise)
  double angle = 0;
  double interior_angle = kPi;  // of the set at base
  bool contains(Point d, double tol = 1e-12) const {
    if (empty) return false;
    double t = wrap_angle(std::arg(d) - theta1);
    return t <= angle + tol || t >= kTwoPi - tol;
  }
};

struct BoundaryFeature {
  std::size_t loop = 0;
  std::size_t index = 0;  // vertex index, or edge index when on_edge
  bool on_edge = false;
};

inline Point outward_normal(Point d) { return Point(d.imag(), -d.real()) / std::abs(d); }

// Interior angle of the set at vertex i of loop l, in [0, 2pi].
inline double interior_angle(const PlanarSet& B, std::size_t l, std::size_t i) {
  auto& L = B.loops[l];
  std::size_t n = L.size();
  Point p = L[i], din = p - L[(i + n - 1) % n], dout = L[(i + 1) % n] - p;
  double turn = std::atan2(cross(din, dout), dot(din, dout));
  if (std::abs(std::abs(turn) - kPi) < 1e-12) {
    // retraced edge: a hair (angle 0) if the continuation past the tip leaves the set, a slit (2pi) otherwise
    double eta = 1e-6 * std::min(std::abs(din), std::abs(dout));
    return locate_in_set(B, p + eta * din / std::abs(din), 0) == Containment::inside ? kTwoPi : 0.0;
  }
  return kPi - turn;
}

inline NormalCone vertex_cone(const PlanarSet& B, std::size_t l, std::size_t i) {
  auto& L = B.loops[l];
  std::size_t n = L.size();
  Point p = L[i], din = p - L[(i + n - 1) % n];
  NormalCone c;
  c.base = p;
  c.interior_angle = interior_angle(B, l, i);
  if (c.interior_angle > kPi + kAngleTol) {
    c.empty = true;
    return c;
  }
  c.theta1 = wrap_angle(std::arg(outward_normal(din)));
  c.angle = std::max(0.0, kPi - c.interior_angle);
  return c;
}

inline NormalCone edge_cone(const PlanarSet& B, std::size_t l, std::size_t e, Point p) {
  auto& L = B.loops[l];
  NormalCone c;
  c.base = p;
  c.theta1 = wrap_angle(std::arg(outward_normal(L[(e + 1) % L.size()] - L[e])));
  return c;
}

inline BoundaryFeature locate_boundary(const PlanarSet& B, Point p, double tol = kLengthTol) {
  for (std::size_t l = 0; l < B.loops.size(); ++l)
    for (std::size_t i = 0; i < B.loops[l].size(); ++i)
      if (std::abs(B.loops[l][i] - p) <= tol) return {l, i, false};
  for (std::size_t l = 0; l < B.loops.size(); ++l) {
    auto& L = B.loops[l];
    for (std::size_t i = 0; i < L.size(); ++i)
      if (on_segment(p, L[i], L[(i + 1) % L.size()], tol)) return {l, i, true};
  }
  throw PreconditionError("point is not on the boundary of the set");
}

inline NormalCone normal_cone_at(const PlanarSet& B, Point p) {
  auto f = locate_boundary(B, p);
  return f.on_edge ? edge_cone(B, f.loop, f.index, p) : vertex_cone(B, f.loop, f.index);
}

struct SemiSmoothWitness {
  BoundaryFeature feature;
  Point point{};
  std::string reason;
};

struct SemiSmoothVerdict {
  bool passed = false;
  std::vector<SemiSmoothWitness> witnesses;
  double tol = 1e-9;
};

inline SemiSmoothVerdict semi_smooth_check(const PlanarSet& B, double tol = 1e-9) {
  require_valid_set(B);
  SemiSmoothVerdict v;
  v.tol = tol;
  for (std::size_t l = 0; l < B.loops.size(); ++l) {
    auto& L = B.loops[l];
    std::size_t n = L.size();
    for (std::size_t i = 0; i < n; ++i) {
      auto c = vertex_cone(B, l, i);
      if (c.empty) {
        v.witnesses.push_back({{l, i, false}, L[i], "empty normal cone (reflex vertex)"});
        continue;
      }
      if (c.angle >= kPi - tol) {
        v.witnesses.push_back({{l, i, false}, L[i], "normal cone angle is not less than pi (cusp)"});
        continue;
      }
      // limits of edge normals from both sides must lie in the vertex cone
      Point nin = outward_normal(L[i] - L[(i + n - 1) % n]), nout = outward_normal(L[(i + 1) % n] - L[i]);
      double e1 = std::abs(wrap_angle(std::arg(nin) - c.theta1 + kPi) - kPi);
      double e2 = std::abs(wrap_angle(std::arg(nout) - c.theta1 - c.angle + kPi) - kPi);
      if (e1 > tol || e2 > tol)
        v.witnesses.push_back({{l, i, false}, L[i], "limit of edge normals is not normal"});
    }
  }
  v.passed = v.witnesses.empty();
  return v;
}

// ---------------------------------------------------------------------------
// Local charts

struct ChartReport {
  Point base{};
  Point up{};                 // unit bisector of the normal cone
  double half_width = 0;      // J = [-half_width, half_width]
  double half_height = 0;
  double lipschitz = 0;
  std::size_t samples = 0;
  bool single_valued = false;
  bool lipschitz_ok = false;
  bool subgraph_ok = false;
  std::vector<Point> graph;   // (u, g(u)) in the chart frame
  std::array<Point, 4> rectangle{};
  bool ok() const { return single_valued && lipschitz_ok && subgraph_ok; }
};

inline ChartReport manifold_chart_extract(const PlanarSet& B, Point p, std::size_t samples = 64) {
  auto f = locate_boundary(B, p);
  NormalCone cone = f.on_edge ? edge_cone(B, f.loop, f.index, p) : vertex_cone(B, f.loop, f.index);
  if (cone.empty || cone.angle >= kPi - 1e-9)
    throw PreconditionError("no chart: the set is not semi-smooth at this point");
  ChartReport r;
  r.base = p;
  r.up = std::polar(1.0, cone.theta1 + cone.angle / 2);
  r.lipschitz = std::tan(cone.angle / 2);
  r.samples = samples;
  auto& L0 = B.loops[f.loop];
  std::size_t n0 = L0.size();
  // distance to everything not touching p
  double dmin = 1e300;
  for (std::size_t l = 0; l < B.loops.size(); ++l) {
    auto& L = B.loops[l];
    for (std::size_t i = 0; i < L.size(); ++i) {
      bool incident = l == f.loop && (f.on_edge ? i == f.index : (i == f.index || i == (f.index + n0 - 1) % n0));
      if (incident) continue;
      dmin = std::min(dmin, point_segment_distance(p, L[i], L[(i + 1) % L.size()]));
    }
  }
  if (f.on_edge) dmin = std::min({dmin, std::abs(p - L0[f.index]), std::abs(p - L0[(f.index + 1) % n0])});
  if (!(dmin > 0)) throw PreconditionError("no chart: the boundary touches itself at this point");
  double L = r.lipschitz;
  r.half_width = dmin / (2 * std::sqrt(1 + (L + 1) * (L + 1)));
  r.half_height = (L + 1) * r.half_width;
  Point rot = Point(0, 1) * std::conj(r.up);  // world -> frame
  auto to_frame = [&](Point z) { return (z - p) * rot; };
  auto to_world = [&](Point w) { return p + w / rot; };
  double d = r.half_width, H = r.half_height;
  r.rectangle = {to_world({-d, -H}), to_world({d, -H}), to_world({d, H}), to_world({-d, H})};
  r.single_valued = r.lipschitz_ok = r.subgraph_ok = true;
  for (std::size_t k = 0; k <= samples; ++k) {
    double u = -d + 2 * d * double(k) / double(samples);
    std::vector<double> hits;
    for (auto& Lp : B.loops)
      for (std::size_t i = 0; i < Lp.size(); ++i) {
        Point a = to_frame(Lp[i]), b = to_frame(Lp[(i + 1) % Lp.size()]);
        if ((a.real() - u) * (b.real() - u) > 0) continue;
        if (a.real() == b.real()) {
          if (a.real() == u) r.single_valued = false;  // vertical boundary piece inside the chart
          continue;
        }
        double t = (u - a.real()) / (b.real() - a.real());
        double v = a.imag() + t * (b.imag() - a.imag());
        if (std::abs(v) <= H) hits.push_back(v);
      }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end(), [&](double x, double y) { return std::abs(x - y) <= 1e-12 * H; }),
               hits.end());
    if (hits.size() != 1) {
      r.single_valued = false;
      continue;
    }
    double g = hits[0];
    if (!r.graph.empty()) {
      Point prev = r.graph.back();
      if (std::abs(g - prev.imag()) > L * (u - prev.real()) * (1 + 1e-9) + 1e-12 * H) r.lipschitz_ok = false;
    }
    r.graph.push_back({u, g});
    double eta = 1e-3 * (H - std::abs(g));
    for (double v : {g - eta, (g - H) / 2, -H * 0.999})
      if (v < g && locate_in_set(B, to_world({u, v}), 0) != Containment::inside) r.subgraph_ok = false;
    for (double v : {g + eta, (g + H) / 2, H * 0.999})
      if (v > g && locate_in_set(B, to_world({u, v}), 0) != Containment::outside) r.subgraph_ok = false;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Hausdorff distance between polylines

struct Window {
  Point lo{-1e300, -1e300}, hi{1e300, 1e300};
};

namespace detail {

using Segments = std::vector<std::pair<Point, Point>>;

inline Segments clip_polyline(const std::vector<Point>& c, bool closed, const Window& w) {
  Segments out;
  std::size_t n = c.size();
  std::size_t m = closed ? n : n - 1;
  for (std::size_t i = 0; i < m; ++i) {
    Point a = c[i], b = c[(i + 1) % n];
    double t0 = 0, t1 = 1;
    Point d = b - a;
    auto clip = [&](double p, double q) {  // p * t <= q
      if (p == 0) return q >= 0;
      double t = q / p;
      if (p < 0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
      return t0 <= t1;
    };
    if (clip(-d.real(), a.real() - w.lo.real()) && clip(d.real(), w.hi.real() - a.real()) &&
        clip(-d.imag(), a.imag() - w.lo.imag()) && clip(d.imag(), w.hi.imag() - a.imag()))
      out.push_back({a + t0 * d, a + t1 * d});
  }
  return out;
}

inline double distance_to(const Segments& S, Point p) {
  double d = 1e300;
  for (auto& [a, b] : S) d = std::min(d, point_segment_distance(p, a, b));
  return d;
}

// Upper bound for the distance to B along [a,b]: each segment distance is convex along [a,b].
inline double piece_bound(const Segments& S, Point a, Point b) {
  double u = 1e300;
  for (auto& [c, d] : S) u = std::min(u, std::max(point_segment_distance(a, c, d), point_segment_distance(b, c, d)));
  return u;
}

// sup over A of the distance to B, by branch and bound on each segment
inline double directed_hausdorff(const Segments& A, const Segments& B, double tol) {
  double best = 0;
  struct Piece {
    Point a, b;
    int depth;
  };
  std::vector<Piece> stack;
  for (auto& [a, b] : A) {
    best = std::max({best, distance_to(B, a), distance_to(B, b)});
    stack.push_back({a, b, 0});
  }
  while (!stack.empty()) {
    Piece s = stack.back();
    stack.pop_back();
    if (s.depth > 60 || piece_bound(B, s.a, s.b) <= best + tol) continue;
    Point m = 0.5 * (s.a + s.b);
    best = std::max(best, distance_to(B, m));
    stack.push_back({s.a, m, s.depth + 1});
    stack.push_back({m, s.b, s.depth + 1});
  }
  return best;
}

}  // namespace detail

inline double hausdorff_distance(const std::vector<Point>& A, const std::vector<Point>& B, const Window& w = {},
                                 bool closed = true, double tol = 1e-13) {
  auto SA = detail::clip_polyline(A, closed, w), SB = detail::clip_polyline(B, closed, w);
  if (SA.empty() || SB.empty()) throw PreconditionError("a curve does not meet the window");
  return std::max(detail::directed_hausdorff(SA, SB, tol), detail::directed_hausdorff(SB, SA, tol));
}

// ---------------------------------------------------------------------------
// Closed curves

// Samples c(2 pi i / n), i = 0..n-1, joined linearly.
struct ClosedCurve {
  std::vector<Point> pts;
  std::size_t size() const { return pts.size(); }
  Point operator()(double t) const {
    double n = double(pts.size());
    double x = wrap_angle(t) / kTwoPi * n;
    std::size_t i = std::min(std::size_t(x), pts.size() - 1);
    double f = x - double(i);
    return pts[i] + f * (pts[(i + 1) % pts.size()] - pts[i]);
  }
  double param(std::size_t i) const { return kTwoPi * double(i) / double(pts.size()); }
};

inline double curve_diameter(const std::vector<Point>& c) {
  // convex hull, then all pairs on the hull
  std::vector<Point> p(c);
  std::sort(p.begin(), p.end(), [](Point a, Point b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  std::vector<Point> h;
  for (int pass = 0; pass < 2; ++pass) {
    std::size_t start = h.size();
    for (auto& q : p) {
      while (h.size() >= start + 2 && cross(h.back() - h[h.size() - 2], q - h[h.size() - 2]) <= 0) h.pop_back();
      h.push_back(q);
    }
    h.pop_back();
    std::reverse(p.begin(), p.end());
  }
  double d = 0;
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j) d = std::max(d, std::abs(h[i] - h[j]));
  return d;
}

// ---------------------------------------------------------------------------
// Collapsing fingers

struct FingerWitness {
  std::array<double, 4> params{};  // x < y < z < w in cyclic order
  std::array<Point, 4> points{};
  double pinch = 0;                // max(|c(x)-c(z)|, |c(y)-c(w)|)
  double separation = 0;           // |c(x)-c(y)|
};

struct FingerReport {
  bool detected = false;
  double delta_sep = 0, eps_pinch = 0;
  std::vector<std::optional<FingerWitness>> per_curve;
  std::optional<FingerWitness> witness;  // on the last curve
};

namespace detail {

// Resample a closed polyline at arclength spacing h; returns points with their original parameters.
inline std::pair<std::vector<Point>, std::vector<double>> resample(const ClosedCurve& c, double h) {
  std::size_t n = c.size();
  std::vector<double> cum(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + std::abs(c.pts[(i + 1) % n] - c.pts[i]);
  double L = cum[n];
  std::size_t m = std::max<std::size_t>(8, std::size_t(std::ceil(L / h)));
  std::vector<Point> pts;
  std::vector<double> par;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < m; ++k) {
    double s = L * double(k) / double(m);
    while (seg + 1 < n && cum[seg + 1] <= s) ++seg;
    double len = cum[seg + 1] - cum[seg];
    double f = len > 0 ? (s - cum[seg]) / len : 0;
    pts.push_back(c.pts[seg] + f * (c.pts[(seg + 1) % n] - c.pts[seg]));
    par.push_back(kTwoPi * (double(seg) + f) / double(n));
  }
  return {pts, par};
}

inline std::optional<FingerWitness> find_finger(const ClosedCurve& c, double delta, double eps) {
  double h = eps / 2;
  auto [p, par] = resample(c, h);
  std::size_t m = p.size();
  double L = h * double(m);  // approximately; positions are k * L / m
  double step = L / double(m);
  struct Pinch {
    std::size_t i;
    double j;  // fractional index along the resampled curve
    double d;
  };
  std::map<std::pair<long, long>, Pinch> reps;
  double bucket = delta / 4;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      Point a = p[j], b = p[(j + 1) % m];
      double d = point_segment_distance(p[i], a, b);
      if (d >= eps) continue;
      double t = std::clamp(project_param(p[i], a, b), 0.0, 1.0);
      double fj = double(j) + t;
      double gap = std::abs(fj - double(i)) * step;
      gap = std::min(gap, L - gap);
      if (gap <= 4 * eps) continue;
      std::pair<long, long> key{long(double(i) * step / bucket), long(fj * step / bucket)};
      auto it = reps.find(key);
      if (it == reps.end() || d < it->second.d) reps[key] = {i, fj, d};
    }
  std::vector<Pinch> P;
  for (auto& [k, v] : reps) P.push_back(v);
  auto at = [&](double fi) {
    std::size_t i = std::size_t(fi) % m;
    double f = fi - std::floor(fi);
    return p[i] + f * (p[(i + 1) % m] - p[i]);
  };
  auto param_at = [&](double fi) {
    std::size_t i = std::size_t(fi) % m;
    double f = fi - std::floor(fi);
    double a = par[i], b = (i + 1 < m) ? par[i + 1] : kTwoPi;
    return a + f * (b - a);
  };
  std::optional<FingerWitness> best;
  for (std::size_t a = 0; a < P.size(); ++a) {
    double x = double(P[a].i), z = P[a].j;
    if (x > z) std::swap(x, z);
    for (std::size_t b = 0; b < P.size(); ++b) {
      if (a == b) continue;
      double y = double(P[b].i), w = P[b].j;
      bool yin = y > x && y < z, win = w > x && w < z;
      if (yin == win) continue;
      if (!yin) std::swap(y, w);
      double sep = std::abs(at(x) - at(y));
      if (sep <= delta) continue;
      double pinch = std::max(P[a].d, P[b].d);
      if (best && pinch >= best->pinch) continue;
      FingerWitness fw;
      std::array<double, 4> q{x, y, z, w};
      for (int k = 0; k < 4; ++k) {
        fw.params[std::size_t(k)] = param_at(q[std::size_t(k)]);
        fw.points[std::size_t(k)] = at(q[std::size_t(k)]);
      }
      fw.pinch = pinch;
      fw.separation = sep;
      best = fw;
    }
  }
  return best;
}

}  // namespace detail

// delta_sep and eps_pinch default to diameter/10 and diameter/100 of the last curve.
inline FingerReport detect_collapsing_finger(const std::vector<ClosedCurve>& curves, double delta_sep = -1,
                                             double eps_pinch = -1) {
  if (curves.size() < 2) throw PreconditionError("finger detection needs at least two curves");
  double diam = curve_diameter(curves.back().pts);
  FingerReport r;
  r.delta_sep = delta_sep > 0 ? delta_sep : diam / 10;
  r.eps_pinch = eps_pinch > 0 ? eps_pinch : diam / 100;
  for (auto& c : curves) r.per_curve.push_back(detail::find_finger(c, r.delta_sep, r.eps_pinch));
  r.witness = r.per_curve.back();
  if (!r.witness) return r;
  // pinch must shrink along the sequence
  double first = 1e300;
  bool monotone = true;
  double prev = 1e300;
  for (auto& w : r.per_curve) {
    double v = w ? w->pinch : 1e300;
    if (first == 1e300 && w) first = v;
    if (v > prev * (1 + 1e-12)) monotone = false;
    prev = v;
  }
  bool shrinks = r.per_curve.front() ? r.witness->pinch < r.per_curve.front()->pinch : true;
  r.detected = monotone && shrinks;
  return r;
}

// ---------------------------------------------------------------------------
// Reparametrization

struct CurveReparam {
  int winding = 0;
  bool reversed = false;
  std::size_t arcs = 0;
  std::vector<double> anchors;  // xi_j (curve parameters), increasing
  bool increasing = false;
  double sup_error = 0;
  ClosedCurve reparametrized;
};

struct ReparamReport {
  bool converges = false;
  std::string obstruction;  // empty on success
  std::vector<CurveReparam> curves;
  std::vector<double> sup_errors;
  bool nonincreasing = false;
};

namespace detail {

// Inverse of the angular parameter of a star-shaped limit: s(theta) with arg c(s) = theta.
struct StarLimit {
  const ClosedCurve* c = nullptr;
  std::vector<double> lifted;  // lifted arg at the samples, strictly monotone, span 2pi * orient
  int orient = 1;
  double param_of_angle(double theta) const {
    std::size_t n = lifted.size();
    double a0 = lifted[0];
    double th = orient > 0 ? a0 + wrap_angle(theta - a0) : a0 - wrap_angle(a0 - theta);
    // position in the sample sequence (lifted is monotone in orient direction)
    std::size_t lo = 0, hi = n;  // find i with th between lifted[i], lifted[i+1] (lifted[n] = a0 + 2pi orient)
    auto val = [&](std::size_t i) { return i < n ? lifted[i] : a0 + kTwoPi * orient; };
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if ((val(mid) - th) * orient <= 0) lo = mid;
      else hi = mid;
    }
    double f = (th - val(lo)) / (val(lo + 1) - val(lo));
    return kTwoPi * (double(lo) + f) / double(n);
  }
};

inline StarLimit star_limit(const ClosedCurve& c) {
  StarLimit s;
  s.c = &c;
  std::size_t n = c.size();
  s.lifted.resize(n);
  s.lifted[0] = std::arg(c.pts[0]);
  for (std::size_t i = 1; i <= n; ++i) {
    Point a = c.pts[i - 1], b = c.pts[i % n];
    if (std::abs(a) == 0 || std::abs(b) == 0) throw PreconditionError("limit curve passes through the origin");
    double d = std::arg(b / a);
    double next = s.lifted[i - 1] + d;
    if (i < n) s.lifted[i] = next;
    else if (std::abs(std::abs(next - s.lifted[0]) - kTwoPi) > 1e-6)
      throw PreconditionError("limit curve does not wind once around the origin");
    else s.orient = next > s.lifted[0] ? 1 : -1;
  }
  for (std::size_t i = 1; i < n; ++i)
    if ((s.lifted[i] - s.lifted[i - 1]) * s.orient <= 0)
      throw PreconditionError("limit curve is not star-shaped about the origin");
  return s;
}

}  // namespace detail

// c_k is matched to the limit c through the cone extension z = r c(s); arcs[k] congruent arcs are used for curve k.
inline ReparamReport reparametrize_to_uniform(const std::vector<ClosedCurve>& curves, const ClosedCurve& limit,
                                              std::vector<std::size_t> arcs = {}, std::size_t eval_points = 8192) {
  if (arcs.empty())
    for (std::size_t k = 0; k < curves.size(); ++k) arcs.push_back(k + 1);
  if (arcs.size() != curves.size()) throw PreconditionError("one arc count per curve is required");
  auto S = detail::star_limit(limit);
  ReparamReport rep;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    ClosedCurve ck = curves[k];
    std::size_t n = ck.size();
    CurveReparam cr;
    cr.arcs = arcs[k];
    // lifted normalized angle along c_k
    std::vector<double> A(n + 1);
    for (std::size_t i = 0; i < n; ++i)
      if (std::abs(ck.pts[i]) == 0) throw PreconditionError("curve passes through the origin");
    auto ang = [&](Point z) { return S.param_of_angle(std::arg(z)); };
    A[0] = ang(ck.pts[0]);
    for (std::size_t i = 1; i <= n; ++i) {
      double s = ang(ck.pts[i % n]);
      double d = wrap_angle(s - A[i - 1] + kPi) - kPi;
      A[i] = A[i - 1] + d;
    }
    cr.winding = int(std::lround((A[n] - A[0]) / kTwoPi));
    if (cr.winding == 0) {
      rep.obstruction = "curve " + std::to_string(k) +
                        " has winding number 0 about the limit's centre: the sequence has a collapsing finger";
      rep.curves.push_back(cr);
      return rep;
    }
    if (std::abs(cr.winding) != 1) {
      rep.obstruction = "curve " + std::to_string(k) + " winds " + std::to_string(cr.winding) + " times";
      rep.curves.push_back(cr);
      return rep;
    }
    if (cr.winding < 0) {
      cr.reversed = true;
      std::reverse(ck.pts.begin() + 1, ck.pts.end());
      std::vector<double> B(n + 1);
      for (std::size_t i = 0; i <= n; ++i) B[i] = A[n - i] - A[n] + A[0];
      A = B;
    }
    double A0 = A[0];
    std::vector<double> targets;
    for (std::size_t j = 0; j < cr.arcs; ++j) {
      double zeta = kTwoPi * double(j) / double(cr.arcs);
      targets.push_back(A0 + wrap_angle(zeta - A0));
    }
    std::sort(targets.begin(), targets.end());
    std::size_t i = 0;
    for (double tau : targets) {
      while (i < n && A[i + 1] < tau) ++i;
      if (i >= n) throw StructuralError("anchor search ran past the end of the curve");
      double f = A[i + 1] > A[i] ? std::clamp((tau - A[i]) / (A[i + 1] - A[i]), 0.0, 1.0) : 0.0;
      double xi = kTwoPi * (double(i) + f) / double(n);
      if (A[i] > tau) xi = kTwoPi * double(i) / double(n);
      cr.anchors.push_back(xi);
    }
    cr.increasing = true;
    for (std::size_t j = 1; j < cr.anchors.size(); ++j)
      if (!(cr.anchors[j] > cr.anchors[j - 1])) cr.increasing = false;
    // sigma: targets (limit parameters, lifted) -> anchors, periodic
    auto sigma = [&](double s) {
      double x = A0 + wrap_angle(s - A0);
      std::size_t m = targets.size();
      auto T = [&](std::size_t j) { return j < m ? targets[j] : targets[0] + kTwoPi; };
      auto X = [&](std::size_t j) { return j < m ? cr.anchors[j] : cr.anchors[0] + kTwoPi; };
      if (x < targets[0]) x += kTwoPi;
      std::size_t j = std::size_t(std::upper_bound(targets.begin(), targets.end(), x) - targets.begin());
      j = j == 0 ? 0 : j - 1;
      double f = (x - T(j)) / (T(j + 1) - T(j));
      return X(j) + f * (X(j + 1) - X(j));
    };
    cr.reparametrized.pts.resize(eval_points);
    double sup = 0;
    for (std::size_t e = 0; e < eval_points; ++e) {
      double s = kTwoPi * double(e) / double(eval_points);
      Point q = ck(sigma(s));
      cr.reparametrized.pts[e] = q;
      sup = std::max(sup, std::abs(q - limit(s)));
    }
    cr.sup_error = sup;
    rep.sup_errors.push_back(sup);
    rep.curves.push_back(std::move(cr));
  }
  rep.nonincreasing = true;
  for (std::size_t k = 1; k < rep.sup_errors.size(); ++k)
    if (rep.sup_errors[k] > rep.sup_errors[k - 1] * (1 + 1e-9) + 1e-12) rep.nonincreasing = false;
  bool all_increasing = std::all_of(rep.curves.begin(), rep.curves.end(), [](auto& c) { return c.increasing; });
  double first = rep.sup_errors.front(), last = rep.sup_errors.back();
  bool shrinks = last <= 1e-6 || last < first / 2;
  rep.converges = rep.nonincreasing && shrinks && all_increasing;
  if (!rep.converges)
    rep.obstruction = !all_increasing ? "reparametrization is not strictly increasing"
                                      : "sup error does not decrease to 0 (the curves do not converge to the limit)";
  return rep;
}

// ---------------------------------------------------------------------------
// Curve families

struct CurveFamily {
  std::string name;
  std::vector<std::size_t> ks;
  std::vector<ClosedCurve> curves;
  ClosedCurve limit;
};

inline ClosedCurve sample_curve(std::size_t n, auto&& f) {
  ClosedCurve c;
  for (std::size_t i = 0; i < n; ++i) c.pts.push_back(f(kTwoPi * double(i) / double(n)));
  return c;
}

// Closed polyline through the given corners, resampled uniformly in arclength with n points.
inline ClosedCurve polyline_curve(const std::vector<Point>& corners, std::size_t n) {
  ClosedCurve poly{corners};
  std::size_t m = corners.size();
  double L = 0;
  for (std::size_t i = 0; i < m; ++i) L += std::abs(corners[(i + 1) % m] - corners[i]);
  auto [pts, par] = detail::resample(poly, L / double(n));
  pts.resize(std::min(pts.size(), n));
  return {pts};
}

inline std::vector<Point> arc_points(Point c, double r, double t0, double t1, std::size_t n) {
  std::vector<Point> v;
  for (std::size_t i = 0; i <= n; ++i) v.push_back(c + std::polar(r, t0 + (t1 - t0) * double(i) / double(n)));
  return v;
}

inline CurveFamily curve_family(const std::string& name, std::vector<std::size_t> ks = {5, 10, 20, 40, 100},
                                std::size_t n = 4096) {
  CurveFamily F{name, ks, {}, sample_curve(n, [](double t) { return std::polar(1.0, t); })};
  for (std::size_t k : ks) {
    double x = double(k);
    if (name == "rotated-circles") {
      double phase = kTwoPi * double((k * 37) % n) / double(n);
      F.curves.push_back(sample_curve(n, [&](double t) { return std::polar(1.0, t + phase); }));
    } else if (name == "rotated-circles-offgrid") {
      F.curves.push_back(sample_curve(n, [&](double t) { return std::polar(1.0, t + 0.37 * x); }));
    } else if (name == "skewed-ellipses" || name == "fast-ellipses") {
      double b = 1 + (name == "skewed-ellipses" ? 1 / x : 1 / (x * x));
      F.curves.push_back(sample_curve(n, [&](double t) {
        double p = t + 0.5 * std::sin(t);
        return Point(std::cos(p), b * std::sin(p));
      }));
    } else if (name == "polygons") {
      std::size_t N = 4 * k + 4;
      std::vector<Point> v;
      for (std::size_t j = 0; j < N; ++j) v.push_back(std::polar(1.0, 0.7 + kTwoPi * double(j) / double(N)));
      F.curves.push_back(polyline_curve(v, n));
    } else if (name == "wobbly") {
      F.curves.push_back(sample_curve(n, [&](double t) {
        double th = t + 0.3 * std::sin(2 * t);
        return std::polar(1 + std::sin(5 * th) / (x * x), th);
      }));
    } else if (name == "c-band" || name == "c-band-ellipse") {
      double w = 1 / x, g = 1 / x, a = name == "c-band" ? 1.0 : 1.5;
      auto P = [&](double r, double th) { return Point(a * r * std::cos(th), r * std::sin(th)); };
      std::vector<Point> v;
      std::size_t m = 2048;
      for (std::size_t j = 0; j <= m; ++j) v.push_back(P(1, g / 2 + (kTwoPi - g) * double(j) / double(m)));
      for (std::size_t j = 0; j <= m; ++j) v.push_back(P(1 - w, kTwoPi - g / 2 - (kTwoPi - g) * double(j) / double(m)));
      F.curves.push_back(polyline_curve(v, n));
    } else if (name == "spiked") {
      double w = 1 / x, a = std::asin(w / 2);
      auto v = arc_points(0, 1, a, kTwoPi - a, 2048);
      v.push_back({0.5, -w / 2});
      v.push_back({0.5, w / 2});
      F.curves.push_back(polyline_curve(v, n));
    } else {
      throw PreconditionError("unknown curve family '" + name + "'");
    }
  }
  if (name == "c-band-ellipse") F.limit = sample_curve(n, [](double t) { return Point(1.5 * std::cos(t), std::sin(t)); });
  return F;
}

// Arc counts 4k for the curves of a family.
inline std::vector<std::size_t> family_arc_counts(const CurveFamily& F) {
  std::vector<std::size_t> a;
  for (std::size_t k : F.ks) a.push_back(4 * k);
  return a;
}

}  // namespace hts
