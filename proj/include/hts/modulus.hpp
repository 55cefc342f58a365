#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <fstream>
#include <functional>
#include <optional>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hts/error.hpp"
#include "hts/geometry.hpp"
#include "hts/surface_io.hpp"

namespace hts {

// Polygonal planar domain. label[i] applies to the edge v[i] -> v[i+1]:
// '0' and '1' are Dirichlet values, 'n' is insulated (Neumann).
struct DomainLoop {
  std::vector<Point> v;
  std::vector<char> label;
};

struct PlanarDomain {
  std::vector<DomainLoop> loops;
};

inline PlanarDomain parse_domain(std::istream& in) {
  PlanarDomain d;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;
    if (tok[0] == "loop") {
      if (tok.size() != 1) throw ParseError("expected 'loop'", line);
      d.loops.emplace_back();
      continue;
    }
    if (d.loops.empty()) throw ParseError("vertex before the first 'loop'", line);
    if (tok.size() != 3) throw ParseError("expected '<x> <y> <0|1|n>'", line);
    if (tok[2] != "0" && tok[2] != "1" && tok[2] != "n") throw ParseError("edge label must be 0, 1 or n", line);
    d.loops.back().v.emplace_back(detail::parse_double(tok[0], line), detail::parse_double(tok[1], line));
    d.loops.back().label.push_back(tok[2][0]);
  }
  for (auto& L : d.loops)
    if (L.v.size() < 3) throw ParseError("loop with fewer than 3 vertices", line);
  return d;
}

inline PlanarDomain parse_domain_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  return parse_domain(f);
}

inline std::string serialize_domain(const PlanarDomain& d) {
  std::ostringstream os;
  for (auto& L : d.loops) {
    os << "loop\n";
    for (std::size_t i = 0; i < L.v.size(); ++i)
      os << detail::format_double(L.v[i].real()) << " " << detail::format_double(L.v[i].imag()) << " " << L.label[i]
         << "\n";
  }
  return os.str();
}

inline PlanarDomain rectangle_conductor(double width, double height) {
  return {{{{{0, 0}, {width, 0}, {width, height}, {0, height}}, {'0', 'n', '1', 'n'}}}};
}

inline PlanarDomain round_annulus(double r, double R, int n_inner = 512, int n_outer = 1024) {
  PlanarDomain d;
  DomainLoop out, in;
  for (int k = 0; k < n_outer; ++k) {
    out.v.push_back(std::polar(R, kTwoPi * k / n_outer));
    out.label.push_back('1');
  }
  for (int k = 0; k < n_inner; ++k) {
    in.v.push_back(std::polar(r, -kTwoPi * k / n_inner));
    in.label.push_back('0');
  }
  d.loops = {out, in};
  return d;
}

struct ModulusReport {
  double modulus = 0;
  double energy = 0;
  std::size_t unknowns = 0;
  std::size_t nx = 0, ny = 0;
  double h_max = 0, h_min = 0;
};

namespace detail {

struct DomEdge {
  Point a, b;
  char label;
};

class EdgeIndex {
 public:
  EdgeIndex(const std::vector<DomEdge>& e, double cell) : e_(e), cell_(cell) {
    for (std::size_t k = 0; k < e.size(); ++k) {
      auto [i0, j0] = key(Point(std::min(e[k].a.real(), e[k].b.real()), std::min(e[k].a.imag(), e[k].b.imag())));
      auto [i1, j1] = key(Point(std::max(e[k].a.real(), e[k].b.real()), std::max(e[k].a.imag(), e[k].b.imag())));
      for (long i = i0; i <= i1; ++i)
        for (long j = j0; j <= j1; ++j) map_[pack(i, j)].push_back(k);
    }
  }
  template <class F>
  void near(Point lo, Point hi, F&& f) const {
    auto [i0, j0] = key(lo);
    auto [i1, j1] = key(hi);
    stamp_++;
    if (seen_.size() < e_.size()) seen_.assign(e_.size(), 0);
    for (long i = i0; i <= i1; ++i)
      for (long j = j0; j <= j1; ++j) {
        auto it = map_.find(pack(i, j));
        if (it == map_.end()) continue;
        for (std::size_t k : it->second) {
          if (seen_[k] == stamp_) continue;
          seen_[k] = stamp_;
          f(k);
        }
      }
  }

 private:
  std::pair<long, long> key(Point p) const {
    return {long(std::floor(p.real() / cell_)), long(std::floor(p.imag() / cell_))};
  }
  static long long pack(long i, long j) { return (static_cast<long long>(i) << 32) ^ (j & 0xffffffffLL); }
  const std::vector<DomEdge>& e_;
  double cell_;
  std::unordered_map<long long, std::vector<std::size_t>> map_;
  mutable std::vector<unsigned> seen_;
  mutable unsigned stamp_ = 0;
};

// 1D graded grid through the mandatory coordinates.
inline std::vector<double> graded_axis(double lo, double hi, std::vector<double> must,
                                       const std::function<double(double)>& h) {
  must.push_back(lo);
  must.push_back(hi);
  std::sort(must.begin(), must.end());
  std::vector<double> m;
  for (double x : must)
    if (m.empty() || x - m.back() > 1e-9 * (hi - lo)) m.push_back(x);
  std::vector<double> out{m.front()};
  for (std::size_t s = 0; s + 1 < m.size(); ++s) {
    double a = m[s], b = m[s + 1];
    const int samples = 2000;
    std::vector<double> cum(samples + 1, 0.0);
    for (int k = 0; k < samples; ++k) {
      double x = a + (b - a) * (k + 0.5) / samples;
      cum[k + 1] = cum[k] + (b - a) / samples / h(x);
    }
    int n = std::max(1, int(std::ceil(cum.back() - 1e-9)));
    for (int c = 1; c < n; ++c) {
      double target = cum.back() * c / n;
      auto it = std::lower_bound(cum.begin(), cum.end(), target);
      std::size_t k = std::size_t(it - cum.begin());
      double f = (target - cum[k - 1]) / (cum[k] - cum[k - 1]);
      out.push_back(a + (b - a) * (double(k - 1) + f) / samples);
    }
    out.push_back(b);
  }
  return out;
}

}  // namespace detail

// Modulus 1/E of the harmonic potential taking the values 0 and 1 on the labelled boundary arcs.
// grid: the coarsest spacing is diameter/grid; spacing is graded down near small boundary loops.
inline ModulusReport annulus_modulus_numeric(const PlanarDomain& d, int grid = 256) {
  if (grid < 4) throw PreconditionError("grid must be at least 4");
  std::vector<detail::DomEdge> edges;
  bool has0 = false, has1 = false;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (auto& L : d.loops)
    for (std::size_t i = 0; i < L.v.size(); ++i) {
      edges.push_back({L.v[i], L.v[(i + 1) % L.v.size()], L.label[i]});
      has0 |= L.label[i] == '0';
      has1 |= L.label[i] == '1';
      xmin = std::min(xmin, L.v[i].real());
      xmax = std::max(xmax, L.v[i].real());
      ymin = std::min(ymin, L.v[i].imag());
      ymax = std::max(ymax, L.v[i].imag());
    }
  if (!has0 || !has1) throw PreconditionError("domain needs boundary arcs labelled 0 and 1");
  const double diam = std::hypot(xmax - xmin, ymax - ymin);
  const double hmax = diam / grid;
  const double grade = 0.08;
  struct Box {
    double x0, x1, y0, y1, h;
  };
  std::vector<Box> boxes;
  for (auto& L : d.loops) {
    Box b{1e300, -1e300, 1e300, -1e300, 0};
    for (auto p : L.v) {
      b.x0 = std::min(b.x0, p.real());
      b.x1 = std::max(b.x1, p.real());
      b.y0 = std::min(b.y0, p.imag());
      b.y1 = std::max(b.y1, p.imag());
    }
    b.h = std::min(hmax, std::hypot(b.x1 - b.x0, b.y1 - b.y0) / (grid / 4.0));
    boxes.push_back(b);
  }
  auto hx = [&](double x) {
    double h = hmax;
    for (auto& b : boxes) h = std::min(h, b.h + grade * std::max({0.0, b.x0 - x, x - b.x1}));
    return h;
  };
  auto hy = [&](double y) {
    double h = hmax;
    for (auto& b : boxes) h = std::min(h, b.h + grade * std::max({0.0, b.y0 - y, y - b.y1}));
    return h;
  };
  std::vector<double> mx, my;
  for (auto& e : edges) {
    if (e.a.real() == e.b.real()) mx.push_back(e.a.real());
    if (e.a.imag() == e.b.imag()) my.push_back(e.a.imag());
  }
  std::vector<double> X = detail::graded_axis(xmin, xmax, mx, hx);
  std::vector<double> Y = detail::graded_axis(ymin, ymax, my, hy);
  const std::size_t nx = X.size(), ny = Y.size();
  double hmin = hmax;
  for (std::size_t i = 0; i + 1 < nx; ++i) hmin = std::min(hmin, X[i + 1] - X[i]);
  for (std::size_t j = 0; j + 1 < ny; ++j) hmin = std::min(hmin, Y[j + 1] - Y[j]);
  double med = 0;
  {
    std::vector<double> len;
    for (auto& e : edges) len.push_back(std::abs(e.b - e.a));
    std::nth_element(len.begin(), len.begin() + len.size() / 2, len.end());
    med = len[len.size() / 2];
  }
  detail::EdgeIndex index(edges, std::max({4 * med, 2 * hmin, 1e-9 * diam}));
  const double tol = 1e-10 * diam;

  // classification: -1 outside, 0 free unknown, 1 fixed at 0, 2 fixed at 1
  std::vector<int> cls(nx * ny, -1);
  auto id = [&](std::size_t i, std::size_t j) { return j * nx + i; };
  for (std::size_t j = 0; j < ny; ++j) {
    std::vector<double> xs;
    for (auto& e : edges) {
      double ya = e.a.imag(), yb = e.b.imag();
      if ((ya <= Y[j]) != (yb <= Y[j])) xs.push_back(e.a.real() + (Y[j] - ya) / (yb - ya) * (e.b.real() - e.a.real()));
    }
    std::sort(xs.begin(), xs.end());
    std::size_t c = 0;
    for (std::size_t i = 0; i < nx; ++i) {
      while (c < xs.size() && xs[c] < X[i]) ++c;
      Point p{X[i], Y[j]};
      int on = -1;
      index.near(p - Point(tol, tol), p + Point(tol, tol), [&](std::size_t k) {
        if (on_segment(p, edges[k].a, edges[k].b, tol)) {
          char l = edges[k].label;
          int v = l == '0' ? 1 : l == '1' ? 2 : 0;
          if (on < 1) on = std::max(on, v);
        }
      });
      if (on >= 0)
        cls[id(i, j)] = on;
      else if (c % 2 == 1)
        cls[id(i, j)] = 0;
    }
  }
  std::vector<long> unk(nx * ny, -1);
  std::size_t nu = 0;
  for (std::size_t k = 0; k < cls.size(); ++k)
    if (cls[k] == 0) unk[k] = long(nu++);
  if (nu == 0) throw PreconditionError("grid too coarse to separate the boundaries");

  auto inside_mid = [&](Point p) {
    // parity along a horizontal ray to the right
    int c = 0;
    index.near(p, Point(xmax + 1, p.imag()), [&](std::size_t k) {
      const auto& e = edges[k];
      double ya = e.a.imag(), yb = e.b.imag();
      if ((ya <= p.imag()) != (yb <= p.imag())) {
        double x = e.a.real() + (p.imag() - ya) / (yb - ya) * (e.b.real() - e.a.real());
        if (x > p.real()) ++c;
      }
    });
    return c % 2 == 1;
  };
  // length of the segment [p, q] inside the domain, given whether its midpoint is inside
  auto clipped = [&](Point p, Point q) {
    std::vector<double> ts{0.0, 1.0};
    Point lo{std::min(p.real(), q.real()), std::min(p.imag(), q.imag())};
    Point hi{std::max(p.real(), q.real()), std::max(p.imag(), q.imag())};
    index.near(lo, hi, [&](std::size_t k) {
      auto h = line_intersection(p, q, edges[k].a, edges[k].b);
      if (h && h->first > 0 && h->first < 1 && h->second >= 0 && h->second <= 1) ts.push_back(h->first);
    });
    std::sort(ts.begin(), ts.end());
    double len = 0, L = std::abs(q - p);
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      if (ts[k + 1] - ts[k] <= 0) continue;
      Point m = p + 0.5 * (ts[k] + ts[k + 1]) * (q - p);
      if (inside_mid(m)) len += (ts[k + 1] - ts[k]) * L;
    }
    return len;
  };
  // first boundary crossing of the open segment a -> b
  struct Hit {
    double t;
    char label;
  };
  auto first_hit = [&](Point a, Point b) -> std::optional<Hit> {
    std::optional<Hit> best;
    Point lo{std::min(a.real(), b.real()), std::min(a.imag(), b.imag())};
    Point hi{std::max(a.real(), b.real()), std::max(a.imag(), b.imag())};
    double L = std::abs(b - a);
    index.near(lo, hi, [&](std::size_t k) {
      const auto& e = edges[k];
      auto h = line_intersection(a, b, e.a, e.b);
      if (!h) return;
      auto [t, u] = *h;
      if (t * L <= tol || (1 - t) * L <= tol || u < -1e-12 || u > 1 + 1e-12) return;
      if (!best || t < best->t) best = Hit{t, e.label};
    });
    return best;
  };

  using Trip = Eigen::Triplet<double>;
  std::vector<Trip> trips;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Eigen::Index(nu));
  struct Link {
    long a, b;     // unknown ids or -1
    double va, vb;  // fixed values when id is -1
    double w;
  };
  std::vector<Link> links;
  auto fixed_value = [&](int c) { return c == 2 ? 1.0 : 0.0; };
  bool clash = false;
  auto add_link = [&](std::size_t na, std::size_t nb, Point pa, Point pb, Point perp_lo, Point perp_hi) {
    int ca = cls[na], cb = cls[nb];
    if (ca < 0 && cb < 0) return;
    double L = std::abs(pb - pa);
    auto one_side = [&](std::size_t nfrom, Point from, Point to) {
      // boundary link from an unknown node toward the first crossing
      auto h = first_hit(from, to);
      if (!h) return;
      if (h->label == 'n') return;
      Point mid = from + 0.5 * h->t * (to - from);
      double dual = clipped(mid + perp_lo, mid + perp_hi);
      if (dual <= 0) return;
      links.push_back({unk[nfrom], -1, 0, h->label == '1' ? 1.0 : 0.0, dual / (h->t * L)});
    };
    auto hit = first_hit(pa, pb);
    if (!hit) {
      if (ca < 0 || cb < 0) return;
      if (ca > 0 && cb > 0) {
        if (ca != cb) clash = true;
        return;
      }
      Point mid = 0.5 * (pa + pb);
      double dual = clipped(mid + perp_lo, mid + perp_hi);
      if (dual <= 0) return;
      links.push_back({unk[na], unk[nb], fixed_value(ca), fixed_value(cb), dual / L});
      return;
    }
    if (ca == 0) one_side(na, pa, pb);
    if (cb == 0) one_side(nb, pb, pa);
  };
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      double dym = j > 0 ? Y[j] - Y[j - 1] : 0, dyp = j + 1 < ny ? Y[j + 1] - Y[j] : 0;
      double dxm = i > 0 ? X[i] - X[i - 1] : 0, dxp = i + 1 < nx ? X[i + 1] - X[i] : 0;
      if (i + 1 < nx)
        add_link(id(i, j), id(i + 1, j), {X[i], Y[j]}, {X[i + 1], Y[j]}, Point(0, -dym / 2), Point(0, dyp / 2));
      if (j + 1 < ny)
        add_link(id(i, j), id(i, j + 1), {X[i], Y[j]}, {X[i], Y[j + 1]}, Point(-dxm / 2, 0), Point(dxp / 2, 0));
    }
  if (clash) throw PreconditionError("grid too coarse to separate the boundaries");
  for (auto& l : links) {
    if (l.a >= 0) trips.emplace_back(l.a, l.a, l.w);
    if (l.b >= 0) trips.emplace_back(l.b, l.b, l.w);
    if (l.a >= 0 && l.b >= 0) {
      trips.emplace_back(l.a, l.b, -l.w);
      trips.emplace_back(l.b, l.a, -l.w);
    } else if (l.a >= 0) {
      rhs[l.a] += l.w * l.vb;
    } else if (l.b >= 0) {
      rhs[l.b] += l.w * l.va;
    }
  }
  Eigen::SparseMatrix<double> A{static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu)};
  A.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) throw PreconditionError("discrete problem is singular (unknowns cut off from the boundary)");
  Eigen::VectorXd u = solver.solve(rhs);
  double E = 0;
  for (auto& l : links) {
    double ua = l.a >= 0 ? u[l.a] : l.va, ub = l.b >= 0 ? u[l.b] : l.vb;
    E += l.w * (ua - ub) * (ua - ub);
  }
  if (!(E > 0)) throw PreconditionError("zero energy: boundaries 0 and 1 are not connected through the domain");
  ModulusReport r;
  r.energy = E;
  r.modulus = 1 / E;
  r.unknowns = nu;
  r.nx = nx;
  r.ny = ny;
  r.h_max = hmax;
  r.h_min = hmin;
  return r;
}

}  // namespace hts
