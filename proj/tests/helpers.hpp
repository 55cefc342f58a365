#pragma once
// Test fixtures: grid-triangulated cylinders and random face-wise affine maps on them.

#include <map>
#include <random>

#include "hts/qc_maps.hpp"

namespace hts::fixture {

// Flat cylinder [0,c]x[0,h] cut into 2*nx*ny triangles, x periodic, horizontal boundary at y=0,h.
inline HalfTranslationSurface grid_cylinder(double h, double c, int nx, int ny) {
  HalfTranslationSurface s;
  auto P = [&](int i, int j) { return Point(c * i / nx, h * j / ny); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      s.polygons.push_back({"L" + std::to_string(i) + "_" + std::to_string(j), {P(i, j), P(i + 1, j), P(i + 1, j + 1)}});
      s.polygons.push_back({"U" + std::to_string(i) + "_" + std::to_string(j), {P(i, j), P(i + 1, j + 1), P(i, j + 1)}});
    }
  auto key = [&](Point a, Point b) {
    auto rd = [&](Point z) {
      long x = std::lround(z.real() / c * nx) % nx, y = std::lround(z.imag() / h * ny);
      return std::make_pair(x, y);
    };
    return std::make_pair(rd(a), rd(b));
  };
  std::map<std::pair<std::pair<long, long>, std::pair<long, long>>, EdgeRef> open;
  for (std::size_t t = 0; t < s.polygons.size(); ++t)
    for (std::size_t e = 0; e < 3; ++e) {
      Point a = s.polygons[t].edge_start(e), b = s.polygons[t].edge_end(e);
      if (a.imag() == b.imag() && (a.imag() == 0 || std::abs(a.imag() - h) < 1e-12 * h)) {
        s.boundary.push_back({{t, e}, BoundaryKind::horizontal});
        continue;
      }
      auto it = open.find(key(b, a));
      if (it != open.end()) {
        s.pairings.push_back({it->second, {t, e}, 1});
        open.erase(it);
      } else {
        open[key(a, b)] = {t, e};
      }
    }
  return s;
}

// Random orientation-preserving map of grid_cylinder(h, c, nx, ny) onto make_cylinder(h, c):
// interior vertices jittered by up to amp cells, seam vertices only vertically.
inline PiecewiseAffineMap jitter_map(const HalfTranslationSurface& grid, double h, double c, int nx, int ny,
                                     double amp, std::mt19937_64& rng, int max_tries = 1000) {
  std::uniform_real_distribution<double> u(-1, 1);
  HalfTranslationSurface cod;
  cod.polygons.push_back({"P0", {{0, 0}, {c, 0}, {c, h}, {0, h}}});
  cod.pairings.push_back({{0, 1}, {0, 3}, 1});
  cod.boundary.push_back({{0, 0}, BoundaryKind::horizontal});
  cod.boundary.push_back({{0, 2}, BoundaryKind::horizontal});
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::vector<Point> shift(std::size_t(nx * (ny + 1)));
    for (int j = 1; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        double dx = i == 0 ? 0 : amp * c / nx * u(rng);
        shift[std::size_t(j * nx + i)] = {dx, amp * h / ny * u(rng)};
      }
    auto moved = [&](Point z) {
      long i = std::lround(z.real() / c * nx) % nx, j = std::lround(z.imag() / h * ny);
      return z + shift[std::size_t(j * nx + i)];
    };
    PiecewiseAffineMap m;
    m.domain = grid;
    m.codomain = cod;
    bool ok = true;
    for (auto& P : grid.polygons) {
      Point v0 = P.vertex(0), v1 = P.vertex(1), v2 = P.vertex(2);
      Point w0 = moved(v0), w1 = moved(v1), w2 = moved(v2);
      Point e1 = v1 - v0, e2 = v2 - v0, f1 = w1 - w0, f2 = w2 - w0;
      Mat2 E{e1.real(), e2.real(), e1.imag(), e2.imag()};
      Mat2 F{f1.real(), f2.real(), f1.imag(), f2.imag()};
      Mat2 A = F * E.inverse();
      if (!(A.det() > 0)) {
        ok = false;
        break;
      }
      m.faces.push_back({A, w0 - A.apply(v0), 0});
    }
    if (ok) return m;
  }
  throw PreconditionError("could not draw an orientation-preserving jitter");
}

}  // namespace hts::fixture
