#pragma once

#include <cmath>

#include "hts/surface.hpp"

namespace hts {

// Rectangle [0,w]x[0,h] with opposite sides identified by translation.
inline HalfTranslationSurface make_torus(double w = 1, double h = 1) {
  HalfTranslationSurface s;
  s.polygons.push_back({"P0", {{0, 0}, {w, 0}, {w, h}, {0, h}}});
  s.pairings.push_back({{0, 0}, {0, 2}, 1});
  s.pairings.push_back({{0, 1}, {0, 3}, 1});
  return s;
}

// Flat cylinder of the given circumference and height; horizontal boundary circles.
inline HalfTranslationSurface make_cylinder(double height, double circumference = 1) {
  HalfTranslationSurface s;
  s.polygons.push_back({"P0", {{0, 0}, {circumference, 0}, {circumference, height}, {0, height}}});
  s.pairings.push_back({{0, 1}, {0, 3}, 1});
  s.boundary.push_back({{0, 0}, BoundaryKind::horizontal});
  s.boundary.push_back({{0, 2}, BoundaryKind::horizontal});
  return s;
}

// Regular octagon with a horizontal bottom side, opposite sides identified by translation (genus 2).
inline HalfTranslationSurface make_octagon(double side = 1) {
  HalfTranslationSurface s;
  Polygon P{"P0", {}};
  Point z{0, 0};
  for (int k = 0; k < 8; ++k) {
    P.vertices.push_back(z);
    z += side * std::polar(1.0, k * kPi / 4);
  }
  s.polygons.push_back(P);
  for (std::size_t i = 0; i < 4; ++i) s.pairings.push_back({{0, i}, {0, i + 4}, 1});
  return s;
}

// k rectangles [-1,1]x[0,1] whose bottom halves are glued cyclically by z -> -z + c.
// The common bottom midpoint and the bottom corners are interior cone points of angle k*pi;
// k horizontal boundary circles on top.
inline HalfTranslationSurface make_pod(int legs) {
  if (legs < 1) throw PreconditionError("a pod needs at least one leg");
  HalfTranslationSurface s;
  const std::size_t k = std::size_t(legs);
  for (std::size_t i = 0; i < k; ++i)
    s.polygons.push_back({"R" + std::to_string(i), {{-1, 0}, {0, 0}, {1, 0}, {1, 1}, {-1, 1}}});
  for (std::size_t i = 0; i < k; ++i) {
    if (k == 1)
      s.pairings.push_back({{0, 0}, {0, 1}, -1});
    else
      s.pairings.push_back({{i, 1}, {(i + 1) % k, 0}, -1});
    s.pairings.push_back({{i, 2}, {i, 4}, 1});
    s.boundary.push_back({{i, 3}, BoundaryKind::horizontal});
  }
  return s;
}

// Pair of pants: three legs, cone points of angle 3pi.
inline HalfTranslationSurface make_tripod() { return make_pod(3); }

// Square torus cut into four triangles around the center (used for branched covers).
inline HalfTranslationSurface make_star_torus() {
  HalfTranslationSurface s;
  Point c{0.5, 0.5};
  Point v[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (int k = 0; k < 4; ++k) s.polygons.push_back({"T" + std::to_string(k), {v[k], v[(k + 1) % 4], c}});
  // outer sides: T0 bottom ~ T2 top, T1 right ~ T3 left
  s.pairings.push_back({{0, 0}, {2, 0}, 1});
  s.pairings.push_back({{1, 0}, {3, 0}, 1});
  // spokes: edge 1 of Tk (v_{k+1} -> c) ~ edge 2 of T_{k+1} (c -> v_{k+1})
  for (std::size_t k = 0; k < 4; ++k) s.pairings.push_back({{k, 1}, {(k + 1) % 4, 2}, 1});
  return s;
}

}  // namespace hts
