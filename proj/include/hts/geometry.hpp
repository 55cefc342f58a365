#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

namespace hts {

using Point = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Default tolerances shared by the modules.
inline constexpr double kLengthTol = 1e-9;
inline constexpr double kAngleTol = 1e-9;

inline double cross(Point a, Point b) { return a.real() * b.imag() - a.imag() * b.real(); }
inline double dot(Point a, Point b) { return a.real() * b.real() + a.imag() * b.imag(); }

// Angle swept counterclockwise from direction a to direction b, in [0, 2pi).
inline double angle_ccw(Point a, Point b) {
  double t = std::atan2(cross(a, b), dot(a, b));
  if (t < 0) t += kTwoPi;
  if (t >= kTwoPi) t -= kTwoPi;
  return t;
}

inline double wrap_angle(double t, double period = kTwoPi) {
  t = std::fmod(t, period);
  if (t < 0) t += period;
  return t;
}

inline double signed_area(std::span<const Point> v) {
  double s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) s += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * s;
}

inline Point centroid(std::span<const Point> v) {
  double a = 0;
  Point c{};
  for (std::size_t i = 0; i < v.size(); ++i) {
    Point p = v[i], q = v[(i + 1) % v.size()];
    double w = cross(p, q);
    a += w;
    c += (p + q) * w;
  }
  if (std::abs(a) < 1e-300) {
    Point m{};
    for (auto p : v) m += p;
    return m / double(v.size());
  }
  return c / (3.0 * a);
}

inline double point_segment_distance(Point p, Point a, Point b) {
  Point d = b - a;
  double l2 = std::norm(d);
  if (l2 == 0) return std::abs(p - a);
  double t = std::clamp(dot(p - a, d) / l2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

// Parameter of the projection of p on the line a + t (b - a).
inline double project_param(Point p, Point a, Point b) { return dot(p - a, b - a) / std::norm(b - a); }

inline bool on_segment(Point p, Point a, Point b, double tol = kLengthTol) {
  return point_segment_distance(p, a, b) <= tol;
}

// Proper or touching intersection of closed segments.
inline bool segments_intersect(Point a, Point b, Point c, Point d, double tol = kLengthTol) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  double sa = tol * std::abs(b - a), sc = tol * std::abs(d - c);
  if (((d1 > sa && d2 < -sa) || (d1 < -sa && d2 > sa)) && ((d3 > sc && d4 < -sc) || (d3 < -sc && d4 > sc)))
    return true;
  return on_segment(c, a, b, tol) || on_segment(d, a, b, tol) || on_segment(a, c, d, tol) ||
         on_segment(b, c, d, tol);
}

// Intersection parameters (s on ab, t on cd) of two non-parallel lines.
inline std::optional<std::pair<double, double>> line_intersection(Point a, Point b, Point c, Point d) {
  Point r = b - a, s = d - c;
  double den = cross(r, s);
  if (std::abs(den) < 1e-300) return std::nullopt;
  double t = cross(c - a, s) / den;
  double u = cross(c - a, r) / den;
  return std::make_pair(t, u);
}

enum class Containment { outside, boundary, inside };

inline Containment locate_in_polygon(std::span<const Point> v, Point p, double tol = kLengthTol) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i)
    if (on_segment(p, v[i], v[(i + 1) % n], tol)) return Containment::boundary;
  // winding number
  int w = 0;
  for (std::size_t i = 0; i < n; ++i) {
    Point a = v[i], b = v[(i + 1) % n];
    if (a.imag() <= p.imag()) {
      if (b.imag() > p.imag() && cross(b - a, p - a) > 0) ++w;
    } else if (b.imag() <= p.imag() && cross(b - a, p - a) < 0) {
      --w;
    }
  }
  return w != 0 ? Containment::inside : Containment::outside;
}

inline bool polygon_is_simple(std::span<const Point> v, double tol = kLengthTol) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    Point a = v[i], b = v[(i + 1) % n];
    if (std::abs(b - a) <= tol) return false;
    // consecutive edges folding back onto each other
    Point c = v[(i + 2) % n];
    if (std::abs(cross(b - a, c - b)) <= tol * std::abs(b - a) * std::abs(c - b) && dot(b - a, c - b) < 0)
      return false;
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_intersect(a, b, v[j], v[(j + 1) % n], tol)) return false;
    }
  }
  return true;
}

struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;  // [[a b][c d]]

  Point apply(Point z) const { return {a * z.real() + b * z.imag(), c * z.real() + d * z.imag()}; }
  double det() const { return a * d - b * c; }
  Mat2 inverse() const {
    double k = det();
    return {d / k, -b / k, -c / k, a / k};
  }
  Mat2 transpose() const { return {a, c, b, d}; }
  double frobenius2() const { return a * a + b * b + c * c + d * d; }
  friend Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  static Mat2 diag(double x, double y) { return {x, 0, 0, y}; }
  static Mat2 rotation(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }
};

// Singular values (largest first).
inline std::pair<double, double> singular_values(const Mat2& m) {
  double f = m.frobenius2(), dt = std::abs(m.det());
  double disc = std::sqrt(std::max(0.0, f * f - 4 * dt * dt));
  double s1 = std::sqrt(0.5 * (f + disc));
  double s2 = s1 > 0 ? dt / s1 : 0.0;
  return {s1, s2};
}

// z -> sign * z + shift
struct Isometry {
  int sign = 1;
  Point shift{};

  Point apply(Point z) const { return double(sign) * z + shift; }
  Point linear(Point d) const { return double(sign) * d; }
  Isometry inverse() const { return {sign, -double(sign) * shift}; }
  // (this o g)(z) = this(g(z))
  Isometry compose(const Isometry& g) const { return {sign * g.sign, double(sign) * g.shift + shift}; }
};

struct Triangle {
  std::array<Point, 3> v;
  double area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
};

// Clip segment [p,q] to a convex CCW polygon; returns parameter range in [0,1].
inline std::optional<std::pair<double, double>> clip_segment_convex(Point p, Point q, std::span<const Point> poly,
                                                                    double tol = 1e-12) {
  double t0 = 0, t1 = 1;
  Point d = q - p;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Point a = poly[i], e = poly[(i + 1) % n] - a;
    double scale = std::abs(e);
    double num = cross(e, p - a) / scale;  // signed distance of p (inside > 0)
    double den = cross(e, d) / scale;
    if (std::abs(den) < 1e-300) {
      if (num < -tol) return std::nullopt;
      continue;
    }
    double t = -(num + tol) / den;
    if (den > 0)
      t0 = std::max(t0, t);
    else
      t1 = std::min(t1, t);
    if (t0 > t1) return std::nullopt;
  }
  return std::make_pair(t0, t1);
}

}  // namespace hts
