#pragma once
// Regions of values: the Grunsky disk, residue pairing at a simple pole, and the cylinder blob.

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "hts/error.hpp"
#include "hts/geometry.hpp"
#include "hts/modulus.hpp"

namespace hts {

// ---------------------------------------------------------------------------
// Grunsky disk

struct GrunskyDisk {
  Point z{};
  Point center{};
  double radius = 0;
};

inline GrunskyDisk grunsky_disk(Point z) {
  double r = std::abs(z);
  if (!(r < 1)) throw PreconditionError("grunsky disk needs |z| < 1");
  return {z, {std::log(1 / (1 - r * r)), 0}, std::log((1 + r) / (1 - r))};
}

// f_a(w) = w / (1 - a w)^2, univalent on the unit disk for |a| <= 1.
inline Point koebe_value(Point a, Point z) { return z / ((1.0 - a * z) * (1.0 - a * z)); }

// log(f_a(z)/z) on the branch vanishing at z = 0.
inline Point koebe_log_ratio(Point a, Point z) { return -2.0 * std::log(1.0 - a * z); }

struct GrunskyCheck {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_excess = 0;  // max of |w - center| - radius
  double tol = 1e-9;
  Point worst_a{};
  bool passed() const { return violations == 0; }
};

// z fixed; a runs over a boundary grid of the unit circle, the listed special values and random points of the
// closed disk.
inline GrunskyCheck sample_class_S_check(Point z, std::size_t samples, std::uint64_t seed = 1, double tol = 1e-9) {
  auto D = grunsky_disk(z);
  GrunskyCheck c;
  c.tol = tol;
  c.max_excess = -D.radius;
  auto test = [&](Point a) {
    double ex = std::abs(koebe_log_ratio(a, z) - D.center) - D.radius;
    ++c.samples;
    if (ex > c.max_excess) {
      c.max_excess = ex;
      c.worst_a = a;
    }
    if (ex > tol) ++c.violations;
  };
  for (Point a : {Point(0, 0), Point(0.5, 0), Point(-0.5, 0), Point(0, 0.7), Point(0, -0.7), Point(1, 0)}) test(a);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::size_t grid = samples / 4;
  for (std::size_t k = 0; k < grid; ++k) test(std::polar(1.0, kTwoPi * double(k) / double(grid)));
  while (c.samples < samples) test(std::polar(std::sqrt(u(rng)), kTwoPi * u(rng)));
  return c;
}

// ---------------------------------------------------------------------------
// Simple poles

// q = c_minus1 dz^2 / (z - location) + (holomorphic polynomial part, coefficients in z - location)
struct ResiduePole {
  Point location{};
  Point c_minus1{1, 0};
  std::vector<Point> holomorphic;
  Point eval(Point z) const {
    Point w = z - location, s = 0;
    for (std::size_t k = holomorphic.size(); k-- > 0;) s = s * w + holomorphic[k];
    return c_minus1 / w + s;
  }
};

inline Point residue_pairing(const ResiduePole& p, Point v) { return p.c_minus1 * v; }

struct BumpSpec {
  double rho1 = 0.25, rho2 = 0.5;
};

struct QuadratureReport {
  double numeric = 0;
  double predicted = 0;
  double error = 0;
  double relative_error = 0;
  int resolution = 0;
};

// Re of the integral of q * dbar(phi v) over the square of half-side rho2 around the pole, midpoint rule on an
// n x n grid; phi is a C^1 smoothstep from 1 (|z-p| <= rho1) to 0 (|z-p| >= rho2).
inline QuadratureReport pairing_quadrature_check(const ResiduePole& p, Point v, BumpSpec b, int n) {
  if (!(b.rho1 > 0 && b.rho2 > b.rho1)) throw PreconditionError("bump needs 0 < rho1 < rho2");
  if (n < 8) throw PreconditionError("quadrature resolution " + std::to_string(n) + " is too coarse");
  double h = 2 * b.rho2 / n, w = b.rho2 - b.rho1;
  Point sum = 0;
  for (int j = 0; j < n; ++j) {
    Point rowsum = 0;
    for (int i = 0; i < n; ++i) {
      Point d(-b.rho2 + (i + 0.5) * h, -b.rho2 + (j + 0.5) * h);
      double r = std::abs(d);
      if (r <= b.rho1 || r >= b.rho2) continue;
      double s = (r - b.rho1) / w;
      double dphi = -6 * s * (1 - s) / w;
      Point dbar = 0.5 * dphi * d / r;  // dbar of a radial function
      rowsum += p.eval(p.location + d) * v * dbar;
    }
    sum += rowsum;
  }
  QuadratureReport q;
  q.resolution = n;
  q.numeric = (sum * h * h).real();
  q.predicted = -kPi * residue_pairing(p, v).real();
  q.error = std::abs(q.numeric - q.predicted);
  q.relative_error = q.predicted != 0 ? q.error / std::abs(q.predicted) : q.error;
  return q;
}

inline Point vertical_direction(const ResiduePole& p) {
  double m = std::abs(p.c_minus1);
  if (m == 0) throw PreconditionError("zero residue coefficient has no vertical direction");
  return -std::conj(p.c_minus1) / m;
}

struct SectorScan {
  std::vector<double> angles;
  std::vector<double> values;     // Re res(q e^{i theta} v)
  std::vector<double> sign_changes;  // angles where the sign is zero or changes before the next sample
  bool matches = false;           // negative exactly on (-pi/2, pi/2), zero at +-pi/2
};

inline SectorScan vertical_sector_scan(const ResiduePole& p, int n = 720, double zero_tol = 1e-15) {
  Point v = vertical_direction(p);
  SectorScan s;
  s.matches = true;
  double scale = std::abs(p.c_minus1);
  for (int k = 0; k < n; ++k) {
    double th = -kPi + kTwoPi * k / n;
    double val = residue_pairing(p, std::polar(1.0, th) * v).real();
    s.angles.push_back(th);
    s.values.push_back(val);
    bool on_edge = std::abs(std::abs(th) - kPi / 2) < 1e-12;
    if (on_edge) {
      if (std::abs(val) > zero_tol * scale * 4) s.matches = false;
    } else if ((std::abs(th) < kPi / 2) != (val < 0)) {
      s.matches = false;
    }
  }
  auto sgn = [&](double x) { return std::abs(x) <= 4 * zero_tol * scale ? 0 : (x < 0 ? -1 : 1); };
  for (int k = 0; k < n; ++k) {
    int a = sgn(s.values[std::size_t(k)]), b = sgn(s.values[std::size_t((k + 1) % n)]);
    if (a == 0) s.sign_changes.push_back(s.angles[std::size_t(k)]);
    else if (b != 0 && a != b) s.sign_changes.push_back(s.angles[std::size_t(k)] + kPi / n);
  }
  if (s.sign_changes.size() != 2) s.matches = false;
  return s;
}

// ---------------------------------------------------------------------------
// Conformal ray in a round disk

struct RayPath {
  Point start{}, center{};
  Point operator()(double t) const {
    if (t <= 0.5) return start;
    return start + (center - start) * (2 * t - 1);
  }
};

inline RayPath disk_ray_path(Point center, double radius, Point w, double tol = 1e-12) {
  if (std::abs(w - center) > radius * (1 + tol) + tol) throw PreconditionError("point lies outside the disk");
  return {w, center};
}

inline RayPath disk_ray_path(const GrunskyDisk& d, Point w) { return disk_ray_path(d.center, d.radius, w); }

// ---------------------------------------------------------------------------
// Cylinder blob

// Modulus of the flat cylinder [0,c) x (0,h) minus the vertical slit {0} x [0,s], for curves separating the top
// circle from the bottom circle together with the slit. Computed on the half-period rectangle (the slit line and
// the opposite line are symmetry lines, hence insulated).
inline ModulusReport slit_cylinder_modulus(double h, double c, double s, int grid = 128) {
  if (!(h > 0 && c > 0 && s >= 0 && s < h)) throw PreconditionError("slit cylinder needs 0 <= s < h");
  PlanarDomain d;
  if (s == 0) {
    d = rectangle_conductor(c / 2, h);
  } else {
    d.loops.push_back({{{0, 0}, {c / 2, 0}, {c / 2, h}, {0, h}, {0, s}}, {'0', 'n', '1', 'n', '0'}});
  }
  auto r = annulus_modulus_numeric(d, grid);
  r.modulus /= 2;
  r.energy *= 2;
  return r;
}

enum class Exclusion { excluded, undecided };

struct ExclusionVerdict {
  Exclusion verdict = Exclusion::undecided;
  double el_domain = 0;    // EL of the class in X minus x
  double el_target = 0;    // numeric EL of the pushed class in Y minus y'
  const char* side = "";   // "below" or "above"
  double tol = 0.02;
};

// x at height xh in C(hX), candidate image at height eta in C(hY), both of circumference c. Two classes are
// tested: curves passing below the marked point and curves passing above it.
inline ExclusionVerdict el_exclusion_test(double hX, double hY, double xh, double eta, double c = 1, int grid = 128,
                                          double tol = 0.02) {
  if (!(hX > 0 && hY > 0 && c > 0)) throw PreconditionError("cylinder heights and circumference must be positive");
  if (!(xh > 0 && xh < hX)) throw PreconditionError("marked point must lie inside the domain cylinder");
  if (!(eta > 0 && eta < hY)) throw PreconditionError("candidate must lie inside the target cylinder");
  double below0 = c / xh, below1 = 1 / slit_cylinder_modulus(hY, c, hY - eta, grid).modulus;
  double above0 = c / (hX - xh), above1 = 1 / slit_cylinder_modulus(hY, c, eta, grid).modulus;
  ExclusionVerdict best{Exclusion::undecided, below0, below1, "below", tol};
  if (above1 / above0 > below1 / below0) best = {Exclusion::undecided, above0, above1, "above", tol};
  if (best.el_target > best.el_domain * (1 + tol)) best.verdict = Exclusion::excluded;
  return best;
}

struct HeightBand {
  double lo = 0, hi = 0;
};

struct BlobEstimate {
  double hX = 0, hY = 0, x_height = 0, circumference = 1;
  HeightBand inner;            // heights reached by rotations and vertical translations
  HeightBand outer;            // heights not excluded (bracket from bisection)
  double resolution = 0;       // bisection width of the outer band ends
  bool rotation_invariant = true;
  bool inner_in_outer = false;
  bool connected = true;
};

inline BlobEstimate cylinder_blob_estimate(double hX, double hY, double xh, double c = 1, int grid = 128,
                                           double resolution = 1e-3) {
  if (!(hX > 0 && hX <= hY)) throw PreconditionError("blob needs 0 < hX <= hY");
  if (!(xh > 0 && xh < hX)) throw PreconditionError("marked height must lie strictly inside (0, hX)");
  BlobEstimate b{hX, hY, xh, c, {xh, xh + (hY - hX)}, {}, resolution};
  auto excluded = [&](double eta) {
    return el_exclusion_test(hX, hY, xh, eta, c, grid).verdict == Exclusion::excluded;
  };
  // the exclusion set is monotone on each side of the inner band
  double lo_in = b.inner.lo, hi_in = b.inner.hi;
  if (excluded(lo_in) || excluded(hi_in)) {
    b.inner_in_outer = false;
    b.outer = {lo_in, hi_in};
    return b;
  }
  auto edge = [&](double inside, double outside) {
    if (!excluded(outside)) return outside;
    while (std::abs(outside - inside) > resolution) {
      double mid = 0.5 * (inside + outside);
      (excluded(mid) ? outside : inside) = mid;
    }
    return inside;
  };
  // candidates closer to a boundary circle than a few grid cells are not resolved by the modulus solver
  double eps = 4 * std::hypot(c / 2, hY) / grid;
  b.outer.lo = edge(lo_in, eps);
  b.outer.hi = edge(hi_in, hY - eps);
  b.inner_in_outer = b.outer.lo <= b.inner.lo && b.inner.hi <= b.outer.hi;
  return b;
}

}  // namespace hts
