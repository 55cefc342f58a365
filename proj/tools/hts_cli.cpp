// hts: command-line front end for the half-translation surface toolkit.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hts/hts.hpp"

using namespace hts;
using Json = nlohmann::ordered_json;

namespace {

struct Globals {
  bool json = false;
  std::string svg;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  double tol_or(double d) const { return tol ? *tol : d; }
};

struct Outcome {
  Json report;
  bool passed = true;
  std::optional<SvgScene> scene;
};

// ---------------------------------------------------------------------------
// Output

void emit_json(std::ostream& os, const Json& j, int indent, int depth) {
  std::string pad(std::size_t(indent * (depth + 1)), ' '), close(std::size_t(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << Json(it.key()).dump() << ": ";
        emit_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (flat) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          emit_json(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        emit_json(os, j[i], indent, depth + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v == 0 ? 0.0 : v);
      os << buf;
      return;
    }
    default:
      os << j.dump();
  }
}

std::string scalar_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  std::ostringstream os;
  emit_json(os, j, 0, 0);
  return os.str();
}

void emit_text(std::ostream& os, const Json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      emit_text(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
  } else if (j.is_array()) {
    bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
    if (flat && j.size() <= 8) {
      os << prefix << ": [";
      for (std::size_t i = 0; i < j.size(); ++i) os << (i ? ", " : "") << scalar_text(j[i]);
      os << "]\n";
    } else if (j.size() > 16) {
      os << prefix << ": (" << j.size() << " entries)\n";
    } else {
      for (std::size_t i = 0; i < j.size(); ++i) emit_text(os, j[i], prefix + "[" + std::to_string(i) + "]");
    }
  } else {
    os << prefix << ": " << scalar_text(j) << "\n";
  }
}

Json pt(Point z) { return Json::array({z.real(), z.imag()}); }

Json pts(const std::vector<Point>& v) {
  Json a = Json::array();
  for (auto z : v) a.push_back(pt(z));
  return a;
}

Json verdict(bool passed, double tol) {
  Json v;
  v["passed"] = passed;
  v["tolerance"] = tol;
  return v;
}

Json surface_point(const HalfTranslationSurface& s, SurfacePoint x) {
  Json j;
  j["polygon"] = s.polygons.at(x.polygon).name;
  j["position"] = pt(x.position);
  return j;
}

// ---------------------------------------------------------------------------
// Argument helpers

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double number(const std::string& t, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw PreconditionError("bad number '" + t + "' in " + what);
  }
}

// "x,y" or "x"
Point point_arg(const std::string& s, const std::string& what) {
  auto p = split(s, ',');
  if (p.size() == 1) return {number(p[0], what), 0};
  if (p.size() == 2) return {number(p[0], what), number(p[1], what)};
  throw PreconditionError(what + " must be 'x,y'");
}

// "P0:x,y"
SurfacePoint surface_point_arg(const HalfTranslationSurface& s, const std::string& a, const std::string& what) {
  auto c = a.find(':');
  if (c == std::string::npos) throw PreconditionError(what + " must be '<polygon>:x,y'");
  return {s.polygon_index(a.substr(0, c)), point_arg(a.substr(c + 1), what)};
}

EdgeRef edge_arg(const HalfTranslationSurface& s, const std::string& a) {
  auto d = a.rfind('.');
  if (d == std::string::npos) throw PreconditionError("edge '" + a + "' must be '<polygon>.<index>'");
  EdgeRef e{s.polygon_index(a.substr(0, d)), std::size_t(number(a.substr(d + 1), "edge " + a))};
  if (e.edge >= s.polygons[e.polygon].size()) throw PreconditionError("edge index out of range in '" + a + "'");
  return e;
}

HalfTranslationSurface load_surface(const std::string& path) { return parse_surface_file(path); }

ClosedCurve load_curve(const std::string& path) {
  auto B = parse_planar_set_file(path);
  if (B.loops.size() != 1) throw ParseError("curve file '" + path + "' must hold exactly one loop");
  return {B.loops[0]};
}

// ---------------------------------------------------------------------------
// Figures

void draw_surface(SvgScene& sc, const HalfTranslationSurface& s, double gap_frac = 0.15) {
  Topology t(s);
  double extent = 0;
  for (auto& P : s.polygons)
    for (auto z : P.vertices) extent = std::max(extent, std::abs(z));
  double cursor = 0, gap = gap_frac * std::max(extent, 1e-9);
  std::vector<Point> shift(s.polygons.size());
  for (std::size_t p = 0; p < s.polygons.size(); ++p) {
    const auto& v = s.polygons[p].vertices;
    double lo = 1e300, hi = -1e300;
    for (auto z : v) {
      lo = std::min(lo, z.real());
      hi = std::max(hi, z.real());
    }
    shift[p] = p == 0 ? Point(0, 0) : Point(cursor - lo, 0);
    cursor = (p == 0 ? hi : cursor + hi - lo) + gap;
  }
  for (std::size_t p = 0; p < s.polygons.size(); ++p) {
    const auto& P = s.polygons[p];
    std::vector<Point> v;
    for (auto z : P.vertices) v.push_back(z + shift[p]);
    sc.polygon(v, "#eef", "#888", 0.5);
    Point c = centroid(v);
    sc.label(c, P.name);
    for (std::size_t e = 0; e < P.size(); ++e) {
      Point a = P.edge_start(e) + shift[p], b = P.edge_end(e) + shift[p];
      const auto& l = t.link({p, e});
      if (l.kind == EdgeLink::Kind::boundary)
        sc.segment(a, b, l.boundary == BoundaryKind::horizontal ? "#23c" : "#e80", 2.5);
      Point m = 0.5 * (a + b);
      sc.label(m + 0.12 * (c - m), std::to_string(e));
    }
  }
  for (auto& mk : s.marks) sc.dot(mk.point.position + shift[mk.point.polygon], "#c00", 3);
}

void draw_loops(SvgScene& sc, const std::vector<std::vector<Point>>& loops) {
  for (auto& L : loops) sc.polyline(L, "#222", 1, true);
}

// ---------------------------------------------------------------------------
// Subcommands

Outcome cmd_validate(const Globals&, const std::string& path, const std::string& out) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  auto s = parse_surface(f);
  auto v = validate_surface(s);
  Outcome o;
  Json& r = o.report;
  r["command"] = "validate";
  r["file"] = path;
  r["polygons"] = s.polygons.size();
  r["edges"] = s.edge_count();
  r["pairings"] = s.pairings.size();
  int hb = 0, fb = 0;
  for (auto& b : s.boundary) (b.kind == BoundaryKind::horizontal ? hb : fb)++;
  r["boundary"] = {{"horizontal", hb}, {"free", fb}};
  r["marks"] = s.marks.size();
  Json checks;
  for (auto& [n, ok] : v.checks) checks[n] = ok;
  r["checks"] = checks;
  Json issues = Json::array();
  for (auto& i : v.issues) issues.push_back({{"invariant", i.invariant}, {"element", i.element}, {"detail", i.detail}});
  r["issues"] = issues;
  if (v.ok()) {
    Topology t(s);
    r["euler_characteristic"] = t.euler_characteristic();
    r["area"] = area(s);
    Json cones = Json::array();
    for (auto& c : cone_points(s, t))
      if (c.singular) {
        const auto& k = c.vertex_cycle.front();
        cones.push_back({{"vertex", s.polygons[k.polygon].name + ".v" + std::to_string(k.vertex)},
                         {"angle_over_pi", c.total_angle / kPi},
                         {"prongs", c.prongs},
                         {"location", c.location == ConeLocation::interior ? "interior" : "boundary"}});
      }
    r["singular_points"] = cones;
    auto again = parse_surface_string(serialize_surface(s));
    r["round_trip"] = surfaces_equal(s, again);
    if (!out.empty()) write_surface_file(s, out);
    o.scene.emplace();
    draw_surface(*o.scene, s);
  }
  r["verdict"] = verdict(v.ok(), kLengthTol);
  o.passed = v.ok();
  return o;
}

Outcome cmd_geodesic(const Globals& g, const std::string& path, const std::string& from, const std::string& to,
                     int budget) {
  auto s = load_surface(path);
  GeodesicSolver solver(s, budget);
  auto p = solver.shortest(surface_point_arg(s, from, "--from"), surface_point_arg(s, to, "--to"));
  auto ang = check_angle_condition(s, p);
  Outcome o;
  Json& r = o.report;
  r["command"] = "geodesic";
  r["from"] = surface_point(s, p.from);
  r["to"] = surface_point(s, p.to);
  r["length"] = p.length;
  Json segs = Json::array();
  for (auto& sg : p.segments)
    segs.push_back({{"polygon", s.polygons[sg.a.polygon].name}, {"a", pt(sg.a.position)}, {"b", pt(sg.b.position)}});
  r["segments"] = segs;
  Json chain = Json::array();
  for (auto e : p.chain) chain.push_back(edge_name(s, e));
  r["edge_chain"] = chain;
  Json hits = Json::array();
  for (auto& h : p.cone_hits)
    hits.push_back({{"vertex", s.polygons[h.corner.polygon].name + ".v" + std::to_string(h.corner.vertex)},
                    {"total_angle", h.total_angle},
                    {"left", h.left},
                    {"right", h.right},
                    {"boundary", h.boundary}});
  r["cone_hits"] = hits;
  Json probs = Json::array();
  for (auto& q : ang.problems) probs.push_back(q);
  r["angle_condition"] = {{"passed", ang.passed}, {"problems", probs}};
  double tol = g.tol_or(1e-9);
  r["verdict"] = verdict(ang.passed, tol);
  o.passed = ang.passed;
  o.scene.emplace();
  double cursor = 0;
  for (auto& leg : p.legs) {
    double lo = 1e300, hi = -1e300;
    for (auto& tr : leg.triangles)
      for (auto z : tr) {
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
      }
    if (leg.triangles.empty()) lo = hi = leg.from.real();
    Point sh(cursor - lo, 0);
    for (auto& tr : leg.triangles) o.scene->polygon({tr[0] + sh, tr[1] + sh, tr[2] + sh}, "#eef", "#888", 0.5);
    o.scene->segment(leg.from + sh, leg.to + sh, "#d00", 2);
    o.scene->dot(leg.from + sh, "#d00", 2.5);
    o.scene->dot(leg.to + sh, "#d00", 2.5);
    cursor += (hi - lo) * 1.15 + 1e-6;
  }
  return o;
}

Outcome cmd_gaussbonnet(const Globals& g, const std::string& path, int subdivisions) {
  auto s = load_surface(path);
  double tol = g.tol_or(1e-9);
  auto base = gauss_bonnet_global(s);
  Outcome o;
  Json& r = o.report;
  r["command"] = "gaussbonnet";
  r["curvature_sum"] = base.lhs;
  r["euler_characteristic"] = base.chi;
  r["residual"] = base.residual;
  std::mt19937_64 rng(g.seed);
  double worst = std::abs(base.residual);
  bool chi_stable = true;
  for (int k = 0; k < subdivisions; ++k) {
    auto sub = random_subdivision(s, rng, 1 + int(rng() % 6));
    auto rep = gauss_bonnet_global(sub);
    worst = std::max(worst, std::abs(rep.residual));
    if (rep.chi != base.chi) chi_stable = false;
  }
  r["subdivisions"] = subdivisions;
  r["max_abs_residual"] = worst;
  r["chi_stable"] = chi_stable;
  o.passed = worst < tol && chi_stable;
  r["verdict"] = verdict(o.passed, tol);
  o.scene.emplace();
  draw_surface(*o.scene, s);
  return o;
}

Outcome cmd_el(const Globals& g, const std::string& path, const std::string& orient) {
  auto s = load_surface(path);
  auto e = extremal_length_of_structure(s, parse_orientation(orient));
  double tol = g.tol_or(1e-12);
  Outcome o;
  Json& r = o.report;
  r["command"] = "el";
  r["orientation"] = orient;
  r["extremal_length"] = e.el;
  r["energy"] = e.energy;
  r["area"] = e.area;
  o.passed = std::abs(e.el - e.area) <= tol * std::max(1.0, e.area);
  r["verdict"] = verdict(o.passed, tol);
  o.scene.emplace();
  draw_surface(*o.scene, s);
  return o;
}

Outcome cmd_modulus(const Globals&, const std::string& path, int grid) {
  auto d = parse_domain_file(path);
  auto m = annulus_modulus_numeric(d, grid);
  Outcome o;
  Json& r = o.report;
  r["command"] = "modulus";
  r["grid"] = grid;
  r["modulus"] = m.modulus;
  r["extremal_length"] = m.modulus > 0 ? 1 / m.modulus : std::numeric_limits<double>::infinity();
  r["energy"] = m.energy;
  r["unknowns"] = m.unknowns;
  r["cells"] = {m.nx, m.ny};
  r["h_min"] = m.h_min;
  r["h_max"] = m.h_max;
  o.scene.emplace();
  for (auto& L : d.loops)
    for (std::size_t i = 0; i < L.v.size(); ++i) {
      char c = L.label[i];
      o.scene->segment(L.v[i], L.v[(i + 1) % L.v.size()], c == '0' ? "#23c" : c == '1' ? "#c23" : "#888",
                       c == 'n' ? 1 : 2.5);
    }
  return o;
}

Outcome cmd_stretch(const Globals& g, const std::string& path, double K, const std::string& out) {
  auto s = load_surface(path);
  auto img = stretch_map(s, K);
  if (!out.empty()) write_surface_file(img.surface, out);
  double tol = g.tol_or(1e-15);
  Outcome o;
  Json& r = o.report;
  r["command"] = "stretch";
  r["K"] = K;
  auto mu = beltrami_of(img.map.faces.front().A);
  double expected = (K - 1) / (K + 1);
  r["beltrami"] = pt(mu);
  r["beltrami_expected"] = expected;
  r["dilatation"] = dilatation_of(img.map);
  r["area_before"] = area(s);
  r["area_after"] = area(img.surface);
  bool ok = std::abs(mu - expected) <= tol;
  if (!s.has_free_boundary()) {
    auto mv = el_monotonicity_check(foliation_from_differential(s, Orientation::horizontal), img.map, K);
    r["energy_before"] = mv.energy_before;
    r["energy_after"] = mv.energy_after;
    r["energy_ratio"] = mv.energy_after / mv.energy_before;
    r["equality_case"] = mv.equality_case;
    ok = ok && mv.holds && mv.equality_holds;
  }
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  if (!out.empty()) r["written"] = out;
  o.scene.emplace();
  draw_surface(*o.scene, img.surface);
  return o;
}

HalfTranslationSurface surface_field(const Json& j, const char* key, const std::filesystem::path& dir) {
  if (!j.contains(key) || !j[key].is_string()) throw ParseError(std::string("map file lacks string field '") + key + "'");
  std::string v = j[key].get<std::string>();
  if (v.find('\n') != std::string::npos) {
    auto s = parse_surface_string(v);
    require_valid(s);
    return s;
  }
  std::filesystem::path p(v);
  if (p.is_relative()) p = dir / p;
  return load_surface(p.string());
}

Outcome cmd_dilatation(const Globals& g, const std::string& path, std::optional<double> K) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  Json j;
  try {
    j = Json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map file: ") + e.what());
  }
  auto dir = std::filesystem::path(path).parent_path();
  PiecewiseAffineMap m;
  m.domain = surface_field(j, "domain", dir);
  m.codomain = surface_field(j, "codomain", dir);
  if (!j.contains("faces") || !j["faces"].is_array()) throw ParseError("map file lacks a 'faces' array");
  try {
    for (auto& fj : j["faces"]) {
      auto M = fj.at("matrix");
      FaceMap fm;
      fm.A = {M.at(0).at(0).get<double>(), M.at(0).at(1).get<double>(), M.at(1).at(0).get<double>(),
              M.at(1).at(1).get<double>()};
      if (fj.contains("translation")) fm.b = {fj["translation"].at(0).get<double>(), fj["translation"].at(1).get<double>()};
      fm.target = fj.value("target", std::size_t(0));
      m.faces.push_back(fm);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map face: ") + e.what());
  }
  double tol = g.tol_or(1e-9);
  auto chk = check_map(m, tol);
  Outcome o;
  Json& r = o.report;
  r["command"] = "dilatation";
  Json issues = Json::array();
  for (auto& i : chk.issues) issues.push_back(i);
  r["map_issues"] = issues;
  bool ok = chk.ok();
  if (ok) {
    double D = dilatation_of(m);
    r["dilatation"] = D;
    Json faces = Json::array();
    for (std::size_t k = 0; k < m.faces.size(); ++k)
      faces.push_back({{"face", m.domain.polygons[k].name},
                       {"dilatation", face_dilatation(m.faces[k].A)},
                       {"beltrami", pt(beltrami_of(m.faces[k].A))}});
    r["faces"] = faces;
    if (K) {
      r["K"] = *K;
      r["within_K"] = D <= *K + tol;
      ok = D <= *K + tol;
      auto ev = teichmuller_embedding_check(m, *K, tol);
      r["teichmuller"] = {{"passed", ev.passed},
                          {"matrices_ok", ev.matrices_ok},
                          {"complement_area", ev.complement_area},
                          {"complement_horizontal", ev.complement_horizontal}};
    }
  }
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  o.scene.emplace();
  draw_surface(*o.scene, m.codomain);
  return o;
}

Json unfold_json(const UnfoldReport& u) {
  return {{"original_prongs", u.original_prongs},      {"tip_angle", u.tip_angle},
          {"unfolded_prongs", u.unfolded_prongs},      {"unfolded_zero_order", u.unfolded_zero_order},
          {"unfolded_cone_angle", u.unfolded_cone_angle}, {"pullback_order", u.pullback_order},
          {"consistent", u.consistent}};
}

Outcome cmd_slit(const Globals& g, const std::string& path, const std::string& start, double length, int dir,
                 const std::string& out) {
  auto s = load_surface(path);
  SlitSpec sp{surface_point_arg(s, start, "--start"), length, dir};
  auto c = cut_slit(s, sp);
  if (!out.empty()) write_surface_file(c, out);
  Outcome o;
  Json& r = o.report;
  r["command"] = "slit";
  r["polygons"] = c.polygons.size();
  r["boundary_edges"] = c.boundary.size();
  r["area"] = area(c);
  auto gb = gauss_bonnet_global(c);
  r["euler_characteristic"] = gb.chi;
  r["gauss_bonnet_residual"] = gb.residual;
  // tips: both slit endpoints
  Point d(double(dir), 0);
  Json tips = Json::array();
  bool ok = validate_surface(c).ok();
  for (Point z : {sp.start.position, sp.start.position + length * d}) {
    Json tj{{"position", pt(z)}};
    for (std::size_t p = 0; p < c.polygons.size(); ++p) {
      if (locate_point(c.polygons[p], z, 1e-9).kind != PointLocation::Kind::vertex) continue;
      try {
        auto u = unfold_slit(c, {p, z});
        tj["unfold"] = unfold_json(u);
        ok = ok && u.consistent;
      } catch (const PreconditionError& e) {
        tj["unfold_error"] = e.what();
      }
      break;
    }
    tips.push_back(tj);
  }
  r["tips"] = tips;
  double tol = g.tol_or(1e-9);
  ok = ok && std::abs(gb.residual) < tol;
  if (!out.empty()) r["written"] = out;
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  o.scene.emplace();
  draw_surface(*o.scene, c);
  return o;
}

Outcome cmd_unfold(const Globals& g, const std::string& path, const std::string& tip, int prongs) {
  Outcome o;
  Json& r = o.report;
  r["command"] = "unfold";
  HalfTranslationSurface cut;
  SurfacePoint t;
  if (prongs > 0) {
    // model slit of length 0.5 from a cone point of angle prongs*pi
    HalfTranslationSurface s = prongs == 2 ? make_cylinder(1, 1) : make_pod(prongs);
    Point start = prongs == 2 ? Point(0.2, 0.5) : Point(0, 0);
    cut = cut_slit(s, {{0, start}, 0.5, 1});
    t = {0, start};
    r["model"] = prongs == 2 ? "slit cylinder" : "slit pod with " + std::to_string(prongs) + " legs";
  } else {
    if (path.empty() || tip.empty()) throw PreconditionError("unfold needs --surface and --tip, or --prongs");
    cut = load_surface(path);
    t = surface_point_arg(cut, tip, "--tip");
  }
  auto u = unfold_slit(cut, t);
  r["unfold"] = unfold_json(u);
  auto q = pullback_quadratic_differential({1.0}, 2);
  r["pullback_of_dz2_by_square"] = q;
  o.passed = u.consistent && u.unfolded_prongs == 2 * u.original_prongs;
  r["verdict"] = verdict(o.passed, g.tol_or(1e-9));
  o.scene.emplace();
  draw_surface(*o.scene, cut);
  return o;
}

Json invariants_json(const IsometryInvariants& v) {
  return {{"area", v.area}, {"euler_characteristic", v.chi}, {"cone_angles", v.cone_angles},
          {"boundary_lengths", v.boundary_lengths}};
}

Outcome cmd_enlarge(const Globals& g, const std::string& path, double rr, const std::string& out) {
  auto s = path.empty() ? make_cylinder(1, 1) : load_surface(path);
  auto big = glue_cylinders(s, rr);
  if (!out.empty()) write_surface_file(big, out);
  Outcome o;
  Json& r = o.report;
  r["command"] = "enlarge";
  r["r"] = rr;
  r["before"] = invariants_json(isometry_invariants(s));
  r["after"] = invariants_json(isometry_invariants(big));
  double tol = g.tol_or(1e-12);
  auto circles = boundary_circles(s);
  double expect = area(s);
  for (auto& c : circles) expect += rr * c.circumference * c.circumference;
  r["expected_area"] = expect;
  bool ok = std::abs(area(big) - expect) <= tol * std::max(1.0, expect);
  if (circles.size() == 2 && std::abs(circles[0].circumference - circles[1].circumference) <= 1e-12) {
    r["modulus_before"] = cylinder_modulus(s);
    r["modulus_after"] = cylinder_modulus(big);
  }
  if (!out.empty()) r["written"] = out;
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  o.scene.emplace();
  draw_surface(*o.scene, big);
  return o;
}

Outcome cmd_extension(const Globals& g, double hx, double hy) {
  auto e = extension_search(hx, hy);
  double tol = g.tol_or(1e-9);
  Outcome o;
  Json& r = o.report;
  r["command"] = "extension";
  r["hx"] = hx;
  r["hy"] = hy;
  r["closed_form"] = e.closed_form;
  r["searched"] = e.searched;
  r["iterations"] = e.iterations;
  r["complement_area"] = e.complement_area;
  r["slit_mapping"] = e.slit_mapping;
  o.passed = std::abs(e.searched - e.closed_form) <= tol && e.slit_mapping;
  r["verdict"] = verdict(o.passed, tol);
  o.scene.emplace();
  o.scene->polygon({{0, 0}, {1, 0}, {1, hy}, {0, hy}}, "#eef", "#444", 1);
  double m = e.closed_form;
  o.scene->polygon({{0, 0}, {1, 0}, {1, m}, {0, m}}, "#cdf", "#888", 0.5);
  o.scene->polygon({{0, m + hx}, {1, m + hx}, {1, hy}, {0, hy}}, "#cdf", "#888", 0.5);
  o.scene->polygon({{0, m}, {1, m}, {1, m + hx}, {0, m + hx}}, "#9bd", "#23c", 1);
  return o;
}

Outcome cmd_cover(const Globals& g, const std::string& path, const std::string& branch,
                  const std::vector<std::string>& arcs, const std::string& out) {
  auto s = load_surface(path);
  CoverSpec spec;
  if (!branch.empty())
    for (auto& t : split(branch, ',')) spec.branch_marks.push_back(std::size_t(number(t, "--branch")));
  for (auto& a : arcs) {
    std::vector<EdgeRef> arc;
    for (auto& t : split(a, ',')) arc.push_back(edge_arg(s, t));
    spec.arcs.push_back(arc);
  }
  auto c = double_cover_branched(s, spec);
  if (!out.empty()) write_surface_file(c.surface, out);
  double tol = g.tol_or(1e-9);
  Outcome o;
  Json& r = o.report;
  r["command"] = "cover";
  const auto& rep = c.report;
  r["degree"] = rep.degree;
  r["chi_base"] = rep.chi_base;
  r["chi_cover"] = rep.chi_cover;
  r["branch_count"] = rep.branch_count;
  r["gauss_bonnet_chi"] = rep.gauss_bonnet_chi;
  r["riemann_hurwitz"] = rep.riemann_hurwitz;
  r["local_degree_ok"] = rep.local_degree_ok;
  r["deck_ok"] = rep.deck_ok;
  r["branch_angles"] = rep.branch_angles;
  bool ok = rep.riemann_hurwitz && rep.local_degree_ok && rep.deck_ok &&
            std::abs(rep.gauss_bonnet_chi - rep.chi_cover) <= tol;
  if (!s.has_free_boundary()) {
    double e0 = dirichlet_energy(foliation_from_differential(s, Orientation::horizontal));
    double e1 = dirichlet_energy(foliation_from_differential(c.surface, Orientation::horizontal));
    r["energy_base"] = e0;
    r["energy_cover"] = e1;
    r["energy_ratio"] = e1 / e0;
    ok = ok && std::abs(e1 - 2 * e0) <= tol * std::max(1.0, e0);
  }
  if (!out.empty()) r["written"] = out;
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  o.scene.emplace();
  draw_surface(*o.scene, c.surface);
  return o;
}

Outcome cmd_flow(const Globals& g, double t, double height, double circ, const std::vector<std::string>& slits,
                 int samples) {
  FlowModel m{height, circ, {}};
  for (auto& sl : slits) {
    auto p = split(sl, ',');
    if (p.size() != 3) throw PreconditionError("--slit must be 'y,x0,length'");
    m.slits.push_back({number(p[0], "--slit"), number(p[1], "--slit"), number(p[2], "--slit")});
  }
  if (m.slits.empty()) m.slits.push_back({0.5 * height, 0, 0.6 * circ});
  auto cl = flow_clearance(m);
  auto res = horizontal_flow_family(m, t, samples, g.seed);
  const auto& v = res.verdict;
  Outcome o;
  Json& r = o.report;
  r["command"] = "flow";
  r["t"] = t;
  r["clearance"] = cl.value;
  r["collision"] = {{"moving_slit", cl.moving}, {"obstructed_slit", cl.obstructed}};
  r["dilatation"] = dilatation_of(res.map);
  r["conformal"] = v.conformal;
  r["injective"] = v.injective;
  r["complement_horizontal"] = v.complement_horizontal;
  r["embedding_passed"] = v.embedding_passed;
  r["flow_length_samples"] = samples;
  r["flow_length_constant"] = v.flow_length_constant;
  r["flow_length_spread"] = v.flow_length_spread;
  Json comp = Json::array();
  for (auto& c : v.complement) comp.push_back({{"a", pt(c.a.position)}, {"b", pt(c.b.position)}, {"horizontal", c.horizontal}});
  r["complement"] = comp;
  o.passed = v.passed();
  r["verdict"] = verdict(o.passed, 1e-12);
  o.scene.emplace();
  auto& sc = *o.scene;
  sc.polygon({{t, 0}, {circ + t, 0}, {circ + t, height}, {t, height}}, "#eef", "#444", 1);
  for (auto& sl : m.slits) {
    double x0 = std::fmod(sl.x0, circ);
    if (x0 < 0) x0 += circ;
    sc.polyline({{x0, sl.y}, {x0 + sl.length, sl.y}}, "#999", 1);
  }
  auto wrap = [&](double x) {
    double w = std::fmod(x - t, circ);
    return (w < 0 ? w + circ : w) + t;
  };
  for (auto& c : v.complement) {
    Point a = c.a.position, b = c.b.position;
    double xa = wrap(a.real()), xb = xa + (b.real() - a.real());
    if (xb <= circ + t + 1e-12) {
      sc.segment({xa, a.imag()}, {xb, b.imag()}, "#d00", 2.5);
    } else {
      sc.segment({xa, a.imag()}, {circ + t, a.imag()}, "#d00", 2.5);
      sc.segment({t, a.imag()}, {xb - circ, b.imag()}, "#d00", 2.5);
    }
  }
  return o;
}

Outcome cmd_grunsky(const Globals& g, const std::string& zs, std::size_t samples) {
  Point z = point_arg(zs, "--z");
  auto d = grunsky_disk(z);
  double tol = g.tol_or(1e-9);
  auto c = sample_class_S_check(z, samples, g.seed, tol);
  Outcome o;
  Json& r = o.report;
  r["command"] = "grunsky";
  r["z"] = pt(z);
  r["center"] = pt(d.center);
  r["radius"] = d.radius;
  r["samples"] = c.samples;
  r["violations"] = c.violations;
  r["max_excess"] = c.max_excess;
  r["worst_a"] = pt(c.worst_a);
  if (std::abs(z) > 0) {
    Point a = std::conj(z) / std::abs(z);
    r["koebe_boundary_residual"] = std::abs(std::abs(koebe_log_ratio(a, z) - d.center) - d.radius);
  }
  o.passed = c.passed();
  r["verdict"] = verdict(o.passed, tol);
  o.scene.emplace();
  auto& sc = *o.scene;
  std::vector<Point> circle, image;
  for (int k = 0; k < 256; ++k) {
    circle.push_back(d.center + std::polar(d.radius, kTwoPi * k / 256));
    image.push_back(koebe_log_ratio(std::polar(1.0, kTwoPi * k / 256), z));
  }
  sc.polygon(circle, "#dde8ff", "#23c", 1);
  sc.polyline(image, "#d00", 1, true);
  sc.dot(d.center, "#23c", 3);
  sc.dot(0, "#000", 2.5);
  return o;
}

Outcome cmd_residue(const Globals& g, const std::string& cs, const std::string& vs, int grid) {
  ResiduePole q{0, point_arg(cs, "--c"), {}};
  Point v = point_arg(vs, "--v");
  double tol = g.tol_or(0.01);
  auto fine = pairing_quadrature_check(q, v, {}, grid);
  auto coarse = pairing_quadrature_check(q, v, {}, grid / 2);
  Outcome o;
  Json& r = o.report;
  r["command"] = "residue";
  r["c_minus1"] = pt(q.c_minus1);
  r["v"] = pt(v);
  r["pairing"] = pt(residue_pairing(q, v));
  r["quadrature"] = {{"resolution", fine.resolution},
                     {"numeric", fine.numeric},
                     {"predicted", fine.predicted},
                     {"relative_error", fine.relative_error},
                     {"coarse_error", coarse.error},
                     {"error", fine.error},
                     {"error_halves", fine.error < coarse.error / 2}};
  bool ok = fine.relative_error < tol;
  if (std::abs(q.c_minus1) > 0) {
    auto scan = vertical_sector_scan(q);
    r["vertical_direction"] = pt(vertical_direction(q));
    r["sector_scan"] = {{"angles", scan.angles.size()}, {"sign_changes", scan.sign_changes}, {"matches", scan.matches}};
    ok = ok && scan.matches;
  }
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  o.scene.emplace();
  auto& sc = *o.scene;
  if (std::abs(q.c_minus1) > 0) {
    Point vd = vertical_direction(q);
    for (int k = 0; k < 72; ++k) {
      double th = -kPi + kTwoPi * k / 72;
      Point w = std::polar(1.0, th) * vd;
      double val = residue_pairing(q, w).real();
      sc.segment(0, w, val < 0 ? "#23c" : val > 0 ? "#d00" : "#000", 1);
    }
    sc.segment(0, 1.2 * vd, "#000", 2.5);
  }
  sc.dot(0, "#000", 3);
  return o;
}

Json band_polygon(HeightBand b, double c) { return pts({{0, b.lo}, {c, b.lo}, {c, b.hi}, {0, b.hi}}); }

Outcome cmd_blob(const Globals& g, double hx, double hy, double xh, double c, int grid) {
  double res = g.tol_or(1e-3);
  auto b = cylinder_blob_estimate(hx, hy, xh, c, grid, res);
  Outcome o;
  Json& r = o.report;
  r["command"] = "blob-cylinder";
  r["hx"] = hx;
  r["hy"] = hy;
  r["height"] = xh;
  r["circumference"] = c;
  r["inner"] = {{"heights", {b.inner.lo, b.inner.hi}}, {"region", band_polygon(b.inner, c)}};
  r["outer"] = {{"heights", {b.outer.lo, b.outer.hi}}, {"region", band_polygon(b.outer, c)}};
  r["rotation_invariant"] = b.rotation_invariant;
  r["connected"] = b.connected;
  r["inner_in_outer"] = b.inner_in_outer;
  o.passed = b.inner_in_outer && b.rotation_invariant && b.connected;
  r["verdict"] = verdict(o.passed, res);
  o.scene.emplace();
  auto& sc = *o.scene;
  sc.polygon({{0, 0}, {c, 0}, {c, hy}, {0, hy}}, "none", "#444", 1);
  if (b.outer.lo > 0) sc.polygon({{0, 0}, {c, 0}, {c, b.outer.lo}, {0, b.outer.lo}}, "url(#hatch)", "none", 0);
  if (b.outer.hi < hy) sc.polygon({{0, b.outer.hi}, {c, b.outer.hi}, {c, hy}, {0, hy}}, "url(#hatch)", "none", 0);
  sc.polygon({{0, b.outer.lo}, {c, b.outer.lo}, {c, b.outer.hi}, {0, b.outer.hi}}, "none", "#c23", 1);
  double h = std::max(b.inner.hi - b.inner.lo, 1e-3 * hy);
  sc.polygon({{0, b.inner.lo}, {c, b.inner.lo}, {c, b.inner.lo + h}, {0, b.inner.lo + h}}, "#6a6", "#262", 1);
  return o;
}

Outcome cmd_semismooth(const Globals& g, const std::string& path) {
  auto B = parse_planar_set_file(path);
  double tol = g.tol_or(1e-9);
  auto v = semi_smooth_check(B, tol);
  Outcome o;
  Json& r = o.report;
  r["command"] = "semismooth";
  r["loops"] = B.loops.size();
  Json wit = Json::array();
  for (auto& w : v.witnesses)
    wit.push_back({{"loop", w.feature.loop}, {"vertex", w.feature.index}, {"point", pt(w.point)}, {"reason", w.reason}});
  r["witnesses"] = wit;
  o.scene.emplace();
  auto& sc = *o.scene;
  draw_loops(sc, B.loops);
  bool ok = v.passed;
  if (v.passed) {
    Json charts = Json::array();
    double diam = 0;
    for (auto& L : B.loops) diam = std::max(diam, curve_diameter(L));
    for (std::size_t l = 0; l < B.loops.size(); ++l)
      for (std::size_t i = 0; i < B.loops[l].size(); ++i) {
        auto ch = manifold_chart_extract(B, B.loops[l][i]);
        ok = ok && ch.ok();
        charts.push_back({{"loop", l},
                          {"vertex", i},
                          {"half_width", ch.half_width},
                          {"half_height", ch.half_height},
                          {"lipschitz", ch.lipschitz},
                          {"ok", ch.ok()}});
        auto cone = vertex_cone(B, l, i);
        double len = 0.08 * diam;
        Point p = B.loops[l][i];
        sc.segment(p, p + std::polar(len, cone.theta1), "#23c", 1);
        sc.segment(p, p + std::polar(len, cone.theta1 + cone.angle), "#23c", 1);
      }
    r["charts"] = charts;
  }
  for (auto& w : v.witnesses) sc.dot(w.point, "#d00", 4);
  o.passed = ok;
  r["verdict"] = verdict(ok, tol);
  return o;
}

Json witness_json(const FingerWitness& w) {
  return {{"params", w.params}, {"points", pts({w.points.begin(), w.points.end()})}, {"pinch", w.pinch},
          {"separation", w.separation}};
}

std::pair<std::vector<ClosedCurve>, std::optional<CurveFamily>> curves_arg(const std::vector<std::string>& files,
                                                                           const std::string& family) {
  if (!family.empty()) {
    auto F = curve_family(family);
    return {F.curves, F};
  }
  std::vector<ClosedCurve> cs;
  for (auto& f : files) cs.push_back(load_curve(f));
  return {cs, std::nullopt};
}

Outcome cmd_fingers(const Globals&, const std::vector<std::string>& files, const std::string& family) {
  auto [curves, fam] = curves_arg(files, family);
  auto f = detect_collapsing_finger(curves);
  Outcome o;
  Json& r = o.report;
  r["command"] = "fingers";
  if (fam) r["family"] = fam->name;
  r["curves"] = curves.size();
  r["delta_sep"] = f.delta_sep;
  r["eps_pinch"] = f.eps_pinch;
  r["detected"] = f.detected;
  Json per = Json::array();
  for (auto& w : f.per_curve) per.push_back(w ? Json(w->pinch) : Json(nullptr));
  r["pinch_per_curve"] = per;
  if (f.witness) r["witness"] = witness_json(*f.witness);
  o.scene.emplace();
  o.scene->polyline(curves.back().pts, "#222", 1, true);
  if (f.witness) {
    const auto& w = *f.witness;
    const char* col[4] = {"#d00", "#23c", "#d00", "#23c"};
    for (int k = 0; k < 4; ++k) o.scene->dot(w.points[std::size_t(k)], col[k], 3.5);
  }
  return o;
}

Outcome cmd_reparam(const Globals& g, const std::vector<std::string>& files, const std::string& family,
                    const std::string& limit_path, const std::string& arcs_s) {
  auto [curves, fam] = curves_arg(files, family);
  ClosedCurve limit;
  std::vector<std::size_t> arcs;
  if (fam) {
    limit = fam->limit;
    arcs = family_arc_counts(*fam);
  } else {
    if (limit_path.empty()) throw PreconditionError("reparam with --curves needs --limit");
    limit = load_curve(limit_path);
  }
  if (!arcs_s.empty()) {
    arcs.clear();
    for (auto& t : split(arcs_s, ',')) arcs.push_back(std::size_t(number(t, "--arcs")));
  }
  auto rep = reparametrize_to_uniform(curves, limit, arcs);
  double tol = g.tol_or(1e-3);
  Outcome o;
  Json& r = o.report;
  r["command"] = "reparam";
  if (fam) r["family"] = fam->name;
  r["converges"] = rep.converges;
  r["obstruction"] = rep.obstruction;
  r["sup_errors"] = rep.sup_errors;
  r["nonincreasing"] = rep.nonincreasing;
  Json cj = Json::array();
  for (auto& c : rep.curves)
    cj.push_back({{"winding", c.winding}, {"reversed", c.reversed}, {"arcs", c.arcs}, {"increasing", c.increasing},
                  {"sup_error", c.sup_error}});
  r["per_curve"] = cj;
  double last = rep.sup_errors.empty() ? 1e300 : rep.sup_errors.back();
  o.passed = rep.converges && last < tol;
  r["verdict"] = verdict(o.passed, tol);
  o.scene.emplace();
  o.scene->polyline(limit.pts, "#888", 1, true);
  o.scene->polyline(curves.back().pts, "#23c", 1, true);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hts: half-translation surfaces, extremal length and quasiconformal tools"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "emit the report as JSON");
  app.add_option("--svg", g.svg, "write a figure to PATH");
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  double tol_value = 0;
  auto* tol_opt = app.add_option("--tol", tol_value, "override the verdict tolerance");

  std::function<Outcome()> run;
  auto sub = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->fallthrough();
    return s;
  };

  std::string surface, out, from, to, orient = "horizontal", domain, start, tip, branch, mapfile, zs = "0.5",
                                      cs = "1", vs = "-1", family, limit, arcs_s, setfile;
  int budget = 12, subdivisions = 0, grid = 256, rgrid = 512, bgrid = 128, dir = 1, prongs = 0, fsamples = 100;
  double K = 2, length = 0.5, rr = 0.5, hx = 1, hy = 2, t = 0.2, height = 1, circ = 1, xh = 0.5;
  std::optional<double> Kopt;
  std::size_t samples = 10000;
  std::vector<std::string> arcs, slits, curves;

  auto* v = sub("validate", "parse and validate a surface file");
  v->add_option("--surface", surface)->required();
  v->add_option("--out", out, "write the normalized surface");
  v->callback([&] { run = [&] { return cmd_validate(g, surface, out); }; });

  auto* gd = sub("geodesic", "shortest path between two points");
  gd->add_option("--surface", surface)->required();
  gd->add_option("--from", from)->required();
  gd->add_option("--to", to)->required();
  gd->add_option("--budget", budget);
  gd->callback([&] { run = [&] { return cmd_geodesic(g, surface, from, to, budget); }; });

  auto* gb = sub("gaussbonnet", "Gauss-Bonnet residual, optionally over random subdivisions");
  gb->add_option("--surface", surface)->required();
  gb->add_option("--subdivisions", subdivisions);
  gb->callback([&] { run = [&] { return cmd_gaussbonnet(g, surface, subdivisions); }; });

  auto* el = sub("el", "extremal length of the structure foliation");
  el->add_option("--surface", surface)->required();
  el->add_option("--orientation", orient);
  el->callback([&] { run = [&] { return cmd_el(g, surface, orient); }; });

  auto* mo = sub("modulus", "numerical conformal modulus of a planar domain");
  mo->add_option("--domain", domain)->required();
  mo->add_option("--grid", grid);
  mo->callback([&] { run = [&] { return cmd_modulus(g, domain, grid); }; });

  auto* st = sub("stretch", "Teichmuller stretch of a surface");
  st->add_option("--surface", surface)->required();
  st->add_option("--K", K)->required();
  st->add_option("--out", out);
  st->callback([&] { run = [&] { return cmd_stretch(g, surface, K, out); }; });

  auto* di = sub("dilatation", "dilatation of a face-wise affine map");
  di->add_option("--map", mapfile)->required();
  di->add_option("--K", Kopt, "bound to check");
  di->callback([&] { run = [&] { return cmd_dilatation(g, mapfile, Kopt); }; });

  auto* sl = sub("slit", "cut a horizontal slit");
  sl->add_option("--surface", surface)->required();
  sl->add_option("--start", start)->required();
  sl->add_option("--length", length)->required();
  sl->add_option("--direction", dir);
  sl->add_option("--out", out);
  sl->callback([&] { run = [&] { return cmd_slit(g, surface, start, length, dir, out); }; });

  auto* un = sub("unfold", "prong count at a slit tip after unfolding");
  un->add_option("--surface", surface);
  un->add_option("--tip", tip);
  un->add_option("--prongs", prongs, "use the model slit from a cone point with this many prongs");
  un->callback([&] { run = [&] { return cmd_unfold(g, surface, tip, prongs); }; });

  auto* en = sub("enlarge", "glue flat cylinders of modulus r onto boundary circles");
  en->add_option("--surface", surface, "defaults to the cylinder of height 1");
  en->add_option("--r", rr)->required();
  en->add_option("--out", out);
  en->callback([&] { run = [&] { return cmd_enlarge(g, surface, rr, out); }; });

  auto* ex = sub("extension", "modulus of extension between two flat cylinders");
  ex->add_option("--hx", hx)->required();
  ex->add_option("--hy", hy)->required();
  ex->callback([&] { run = [&] { return cmd_extension(g, hx, hy); }; });

  auto* co = sub("cover", "branched double cover");
  co->add_option("--surface", surface)->required();
  co->add_option("--branch", branch, "mark indices, comma separated");
  co->add_option("--arc", arcs, "edge path, e.g. T0.1,T1.0 (repeatable)");
  co->add_option("--out", out);
  co->callback([&] { run = [&] { return cmd_cover(g, surface, branch, arcs, out); }; });

  auto* fl = sub("flow", "horizontal flow family on a slit cylinder");
  fl->add_option("--t", t)->required();
  fl->add_option("--height", height);
  fl->add_option("--circumference", circ);
  fl->add_option("--slit", slits, "y,x0,length (repeatable)");
  fl->add_option("--samples", fsamples);
  fl->callback([&] { run = [&] { return cmd_flow(g, t, height, circ, slits, fsamples); }; });

  auto* gr = sub("grunsky", "Grunsky disk and class-S sampling");
  gr->add_option("--z", zs)->required();
  gr->add_option("--samples", samples);
  gr->callback([&] { run = [&] { return cmd_grunsky(g, zs, samples); }; });

  auto* re = sub("residue", "residue pairing at a simple pole");
  re->add_option("--c", cs, "coefficient of dz^2/z");
  re->add_option("--v", vs, "vector field value at the pole");
  re->add_option("--grid", rgrid);
  re->callback([&] { run = [&] { return cmd_residue(g, cs, vs, rgrid); }; });

  auto* bl = sub("blob-cylinder", "inner and outer bounds for the cylinder blob");
  bl->add_option("--hx", hx)->required();
  bl->add_option("--hy", hy)->required();
  bl->add_option("--height", xh)->required();
  bl->add_option("--circumference", circ);
  bl->add_option("--grid", bgrid);
  bl->callback([&] { run = [&] { return cmd_blob(g, hx, hy, xh, circ, bgrid); }; });

  auto* ss = sub("semismooth", "semi-smoothness and local charts of a planar set");
  ss->add_option("--set", setfile)->required();
  ss->callback([&] { run = [&] { return cmd_semismooth(g, setfile); }; });

  auto* fi = sub("fingers", "collapsing finger detection");
  fi->add_option("--curves", curves);
  fi->add_option("--family", family);
  fi->callback([&] { run = [&] { return cmd_fingers(g, curves, family); }; });

  auto* rp = sub("reparam", "reparametrization toward uniform convergence");
  rp->add_option("--curves", curves);
  rp->add_option("--family", family);
  rp->add_option("--limit", limit);
  rp->add_option("--arcs", arcs_s, "arc counts per curve, comma separated");
  rp->callback([&] { run = [&] { return cmd_reparam(g, curves, family, limit, arcs_s); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (tol_opt->count() > 0) g.tol = tol_value;
  try {
    if ((fi->parsed() || rp->parsed()) && curves.empty() == family.empty())
      throw PreconditionError("give exactly one of --curves and --family");
    Outcome o = run();
    if (!g.svg.empty()) o.scene->write(g.svg);
    if (g.json) {
      emit_json(std::cout, o.report, 2, 0);
      std::cout << "\n";
    } else {
      emit_text(std::cout, o.report, "");
    }
    return o.passed ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
