#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hts/surface.hpp"

namespace hts {

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  is.imbue(std::locale::classic());
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

inline double parse_double(const std::string& tok, int line) {
  double v = 0;
  const char* b = tok.data();
  const char* e = b + tok.size();
  if (!tok.empty() && tok[0] == '+') ++b;
  auto [ptr, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || ptr != e || !std::isfinite(v)) throw ParseError("bad number '" + tok + "'", line);
  return v;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline HalfTranslationSurface parse_surface(std::istream& in) {
  HalfTranslationSurface s;
  std::string raw;
  int line = 0;
  bool in_polygon = false;
  struct PendingPair {
    std::string a, b;
    int sign;
    int line;
  };
  struct PendingBoundary {
    std::string e;
    BoundaryKind k;
    int line;
  };
  struct PendingMark {
    std::string poly;
    MarkRole role;
    Point z;
    int line;
  };
  std::vector<PendingPair> pairs;
  std::vector<PendingBoundary> bnd;
  std::vector<PendingMark> marks;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
    auto tok = detail::split_ws(raw);
    if (tok.empty()) continue;
    const std::string& kw = tok[0];
    if (kw == "polygon") {
      if (tok.size() != 2) throw ParseError("expected 'polygon <name>'", line);
      for (auto& P : s.polygons)
        if (P.name == tok[1]) throw ParseError("duplicate polygon name '" + tok[1] + "'", line);
      if (tok[1].find('.') != std::string::npos) throw ParseError("polygon names may not contain '.'", line);
      s.polygons.push_back({tok[1], {}});
      in_polygon = true;
    } else if (kw == "pair") {
      in_polygon = false;
      if (tok.size() != 4 || tok[3].rfind("sign=", 0) != 0)
        throw ParseError("expected 'pair <name>.<i> <name>.<i> sign=<+1|-1>'", line);
      std::string sg = tok[3].substr(5);
      int sign;
      if (sg == "+1" || sg == "1")
        sign = 1;
      else if (sg == "-1" || sg == "\xE2\x88\x92" "1")
        sign = -1;
      else
        throw ParseError("sign must be +1 or -1", line);
      pairs.push_back({tok[1], tok[2], sign, line});
    } else if (kw == "boundary") {
      in_polygon = false;
      if (tok.size() != 3) throw ParseError("expected 'boundary <name>.<i> <horizontal|free>'", line);
      BoundaryKind k;
      if (tok[2] == "horizontal")
        k = BoundaryKind::horizontal;
      else if (tok[2] == "free")
        k = BoundaryKind::free;
      else
        throw ParseError("boundary flag must be horizontal or free", line);
      bnd.push_back({tok[1], k, line});
    } else if (kw == "mark") {
      in_polygon = false;
      if (tok.size() != 5) throw ParseError("expected 'mark <puncture|plain> <name> <x> <y>'", line);
      MarkRole role;
      if (tok[1] == "puncture")
        role = MarkRole::puncture;
      else if (tok[1] == "plain")
        role = MarkRole::plain;
      else if (tok[1] == "cone")
        role = MarkRole::cone;
      else
        throw ParseError("unknown mark role '" + tok[1] + "'", line);
      marks.push_back({tok[2], role, {detail::parse_double(tok[3], line), detail::parse_double(tok[4], line)}, line});
    } else {
      if (!in_polygon || tok.size() != 2) throw ParseError("unexpected '" + kw + "'", line);
      s.polygons.back().vertices.emplace_back(detail::parse_double(tok[0], line), detail::parse_double(tok[1], line));
    }
  }
  auto find_poly = [&](const std::string& name, int ln) {
    for (std::size_t i = 0; i < s.polygons.size(); ++i)
      if (s.polygons[i].name == name) return i;
    throw ParseError("unknown polygon '" + name + "'", ln);
  };
  auto edge_ref = [&](const std::string& t, int ln) {
    auto dot = t.rfind('.');
    if (dot == std::string::npos) throw ParseError("edge reference '" + t + "' lacks '.<index>'", ln);
    EdgeRef e;
    e.polygon = find_poly(t.substr(0, dot), ln);
    std::string idx = t.substr(dot + 1);
    auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), e.edge);
    if (ec != std::errc() || ptr != idx.data() + idx.size()) throw ParseError("bad edge index in '" + t + "'", ln);
    return e;
  };
  for (auto& p : pairs) s.pairings.push_back({edge_ref(p.a, p.line), edge_ref(p.b, p.line), p.sign});
  for (auto& b : bnd) s.boundary.push_back({edge_ref(b.e, b.line), b.k});
  for (auto& m : marks) s.marks.push_back({{find_poly(m.poly, m.line), m.z}, m.role});
  return s;
}

inline HalfTranslationSurface parse_surface_string(const std::string& text) {
  std::istringstream is(text);
  return parse_surface(is);
}

// Parses and validates; validation failures name the invariant and element.
inline HalfTranslationSurface parse_surface_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  HalfTranslationSurface s = parse_surface(f);
  auto r = validate_surface(s);
  if (!r.ok()) {
    const auto& i = r.issues.front();
    throw ParseError("validation failed: " + i.invariant + " at " + i.element + " (" + i.detail + ")");
  }
  return s;
}

inline std::string serialize_surface(const HalfTranslationSurface& s) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  for (auto& P : s.polygons) {
    os << "polygon " << P.name << "\n";
    for (auto v : P.vertices) os << detail::format_double(v.real()) << " " << detail::format_double(v.imag()) << "\n";
  }
  auto en = [&](EdgeRef e) { return s.polygons[e.polygon].name + "." + std::to_string(e.edge); };
  for (auto& p : s.pairings) os << "pair " << en(p.a) << " " << en(p.b) << " sign=" << (p.sign > 0 ? "+1" : "-1") << "\n";
  for (auto& b : s.boundary)
    os << "boundary " << en(b.edge) << " " << (b.kind == BoundaryKind::horizontal ? "horizontal" : "free") << "\n";
  for (auto& m : s.marks) {
    const char* role = m.role == MarkRole::puncture ? "puncture" : m.role == MarkRole::cone ? "cone" : "plain";
    os << "mark " << role << " " << s.polygons[m.point.polygon].name << " "
       << detail::format_double(m.point.position.real()) << " " << detail::format_double(m.point.position.imag())
       << "\n";
  }
  return os.str();
}

inline void write_surface_file(const HalfTranslationSurface& s, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  f << serialize_surface(s);
}

inline bool surfaces_equal(const HalfTranslationSurface& a, const HalfTranslationSurface& b) {
  if (a.polygons.size() != b.polygons.size() || a.pairings.size() != b.pairings.size() ||
      a.boundary.size() != b.boundary.size() || a.marks.size() != b.marks.size())
    return false;
  for (std::size_t i = 0; i < a.polygons.size(); ++i)
    if (a.polygons[i].name != b.polygons[i].name || a.polygons[i].vertices != b.polygons[i].vertices) return false;
  for (std::size_t i = 0; i < a.pairings.size(); ++i)
    if (a.pairings[i].a != b.pairings[i].a || a.pairings[i].b != b.pairings[i].b ||
        a.pairings[i].sign != b.pairings[i].sign)
      return false;
  for (std::size_t i = 0; i < a.boundary.size(); ++i)
    if (a.boundary[i].edge != b.boundary[i].edge || a.boundary[i].kind != b.boundary[i].kind) return false;
  for (std::size_t i = 0; i < a.marks.size(); ++i)
    if (a.marks[i].role != b.marks[i].role || a.marks[i].point.polygon != b.marks[i].point.polygon ||
        a.marks[i].point.position != b.marks[i].point.position)
      return false;
  return true;
}

}  // namespace hts
