#pragma once
// Deterministic SVG scenes: fixed element order, coordinates rounded to 1e-6.

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hts/error.hpp"
#include "hts/geometry.hpp"

namespace hts {

class SvgScene {
 public:
  void polygon(const std::vector<Point>& v, const std::string& fill, const std::string& stroke, double width = 1,
               const std::string& extra = "") {
    grow(v);
    items_.push_back({Kind::polygon, v, fill, stroke, width, extra, ""});
  }
  void polyline(const std::vector<Point>& v, const std::string& stroke, double width = 1, bool closed = false) {
    grow(v);
    items_.push_back({closed ? Kind::polygon : Kind::polyline, v, "none", stroke, width, "", ""});
  }
  void segment(Point a, Point b, const std::string& stroke, double width = 1.5) { polyline({a, b}, stroke, width); }
  void dot(Point p, const std::string& fill, double r = 3) {
    grow({p});
    items_.push_back({Kind::dot, {p}, fill, "none", r, "", ""});
  }
  void label(Point p, const std::string& text) {
    grow({p});
    items_.push_back({Kind::text, {p}, "black", "none", 0, "", text});
  }

  std::string str(int pixels = 600) const {
    double w = std::max(hi_.real() - lo_.real(), 1e-9), h = std::max(hi_.imag() - lo_.imag(), 1e-9);
    double pad = 0.05 * std::max(w, h);
    double scale = pixels / (std::max(w, h) + 2 * pad);
    auto X = [&](Point p) { return fmt((p.real() - lo_.real() + pad) * scale); };
    auto Y = [&](Point p) { return fmt((hi_.imag() - p.imag() + pad) * scale); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt((w + 2 * pad) * scale) << "\" height=\""
       << fmt((h + 2 * pad) * scale) << "\">\n";
    os << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
          "<path d=\"M0,6 L6,0\" stroke=\"#c33\" stroke-width=\"1\"/></pattern></defs>\n";
    for (auto& it : items_) {
      switch (it.kind) {
        case Kind::polygon:
        case Kind::polyline: {
          os << (it.kind == Kind::polygon ? "<polygon" : "<polyline") << " points=\"";
          for (std::size_t i = 0; i < it.pts.size(); ++i) os << (i ? " " : "") << X(it.pts[i]) << "," << Y(it.pts[i]);
          os << "\" fill=\"" << it.fill << "\" stroke=\"" << it.stroke << "\" stroke-width=\"" << fmt(it.width)
             << "\"" << (it.extra.empty() ? "" : " " + it.extra) << "/>\n";
          break;
        }
        case Kind::dot:
          os << "<circle cx=\"" << X(it.pts[0]) << "\" cy=\"" << Y(it.pts[0]) << "\" r=\"" << fmt(it.width)
             << "\" fill=\"" << it.fill << "\"/>\n";
          break;
        case Kind::text:
          os << "<text x=\"" << X(it.pts[0]) << "\" y=\"" << Y(it.pts[0]) << "\" font-size=\"11\">" << escape(it.text)
             << "</text>\n";
          break;
      }
    }
    os << "</svg>\n";
    return os.str();
  }

  void write(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << str();
    if (!f) throw IoError("write failed for '" + path + "'");
  }

  static std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s = buf;
    if (s == "-0.000000") s = "0.000000";
    return s;
  }

 private:
  enum class Kind { polygon, polyline, dot, text };
  struct Item {
    Kind kind;
    std::vector<Point> pts;
    std::string fill, stroke;
    double width;
    std::string extra, text;
  };
  std::vector<Item> items_;
  Point lo_{1e300, 1e300}, hi_{-1e300, -1e300};

  void grow(const std::vector<Point>& v) {
    for (auto p : v) {
      lo_ = {std::min(lo_.real(), p.real()), std::min(lo_.imag(), p.imag())};
      hi_ = {std::max(hi_.real(), p.real()), std::max(hi_.imag(), p.imag())};
    }
  }
  static std::string escape(const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  }
};

}  // namespace hts
