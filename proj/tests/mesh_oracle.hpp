#pragma once
// Test-only oracle: Dijkstra on a Steiner-refined triangulation.

#include <queue>
#include <random>

#include "hts/geodesics.hpp"

namespace hts::oracle {

class MeshOracle {
 public:
  MeshOracle(const HalfTranslationSurface& s, double spacing) : s_(s), top_(s_), tri_(triangulate(s_)), ttop_(tri_.surface) {
    const auto& T = tri_.surface;
    std::vector<std::size_t> vnode(ttop_.cycles().size());
    for (auto& v : vnode) v = nodes_++;
    edge_nodes_.assign(T.polygons.size(), {});
    for (std::size_t t = 0; t < T.polygons.size(); ++t) {
      for (std::size_t e = 0; e < 3; ++e) {
        EdgeRef r{t, e};
        const EdgeLink& l = ttop_.link(r);
        if (l.kind == EdgeLink::Kind::paired && l.partner < r) continue;
        int m = std::max(1, int(std::ceil(std::abs(T.polygons[t].edge_vector(e)) / spacing)));
        std::vector<std::size_t> ids;
        for (int k = 1; k < m; ++k) ids.push_back(nodes_++);
        edge_nodes_[t][e] = {ids, m};
        if (l.kind == EdgeLink::Kind::paired) {
          std::reverse(ids.begin(), ids.end());
          edge_nodes_[l.partner.polygon][l.partner.edge] = {ids, m};
        }
      }
    }
    per_tri_.resize(T.polygons.size());
    for (std::size_t t = 0; t < T.polygons.size(); ++t) {
      const Polygon& P = T.polygons[t];
      for (std::size_t k = 0; k < 3; ++k) per_tri_[t].push_back({vnode[ttop_.cycle_of({t, k})], P.vertex(k)});
      for (std::size_t e = 0; e < 3; ++e) {
        auto& [ids, m] = edge_nodes_[t][e];
        for (std::size_t k = 0; k < ids.size(); ++k)
          per_tri_[t].push_back({ids[k], P.edge_start(e) + double(k + 1) / m * P.edge_vector(e)});
      }
    }
    adj_.resize(nodes_);
    for (auto& pts : per_tri_)
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
          double w = std::abs(pts[i].second - pts[j].second);
          adj_[pts[i].first].push_back({pts[j].first, w});
          adj_[pts[j].first].push_back({pts[i].first, w});
        }
    vnode_ = vnode;
  }

  double distance(SurfacePoint p, SurfacePoint q) const {
    auto extra = adj_;
    std::size_t n = nodes_;
    std::vector<std::pair<std::size_t, Point>> ta, tb;
    std::size_t a = attach(p, extra, n, ta), b = attach(q, extra, n, tb);
    for (auto& [t1, z1] : ta)
      for (auto& [t2, z2] : tb) {
        double w = std::numeric_limits<double>::infinity();
        if (t1 == t2) w = std::abs(z1 - z2);
        for (std::size_t e = 0; e < 3; ++e)
          if (auto y = through_edge(t1, z1, e, t2, z2)) w = std::min(w, std::abs(*y - z1));
        if (std::isfinite(w)) {
          extra[a].push_back({b, w});
          extra[b].push_back({a, w});
        }
      }
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    using QE = std::pair<double, std::size_t>;
    std::priority_queue<QE, std::vector<QE>, std::greater<>> pq;
    d[a] = 0;
    pq.push({0, a});
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > d[u]) continue;
      if (u == b) return du;
      for (auto [v, w] : extra[u])
        if (du + w < d[v]) {
          d[v] = du + w;
          pq.push({d[v], v});
        }
    }
    return d[b];
  }

  SurfacePoint random_point(std::mt19937_64& rng) const {
    const auto& T = tri_.surface;
    std::vector<double> w;
    for (auto& P : T.polygons) w.push_back(P.area());
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t t = pick(rng);
    double r1 = u(rng), r2 = u(rng);
    if (r1 + r2 > 1) {
      r1 = 1 - r1;
      r2 = 1 - r2;
    }
    const Polygon& P = T.polygons[t];
    Point z = P.vertex(0) + r1 * (P.vertex(1) - P.vertex(0)) + r2 * (P.vertex(2) - P.vertex(0));
    return {tri_.parent[t], z};
  }

 private:
  std::size_t attach(SurfacePoint x, std::vector<std::vector<std::pair<std::size_t, double>>>& g,
                     std::size_t& n, std::vector<std::pair<std::size_t, Point>>& tris) const {
    SurfacePoint c = canonical_point(top_, x);
    auto loc = locate_point(s_.polygons[c.polygon], c.position);
    if (loc.kind == PointLocation::Kind::vertex) {
      Point z = s_.polygons[c.polygon].vertex(loc.index);
      for (std::size_t t = 0; t < tri_.surface.polygons.size(); ++t)
        for (std::size_t k = 0; k < 3; ++k)
          if (tri_.parent[t] == c.polygon && tri_.surface.polygons[t].vertex(k) == z)
            return vnode_[ttop_.cycle_of({t, k})];
    }
    std::size_t id = n++;
    g.emplace_back();
    auto link_in = [&](std::size_t poly, Point z) {
      for (std::size_t t = 0; t < tri_.surface.polygons.size(); ++t) {
        if (tri_.parent[t] != poly) continue;
        if (locate_in_polygon(tri_.surface.polygons[t].vertices, z, 1e-12) == Containment::outside) continue;
        tris.push_back({t, z});
        for (auto& [v, pz] : per_tri_[t]) {
          double w = std::abs(pz - z);
          g[id].push_back({v, w});
          g[v].push_back({id, w});
        }
        // nodes of neighbouring triangles seen straight through a shared edge
        for (std::size_t e = 0; e < 3; ++e) {
          const EdgeLink& l = ttop_.link({t, e});
          if (l.kind != EdgeLink::Kind::paired) continue;
          for (auto& [v, pz] : per_tri_[l.partner.polygon])
            if (auto y = through_edge(t, z, e, l.partner.polygon, pz)) {
              double w = std::abs(*y - z);
              g[id].push_back({v, w});
              g[v].push_back({id, w});
            }
        }
      }
    };
    link_in(c.polygon, c.position);
    if (loc.kind == PointLocation::Kind::edge) {
      const EdgeLink& l = top_.link({c.polygon, loc.index});
      if (l.kind == EdgeLink::Kind::paired)
        link_in(l.partner.polygon, top_.gluing({c.polygon, loc.index}).inverse().apply(c.position));
    }
    return id;
  }

  // Position of (t2, z2) developed into t's frame when the segment from z meets edge e; nullopt otherwise.
  std::optional<Point> through_edge(std::size_t t, Point z, std::size_t e, std::size_t t2, Point z2) const {
    const EdgeLink& l = ttop_.link({t, e});
    if (l.kind != EdgeLink::Kind::paired || l.partner.polygon != t2) return std::nullopt;
    Point y = ttop_.gluing({t, e}).apply(z2);
    const Polygon& P = tri_.surface.polygons[t];
    auto h = line_intersection(z, y, P.edge_start(e), P.edge_end(e));
    if (!h || h->first < 0 || h->first > 1 || h->second < 0 || h->second > 1) return std::nullopt;
    return y;
  }

  HalfTranslationSurface s_;
  Topology top_;
  Triangulation tri_;
  Topology ttop_;
  std::size_t nodes_ = 0;
  std::vector<std::array<std::pair<std::vector<std::size_t>, int>, 3>> edge_nodes_;
  std::vector<std::vector<std::pair<std::size_t, Point>>> per_tri_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
  std::vector<std::size_t> vnode_;
};

inline double surface_diameter_bound(const HalfTranslationSurface& s) {
  double d = 0;
  for (auto& P : s.polygons)
    for (auto a : P.vertices)
      for (auto b : P.vertices) d = std::max(d, std::abs(a - b));
  return d;
}

}  // namespace hts::oracle
