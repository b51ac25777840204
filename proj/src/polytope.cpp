#include "dvcm/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <sstream>

#include "dvcm/moments.hpp"

namespace dvcm {

double ConvexPolytope::diameter() const {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices[0], hi = vertices[0];
  for (const Vec3& v : vertices) {
    lo.x = std::min(lo.x, v.x); lo.y = std::min(lo.y, v.y); lo.z = std::min(lo.z, v.z);
    hi.x = std::max(hi.x, v.x); hi.y = std::max(hi.y, v.y); hi.z = std::max(hi.z, v.z);
  }
  return norm(hi - lo);
}

Vec3 ConvexPolytope::vertex_centroid() const {
  Vec3 c{};
  for (const Vec3& v : vertices) c += v;
  return vertices.empty() ? c : c / static_cast<double>(vertices.size());
}

bool ConvexPolytope::contains(const Vec3& x, double tol) const {
  if (empty()) return false;
  for (const HalfSpace& h : provenance) {
    if (h.signed_distance(x) > tol) return false;
  }
  return true;
}

namespace {

constexpr double kRelTol = 1e-9;

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

}  // namespace

ConvexPolytope clip(const ConvexPolytope& poly, const HalfSpace& h) {
  if (poly.empty()) return {};

  const double eps = kRelTol * poly.diameter();
  const std::size_t nv = poly.vertices.size();
  std::vector<double> d(nv);
  std::size_t n_out = 0, n_in = 0;
  for (std::size_t i = 0; i < nv; ++i) {
    d[i] = h.signed_distance(poly.vertices[i]);
    if (d[i] > eps) ++n_out;
    else if (d[i] < -eps) ++n_in;
  }

  if (n_out == 0) {
    ConvexPolytope out = poly;
    out.provenance.push_back(h);
    return out;
  }
  if (n_in == 0) return {};

  ConvexPolytope out;
  out.provenance = poly.provenance;
  out.provenance.push_back(h);

  // Old vertex index -> new index, lazily assigned so dropped vertices vanish.
  std::vector<int> remap(nv, -1);
  auto keep_vertex = [&](int i) {
    if (remap[i] < 0) {
      remap[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(poly.vertices[i]);
    }
    return remap[i];
  };
  // One intersection point per crossed edge, shared by both incident faces.
  std::map<EdgeKey, int> edge_point;
  auto crossing_vertex = [&](int i, int j) {
    EdgeKey key{std::min(i, j), std::max(i, j)};
    auto it = edge_point.find(key);
    if (it != edge_point.end()) return it->second;
    const double da = d[key.a], db = d[key.b];
    const double t = da / (da - db);
    const Vec3 p = poly.vertices[key.a] + t * (poly.vertices[key.b] - poly.vertices[key.a]);
    const int idx = static_cast<int>(out.vertices.size());
    out.vertices.push_back(p);
    edge_point.emplace(key, idx);
    return idx;
  };

  std::vector<int> cap;  // vertices on the cut plane (new indices)
  auto note_cap = [&](int new_idx) {
    if (std::find(cap.begin(), cap.end(), new_idx) == cap.end()) cap.push_back(new_idx);
  };

  for (const std::vector<int>& ring : poly.faces) {
    std::vector<int> clipped;
    const std::size_t m = ring.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int a = ring[k];
      const int b = ring[(k + 1) % m];
      const bool a_in = d[a] <= eps;
      const bool b_in = d[b] <= eps;
      if (a_in && b_in) {
        clipped.push_back(keep_vertex(b));
      } else if (a_in && !b_in) {
        if (d[a] < -eps) clipped.push_back(crossing_vertex(a, b));
      } else if (!a_in && b_in) {
        if (d[b] < -eps) clipped.push_back(crossing_vertex(a, b));
        clipped.push_back(keep_vertex(b));
      }
    }
    // Drop zero-length steps introduced by on-plane vertices.
    std::vector<int> dedup;
    for (int idx : clipped) {
      if (dedup.empty() || dedup.back() != idx) dedup.push_back(idx);
    }
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    if (dedup.size() < 3) continue;
    out.faces.push_back(std::move(dedup));
  }

  // Everything resting on the plane bounds the new cap face.
  for (const auto& [key, idx] : edge_point) note_cap(idx);
  for (std::size_t i = 0; i < nv; ++i) {
    if (std::abs(d[i]) <= eps && remap[i] >= 0) note_cap(remap[i]);
  }

  if (cap.size() >= 3) {
    Vec3 c{};
    for (int idx : cap) c += out.vertices[idx];
    c = c / static_cast<double>(cap.size());
    const Vec3 u = any_orthogonal(h.n);
    const Vec3 v = cross(h.n, u);
    std::vector<std::pair<double, int>> order;
    order.reserve(cap.size());
    for (int idx : cap) {
      const Vec3 r = out.vertices[idx] - c;
      order.emplace_back(std::atan2(dot(r, v), dot(r, u)), idx);
    }
    std::sort(order.begin(), order.end());
    std::vector<int> ring;
    ring.reserve(order.size());
    for (const auto& [angle, idx] : order) ring.push_back(idx);
    out.faces.push_back(std::move(ring));
  }

  if (out.vertices.size() < 4 || out.faces.size() < 4) return {};
  return out;
}

double polytope_volume(const ConvexPolytope& poly) {
  return polytope_moment(poly, poly.vertex_centroid()).signed_volume;
}

std::string polytope_check(const ConvexPolytope& poly) {
  std::ostringstream err;
  if (poly.empty()) {
    if (!poly.faces.empty()) err << "empty polytope with faces; ";
    return err.str();
  }
  const double diam = poly.diameter();
  const double tol = kRelTol * diam;

  for (const Vec3& v : poly.vertices) {
    if (!is_finite(v)) err << "non-finite vertex; ";
  }

  const Vec3 center = poly.vertex_centroid();
  std::map<EdgeKey, int> edge_use;       // undirected usage count
  std::map<std::pair<int, int>, int> directed;  // directed usage count
  for (std::size_t f = 0; f < poly.faces.size(); ++f) {
    const auto& ring = poly.faces[f];
    if (ring.size() < 3) {
      err << "face " << f << " has <3 vertices; ";
      continue;
    }
    // Newell normal
    Vec3 n{};
    Vec3 fc{};
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const Vec3& a = poly.vertices[ring[k]];
      const Vec3& b = poly.vertices[ring[(k + 1) % ring.size()]];
      n += cross(a, b);
      fc += a;
    }
    fc = fc / static_cast<double>(ring.size());
    n = normalized(n);
    for (int idx : ring) {
      if (std::abs(dot(n, poly.vertices[idx] - fc)) > tol) {
        err << "face " << f << " not planar; ";
        break;
      }
    }
    if (dot(n, fc - center) < 0.0) err << "face " << f << " inward-oriented; ";
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const int a = ring[k];
      const int b = ring[(k + 1) % ring.size()];
      if (a == b) err << "face " << f << " repeats vertex; ";
      ++edge_use[{std::min(a, b), std::max(a, b)}];
      ++directed[{a, b}];
    }
  }
  for (const auto& [e, cnt] : edge_use) {
    if (cnt != 2) err << "edge (" << e.a << "," << e.b << ") used " << cnt << "x; ";
  }
  for (const auto& [e, cnt] : directed) {
    if (cnt != 1) err << "directed edge used " << cnt << "x; ";
  }
  const std::int64_t V = static_cast<std::int64_t>(poly.vertices.size());
  const std::int64_t E = static_cast<std::int64_t>(edge_use.size());
  const std::int64_t F = static_cast<std::int64_t>(poly.faces.size());
  if (V - E + F != 2) err << "Euler V-E+F=" << (V - E + F) << "; ";
  return err.str();
}

}  // namespace dvcm
