#include "dvcm/polyball.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace dvcm {

namespace {

ConvexPolytope icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  ConvexPolytope ico;
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-phi, phi}) {
      ico.vertices.push_back(normalized(Vec3{0.0, s1, s2}));
      ico.vertices.push_back(normalized(Vec3{s1, s2, 0.0}));
      ico.vertices.push_back(normalized(Vec3{s2, 0.0, s1}));
    }
  }
  // Faces are the triples of mutually nearest vertices.
  double edge2 = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < ico.vertices.size(); ++i) {
    for (std::size_t j = i + 1; j < ico.vertices.size(); ++j) {
      edge2 = std::min(edge2, dist2(ico.vertices[i], ico.vertices[j]));
    }
  }
  const double tol = 1e-9;
  auto adjacent = [&](int i, int j) {
    return std::abs(dist2(ico.vertices[i], ico.vertices[j]) - edge2) < tol;
  };
  const int n = static_cast<int>(ico.vertices.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!adjacent(i, j)) continue;
      for (int k = j + 1; k < n; ++k) {
        if (!adjacent(i, k) || !adjacent(j, k)) continue;
        std::vector<int> tri = {i, j, k};
        const Vec3 nrm = cross(ico.vertices[j] - ico.vertices[i],
                               ico.vertices[k] - ico.vertices[i]);
        const Vec3 fc = (ico.vertices[i] + ico.vertices[j] + ico.vertices[k]) / 3.0;
        if (dot(nrm, fc) < 0.0) std::swap(tri[1], tri[2]);
        ico.faces.push_back(std::move(tri));
      }
    }
  }
  return ico;
}

ConvexPolytope subdivide_on_sphere(const ConvexPolytope& mesh) {
  ConvexPolytope out;
  out.vertices = mesh.vertices;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const int idx = static_cast<int>(out.vertices.size());
    out.vertices.push_back(normalized(out.vertices[key.first] + out.vertices[key.second]));
    midpoint.emplace(key, idx);
    return idx;
  };
  for (const auto& tri : mesh.faces) {
    const int a = tri[0], b = tri[1], c = tri[2];
    const int ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    out.faces.push_back({a, ab, ca});
    out.faces.push_back({ab, b, bc});
    out.faces.push_back({ca, bc, c});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

std::vector<HalfSpace> face_halfspaces(const ConvexPolytope& poly) {
  std::vector<HalfSpace> hs;
  hs.reserve(poly.faces.size());
  for (const auto& ring : poly.faces) {
    Vec3 n{};
    Vec3 fc{};
    for (std::size_t k = 0; k < ring.size(); ++k) {
      n += cross(poly.vertices[ring[k]], poly.vertices[ring[(k + 1) % ring.size()]]);
      fc += poly.vertices[ring[k]];
    }
    n = normalized(n);
    fc = fc / static_cast<double>(ring.size());
    hs.push_back({n, dot(n, fc)});
  }
  return hs;
}

PolyBall finish(std::string tag, ConvexPolytope poly) {
  PolyBall ball;
  ball.tag = std::move(tag);
  ball.unit_halfspaces = face_halfspaces(poly);
  poly.provenance = ball.unit_halfspaces;
  ball.unit_polytope = std::move(poly);
  ball.circumradius = 0.0;
  for (const Vec3& v : ball.unit_polytope.vertices) {
    ball.circumradius = std::max(ball.circumradius, norm(v));
  }
  return ball;
}

PolyBall make_icosphere(int level) {
  ConvexPolytope mesh = icosahedron();
  for (int l = 0; l < level; ++l) mesh = subdivide_on_sphere(mesh);
  return finish("ico" + std::to_string(level), std::move(mesh));
}

// Dual of the icosahedron, rescaled so each face plane is tangent to the unit
// sphere (inradius 1, faces at offset exactly 1).
PolyBall make_dodecahedron() {
  const ConvexPolytope ico = icosahedron();
  ConvexPolytope dode;
  dode.vertices.reserve(ico.faces.size());
  for (const auto& tri : ico.faces) {
    dode.vertices.push_back(
        (ico.vertices[tri[0]] + ico.vertices[tri[1]] + ico.vertices[tri[2]]) / 3.0);
  }
  for (std::size_t vi = 0; vi < ico.vertices.size(); ++vi) {
    const Vec3 axis = ico.vertices[vi];
    std::vector<int> around;
    for (std::size_t f = 0; f < ico.faces.size(); ++f) {
      const auto& tri = ico.faces[f];
      if (std::find(tri.begin(), tri.end(), static_cast<int>(vi)) != tri.end()) {
        around.push_back(static_cast<int>(f));
      }
    }
    Vec3 c{};
    for (int f : around) c += dode.vertices[f];
    c = c / static_cast<double>(around.size());
    const Vec3 u = any_orthogonal(axis);
    const Vec3 v = cross(axis, u);
    std::sort(around.begin(), around.end(), [&](int f, int g) {
      const Vec3 rf = dode.vertices[f] - c;
      const Vec3 rg = dode.vertices[g] - c;
      return std::atan2(dot(rf, v), dot(rf, u)) < std::atan2(dot(rg, v), dot(rg, u));
    });
    dode.faces.push_back(std::move(around));
  }
  // Pentagon centers sit at distance |centroid|·cos(0) along the vertex axis;
  // rescale so the tangency offset is exactly 1.
  const double offset = dot(ico.vertices[0],
                            [&] {
                              Vec3 c{};
                              for (int f : dode.faces[0]) c += dode.vertices[f];
                              return c / static_cast<double>(dode.faces[0].size());
                            }());
  for (Vec3& v : dode.vertices) v = v / offset;

  PolyBall ball = finish("dodeca", std::move(dode));
  for (HalfSpace& h : ball.unit_halfspaces) h.b = 1.0;  // tangent by construction
  ball.unit_polytope.provenance = ball.unit_halfspaces;
  return ball;
}

}  // namespace

const PolyBall& polyball_by_tag(std::string_view tag) {
  static std::mutex mu;
  static std::map<std::string, PolyBall, std::less<>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(tag);
  if (it != cache.end()) return it->second;

  if (tag == "dodeca") {
    return cache.emplace("dodeca", make_dodecahedron()).first->second;
  }
  if (tag.size() == 4 && tag.substr(0, 3) == "ico" && tag[3] >= '0' && tag[3] <= '5') {
    const int level = tag[3] - '0';
    return cache.emplace(std::string(tag), make_icosphere(level)).first->second;
  }
  throw std::invalid_argument("unknown polyball model: " + std::string(tag));
}

std::vector<HalfSpace> make_polyball(const PolyBall& ball, double radius, const Vec3& center) {
  if (!(radius > 0.0)) throw std::invalid_argument("polyball radius must be positive");
  std::vector<HalfSpace> hs = ball.unit_halfspaces;
  for (HalfSpace& h : hs) h.b = radius * h.b + dot(h.n, center);
  return hs;
}

ConvexPolytope polyball_seed(const PolyBall& ball, double radius, const Vec3& center) {
  if (!(radius > 0.0)) throw std::invalid_argument("polyball radius must be positive");
  ConvexPolytope poly = ball.unit_polytope;
  for (Vec3& v : poly.vertices) v = center + radius * v;
  poly.provenance = make_polyball(ball, radius, center);
  return poly;
}

PolyBall rotated_polyball(const PolyBall& ball, const Vec3& r0, const Vec3& r1,
                          const Vec3& r2) {
  auto rot = [&](const Vec3& v) { return Vec3{dot(r0, v), dot(r1, v), dot(r2, v)}; };
  PolyBall out = ball;
  out.tag = ball.tag + ":rotated";
  for (Vec3& v : out.unit_polytope.vertices) v = rot(v);
  for (HalfSpace& h : out.unit_halfspaces) h.n = rot(h.n);
  out.unit_polytope.provenance = out.unit_halfspaces;
  return out;
}

}  // namespace dvcm
