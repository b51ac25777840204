#pragma once

#include <string>
#include <vector>

#include "dvcm/vec3.hpp"

namespace dvcm {

// Closed half-space {x : n·x <= b} with unit normal n.
struct HalfSpace {
  Vec3 n;
  double b = 0.0;
  double signed_distance(const Vec3& x) const { return dot(n, x) - b; }
  bool contains(const Vec3& x, double tol = 0.0) const { return signed_distance(x) <= tol; }
};

// Bounded convex cell as a vertex/face incidence structure. Faces are
// outward-oriented vertex index rings. `provenance` records every half-space
// applied while building the cell (seed faces plus clip planes), which is
// enough for exact membership tests.
struct ConvexPolytope {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;
  std::vector<HalfSpace> provenance;

  bool empty() const { return vertices.empty(); }
  double diameter() const;  // bounding-box diagonal
  Vec3 vertex_centroid() const;
  bool contains(const Vec3& x, double tol) const;
};

// Intersection with a half-space; empty intersections come back as the empty
// polytope, never as an error. New vertices land on the cut plane within
// 1e-9 * diameter.
ConvexPolytope clip(const ConvexPolytope& poly, const HalfSpace& h);

double polytope_volume(const ConvexPolytope& poly);

// Structural check used by tests and debug paths: planarity of every face
// ring, closed edge structure (each edge in exactly two faces, opposite
// orientation), Euler formula, outward orientation. Returns an empty string
// when the polytope is well-formed.
std::string polytope_check(const ConvexPolytope& poly);

}  // namespace dvcm
