#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dvcm/polytope.hpp"

namespace dvcm {

// Polyhedral stand-in for the unit ball used when clipping offset cells.
// Two families:
//   dodecahedron — 12 faces, circumscribed (every face plane tangent to the
//                  unit sphere, vertices outside it);
//   icosphere(L) — subdivided icosahedron with vertices on the unit sphere
//                  (inscribed), 20 * 4^L faces, L in [0, 5].
struct PolyBall {
  std::string tag;                        // "dodeca" or "ico<L>"
  std::vector<HalfSpace> unit_halfspaces;
  ConvexPolytope unit_polytope;
  double circumradius = 1.0;              // max vertex norm of the unit model
};

// Cached shared models; throws std::invalid_argument for an unknown tag.
const PolyBall& polyball_by_tag(std::string_view tag);

// Half-spaces of center + radius * B. radius must be > 0.
std::vector<HalfSpace> make_polyball(const PolyBall& ball, double radius, const Vec3& center);

// Vertex/face model of center + radius * B, used as the clipping seed.
ConvexPolytope polyball_seed(const PolyBall& ball, double radius, const Vec3& center);

// World-rotated copy (rows of the rotation matrix); used to keep cell
// construction equivariant under rigid motions of the input.
PolyBall rotated_polyball(const PolyBall& ball, const Vec3& row0, const Vec3& row1,
                          const Vec3& row2);

}  // namespace dvcm
