#pragma once

#include "dvcm/polytope.hpp"
#include "dvcm/tensor.hpp"
#include "dvcm/vec3.hpp"

namespace dvcm {

struct MomentResult {
  SymTensor3 second_moment;  // ∫ (x - base) ⊗ (x - base) dx, signed
  double signed_volume = 0.0;
};

// Exact second moment of a tetrahedron about `base`, carrying the sign of the
// orientation det(b-a, c-a, d-a). Degenerate tetrahedra contribute zero.
MomentResult tetra_second_moment(const Vec3& a, const Vec3& b, const Vec3& c,
                                 const Vec3& d, const Vec3& base);

// Signed tetrahedral decomposition of the cell: each boundary triangle joined
// to the vertex centroid. Empty polytope -> zero.
MomentResult polytope_moment(const ConvexPolytope& poly, const Vec3& base);

SymTensor3 polytope_second_moment(const ConvexPolytope& poly, const Vec3& base);

}  // namespace dvcm
