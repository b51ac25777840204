#include "dvcm/moments.hpp"

namespace dvcm {

MomentResult tetra_second_moment(const Vec3& a, const Vec3& b, const Vec3& c,
                                 const Vec3& d, const Vec3& base) {
  const Vec3 u0 = a - base;
  const Vec3 u1 = b - base;
  const Vec3 u2 = c - base;
  const Vec3 u3 = d - base;

  const double vol = dot(u1 - u0, cross(u2 - u0, u3 - u0)) / 6.0;

  // ∫_T x⊗x dx = (V/20) [ Σ u_i⊗u_i + S⊗S ],  S = Σ u_i
  // (Dirichlet integrals over the reference simplex: ∫ λ_i² = 1/60,
  //  ∫ λ_i λ_j = 1/120, Jacobian 6V.)
  const Vec3 s = u0 + u1 + u2 + u3;
  SymTensor3 m = outer(u0) + outer(u1) + outer(u2) + outer(u3) + outer(s);
  m = m * (vol / 20.0);
  return {m, vol};
}

MomentResult polytope_moment(const ConvexPolytope& poly, const Vec3& base) {
  MomentResult acc;
  if (poly.empty()) return acc;
  const Vec3 apex = poly.vertex_centroid();
  for (const std::vector<int>& ring : poly.faces) {
    for (std::size_t k = 1; k + 1 < ring.size(); ++k) {
      const MomentResult t = tetra_second_moment(
          apex, poly.vertices[ring[0]], poly.vertices[ring[k]],
          poly.vertices[ring[k + 1]], base);
      acc.second_moment += t.second_moment;
      acc.signed_volume += t.signed_volume;
    }
  }
  return acc;
}

SymTensor3 polytope_second_moment(const ConvexPolytope& poly, const Vec3& base) {
  return polytope_moment(poly, base).second_moment;
}

}  // namespace dvcm
