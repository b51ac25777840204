#pragma once

#include <random>

#include "dvcm/polytope.hpp"
#include "dvcm/tensor.hpp"
#include "dvcm/vec3.hpp"

namespace dvcm::testutil {

inline Vec3 random_in_box(std::mt19937_64& rng, const Vec3& lo, const Vec3& hi) {
  std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y), uz(lo.z, hi.z);
  return {ux(rng), uy(rng), uz(rng)};
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v{g(rng), g(rng), g(rng)};
  while (norm(v) < 1e-6) v = {g(rng), g(rng), g(rng)};
  return normalized(v);
}

struct Rotation {
  Vec3 r0, r1, r2;  // rows
  Vec3 apply(const Vec3& v) const { return {dot(r0, v), dot(r1, v), dot(r2, v)}; }
};

inline Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  double q0 = g(rng), q1 = g(rng), q2 = g(rng), q3 = g(rng);
  const double n = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  q0 /= n; q1 /= n; q2 /= n; q3 /= n;
  return {{1 - 2 * (q2 * q2 + q3 * q3), 2 * (q1 * q2 - q0 * q3), 2 * (q1 * q3 + q0 * q2)},
          {2 * (q1 * q2 + q0 * q3), 1 - 2 * (q1 * q1 + q3 * q3), 2 * (q2 * q3 - q0 * q1)},
          {2 * (q1 * q3 - q0 * q2), 2 * (q2 * q3 + q0 * q1), 1 - 2 * (q1 * q1 + q2 * q2)}};
}

// Axis-aligned box as a ConvexPolytope with outward-oriented quads.
inline ConvexPolytope make_box(const Vec3& lo, const Vec3& hi) {
  ConvexPolytope box;
  for (double z : {lo.z, hi.z}) {
    for (double y : {lo.y, hi.y}) {
      for (double x : {lo.x, hi.x}) box.vertices.push_back({x, y, z});
    }
  }
  // Index layout: bit0 = x, bit1 = y, bit2 = z.
  box.faces = {
      {0, 2, 3, 1},  // z = lo
      {4, 5, 7, 6},  // z = hi
      {0, 1, 5, 4},  // y = lo
      {2, 6, 7, 3},  // y = hi
      {0, 4, 6, 2},  // x = lo
      {1, 3, 7, 5},  // x = hi
  };
  box.provenance = {
      {{0, 0, -1}, -lo.z}, {{0, 0, 1}, hi.z}, {{0, -1, 0}, -lo.y},
      {{0, 1, 0}, hi.y},   {{-1, 0, 0}, -lo.x}, {{1, 0, 0}, hi.x},
  };
  return box;
}

}  // namespace dvcm::testutil
