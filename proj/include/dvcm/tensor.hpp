#pragma once

#include <array>
#include <span>

#include "dvcm/vec3.hpp"

namespace dvcm {

// Symmetric 3x3 tensor, six independent entries.
struct SymTensor3 {
  double xx = 0.0, xy = 0.0, xz = 0.0, yy = 0.0, yz = 0.0, zz = 0.0;

  SymTensor3 operator+(const SymTensor3& o) const {
    return {xx + o.xx, xy + o.xy, xz + o.xz, yy + o.yy, yz + o.yz, zz + o.zz};
  }
  SymTensor3 operator-(const SymTensor3& o) const {
    return {xx - o.xx, xy - o.xy, xz - o.xz, yy - o.yy, yz - o.yz, zz - o.zz};
  }
  SymTensor3 operator*(double s) const {
    return {xx * s, xy * s, xz * s, yy * s, yz * s, zz * s};
  }
  SymTensor3& operator+=(const SymTensor3& o) {
    xx += o.xx; xy += o.xy; xz += o.xz; yy += o.yy; yz += o.yz; zz += o.zz;
    return *this;
  }
  bool operator==(const SymTensor3& o) const {
    return xx == o.xx && xy == o.xy && xz == o.xz && yy == o.yy && yz == o.yz && zz == o.zz;
  }

  double trace() const { return xx + yy + zz; }
  double entry(int i, int j) const;
  Vec3 apply(const Vec3& v) const {
    return {xx * v.x + xy * v.y + xz * v.z,
            xy * v.x + yy * v.y + yz * v.z,
            xz * v.x + yz * v.y + zz * v.z};
  }
};

inline SymTensor3 outer(const Vec3& v) {
  return {v.x * v.x, v.x * v.y, v.x * v.z, v.y * v.y, v.y * v.z, v.z * v.z};
}

// Symmetric part of a ⊗ b (a ⊗ b is asymmetric for a != b; moments only ever
// need the symmetrized combination a⊗b + b⊗a).
inline SymTensor3 sym_outer(const Vec3& a, const Vec3& b) {
  return {2.0 * a.x * b.x, a.x * b.y + a.y * b.x, a.x * b.z + a.z * b.x,
          2.0 * a.y * b.y, a.y * b.z + a.z * b.y, 2.0 * a.z * b.z};
}

double frobenius_norm(const SymTensor3& t);

// Q t Qᵀ for a rotation Q given by its rows (orthonormal).
SymTensor3 rotate_tensor(const SymTensor3& t, const Vec3& row0, const Vec3& row1,
                         const Vec3& row2);

struct SymEigen {
  std::array<double, 3> values;  // descending
  std::array<Vec3, 3> vectors;   // orthonormal; sign: leading |component| >= 0
};

// Cyclic Jacobi iteration: eigenvalues descending, eigenvectors orthonormal,
// each flipped so that its first largest-magnitude component is non-negative.
SymEigen sym_eigen(const SymTensor3& t);

// Numerically robust sum of many tensors: pairwise (tree) reduction in the
// given order. Deterministic for a fixed input order.
SymTensor3 pairwise_sum(std::span<const SymTensor3> terms);

}  // namespace dvcm
