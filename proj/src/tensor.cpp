#include "dvcm/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace dvcm {

double SymTensor3::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i == 0) return j == 0 ? xx : (j == 1 ? xy : xz);
  if (i == 1) return j == 1 ? yy : yz;
  return zz;
}

double frobenius_norm(const SymTensor3& t) {
  return std::sqrt(t.xx * t.xx + t.yy * t.yy + t.zz * t.zz +
                   2.0 * (t.xy * t.xy + t.xz * t.xz + t.yz * t.yz));
}

SymTensor3 rotate_tensor(const SymTensor3& t, const Vec3& r0, const Vec3& r1,
                         const Vec3& r2) {
  const Vec3 t0 = t.apply(r0);
  const Vec3 t1 = t.apply(r1);
  const Vec3 t2 = t.apply(r2);
  return {dot(r0, t0), dot(r0, t1), dot(r0, t2), dot(r1, t1), dot(r1, t2), dot(r2, t2)};
}

namespace {

void jacobi_rotate(double a[3][3], double v[3][3], int p, int q) {
  const double apq = a[p][q];
  if (apq == 0.0) return;
  const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const double tau = s / (1.0 + c);

  const double h = t * apq;
  a[p][p] -= h;
  a[q][q] += h;
  a[p][q] = a[q][p] = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (i == p || i == q) continue;
    const double aip = a[i][p], aiq = a[i][q];
    a[i][p] = a[p][i] = aip - s * (aiq + tau * aip);
    a[i][q] = a[q][i] = aiq + s * (aip - tau * aiq);
  }
  for (int i = 0; i < 3; ++i) {
    const double vip = v[i][p], viq = v[i][q];
    v[i][p] = vip - s * (viq + tau * vip);
    v[i][q] = viq + s * (vip - tau * viq);
  }
}

}  // namespace

SymEigen sym_eigen(const SymTensor3& t) {
  double a[3][3] = {{t.xx, t.xy, t.xz}, {t.xy, t.yy, t.yz}, {t.xz, t.yz, t.zz}};
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  const double scale = std::max(1.0, frobenius_norm(t));
  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::sqrt(a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2]);
    if (off <= 1e-15 * scale) break;
    jacobi_rotate(a, v, 0, 1);
    jacobi_rotate(a, v, 0, 2);
    jacobi_rotate(a, v, 1, 2);
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (a[i][i] != a[j][j]) return a[i][i] > a[j][j];
    return i < j;
  });

  SymEigen out;
  for (int k = 0; k < 3; ++k) {
    const int c = order[k];
    Vec3 vec{v[0][c], v[1][c], v[2][c]};
    vec = normalized(vec);
    int lead = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(vec[i]) > std::abs(vec[lead])) lead = i;
    }
    if (vec[lead] < 0.0) vec = -vec;
    out.values[k] = a[c][c];
    out.vectors[k] = vec;
  }
  return out;
}

SymTensor3 pairwise_sum(std::span<const SymTensor3> terms) {
  const std::size_t n = terms.size();
  if (n == 0) return {};
  if (n <= 8) {
    SymTensor3 acc = terms[0];
    for (std::size_t i = 1; i < n; ++i) acc += terms[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(terms.subspan(0, half)) + pairwise_sum(terms.subspan(half));
}

}  // namespace dvcm
