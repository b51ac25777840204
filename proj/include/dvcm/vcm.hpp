#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dvcm/cloud.hpp"
#include "dvcm/kdtree.hpp"
#include "dvcm/polyball.hpp"
#include "dvcm/tensor.hpp"

namespace dvcm {

// Non-negative probe localizing the tensor measure. The indicator of a ball
// is the experimental default; the Lipschitz hat max(0, 1 - |x-q|/r) covers
// the bounded-Lipschitz setting. radius may be +inf for a full-support
// indicator.
struct ProbeKernel {
  enum class Kind { ball_indicator, lipschitz_hat };
  Kind kind = Kind::ball_indicator;
  Vec3 center{};
  double radius = 1.0;

  static ProbeKernel ball(const Vec3& q, double r) {
    return {Kind::ball_indicator, q, r};
  }
  static ProbeKernel hat(const Vec3& q, double r) { return {Kind::lipschitz_hat, q, r}; }

  double operator()(const Vec3& p) const;
};

// Per-site covariance tensors of the offset cells, plus the site index used
// to enumerate probe supports.
struct VcmField {
  WeightedPointCloud cloud;
  double R = 0.0;
  std::string polyball_tag;
  std::vector<SymTensor3> tensors;
  std::size_t empty_cells = 0;
  KdTree index;

  bool bitwise_equal_tensors(const VcmField& o) const;
};

// Bounded cell construction followed by exact second-moment integration,
// one tensor per site. Warns on stderr when more than 10% of the cells come
// out empty (weights above R^2 leave no ball to clip).
VcmField compute_field(const WeightedPointCloud& cloud, double R, const PolyBall& ball,
                       unsigned threads = 1);

// Σ_p χ(p) · M_p over the probe support, pairwise-summed in ascending site
// order.
SymTensor3 convolve(const VcmField& field, const ProbeKernel& probe);

struct McVcmEstimate {
  SymTensor3 tensor;          // Monte-Carlo estimate of the tensor measure
  SymTensor3 component_se;    // standard error of each entry
  double trace_se = 0.0;      // standard error of the trace
  double frobenius_se = 0.0;  // sqrt(Σ entry SE², off-diagonals twice)
  std::size_t samples = 0;
  std::size_t accepted = 0;
};

// Rejection sampling of the tensor measure over the sublevel set of the
// power distance: at an accepted sample the integrand is
// (x - p) ⊗ (x - p) · χ(p) with p the argmin site. Deterministic for a fixed
// seed regardless of the thread count (fixed chunking). Throws when no
// sample lands in the sublevel set.
McVcmEstimate mc_oracle_vcm(const WeightedPointCloud& cloud, double R,
                            const ProbeKernel& probe, std::size_t n_samples,
                            std::uint64_t seed, unsigned threads = 1);

// Tabular serialization: site_index,x,y,z,m11,m12,m13,m22,m23,m33.
void write_field_csv(std::ostream& os, const VcmField& field);
void write_field_binary(std::ostream& os, const VcmField& field);

struct FieldRecords {
  std::vector<std::uint64_t> site_index;
  std::vector<Vec3> sites;
  std::vector<SymTensor3> tensors;
};
FieldRecords read_field_binary(std::istream& is);

}  // namespace dvcm
