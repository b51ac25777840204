#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "dvcm/distlike.hpp"
#include "dvcm/vcm.hpp"

namespace dvcm {

// Per-point output of the probe-convolved tensor spectrum. eigenvalues are
// descending; `normal` is the leading eigenvector, dir_min/dir_max the second
// and third (minimal and maximal principal directions). Curvature values are
// relative (a common unstated constant), not calibrated.
struct SiteEstimate {
  Vec3 point{};
  std::array<double, 3> eigenvalues{};  // λ0 >= λ1 >= λ2
  Vec3 normal{};
  Vec3 dir_min{};
  Vec3 dir_max{};
  double mean_abs_curvature = 0.0;  // λ1 + λ2
  double feature_score = 0.0;       // λ1 / (λ0 + λ1 + λ2)
  bool is_feature = false;
  bool valid = false;  // false when the probe support is empty (zero tensor)
};

struct EstimatorParams {
  DistanceKind distance = DistanceKind::witnessed_k;
  int k = 30;
  double R = 0.0;  // offset radius, absolute length
  double r = 0.0;  // probe radius, absolute length
  double threshold = -1.0;  // feature threshold in [0,1]; negative: skip flagging
  std::string polyball = "dodeca";
  unsigned threads = 1;
};

// Build the distance-like site set, compute the tensor field, and probe it
// with a ball indicator at every input point. Points whose probe support is
// empty produce an invalid estimate, never NaNs. Throws when the whole field
// is zero.
std::vector<SiteEstimate> estimate_all(std::span<const Vec3> points,
                                       const EstimatorParams& params);
std::vector<SiteEstimate> estimate_all(std::span<const Vec3> points,
                                       const EstimatorParams& params, const PolyBall& ball);

// Probe an existing field at the given points.
std::vector<SiteEstimate> estimate_from_field(const VcmField& field,
                                              std::span<const Vec3> points, double r,
                                              double threshold, unsigned threads = 1);

enum class OrientReference { none, outward_from_centroid, viewpoint };

// Eigenvectors carry only a deterministic sign convention; flip normals to
// satisfy the chosen reference. `none` leaves them untouched.
void orient_normals(std::vector<SiteEstimate>& estimates, OrientReference ref,
                    const Vec3& viewpoint = {});

// mask[i] = feature_score >= T for valid estimates, false otherwise.
std::vector<char> detect_features(std::span<const SiteEstimate> estimates, double threshold);

}  // namespace dvcm
