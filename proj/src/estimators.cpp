#include "dvcm/estimators.hpp"

#include <cmath>
#include <stdexcept>

#include "dvcm/parallel.hpp"

namespace dvcm {

std::vector<SiteEstimate> estimate_from_field(const VcmField& field,
                                              std::span<const Vec3> points, double r,
                                              double threshold, unsigned threads) {
  bool all_zero = true;
  for (const SymTensor3& t : field.tensors) {
    if (t.trace() > 0.0) { all_zero = false; break; }
  }
  if (all_zero) throw std::runtime_error("estimate: tensor field is identically zero");

  std::vector<SiteEstimate> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      SiteEstimate& e = out[i];
      e.point = points[i];
      const SymTensor3 t = convolve(field, ProbeKernel::ball(points[i], r));
      const double tr = t.trace();
      if (!(tr > 0.0)) {
        e.valid = false;
        continue;
      }
      const SymEigen eig = sym_eigen(t);
      e.eigenvalues = eig.values;
      e.normal = eig.vectors[0];
      e.dir_min = eig.vectors[1];
      e.dir_max = eig.vectors[2];
      e.mean_abs_curvature = eig.values[1] + eig.values[2];
      e.feature_score = eig.values[1] / (eig.values[0] + eig.values[1] + eig.values[2]);
      e.valid = true;
      if (threshold >= 0.0) e.is_feature = e.feature_score >= threshold;
    }
  });
  return out;
}

std::vector<SiteEstimate> estimate_all(std::span<const Vec3> points,
                                       const EstimatorParams& params, const PolyBall& ball) {
  if (points.empty()) throw std::invalid_argument("estimate_all: no points");
  if (!(params.R > 0.0) || !(params.r > 0.0)) {
    throw std::invalid_argument("estimate_all: R and r must be positive");
  }
  if (params.distance != DistanceKind::plain &&
      static_cast<std::size_t>(params.k) > points.size()) {
    throw std::invalid_argument("estimate_all: k exceeds point count");
  }
  const DistanceLikeSpec spec{params.distance, params.k};
  const WeightedPointCloud sites = build_sites(points, spec, nullptr, params.threads);
  const VcmField field = compute_field(sites, params.R, ball, params.threads);
  return estimate_from_field(field, points, params.r, params.threshold, params.threads);
}

std::vector<SiteEstimate> estimate_all(std::span<const Vec3> points,
                                       const EstimatorParams& params) {
  return estimate_all(points, params, polyball_by_tag(params.polyball));
}

void orient_normals(std::vector<SiteEstimate>& estimates, OrientReference ref,
                    const Vec3& viewpoint) {
  if (ref == OrientReference::none) return;
  Vec3 centroid{};
  if (ref == OrientReference::outward_from_centroid) {
    std::size_t n = 0;
    for (const SiteEstimate& e : estimates) {
      if (e.valid) { centroid += e.point; ++n; }
    }
    if (n > 0) centroid = centroid / static_cast<double>(n);
  }
  for (SiteEstimate& e : estimates) {
    if (!e.valid) continue;
    const Vec3 outward = ref == OrientReference::outward_from_centroid
                             ? e.point - centroid
                             : viewpoint - e.point;
    if (dot(e.normal, outward) < 0.0) e.normal = -e.normal;
  }
}

std::vector<char> detect_features(std::span<const SiteEstimate> estimates, double threshold) {
  std::vector<char> mask(estimates.size(), 0);
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    mask[i] = estimates[i].valid && estimates[i].feature_score >= threshold ? 1 : 0;
  }
  return mask;
}

}  // namespace dvcm
