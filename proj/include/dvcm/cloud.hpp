#pragma once

#include <span>
#include <vector>

#include "dvcm/vec3.hpp"

namespace dvcm {

struct Aabb {
  Vec3 lo{0, 0, 0};
  Vec3 hi{0, 0, 0};

  static Aabb of(std::span<const Vec3> pts);
  void expand(const Vec3& p);
  Aabb inflated(double margin) const;
  Vec3 extent() const { return hi - lo; }
  double diagonal() const { return norm(hi - lo); }
  bool contains(const Vec3& p) const {
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y && p.z >= lo.z &&
           p.z <= hi.z;
  }
  // Squared distance from p to the box (0 inside).
  double dist2_to(const Vec3& p) const;
};

// Sites with non-negative squared-length weights. Construction canonicalizes:
// rejects non-finite coordinates and negative weights, merges sites that
// coincide within 1e-12 * diameter keeping the lowest index and the minimum
// weight. Site order follows the surviving original indices.
class WeightedPointCloud {
 public:
  WeightedPointCloud() = default;
  WeightedPointCloud(std::vector<Vec3> sites, std::vector<double> weights);

  static WeightedPointCloud unweighted(std::vector<Vec3> sites);

  const std::vector<Vec3>& sites() const { return sites_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return sites_.size(); }
  bool empty() const { return sites_.empty(); }
  const Aabb& bounds() const { return bounds_; }
  double diameter() const { return bounds_.diagonal(); }
  double min_weight() const { return min_weight_; }
  std::size_t merged_duplicates() const { return merged_; }

  bool operator==(const WeightedPointCloud& o) const {
    return sites_ == o.sites_ && weights_ == o.weights_;
  }

 private:
  std::vector<Vec3> sites_;
  std::vector<double> weights_;
  Aabb bounds_;
  double min_weight_ = 0.0;
  std::size_t merged_ = 0;
};

struct PowerQueryResult {
  double value = 0.0;  // sqrt(min_p |x-p|^2 + w_p)
  int index = -1;      // lowest index attaining the minimum
};

// Linear-scan evaluation; throws on an empty cloud. The kd-tree variant in
// distlike.hpp is the fast path.
PowerQueryResult power_distance(const WeightedPointCloud& cloud, const Vec3& x);

}  // namespace dvcm
