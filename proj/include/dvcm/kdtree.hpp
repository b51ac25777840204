#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dvcm/cloud.hpp"
#include "dvcm/vec3.hpp"

namespace dvcm {

// Exact kd-tree over a fixed point set. All queries reproduce a linear scan
// bit-for-bit: distances are compared as squared doubles and ties always fall
// to the lower point index. Optional per-point weights enable power-distance
// argmin queries (nodes carry the subtree weight minimum for pruning).
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::span<const Vec3> pts, std::span<const double> weights = {});

  std::size_t size() const { return pts_.size(); }
  const Vec3& point(int i) const { return pts_[i]; }

  // k nearest neighbors ordered by (squared distance, index); `exclude`
  // removes one point (a query site itself) from candidacy.
  std::vector<int> knn(const Vec3& q, int k, int exclude = -1) const;

  // All indices with |p - q| <= r, ascending index order.
  std::vector<int> radius(const Vec3& q, double r) const;

  // argmin over i of |q - p_i|^2 + w_i; value is the squared form.
  std::pair<double, int> power_nearest(const Vec3& q) const;

 private:
  struct Node {
    Aabb box;
    int left = -1, right = -1;  // children, or -1 for leaves
    int begin = 0, end = 0;     // leaf range into order_
    double min_weight = 0.0;
  };

  int build(int begin, int end);
  void knn_rec(int node, const Vec3& q, int k, int exclude,
               std::vector<std::pair<double, int>>& heap) const;
  void radius_rec(int node, const Vec3& q, double r2, std::vector<int>& out) const;
  void power_rec(int node, const Vec3& q, std::pair<double, int>& best) const;

  std::vector<Vec3> pts_;
  std::vector<double> weights_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace dvcm
