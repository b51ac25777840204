#include "dvcm/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dvcm {

namespace {
constexpr int kLeafSize = 16;
}

KdTree::KdTree(std::span<const Vec3> pts, std::span<const double> weights)
    : pts_(pts.begin(), pts.end()) {
  if (!weights.empty()) {
    if (weights.size() != pts.size()) throw std::invalid_argument("weight count mismatch");
    weights_.assign(weights.begin(), weights.end());
  } else {
    weights_.assign(pts_.size(), 0.0);
  }
  order_.resize(pts_.size());
  for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<int>(i);
  if (!pts_.empty()) root_ = build(0, static_cast<int>(pts_.size()));
}

int KdTree::build(int begin, int end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.box.lo = node.box.hi = pts_[order_[begin]];
  node.min_weight = weights_[order_[begin]];
  for (int i = begin; i < end; ++i) {
    node.box.expand(pts_[order_[i]]);
    node.min_weight = std::min(node.min_weight, weights_[order_[i]]);
  }
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin > kLeafSize) {
    const Vec3 ext = node.box.extent();
    int axis = 0;
    if (ext.y > ext[axis]) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    const int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                       if (pts_[a][axis] != pts_[b][axis]) return pts_[a][axis] < pts_[b][axis];
                       return a < b;
                     });
    const int l = build(begin, mid);
    const int r = build(mid, end);
    nodes_[id].left = l;
    nodes_[id].right = r;
  }
  return id;
}

void KdTree::knn_rec(int ni, const Vec3& q, int k, int exclude,
                     std::vector<std::pair<double, int>>& heap) const {
  const Node& node = nodes_[ni];
  if (static_cast<int>(heap.size()) == k && node.box.dist2_to(q) > heap.front().first) {
    return;
  }
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      if (idx == exclude) continue;
      const std::pair<double, int> cand{dist2(q, pts_[idx]), idx};
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    return;
  }
  const double dl = nodes_[node.left].box.dist2_to(q);
  const double dr = nodes_[node.right].box.dist2_to(q);
  if (dl <= dr) {
    knn_rec(node.left, q, k, exclude, heap);
    knn_rec(node.right, q, k, exclude, heap);
  } else {
    knn_rec(node.right, q, k, exclude, heap);
    knn_rec(node.left, q, k, exclude, heap);
  }
}

std::vector<int> KdTree::knn(const Vec3& q, int k, int exclude) const {
  const int avail = static_cast<int>(pts_.size()) - (exclude >= 0 ? 1 : 0);
  if (k < 1 || k > avail) throw std::invalid_argument("knn: k out of range");
  std::vector<std::pair<double, int>> heap;
  heap.reserve(k);
  knn_rec(root_, q, k, exclude, heap);
  std::sort_heap(heap.begin(), heap.end());
  std::vector<int> out;
  out.reserve(heap.size());
  for (const auto& [d2, idx] : heap) out.push_back(idx);
  return out;
}

void KdTree::radius_rec(int ni, const Vec3& q, double r2, std::vector<int>& out) const {
  const Node& node = nodes_[ni];
  if (node.box.dist2_to(q) > r2) return;
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      if (dist2(q, pts_[idx]) <= r2) out.push_back(idx);
    }
    return;
  }
  radius_rec(node.left, q, r2, out);
  radius_rec(node.right, q, r2, out);
}

std::vector<int> KdTree::radius(const Vec3& q, double r) const {
  std::vector<int> out;
  if (root_ < 0) return out;
  if (!std::isfinite(r)) {
    out = order_;
  } else {
    radius_rec(root_, q, r * r, out);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::power_rec(int ni, const Vec3& q, std::pair<double, int>& best) const {
  const Node& node = nodes_[ni];
  if (node.box.dist2_to(q) + node.min_weight > best.first) return;
  if (node.left < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const double v = dist2(q, pts_[idx]) + weights_[idx];
      if (v < best.first || (v == best.first && idx < best.second)) {
        best = {v, idx};
      }
    }
    return;
  }
  const double dl = nodes_[node.left].box.dist2_to(q) + nodes_[node.left].min_weight;
  const double dr = nodes_[node.right].box.dist2_to(q) + nodes_[node.right].min_weight;
  if (dl <= dr) {
    power_rec(node.left, q, best);
    power_rec(node.right, q, best);
  } else {
    power_rec(node.right, q, best);
    power_rec(node.left, q, best);
  }
}

std::pair<double, int> KdTree::power_nearest(const Vec3& q) const {
  if (root_ < 0) throw std::invalid_argument("power_nearest on empty tree");
  std::pair<double, int> best{std::numeric_limits<double>::infinity(), -1};
  power_rec(root_, q, best);
  return best;
}

}  // namespace dvcm
