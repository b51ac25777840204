#include "dvcm/cloud.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace dvcm {

Aabb Aabb::of(std::span<const Vec3> pts) {
  Aabb box;
  if (pts.empty()) return box;
  box.lo = box.hi = pts[0];
  for (const Vec3& p : pts) box.expand(p);
  return box;
}

void Aabb::expand(const Vec3& p) {
  lo.x = std::min(lo.x, p.x); lo.y = std::min(lo.y, p.y); lo.z = std::min(lo.z, p.z);
  hi.x = std::max(hi.x, p.x); hi.y = std::max(hi.y, p.y); hi.z = std::max(hi.z, p.z);
}

Aabb Aabb::inflated(double margin) const {
  return {lo - Vec3{margin, margin, margin}, hi + Vec3{margin, margin, margin}};
}

double Aabb::dist2_to(const Vec3& p) const {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    const double v = p[a];
    if (v < lo[a]) d2 += (lo[a] - v) * (lo[a] - v);
    else if (v > hi[a]) d2 += (v - hi[a]) * (v - hi[a]);
  }
  return d2;
}

namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey& o) const { return x == o.x && y == o.y && z == o.z; }
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int64_t v : {k.x, k.y, k.z}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

WeightedPointCloud::WeightedPointCloud(std::vector<Vec3> sites, std::vector<double> weights) {
  if (sites.size() != weights.size()) {
    throw std::invalid_argument("site/weight count mismatch");
  }
  for (const Vec3& p : sites) {
    if (!is_finite(p)) throw std::invalid_argument("non-finite site coordinate");
  }
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and non-negative");
    }
  }

  const Aabb box = Aabb::of(sites);
  const double tol = 1e-12 * box.diagonal();

  std::vector<int> group(sites.size(), -1);
  if (tol > 0.0) {
    std::unordered_map<CellKey, std::vector<int>, CellKeyHash> grid;
    grid.reserve(sites.size());
    auto key_of = [&](const Vec3& p) {
      return CellKey{static_cast<std::int64_t>(std::floor(p.x / tol)),
                     static_cast<std::int64_t>(std::floor(p.y / tol)),
                     static_cast<std::int64_t>(std::floor(p.z / tol))};
    };
    for (std::size_t i = 0; i < sites.size(); ++i) {
      const CellKey k = key_of(sites[i]);
      int rep = -1;
      for (std::int64_t dx = -1; dx <= 1 && rep < 0; ++dx) {
        for (std::int64_t dy = -1; dy <= 1 && rep < 0; ++dy) {
          for (std::int64_t dz = -1; dz <= 1 && rep < 0; ++dz) {
            auto it = grid.find(CellKey{k.x + dx, k.y + dy, k.z + dz});
            if (it == grid.end()) continue;
            for (int j : it->second) {
              if (dist2(sites[i], sites[j]) <= tol * tol) { rep = j; break; }
            }
          }
        }
      }
      if (rep < 0) {
        grid[k].push_back(static_cast<int>(i));
        group[i] = static_cast<int>(i);
      } else {
        group[i] = rep;
      }
    }
  } else {
    // Degenerate extent: only exact duplicates can merge.
    std::unordered_map<CellKey, int, CellKeyHash> seen;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      CellKey k;
      static_assert(sizeof(double) == sizeof(std::int64_t));
      std::memcpy(&k.x, &sites[i].x, sizeof(double));
      std::memcpy(&k.y, &sites[i].y, sizeof(double));
      std::memcpy(&k.z, &sites[i].z, sizeof(double));
      auto [it, inserted] = seen.emplace(k, static_cast<int>(i));
      group[i] = it->second;
    }
  }

  std::vector<int> new_index(sites.size(), -1);
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const int rep = group[i];
    if (new_index[rep] < 0 && rep == static_cast<int>(i)) {
      new_index[rep] = static_cast<int>(sites_.size());
      sites_.push_back(sites[i]);
      weights_.push_back(weights[i]);
    } else {
      const int slot = new_index[rep];
      weights_[slot] = std::min(weights_[slot], weights[i]);
      ++merged_;
    }
  }

  bounds_ = Aabb::of(sites_);
  min_weight_ = weights_.empty() ? 0.0 : *std::min_element(weights_.begin(), weights_.end());
}

WeightedPointCloud WeightedPointCloud::unweighted(std::vector<Vec3> sites) {
  std::vector<double> w(sites.size(), 0.0);
  return WeightedPointCloud(std::move(sites), std::move(w));
}

PowerQueryResult power_distance(const WeightedPointCloud& cloud, const Vec3& x) {
  if (cloud.empty()) throw std::invalid_argument("power_distance on empty cloud");
  PowerQueryResult best{std::numeric_limits<double>::infinity(), -1};
  const auto& pts = cloud.sites();
  const auto& w = cloud.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = dist2(x, pts[i]) + w[i];
    if (v < best.value || (v == best.value && static_cast<int>(i) < best.index)) {
      best.value = v;
      best.index = static_cast<int>(i);
    }
  }
  best.value = std::sqrt(best.value);
  return best;
}

}  // namespace dvcm
