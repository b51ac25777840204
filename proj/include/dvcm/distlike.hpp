#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dvcm/cloud.hpp"
#include "dvcm/kdtree.hpp"

namespace dvcm {

// Which distance-like function a run evaluates. `plain` is the distance to
// the point set itself (all weights zero); `witnessed_k` and `median_k` are
// the tractable power-distance surrogates of the k-distance; `full_k`
// enumerates every k-subset barycenter and is an oracle for tiny inputs only.
enum class DistanceKind { plain, witnessed_k, median_k, full_k };

std::string to_string(DistanceKind kind);
DistanceKind distance_kind_from_string(const std::string& s);

struct DistanceLikeSpec {
  DistanceKind kind = DistanceKind::plain;
  int k = 1;
};

struct SiteBuildStats {
  // Times the weight neighborhood N_{P,k}(b) differed from the witness group
  // that produced b.
  std::size_t weight_neighborhood_mismatches = 0;
  std::size_t merged_duplicates = 0;
};

// Root-mean-square distance to the k nearest neighbors of x in pts.
double k_distance(const KdTree& tree, int k, const Vec3& x);
double k_distance(std::span<const Vec3> pts, int k, const Vec3& x);

// One site per input point: the isobarycenter of the point and its (k-1)
// nearest neighbors; the weight is the squared k-distance at the site.
// k = 1 returns the input with zero weights.
WeightedPointCloud witnessed_sites(std::span<const Vec3> pts, int k,
                                   SiteBuildStats* stats = nullptr, unsigned threads = 1);

// Same grouping with the geometric median replacing the barycenter.
WeightedPointCloud median_sites(std::span<const Vec3> pts, int k,
                                SiteBuildStats* stats = nullptr, unsigned threads = 1);

// Weiszfeld iteration started at the barycenter; data-point collisions are
// resolved through the subgradient optimality test.
Vec3 geometric_median(std::span<const Vec3> pts);

// Every C(n, k) barycenter with its squared-k-distance weight. Guarded to
// n <= 14, k <= 4; the resulting power distance equals the k-distance.
WeightedPointCloud full_k_sites(std::span<const Vec3> pts, int k);

WeightedPointCloud build_sites(std::span<const Vec3> pts, const DistanceLikeSpec& spec,
                               SiteBuildStats* stats = nullptr, unsigned threads = 1);

// Weighted cloud plus its spatial index; the callable evaluates the power
// distance with ties resolved to the lowest site index.
class PowerDistanceField {
 public:
  explicit PowerDistanceField(WeightedPointCloud cloud);
  PowerQueryResult operator()(const Vec3& x) const;
  const WeightedPointCloud& cloud() const { return cloud_; }
  const KdTree& index() const { return tree_; }

 private:
  WeightedPointCloud cloud_;
  KdTree tree_;
};

struct ScalarGrid {
  Aabb box;
  int nx = 0, ny = 0, nz = 0;
  std::vector<double> values;  // row-major, z fastest

  Vec3 node(int ix, int iy, int iz) const;
  std::size_t flat(int ix, int iy, int iz) const {
    return (static_cast<std::size_t>(ix) * ny + iy) * nz + iz;
  }
  // CSV `x,y,z,value`, one node per line, >= 9 significant digits.
  void write_csv(std::ostream& os) const;
};

// Distance-like values on a regular grid. Total sample count is capped at
// 1024^3.
ScalarGrid grid_eval(const PowerDistanceField& field, const Aabb& box, int nx, int ny,
                     int nz, unsigned threads = 1);
ScalarGrid grid_eval(std::span<const Vec3> pts, const DistanceLikeSpec& spec,
                     const Aabb& box, int nx, int ny, int nz, unsigned threads = 1);

}  // namespace dvcm
