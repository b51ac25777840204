#include "dvcm/distlike.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dvcm/parallel.hpp"

namespace dvcm {

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::plain: return "plain";
    case DistanceKind::witnessed_k: return "witnessed";
    case DistanceKind::median_k: return "median";
    case DistanceKind::full_k: return "full";
  }
  return "?";
}

DistanceKind distance_kind_from_string(const std::string& s) {
  if (s == "plain") return DistanceKind::plain;
  if (s == "witnessed") return DistanceKind::witnessed_k;
  if (s == "median") return DistanceKind::median_k;
  if (s == "full") return DistanceKind::full_k;
  throw std::invalid_argument("unknown distance kind: " + s);
}

double k_distance(const KdTree& tree, int k, const Vec3& x) {
  if (k < 1 || static_cast<std::size_t>(k) > tree.size()) {
    throw std::invalid_argument("k_distance: k out of range");
  }
  const std::vector<int> nn = tree.knn(x, k);
  double acc = 0.0;
  for (int idx : nn) acc += dist2(x, tree.point(idx));
  return std::sqrt(acc / k);
}

double k_distance(std::span<const Vec3> pts, int k, const Vec3& x) {
  if (k < 1 || static_cast<std::size_t>(k) > pts.size()) {
    throw std::invalid_argument("k_distance: k out of range");
  }
  // Exact selection of the k nearest by (squared distance, index).
  std::vector<std::pair<double, int>> d;
  d.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    d.emplace_back(dist2(x, pts[i]), static_cast<int>(i));
  }
  std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
  double acc = 0.0;
  for (int i = 0; i < k; ++i) acc += d[i].first;
  return std::sqrt(acc / k);
}

namespace {

double weight_at(const KdTree& tree, std::span<const Vec3> pts, int k, const Vec3& b,
                 std::vector<int>* neighbors_out) {
  const std::vector<int> nn = tree.knn(b, k);
  double acc = 0.0;
  for (int idx : nn) acc += dist2(b, pts[idx]);
  if (neighbors_out) *neighbors_out = nn;
  return acc / k;
}

WeightedPointCloud grouped_sites(std::span<const Vec3> pts, int k, bool use_median,
                                 SiteBuildStats* stats, unsigned threads) {
  const std::size_t n = pts.size();
  if (k == 1) {
    return WeightedPointCloud::unweighted(std::vector<Vec3>(pts.begin(), pts.end()));
  }
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw std::invalid_argument("site construction: k out of range");
  }

  const KdTree tree(pts);
  std::vector<Vec3> sites(n);
  std::vector<double> weights(n);
  std::vector<unsigned char> mismatch(n, 0);

  parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<Vec3> group;
    for (std::size_t i = lo; i < hi; ++i) {
      std::vector<int> nn = tree.knn(pts[i], k - 1, static_cast<int>(i));
      group.clear();
      group.push_back(pts[i]);
      for (int idx : nn) group.push_back(pts[idx]);
      Vec3 b{};
      if (use_median) {
        b = geometric_median(group);
      } else {
        for (const Vec3& p : group) b += p;
        b = b / static_cast<double>(group.size());
      }
      std::vector<int> weight_nn;
      const double w = weight_at(tree, pts, k, b, &weight_nn);
      sites[i] = b;
      weights[i] = w;

      std::vector<int> group_idx;
      group_idx.reserve(k);
      group_idx.push_back(static_cast<int>(i));
      group_idx.insert(group_idx.end(), nn.begin(), nn.end());
      std::sort(group_idx.begin(), group_idx.end());
      std::sort(weight_nn.begin(), weight_nn.end());
      mismatch[i] = group_idx != weight_nn ? 1 : 0;
    }
  });

  WeightedPointCloud cloud(std::move(sites), std::move(weights));
  if (stats) {
    for (unsigned char m : mismatch) stats->weight_neighborhood_mismatches += m;
    stats->merged_duplicates += cloud.merged_duplicates();
  }
  return cloud;
}

}  // namespace

WeightedPointCloud witnessed_sites(std::span<const Vec3> pts, int k, SiteBuildStats* stats,
                                   unsigned threads) {
  return grouped_sites(pts, k, /*use_median=*/false, stats, threads);
}

WeightedPointCloud median_sites(std::span<const Vec3> pts, int k, SiteBuildStats* stats,
                                unsigned threads) {
  return grouped_sites(pts, k, /*use_median=*/true, stats, threads);
}

Vec3 geometric_median(std::span<const Vec3> pts) {
  if (pts.empty()) throw std::invalid_argument("geometric_median of empty set");
  if (pts.size() == 1) return pts[0];

  double diam = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      diam = std::max(diam, dist(pts[i], pts[j]));
    }
  }
  if (diam == 0.0) return pts[0];

  const double step_tol = 1e-9 * diam;
  const double hit_tol = 1e-12 * diam;

  Vec3 b{};
  for (const Vec3& p : pts) b += p;
  b = b / static_cast<double>(pts.size());

  for (int iter = 0; iter < 200; ++iter) {
    // Collision with a data point: decide by the subgradient condition.
    int hit = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (dist(b, pts[i]) <= hit_tol) { hit = static_cast<int>(i); break; }
    }
    if (hit >= 0) {
      const Vec3 p = pts[hit];
      Vec3 pull{};
      std::size_t multiplicity = 0;
      for (const Vec3& q : pts) {
        const double d = dist(p, q);
        if (d <= hit_tol) {
          ++multiplicity;
        } else {
          pull += (q - p) / d;
        }
      }
      if (norm(pull) <= static_cast<double>(multiplicity)) return p;
      b = p + (1e-6 * diam) * normalized(pull);
      continue;
    }

    Vec3 num{};
    double den = 0.0;
    for (const Vec3& p : pts) {
      const double w = 1.0 / dist(b, p);
      num += w * p;
      den += w;
    }
    const Vec3 next = num / den;
    const double step = dist(next, b);
    b = next;
    if (step < step_tol) break;
  }
  return b;
}

WeightedPointCloud full_k_sites(std::span<const Vec3> pts, int k) {
  const int n = static_cast<int>(pts.size());
  if (n > 14 || k > 4) throw std::invalid_argument("full_k_sites: size guard (n<=14, k<=4)");
  if (k < 1 || k > n) throw std::invalid_argument("full_k_sites: k out of range");

  const KdTree tree(pts);
  std::vector<Vec3> sites;
  std::vector<double> weights;

  std::vector<int> combo(k);
  for (int i = 0; i < k; ++i) combo[i] = i;
  while (true) {
    Vec3 b{};
    for (int idx : combo) b += pts[idx];
    b = b / static_cast<double>(k);
    sites.push_back(b);
    weights.push_back(weight_at(tree, pts, k, b, nullptr));

    int pos = k - 1;
    while (pos >= 0 && combo[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++combo[pos];
    for (int i = pos + 1; i < k; ++i) combo[i] = combo[i - 1] + 1;
  }
  return WeightedPointCloud(std::move(sites), std::move(weights));
}

WeightedPointCloud build_sites(std::span<const Vec3> pts, const DistanceLikeSpec& spec,
                               SiteBuildStats* stats, unsigned threads) {
  switch (spec.kind) {
    case DistanceKind::plain:
      return WeightedPointCloud::unweighted(std::vector<Vec3>(pts.begin(), pts.end()));
    case DistanceKind::witnessed_k:
      return witnessed_sites(pts, spec.k, stats, threads);
    case DistanceKind::median_k:
      return median_sites(pts, spec.k, stats, threads);
    case DistanceKind::full_k:
      return full_k_sites(pts, spec.k);
  }
  throw std::logic_error("unreachable");
}

PowerDistanceField::PowerDistanceField(WeightedPointCloud cloud)
    : cloud_(std::move(cloud)), tree_(cloud_.sites(), cloud_.weights()) {
  if (cloud_.empty()) throw std::invalid_argument("power distance over empty cloud");
}

PowerQueryResult PowerDistanceField::operator()(const Vec3& x) const {
  const auto [v, idx] = tree_.power_nearest(x);
  return {std::sqrt(v), idx};
}

Vec3 ScalarGrid::node(int ix, int iy, int iz) const {
  const Vec3 ext = box.extent();
  auto coord = [](double lo, double ext_a, int i, int n) {
    return n <= 1 ? lo + 0.5 * ext_a : lo + ext_a * (static_cast<double>(i) / (n - 1));
  };
  return {coord(box.lo.x, ext.x, ix, nx), coord(box.lo.y, ext.y, iy, ny),
          coord(box.lo.z, ext.z, iz, nz)};
}

void ScalarGrid::write_csv(std::ostream& os) const {
  os << "x,y,z,value\n";
  char line[160];
  for (int ix = 0; ix < nx; ++ix) {
    for (int iy = 0; iy < ny; ++iy) {
      for (int iz = 0; iz < nz; ++iz) {
        const Vec3 p = node(ix, iy, iz);
        std::snprintf(line, sizeof line, "%.12g,%.12g,%.12g,%.12g\n", p.x, p.y, p.z,
                      values[flat(ix, iy, iz)]);
        os << line;
      }
    }
  }
}

ScalarGrid grid_eval(const PowerDistanceField& field, const Aabb& box, int nx, int ny,
                     int nz, unsigned threads) {
  if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("grid_eval: empty resolution");
  const std::size_t total = static_cast<std::size_t>(nx) * ny * nz;
  if (total > (std::size_t{1} << 30)) {
    throw std::invalid_argument("grid_eval: more than 1024^3 samples requested");
  }
  ScalarGrid grid;
  grid.box = box;
  grid.nx = nx;
  grid.ny = ny;
  grid.nz = nz;
  grid.values.resize(total);
  parallel_for(static_cast<std::size_t>(nx), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t ix = lo; ix < hi; ++ix) {
      for (int iy = 0; iy < ny; ++iy) {
        for (int iz = 0; iz < nz; ++iz) {
          const int i = static_cast<int>(ix);
          grid.values[grid.flat(i, iy, iz)] = field(grid.node(i, iy, iz)).value;
        }
      }
    }
  });
  return grid;
}

ScalarGrid grid_eval(std::span<const Vec3> pts, const DistanceLikeSpec& spec, const Aabb& box,
                     int nx, int ny, int nz, unsigned threads) {
  PowerDistanceField field(build_sites(pts, spec, nullptr, threads));
  return grid_eval(field, box, nx, ny, nz, threads);
}

}  // namespace dvcm
