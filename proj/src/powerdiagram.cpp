#include "dvcm/powerdiagram.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "dvcm/parallel.hpp"

namespace dvcm {

HalfSpace bisector(const Vec3& p, double wp, const Vec3& q, double wq) {
  const Vec3 diff = q - p;
  const double d = norm(diff);
  if (d == 0.0) throw std::invalid_argument("bisector of coincident sites");
  const Vec3 n = diff / d;
  // Radical plane through the weighted midpoint.
  const double b = dot(n, (p + q) * 0.5) + (wq - wp) / (2.0 * d);
  return {n, b};
}

namespace {

struct Candidate {
  double plane_dist;
  int index;
  bool operator<(const Candidate& o) const {
    if (plane_dist != o.plane_dist) return plane_dist < o.plane_dist;
    return index < o.index;
  }
};

ConvexPolytope build_cell_impl(const WeightedPointCloud& cloud, int site, double R,
                               const PolyBall& ball, const std::vector<int>& candidates) {
  const auto& pts = cloud.sites();
  const auto& w = cloud.weights();
  const Vec3 p = pts[site];
  const double wp = w[site];

  const double r2 = R * R - wp;
  if (r2 < 0.0) return {};
  const double r = std::sqrt(r2);
  const double reach = r * ball.circumradius;

  // Keep only radical planes that can touch the seed; order by proximity so
  // the polytope collapses to its final footprint early.
  std::vector<Candidate> relevant;
  relevant.reserve(candidates.size());
  for (int qi : candidates) {
    if (qi == site) continue;
    const double d2 = dist2(pts[qi], p);
    if (d2 == 0.0) {
      // Coincident sites: lower index owns the shared cell.
      if (w[qi] < wp || (w[qi] == wp && qi < site)) return {};
      continue;
    }
    const double d = std::sqrt(d2);
    const double plane_dist = (d2 + w[qi] - wp) / (2.0 * d);  // signed, from p
    if (plane_dist > reach) continue;
    if (plane_dist < -reach) return {};
    relevant.push_back({plane_dist, qi});
  }
  std::sort(relevant.begin(), relevant.end());

  ConvexPolytope cell = polyball_seed(ball, r, p);
  for (const Candidate& c : relevant) {
    cell = clip(cell, bisector(p, wp, pts[c.index], w[c.index]));
    if (cell.empty()) return {};
  }
  return cell;
}

}  // namespace

ConvexPolytope build_cell(const WeightedPointCloud& cloud, int site, double R,
                          const PolyBall& ball, const KdTree* index) {
  if (site < 0 || static_cast<std::size_t>(site) >= cloud.size()) {
    throw std::invalid_argument("build_cell: site index out of range");
  }
  if (!(R > 0.0)) throw std::invalid_argument("build_cell: R must be positive");

  const double r2 = R * R - cloud.weights()[site];
  if (r2 < 0.0) return {};

  std::vector<int> candidates;
  if (index) {
    // Sufficient over-approximation of the reach test: |q-p| large enough
    // implies the radical plane stays beyond the seed circumradius.
    const double rho = std::sqrt(r2) * ball.circumradius;
    const double slack = std::max(cloud.weights()[site] - cloud.min_weight(), 0.0);
    candidates = index->radius(cloud.sites()[site], rho + std::sqrt(rho * rho + slack));
  } else {
    candidates.resize(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) candidates[i] = static_cast<int>(i);
  }
  return build_cell_impl(cloud, site, R, ball, candidates);
}

ConvexPolytope build_cell_bruteforce(const WeightedPointCloud& cloud, int site, double R,
                                     const PolyBall& ball) {
  const auto& pts = cloud.sites();
  const auto& w = cloud.weights();
  const Vec3 p = pts[site];
  const double wp = w[site];
  const double r2 = R * R - wp;
  if (r2 < 0.0) return {};

  ConvexPolytope cell = polyball_seed(ball, std::sqrt(r2), p);
  for (std::size_t qi = 0; qi < pts.size(); ++qi) {
    if (static_cast<int>(qi) == site) continue;
    if (dist2(pts[qi], p) == 0.0) {
      if (w[qi] < wp || (w[qi] == wp && static_cast<int>(qi) < site)) return {};
      continue;
    }
    cell = clip(cell, bisector(p, wp, pts[qi], w[qi]));
    if (cell.empty()) return {};
  }
  return cell;
}

std::vector<ConvexPolytope> build_all_cells(const WeightedPointCloud& cloud, double R,
                                            const PolyBall& ball, unsigned threads) {
  if (!(R > 0.0)) throw std::invalid_argument("build_all_cells: R must be positive");
  const KdTree index(cloud.sites(), cloud.weights());
  std::vector<ConvexPolytope> cells(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      cells[i] = build_cell(cloud, static_cast<int>(i), R, ball, &index);
    }
  });
  return cells;
}

void write_cells_obj(std::ostream& os, std::span<const ConvexPolytope> cells) {
  std::size_t offset = 1;  // OBJ indices are 1-based
  char buf[128];
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const ConvexPolytope& cell = cells[c];
    if (cell.empty()) continue;
    os << "o cell_" << c << "\n";
    for (const Vec3& v : cell.vertices) {
      std::snprintf(buf, sizeof buf, "v %.12g %.12g %.12g\n", v.x, v.y, v.z);
      os << buf;
    }
    for (const auto& ring : cell.faces) {
      os << "f";
      for (int idx : ring) os << ' ' << (offset + idx);
      os << "\n";
    }
    offset += cell.vertices.size();
  }
}

}  // namespace dvcm
