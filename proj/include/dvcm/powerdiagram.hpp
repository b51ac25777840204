#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "dvcm/cloud.hpp"
#include "dvcm/kdtree.hpp"
#include "dvcm/polyball.hpp"
#include "dvcm/polytope.hpp"

namespace dvcm {

// Half-space of the points whose weighted squared distance to (p, wp) does
// not exceed the one to (q, wq): the p-side of the radical plane.
// Requires p != q.
HalfSpace bisector(const Vec3& p, double wp, const Vec3& q, double wq);

// Bounded cell of site `site`: the power cell intersected with
// site + sqrt(R^2 - w) * B. Weights above R^2 give the empty cell.
//
// Only sites whose radical plane can reach the seed polytope are applied;
// the reach test uses the seed circumradius, so the result equals the
// all-pairs construction exactly. Pass the cloud's kd-tree (built with
// weights) to prune candidates by a radius query first.
ConvexPolytope build_cell(const WeightedPointCloud& cloud, int site, double R,
                          const PolyBall& ball, const KdTree* index = nullptr);

// All-pairs reference construction (the oracle for build_cell).
ConvexPolytope build_cell_bruteforce(const WeightedPointCloud& cloud, int site, double R,
                                     const PolyBall& ball);

// One cell per site, in site order regardless of the thread count.
std::vector<ConvexPolytope> build_all_cells(const WeightedPointCloud& cloud, double R,
                                            const PolyBall& ball, unsigned threads = 1);

// Debug dump: OBJ polygon soup, one object per non-empty cell.
void write_cells_obj(std::ostream& os, std::span<const ConvexPolytope> cells);

}  // namespace dvcm
