#include <doctest.h>

#include <random>
#include <sstream>

#include "dvcm/distlike.hpp"
#include "test_util.hpp"

using namespace dvcm;
using namespace dvcm::testutil;

namespace {

std::vector<Vec3> random_cloud(std::mt19937_64& rng, std::size_t n, double extent = 1.0) {
  std::vector<Vec3> pts(n);
  for (Vec3& p : pts) {
    p = random_in_box(rng, {-extent, -extent, -extent}, {extent, extent, extent});
  }
  return pts;
}

double sum_dist(const Vec3& c, std::span<const Vec3> pts) {
  double s = 0.0;
  for (const Vec3& p : pts) s += dist(c, p);
  return s;
}

}  // namespace

TEST_CASE("power_distance: closed-form cases and tie-breaking") {
  SUBCASE("plain euclidean") {
    const WeightedPointCloud cloud = WeightedPointCloud::unweighted({{0, 0, 0}});
    const PowerQueryResult r = power_distance(cloud, {3, 4, 0});
    CHECK(r.value == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(r.index == 0);
  }
  SUBCASE("weight shifts the winner") {
    const WeightedPointCloud cloud({{0, 0, 0}, {2, 0, 0}}, {0.0, 3.0});
    const PowerQueryResult r = power_distance(cloud, {1, 0, 0});
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.index == 0);
  }
  SUBCASE("at a weighted site the value is sqrt(w)") {
    const WeightedPointCloud cloud({{1, 2, 3}}, {4.0});
    const PowerQueryResult r = power_distance(cloud, {1, 2, 3});
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("exact ties go to the lowest index") {
    const WeightedPointCloud cloud =
        WeightedPointCloud::unweighted({{-1, 0, 0}, {1, 0, 0}});
    CHECK(power_distance(cloud, {0, 0, 0}).index == 0);
    PowerDistanceField field(cloud);
    CHECK(field({0, 0, 0}).index == 0);
  }
  SUBCASE("empty cloud is an error") {
    CHECK_THROWS_AS(power_distance(WeightedPointCloud{}, {0, 0, 0}), std::invalid_argument);
  }
}

TEST_CASE("kd-accelerated power distance equals the linear scan") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<Vec3> pts = random_cloud(rng, 200);
    std::vector<double> w(pts.size());
    std::uniform_real_distribution<double> uw(0.0, 0.5);
    for (double& x : w) x = uw(rng);
    const WeightedPointCloud cloud(pts, w);
    const PowerDistanceField field(cloud);
    for (int q = 0; q < 50; ++q) {
      const Vec3 x = random_in_box(rng, {-2, -2, -2}, {2, 2, 2});
      const PowerQueryResult ref = power_distance(cloud, x);
      const PowerQueryResult fast = field(x);
      CHECK(fast.value == ref.value);
      CHECK(fast.index == ref.index);
    }
  }
}

TEST_CASE("k_distance: small closed forms") {
  const std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
  CHECK(k_distance(two, 2, {0, 0, 0}) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(k_distance(two, 1, {0.2, 0, 0}) == doctest::Approx(0.2).epsilon(1e-12));

  const std::vector<Vec3> one = {{0, 0, 0}};
  CHECK(k_distance(one, 1, {0, 0, 2}) == doctest::Approx(2.0).epsilon(1e-15));

  CHECK_THROWS_AS(k_distance(two, 3, {0, 0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(k_distance(two, 0, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("witnessed_sites: hand-enumerated three-point cloud") {
  const std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {3, 0, 0}};
  SiteBuildStats stats;
  const WeightedPointCloud sites = witnessed_sites(pts, 2, &stats);
  REQUIRE(sites.size() == 2);  // the witness of p1=(1,0,0) duplicates the first
  CHECK(norm(sites.sites()[0] - Vec3{0.5, 0, 0}) < 1e-15);
  CHECK(sites.weights()[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(norm(sites.sites()[1] - Vec3{2, 0, 0}) < 1e-15);
  CHECK(sites.weights()[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(stats.merged_duplicates == 1);
}

TEST_CASE("witnessed_sites: k=1 reduces to the plain cloud") {
  std::mt19937_64 rng(5);
  const std::vector<Vec3> pts = random_cloud(rng, 40);
  const WeightedPointCloud sites = witnessed_sites(pts, 1);
  const WeightedPointCloud plain = WeightedPointCloud::unweighted(pts);
  CHECK(sites == plain);
}

TEST_CASE("witnessed_sites: k=n collapses to the centroid") {
  std::mt19937_64 rng(6);
  const std::vector<Vec3> pts = random_cloud(rng, 7);
  const WeightedPointCloud sites = witnessed_sites(pts, 7);
  REQUIRE(sites.size() == 1);
  Vec3 centroid{};
  for (const Vec3& p : pts) centroid += p;
  centroid = centroid / 7.0;
  CHECK(norm(sites.sites()[0] - centroid) < 1e-12);
}

TEST_CASE("witnessed weights equal the squared k-distance at the site") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<Vec3> pts = random_cloud(rng, 30);
    for (int k : {2, 3, 5}) {
      const WeightedPointCloud sites = witnessed_sites(pts, k);
      for (std::size_t i = 0; i < sites.size(); ++i) {
        const double kd = k_distance(pts, k, sites.sites()[i]);
        CHECK(std::abs(sites.weights()[i] - kd * kd) <= 1e-9);
      }
    }
  }
}

TEST_CASE("witnessed_sites is deterministic across thread counts") {
  std::mt19937_64 rng(9);
  const std::vector<Vec3> pts = random_cloud(rng, 300);
  const WeightedPointCloud a = witnessed_sites(pts, 10, nullptr, 1);
  const WeightedPointCloud b = witnessed_sites(pts, 10, nullptr, 4);
  CHECK(a == b);
}

TEST_CASE("median_sites: symmetric groups") {
  SUBCASE("pairs use the midpoint") {
    const std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {5, 0, 0}, {6, 0, 0}};
    const WeightedPointCloud sites = median_sites(pts, 2);
    REQUIRE(sites.size() == 2);
    CHECK(norm(sites.sites()[0] - Vec3{0.5, 0, 0}) < 1e-12);
    CHECK(norm(sites.sites()[1] - Vec3{5.5, 0, 0}) < 1e-12);
  }
  SUBCASE("equilateral triangle gives its centroid") {
    const std::vector<Vec3> tri = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}};
    const WeightedPointCloud sites = median_sites(tri, 3);
    REQUIRE(sites.size() == 1);
    const Vec3 centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
    CHECK(norm(sites.sites()[0] - centroid) < 1e-7);
  }
  SUBCASE("collinear group picks the middle point") {
    const std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}, {10, 0, 0}};
    const WeightedPointCloud sites = median_sites(pts, 3);
    REQUIRE(sites.size() == 1);
    CHECK(norm(sites.sites()[0] - Vec3{1, 0, 0}) < 1e-7);
  }
}

TEST_CASE("geometric_median: fixed cases") {
  CHECK(norm(geometric_median(std::vector<Vec3>{{2, 3, 4}}) - Vec3{2, 3, 4}) == 0.0);

  const std::vector<Vec3> square = {{1, 1, 0}, {-1, 1, 0}, {-1, -1, 0}, {1, -1, 0}};
  CHECK(norm(geometric_median(square)) < 1e-9);

  const std::vector<Vec3> collinear = {{0, 0, 0}, {1, 0, 0}, {10, 0, 0}};
  CHECK(norm(geometric_median(collinear) - Vec3{1, 0, 0}) < 1e-7);
}

TEST_CASE("geometric_median beats the barycenter and random perturbations") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> usize(2, 12);
    const std::vector<Vec3> pts = random_cloud(rng, usize(rng));
    double diam = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        diam = std::max(diam, dist(pts[i], pts[j]));
      }
    }
    const Vec3 m = geometric_median(pts);
    Vec3 bary{};
    for (const Vec3& p : pts) bary += p;
    bary = bary / static_cast<double>(pts.size());

    const double obj_m = sum_dist(m, pts);
    CHECK(obj_m <= sum_dist(bary, pts) + 1e-7 * diam);
    for (int p = 0; p < 100; ++p) {
      const Vec3 cand = m + (0.05 * diam) * random_unit(rng);
      CHECK(obj_m <= sum_dist(cand, pts) + 1e-7 * diam);
    }
  }
}

TEST_CASE("full_k_sites: counts, centroid case and guards") {
  const std::vector<Vec3> three = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  CHECK(full_k_sites(three, 2).size() == 3);

  std::mt19937_64 rng(17);
  const std::vector<Vec3> four = random_cloud(rng, 4);
  const WeightedPointCloud sites = full_k_sites(four, 4);
  REQUIRE(sites.size() == 1);
  Vec3 centroid{};
  for (const Vec3& p : four) centroid += p;
  CHECK(norm(sites.sites()[0] - centroid / 4.0) < 1e-12);

  const std::vector<Vec3> big = random_cloud(rng, 15);
  CHECK_THROWS_AS(full_k_sites(big, 2), std::invalid_argument);
  CHECK_THROWS_AS(full_k_sites(four, 5), std::invalid_argument);
}

TEST_CASE("power distance over full_k_sites equals the k-distance") {
  std::mt19937_64 rng(21);
  const std::vector<Vec3> two = {{0, 0, 0}, {1, 0, 0}};
  const PowerDistanceField f2(full_k_sites(two, 2));
  CHECK(f2({0, 0, 0}).value == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

  for (int trial = 0; trial < 12; ++trial) {
    std::uniform_int_distribution<std::size_t> usize(4, 10);
    std::uniform_int_distribution<int> uk(1, 3);
    const std::vector<Vec3> pts = random_cloud(rng, usize(rng));
    const int k = uk(rng);
    const PowerDistanceField field(full_k_sites(pts, k));
    for (int q = 0; q < 200; ++q) {
      const Vec3 x = random_in_box(rng, {-2, -2, -2}, {2, 2, 2});
      CHECK(std::abs(field(x).value - k_distance(pts, k, x)) <= 1e-9);
    }
  }
}

TEST_CASE("every distance-like construction is 1-Lipschitz and 1-semiconcave") {
  std::mt19937_64 rng(23);
  const std::vector<Vec3> pts = random_cloud(rng, 24);
  const std::vector<DistanceLikeSpec> specs = {
      {DistanceKind::plain, 1},
      {DistanceKind::witnessed_k, 4},
      {DistanceKind::median_k, 4},
      {DistanceKind::full_k, 2},
  };
  for (const DistanceLikeSpec& spec : specs) {
    const PowerDistanceField field(build_sites(pts, spec));
    for (int t = 0; t < 300; ++t) {
      const Vec3 x = random_in_box(rng, {-2, -2, -2}, {2, 2, 2});
      const Vec3 y = random_in_box(rng, {-2, -2, -2}, {2, 2, 2});
      const double dx = field(x).value;
      const double dy = field(y).value;
      CHECK(std::abs(dx - dy) <= dist(x, y) + 1e-12);
      // Midpoint concavity of delta^2 - |.|^2.
      const Vec3 mid = (x + y) * 0.5;
      const double dm = field(mid).value;
      const double fx = dx * dx - norm2(x);
      const double fy = dy * dy - norm2(y);
      const double fm = dm * dm - norm2(mid);
      CHECK(fm >= 0.5 * (fx + fy) - 1e-9);
    }
  }
}

TEST_CASE("cloud canonicalization merges near-duplicates keeping the least weight") {
  const double tiny = 1e-15;
  const WeightedPointCloud cloud({{0, 0, 0}, {tiny, 0, 0}, {5, 0, 0}}, {2.0, 1.0, 0.5});
  REQUIRE(cloud.size() == 2);
  CHECK(cloud.weights()[0] == 1.0);  // min of the merged pair
  CHECK(cloud.weights()[1] == 0.5);
  CHECK(cloud.merged_duplicates() == 1);

  CHECK_THROWS_AS(WeightedPointCloud({{0, 0, 0}}, {-1.0}), std::invalid_argument);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(WeightedPointCloud({{inf, 0, 0}}, {0.0}), std::invalid_argument);
}

TEST_CASE("grid_eval: radial field, reductions and CSV format") {
  SUBCASE("single point plain distance on a 3x3x3 grid") {
    const std::vector<Vec3> pts = {{0, 0, 0}};
    const Aabb box{{-1, -1, -1}, {1, 1, 1}};
    const ScalarGrid grid = grid_eval(pts, {DistanceKind::plain, 1}, box, 3, 3, 3);
    REQUIRE(grid.values.size() == 27);
    for (int ix = 0; ix < 3; ++ix) {
      for (int iy = 0; iy < 3; ++iy) {
        for (int iz = 0; iz < 3; ++iz) {
          CHECK(grid.values[grid.flat(ix, iy, iz)] ==
                doctest::Approx(norm(grid.node(ix, iy, iz))).epsilon(1e-12));
        }
      }
    }
  }
  SUBCASE("witnessed k=1 equals plain on the same grid") {
    std::mt19937_64 rng(29);
    const std::vector<Vec3> pts = random_cloud(rng, 15);
    const Aabb box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    const ScalarGrid a = grid_eval(pts, {DistanceKind::witnessed_k, 1}, box, 5, 4, 3);
    const ScalarGrid b = grid_eval(pts, {DistanceKind::plain, 1}, box, 5, 4, 3);
    CHECK(a.values == b.values);
  }
  SUBCASE("k-distance grid equals the full-enumeration power grid") {
    std::mt19937_64 rng(31);
    const std::vector<Vec3> pts = random_cloud(rng, 10);
    const Aabb box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
    const ScalarGrid grid = grid_eval(pts, {DistanceKind::full_k, 2}, box, 4, 4, 4);
    for (int ix = 0; ix < 4; ++ix) {
      for (int iy = 0; iy < 4; ++iy) {
        for (int iz = 0; iz < 4; ++iz) {
          CHECK(std::abs(grid.values[grid.flat(ix, iy, iz)] -
                         k_distance(pts, 2, grid.node(ix, iy, iz))) <= 1e-9);
        }
      }
    }
  }
  SUBCASE("CSV header and 9+ significant digits") {
    const std::vector<Vec3> pts = {{0, 0, 0}};
    const ScalarGrid grid =
        grid_eval(pts, {DistanceKind::plain, 1}, {{0, 0, 0}, {1, 1, 1}}, 1, 1, 1);
    std::ostringstream os;
    grid.write_csv(os);
    std::istringstream is(os.str());
    std::string header, first;
    std::getline(is, header);
    std::getline(is, first);
    CHECK(header == "x,y,z,value");
    CHECK(first.find("0.866025403") != std::string::npos);  // sqrt(3)/2 at the center node
  }
  SUBCASE("resolution guard") {
    const std::vector<Vec3> pts = {{0, 0, 0}};
    CHECK_THROWS_AS(
        grid_eval(pts, {DistanceKind::plain, 1}, {{0, 0, 0}, {1, 1, 1}}, 2048, 1024, 1024),
        std::invalid_argument);
  }
}
