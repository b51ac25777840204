#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dvcm/estimators.hpp"
#include "dvcm/units.hpp"
#include "dvcm/vec3.hpp"

namespace dvcm {

// Analytic test shapes with area-uniform samplers and exact normals.
struct SyntheticShape {
  enum class Kind { sphere, ellipsoid, plane, wedge };
  Kind kind = Kind::sphere;
  // sphere: a = radius; ellipsoid: semi-axes a,b,c; plane: square of side a
  // in z=0; wedge: two square half-planes of side a meeting at 90° along the
  // y-axis.
  double a = 1.0, b = 1.0, c = 1.0;
  // Uniform post-scale applied to the sampled points (diameter control).
  double scale = 1.0;

  std::string name() const;
  static SyntheticShape parse(const std::string& name, const std::string& params);
};

struct ShapeSample {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
};

ShapeSample sample_shape(const SyntheticShape& shape, std::size_t n, std::uint64_t seed);

// Displacement tier: a fraction of points moved by a uniform-direction
// vector with radius uniform in [min_disp, max_disp], or resampled uniformly
// in the bounding box of the clean cloud.
struct NoiseTier {
  double fraction = 0.0;
  DiamScalar min_disp{};
  DiamScalar max_disp{};
  bool box_uniform = false;
};

// Tier membership comes from a seeded shuffle; points outside all tiers get
// the base Hausdorff displacement, uniform in [0, eps].
struct NoiseModel {
  DiamScalar hausdorff_eps{};
  std::vector<NoiseTier> tiers;
  std::uint64_t seed = 0;
};

NoiseModel parse_noise(const std::string& eps, const std::string& outlier_spec,
                       std::uint64_t seed);
std::string outlier_spec_string(const NoiseModel& model);

// Diameter-relative displacements resolve against the bounding-box diagonal
// of the input (clean) points.
std::vector<Vec3> apply_noise(std::span<const Vec3> points, const NoiseModel& model);

struct AngleErrorStats {
  double mean_deg = 0.0;
  double max_deg = 0.0;
  std::vector<std::size_t> histogram;  // 18 bins of 5° covering [0°, 90°]
  std::size_t valid_count = 0;
  std::size_t invalid_count = 0;
};

// Unsigned angle between estimated and true normals (sign-invariant),
// invalid estimates excluded and counted. Throws when nothing is valid.
AngleErrorStats angle_error(std::span<const SiteEstimate> estimates,
                            std::span<const Vec3> truth);

struct SweepSpec {
  SyntheticShape shape;
  std::size_t n = 1000;
  std::vector<DiamScalar> noise_eps;
  std::vector<std::string> outlier_specs;  // parse_noise format, "none" for none
  std::vector<DistanceKind> kinds;
  std::vector<int> ks;
  std::vector<DiamScalar> Rs;
  std::vector<DiamScalar> rs;
  std::vector<std::uint64_t> seeds;
  std::string polyball = "dodeca";
  unsigned threads = 1;
};

// One CSV row per grid cell. If the output file already holds a prefix of the
// row sequence, those rows are kept and computation resumes after them.
// Returns the number of rows computed in this call.
std::size_t run_sweep(const SweepSpec& spec, const std::string& csv_path);

extern const char* const kSweepCsvHeader;

}  // namespace dvcm
