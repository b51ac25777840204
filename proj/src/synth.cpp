#include "dvcm/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dvcm/cloud.hpp"
#include "dvcm/parallel.hpp"

namespace dvcm {

DiamScalar parse_diam_scalar(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty length value");
  std::string body = text;
  bool relative = false;
  if (body.back() == 'D' || body.back() == 'd') {
    relative = true;
    body.pop_back();
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(body, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad length value: " + text);
  }
  if (used != body.size()) throw std::invalid_argument("bad length value: " + text);
  return {v, relative};
}

std::string to_string(const DiamScalar& s) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g%s", s.value, s.relative ? "D" : "");
  return buf;
}

std::string SyntheticShape::name() const {
  switch (kind) {
    case Kind::sphere: return "sphere";
    case Kind::ellipsoid: return "ellipsoid";
    case Kind::plane: return "plane";
    case Kind::wedge: return "wedge";
  }
  return "?";
}

SyntheticShape SyntheticShape::parse(const std::string& name, const std::string& params) {
  SyntheticShape s;
  std::vector<double> vals;
  if (!params.empty()) {
    std::stringstream ss(params);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  }
  if (name == "sphere") {
    s.kind = Kind::sphere;
    s.a = vals.empty() ? 1.0 : vals[0];
  } else if (name == "ellipsoid") {
    s.kind = Kind::ellipsoid;
    if (vals.size() != 3) throw std::invalid_argument("ellipsoid needs a,b,c semi-axes");
    s.a = vals[0]; s.b = vals[1]; s.c = vals[2];
  } else if (name == "plane") {
    s.kind = Kind::plane;
    s.a = vals.empty() ? 1.0 : vals[0];
  } else if (name == "wedge") {
    s.kind = Kind::wedge;
    s.a = vals.empty() ? 1.0 : vals[0];
  } else {
    throw std::invalid_argument("unknown shape: " + name);
  }
  if (!(s.a > 0.0) || !(s.b > 0.0) || !(s.c > 0.0)) {
    throw std::invalid_argument("shape parameters must be positive");
  }
  return s;
}

namespace {

Vec3 uniform_on_unit_sphere(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  const double z = u(rng);
  const double phi = angle(rng);
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

}  // namespace

ShapeSample sample_shape(const SyntheticShape& shape, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_shape: n must be >= 1");
  ShapeSample out;
  out.points.reserve(n);
  out.normals.reserve(n);
  std::mt19937_64 rng(seed ^ 0xd1b54a32d192ed03ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  switch (shape.kind) {
    case SyntheticShape::Kind::sphere: {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec3 u = uniform_on_unit_sphere(rng);
        out.points.push_back(shape.a * u);
        out.normals.push_back(u);
      }
      break;
    }
    case SyntheticShape::Kind::ellipsoid: {
      const double a = shape.a, b = shape.b, c = shape.c;
      // Area-uniform via rejection against the local area distortion of the
      // sphere-to-ellipsoid map.
      const double smax = std::max({b * c, a * c, a * b});
      std::size_t produced = 0;
      while (produced < n) {
        const Vec3 u = uniform_on_unit_sphere(rng);
        const double sigma = std::sqrt(b * c * b * c * u.x * u.x + a * c * a * c * u.y * u.y +
                                       a * b * a * b * u.z * u.z);
        if (unit(rng) * smax > sigma) continue;
        out.points.push_back({a * u.x, b * u.y, c * u.z});
        out.normals.push_back(normalized(Vec3{u.x / a, u.y / b, u.z / c}));
        ++produced;
      }
      break;
    }
    case SyntheticShape::Kind::plane: {
      const double half = shape.a / 2.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = (unit(rng) * 2.0 - 1.0) * half;
        const double y = (unit(rng) * 2.0 - 1.0) * half;
        out.points.push_back({x, y, 0.0});
        out.normals.push_back({0.0, 0.0, 1.0});
      }
      break;
    }
    case SyntheticShape::Kind::wedge: {
      // Horizontal face {(x,y,0): x in [0,a]} and vertical face
      // {(0,y,z): z in [0,a]}, both y in [-a/2, a/2]; equal areas.
      const double a = shape.a;
      for (std::size_t i = 0; i < n; ++i) {
        const double y = (unit(rng) - 0.5) * a;
        const double t = unit(rng) * a;
        if (unit(rng) < 0.5) {
          out.points.push_back({t, y, 0.0});
          out.normals.push_back({0.0, 0.0, 1.0});
        } else {
          out.points.push_back({0.0, y, t});
          out.normals.push_back({1.0, 0.0, 0.0});
        }
      }
      break;
    }
  }
  if (shape.scale != 1.0) {
    for (Vec3& p : out.points) p *= shape.scale;
  }
  return out;
}

NoiseModel parse_noise(const std::string& eps, const std::string& outlier_spec,
                       std::uint64_t seed) {
  NoiseModel model;
  model.seed = seed;
  model.hausdorff_eps = eps.empty() ? DiamScalar{} : parse_diam_scalar(eps);
  if (!outlier_spec.empty() && outlier_spec != "none") {
    std::stringstream ss(outlier_spec);
    std::string tier_text;
    while (std::getline(ss, tier_text, '+')) {
      std::vector<std::string> parts;
      std::stringstream ts(tier_text);
      std::string tok;
      while (std::getline(ts, tok, ':')) parts.push_back(tok);
      NoiseTier tier;
      if (parts.size() == 2 && parts[1] == "box") {
        tier.fraction = std::stod(parts[0]);
        tier.box_uniform = true;
      } else if (parts.size() == 3) {
        tier.fraction = std::stod(parts[0]);
        tier.min_disp = parse_diam_scalar(parts[1]);
        tier.max_disp = parse_diam_scalar(parts[2]);
      } else {
        throw std::invalid_argument("bad outlier tier: " + tier_text);
      }
      if (!(tier.fraction >= 0.0 && tier.fraction <= 1.0)) {
        throw std::invalid_argument("tier fraction out of [0,1]: " + tier_text);
      }
      model.tiers.push_back(tier);
    }
  }
  double total = 0.0;
  for (const NoiseTier& t : model.tiers) total += t.fraction;
  if (total > 1.0 + 1e-12) throw std::invalid_argument("outlier fractions sum above 1");
  return model;
}

std::string outlier_spec_string(const NoiseModel& model) {
  if (model.tiers.empty()) return "none";
  std::string out;
  for (const NoiseTier& t : model.tiers) {
    if (!out.empty()) out += '+';
    char buf[96];
    if (t.box_uniform) {
      std::snprintf(buf, sizeof buf, "%.9g:box", t.fraction);
    } else {
      std::snprintf(buf, sizeof buf, "%.9g:%s:%s", t.fraction,
                    to_string(t.min_disp).c_str(), to_string(t.max_disp).c_str());
    }
    out += buf;
  }
  return out;
}

std::vector<Vec3> apply_noise(std::span<const Vec3> points, const NoiseModel& model) {
  std::vector<Vec3> out(points.begin(), points.end());
  if (out.empty()) return out;

  const Aabb box = Aabb::of(points);
  const double diameter = box.diagonal();
  std::mt19937_64 rng(model.seed ^ 0x94d049bb133111ebULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<std::size_t> order(out.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::size_t cursor = 0;
  for (const NoiseTier& tier : model.tiers) {
    const std::size_t count = static_cast<std::size_t>(
        std::floor(tier.fraction * static_cast<double>(out.size())));
    for (std::size_t j = 0; j < count && cursor < out.size(); ++j, ++cursor) {
      const std::size_t idx = order[cursor];
      if (tier.box_uniform) {
        out[idx] = {box.lo.x + unit(rng) * (box.hi.x - box.lo.x),
                    box.lo.y + unit(rng) * (box.hi.y - box.lo.y),
                    box.lo.z + unit(rng) * (box.hi.z - box.lo.z)};
      } else {
        const double lo = tier.min_disp.resolve(diameter);
        const double hi = tier.max_disp.resolve(diameter);
        const Vec3 dir = uniform_on_unit_sphere(rng);
        out[idx] += (lo + unit(rng) * (hi - lo)) * dir;
      }
    }
  }
  const double eps = model.hausdorff_eps.resolve(diameter);
  for (; cursor < out.size(); ++cursor) {
    const std::size_t idx = order[cursor];
    if (eps > 0.0) {
      const Vec3 dir = uniform_on_unit_sphere(rng);
      out[idx] += (unit(rng) * eps) * dir;
    }
  }
  return out;
}

AngleErrorStats angle_error(std::span<const SiteEstimate> estimates,
                            std::span<const Vec3> truth) {
  if (estimates.size() != truth.size()) {
    throw std::invalid_argument("angle_error: length mismatch");
  }
  AngleErrorStats stats;
  stats.histogram.assign(18, 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    if (!estimates[i].valid) {
      ++stats.invalid_count;
      continue;
    }
    const double cosang = std::min(1.0, std::abs(dot(estimates[i].normal, truth[i])));
    const double deg = std::acos(cosang) * 180.0 / std::numbers::pi;
    sum += deg;
    stats.max_deg = std::max(stats.max_deg, deg);
    const std::size_t bin = std::min<std::size_t>(17, static_cast<std::size_t>(deg / 5.0));
    ++stats.histogram[bin];
    ++stats.valid_count;
  }
  if (stats.valid_count == 0) throw std::runtime_error("angle_error: no valid estimates");
  stats.mean_deg = sum / static_cast<double>(stats.valid_count);
  return stats;
}

const char* const kSweepCsvHeader =
    "shape,n,seed,noise_eps,outlier_spec,distance,k,R,r,mean_angle_deg,max_angle_deg,"
    "invalid_count,runtime_ms";

namespace {

std::uint64_t mix_seed(std::uint64_t seed) {
  seed += 0x9e3779b97f4a7c15ULL;
  seed = (seed ^ (seed >> 30)) * 0xbf58476d1ce4e5b9ULL;
  seed = (seed ^ (seed >> 27)) * 0x94d049bb133111ebULL;
  return seed ^ (seed >> 31);
}

struct SweepRow {
  std::uint64_t seed;
  DiamScalar noise_eps;
  std::string outlier_spec;
  DistanceKind kind;
  int k;
  DiamScalar R, r;
};

}  // namespace

std::size_t run_sweep(const SweepSpec& spec, const std::string& csv_path) {
  if (spec.noise_eps.empty() || spec.outlier_specs.empty() || spec.kinds.empty() ||
      spec.ks.empty() || spec.Rs.empty() || spec.rs.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("run_sweep: empty grid dimension");
  }

  std::vector<SweepRow> rows;
  for (std::uint64_t seed : spec.seeds) {
    for (const DiamScalar& eps : spec.noise_eps) {
      for (const std::string& outliers : spec.outlier_specs) {
        for (DistanceKind kind : spec.kinds) {
          for (int k : spec.ks) {
            for (const DiamScalar& R : spec.Rs) {
              for (const DiamScalar& r : spec.rs) {
                rows.push_back({seed, eps, outliers, kind, k, R, r});
              }
            }
          }
        }
      }
    }
  }

  // Resume: keep any complete row prefix already on disk.
  std::size_t done = 0;
  {
    std::ifstream in(csv_path);
    if (in) {
      std::string line;
      if (std::getline(in, line) && line == kSweepCsvHeader) {
        while (std::getline(in, line)) {
          if (!line.empty()) ++done;
        }
      }
    }
  }
  if (done > rows.size()) done = rows.size();

  std::ofstream out;
  if (done == 0) {
    out.open(csv_path, std::ios::trunc);
    out << kSweepCsvHeader << "\n";
  } else {
    out.open(csv_path, std::ios::app);
  }
  if (!out) throw std::runtime_error("run_sweep: cannot open " + csv_path);

  for (std::size_t ri = done; ri < rows.size(); ++ri) {
    const SweepRow& row = rows[ri];
    const auto t0 = std::chrono::steady_clock::now();

    const ShapeSample clean = sample_shape(spec.shape, spec.n, row.seed);
    NoiseModel noise = parse_noise("", row.outlier_spec, mix_seed(row.seed));
    noise.hausdorff_eps = row.noise_eps;
    const std::vector<Vec3> noisy = apply_noise(clean.points, noise);

    const double D = Aabb::of(clean.points).diagonal();
    EstimatorParams params;
    params.distance = row.kind;
    params.k = row.k;
    params.R = row.R.resolve(D);
    params.r = row.r.resolve(D);
    params.polyball = spec.polyball;
    params.threads = spec.threads;
    const std::vector<SiteEstimate> est = estimate_all(noisy, params);
    const AngleErrorStats stats = angle_error(est, clean.normals);

    const auto t1 = std::chrono::steady_clock::now();
    const long ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();

    char buf[320];
    std::snprintf(buf, sizeof buf, "%s,%zu,%llu,%s,%s,%s,%d,%.9g,%.9g,%.9g,%.9g,%zu,%ld\n",
                  spec.shape.name().c_str(), spec.n,
                  static_cast<unsigned long long>(row.seed),
                  to_string(row.noise_eps).c_str(), row.outlier_spec.c_str(),
                  to_string(row.kind).c_str(), row.k, params.R, params.r, stats.mean_deg,
                  stats.max_deg, stats.invalid_count, ms);
    out << buf;
    out.flush();
  }
  return rows.size() - done;
}

}  // namespace dvcm
