#include "dvcm/cli.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dvcm/cloud_io.hpp"
#include "dvcm/distlike.hpp"
#include "dvcm/run_config.hpp"
#include "dvcm/synth.hpp"
#include "dvcm/vcm.hpp"

namespace dvcm {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Config values fill in flags the command line left untouched.
struct ConfigBinder {
  std::vector<std::pair<CLI::Option*, std::function<void(const std::string&)>>> binds;

  void bind(CLI::Option* opt, std::string* target) {
    binds.emplace_back(opt, [target](const std::string& v) { *target = v; });
  }
  template <class T>
  void bind_num(CLI::Option* opt, T* target) {
    binds.emplace_back(opt, [target](const std::string& v) {
      std::istringstream ss(v);
      if (!(ss >> *target) || !ss.eof()) throw UsageError("bad config value: " + v);
    });
  }
  void apply(const RunConfig& cfg, const std::map<std::string, std::string>& key_of) {
    for (auto& [opt, setter] : binds) {
      if (opt->count() > 0) continue;
      const auto key = key_of.find(opt->get_name());
      if (key == key_of.end()) continue;
      if (cfg.has(key->second)) setter(cfg.get(key->second));
    }
  }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

// Shared options of the estimation-style subcommands.
struct EstimateArgs {
  std::string input, output, config;
  std::string distance = "witnessed";
  int k = 30;
  std::string R_text, r_text;
  double threshold = -1.0;
  std::string polyball = "dodeca";
  std::uint64_t seed = 0;
  unsigned threads = 0;
  std::string quality;
  std::string orient = "none";
  std::string field_out;

  ConfigBinder binder;

  void add_common(CLI::App* cmd) {
    binder.bind(cmd->add_option("--input", input, "input point cloud (xyz/ply/obj)"), &input);
    binder.bind(cmd->add_option("--output", output, "output PLY"), &output);
    binder.bind(cmd->add_option("--distance", distance, "plain|witnessed|median"), &distance);
    binder.bind_num(cmd->add_option("--k", k, "neighborhood size"), &k);
    binder.bind(cmd->add_option("--R", R_text, "offset radius (absolute, or e.g. 0.04D)"),
                &R_text);
    binder.bind(cmd->add_option("--r", r_text, "probe radius (absolute, or e.g. 0.04D)"),
                &r_text);
    binder.bind_num(cmd->add_option("--threshold", threshold, "feature threshold in [0,1]"),
                    &threshold);
    binder.bind(cmd->add_option("--polyball", polyball, "dodeca|ico0..ico5"), &polyball);
    binder.bind_num(cmd->add_option("--seed", seed, "random seed"), &seed);
    binder.bind_num(cmd->add_option("--threads", threads, "worker threads (0 = auto)"),
                    &threads);
    binder.bind(cmd->add_option("--quality", quality, "PLY quality column: curvature|feature"),
                &quality);
    binder.bind(cmd->add_option("--orient", orient, "none|centroid|viewpoint:x,y,z"), &orient);
    binder.bind(cmd->add_option("--field-out", field_out,
                                "also dump the per-site tensor field (.csv or .bin)"),
                &field_out);
    cmd->add_option("--config", config, "key = value config file; flags take precedence");
  }

  void merge_config() {
    if (config.empty()) return;
    static const std::map<std::string, std::string> key_of = {
        {"--input", "input"},     {"--output", "output"},     {"--distance", "distance"},
        {"--k", "k"},             {"--R", "R"},               {"--r", "r"},
        {"--threshold", "threshold"}, {"--polyball", "polyball"}, {"--seed", "seed"},
        {"--threads", "threads"}, {"--quality", "quality"},   {"--orient", "orient"},
        {"--field-out", "field_out"}};
    binder.apply(RunConfig::load(config), key_of);
  }
};

void dump_field(const VcmField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".bin") {
    write_field_binary(out, field);
  } else {
    write_field_csv(out, field);
  }
}

int run_estimate(EstimateArgs& args, QualityMode default_quality, bool need_threshold) {
  args.merge_config();
  if (args.input.empty()) throw UsageError("--input is required");
  if (args.output.empty()) throw UsageError("--output is required");
  if (args.R_text.empty() || args.r_text.empty()) throw UsageError("--R and --r are required");
  if (need_threshold && !(args.threshold >= 0.0 && args.threshold <= 1.0)) {
    throw UsageError("--threshold in [0,1] is required for feature detection");
  }

  const LoadedCloud in = read_cloud(args.input);
  const double D = Aabb::of(in.points).diagonal();

  EstimatorParams params;
  params.distance = distance_kind_from_string(args.distance);
  if (params.distance == DistanceKind::full_k) throw UsageError("--distance full is oracle-only");
  params.k = args.k;
  params.R = parse_diam_scalar(args.R_text).resolve(D);
  params.r = parse_diam_scalar(args.r_text).resolve(D);
  params.threshold = args.threshold;
  params.polyball = args.polyball;
  params.threads = args.threads;
  if (params.k < 1) throw UsageError("--k must be >= 1");
  if (!(params.R > 0.0) || !(params.r > 0.0)) throw UsageError("--R and --r must be positive");

  const PolyBall& ball = polyball_by_tag(params.polyball);
  const DistanceLikeSpec spec{params.distance, params.k};
  SiteBuildStats stats;
  const WeightedPointCloud sites =
      build_sites(in.points, spec, &stats, params.threads);
  const VcmField field = compute_field(sites, params.R, ball, params.threads);
  std::vector<SiteEstimate> estimates =
      estimate_from_field(field, in.points, params.r, params.threshold, params.threads);

  if (args.orient == "centroid") {
    orient_normals(estimates, OrientReference::outward_from_centroid);
  } else if (args.orient.rfind("viewpoint:", 0) == 0) {
    const auto parts = split(args.orient.substr(10), ',');
    if (parts.size() != 3) throw UsageError("--orient viewpoint:x,y,z");
    orient_normals(estimates, OrientReference::viewpoint,
                   {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])});
  } else if (args.orient != "none") {
    throw UsageError("--orient must be none, centroid or viewpoint:x,y,z");
  }

  QualityMode mode = default_quality;
  if (args.quality == "curvature") mode = QualityMode::curvature;
  else if (args.quality == "feature") mode = QualityMode::feature_score;
  else if (!args.quality.empty()) throw UsageError("--quality must be curvature or feature");

  write_estimates_ply(args.output, estimates, mode);
  if (!args.field_out.empty()) dump_field(field, args.field_out);

  std::size_t invalid = 0, flagged = 0;
  for (const SiteEstimate& e : estimates) {
    invalid += e.valid ? 0 : 1;
    flagged += e.is_feature ? 1 : 0;
  }
  std::printf("points=%zu sites=%zu empty_cells=%zu invalid=%zu", in.points.size(),
              sites.size(), field.empty_cells, invalid);
  if (need_threshold) std::printf(" features=%zu", flagged);
  if (stats.weight_neighborhood_mismatches > 0) {
    std::printf(" weight_nbhd_mismatches=%zu", stats.weight_neighborhood_mismatches);
  }
  std::printf("\n");
  return 0;
}

int run_levelset(EstimateArgs& args, const std::string& res_text, const std::string& bbox_text,
                 double margin) {
  args.merge_config();
  if (args.input.empty()) throw UsageError("--input is required");
  if (args.output.empty()) throw UsageError("--output is required");

  const LoadedCloud in = read_cloud(args.input);
  DistanceLikeSpec spec{distance_kind_from_string(args.distance), args.k};

  int nx = 0, ny = 0, nz = 0;
  {
    const auto parts = split(res_text, ',');
    if (parts.size() == 1) {
      nx = ny = nz = std::stoi(parts[0]);
    } else if (parts.size() == 3) {
      nx = std::stoi(parts[0]);
      ny = std::stoi(parts[1]);
      nz = std::stoi(parts[2]);
    } else {
      throw UsageError("--res takes n or nx,ny,nz");
    }
  }

  Aabb box = Aabb::of(in.points);
  if (!bbox_text.empty()) {
    const auto parts = split(bbox_text, ',');
    if (parts.size() != 6) throw UsageError("--bbox takes x0,y0,z0,x1,y1,z1");
    box.lo = {std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2])};
    box.hi = {std::stod(parts[3]), std::stod(parts[4]), std::stod(parts[5])};
  } else {
    box = box.inflated(margin * box.diagonal());
  }

  const ScalarGrid grid = grid_eval(in.points, spec, box, nx, ny, nz, args.threads);
  std::ofstream out(args.output);
  if (!out) throw std::runtime_error(args.output + ": cannot open for writing");
  grid.write_csv(out);
  std::printf("grid=%dx%dx%d nodes=%zu\n", nx, ny, nz, grid.values.size());
  return 0;
}

int run_synth(const std::string& shape_name, const std::string& shape_params, std::size_t n,
              std::uint64_t seed, const std::string& noise_eps, const std::string& outliers,
              const std::string& output) {
  if (output.empty()) throw UsageError("--output is required");
  const SyntheticShape shape = SyntheticShape::parse(shape_name, shape_params);
  const ShapeSample clean = sample_shape(shape, n, seed);
  const NoiseModel model = parse_noise(noise_eps, outliers, seed);
  const std::vector<Vec3> noisy = apply_noise(clean.points, model);

  if (output.size() >= 4 && output.substr(output.size() - 4) == ".ply") {
    write_cloud_ply(output, noisy, clean.normals);
  } else {
    write_cloud_xyz(output, noisy, clean.normals);
  }
  std::printf("shape=%s n=%zu seed=%llu D=%.9g\n", shape.name().c_str(), n,
              static_cast<unsigned long long>(seed),
              Aabb::of(clean.points).diagonal());
  return 0;
}

int run_sweep_cmd(const std::string& shape_name, const std::string& shape_params,
                  std::size_t n, const std::string& seeds_text, const std::string& noise_list,
                  const std::string& outlier_list, const std::string& distance_list,
                  const std::string& k_list, const std::string& R_list,
                  const std::string& r_list, const std::string& polyball, unsigned threads,
                  const std::string& output) {
  if (output.empty()) throw UsageError("--output is required");
  SweepSpec spec;
  spec.shape = SyntheticShape::parse(shape_name, shape_params);
  spec.n = n;
  for (const auto& s : split(seeds_text, ',')) spec.seeds.push_back(std::stoull(s));
  for (const auto& s : split(noise_list, ',')) spec.noise_eps.push_back(parse_diam_scalar(s));
  for (const auto& s : split(outlier_list, ';')) spec.outlier_specs.push_back(s);
  for (const auto& s : split(distance_list, ',')) {
    spec.kinds.push_back(distance_kind_from_string(s));
  }
  for (const auto& s : split(k_list, ',')) spec.ks.push_back(std::stoi(s));
  for (const auto& s : split(R_list, ',')) spec.Rs.push_back(parse_diam_scalar(s));
  for (const auto& s : split(r_list, ',')) spec.rs.push_back(parse_diam_scalar(s));
  spec.polyball = polyball;
  spec.threads = threads;

  const std::size_t added = run_sweep(spec, output);
  std::printf("sweep rows computed: %zu (output %s)\n", added, output.c_str());
  return 0;
}

int run_oracle(std::size_t n, std::uint64_t seed, double R, std::size_t samples,
               const std::string& polyball, unsigned threads) {
  std::mt19937_64 rng(seed ^ 0x8e2ab6a1dca93f21ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vec3> sites(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    sites[i] = {unit(rng), unit(rng), unit(rng)};
    weights[i] = unit(rng) * R * R * 0.8;
  }
  const WeightedPointCloud cloud(std::move(sites), std::move(weights));
  const ProbeKernel probe =
      ProbeKernel::ball(cloud.sites()[0], 0.6 * cloud.diameter() + R);

  const PolyBall& ball = polyball_by_tag(polyball);
  const VcmField field = compute_field(cloud, R, ball, threads);
  const SymTensor3 fast = convolve(field, probe);
  const McVcmEstimate mc = mc_oracle_vcm(cloud, R, probe, samples, seed, threads);

  const double diff = frobenius_norm(fast - mc.tensor);
  std::printf("sites=%zu R=%.6g polyball=%s samples=%zu accepted=%zu\n", cloud.size(), R,
              polyball.c_str(), samples, mc.accepted);
  std::printf("trace: cell-based=%.9g  monte-carlo=%.9g +- %.3g\n", fast.trace(),
              mc.tensor.trace(), mc.trace_se);
  std::printf("frobenius diff=%.3e (3 sigma = %.3e, rel=%.3e)\n", diff,
              3.0 * mc.frobenius_se, diff / std::max(1e-300, frobenius_norm(fast)));
  return 0;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Voronoi covariance measures of weighted point clouds: robust normals, "
               "curvature and sharp features for noisy data"};
  app.require_subcommand(1);
  app.fallthrough(false);

  EstimateArgs normals_args, curvature_args, features_args, levelset_args;

  CLI::App* normals = app.add_subcommand("normals", "estimate oriented normals");
  normals_args.add_common(normals);

  CLI::App* curvature =
      app.add_subcommand("curvature", "estimate mean absolute curvature (relative scale)");
  curvature_args.add_common(curvature);

  CLI::App* features = app.add_subcommand("features", "flag sharp-feature points");
  features_args.add_common(features);

  CLI::App* levelset =
      app.add_subcommand("levelset", "sample a distance-like function on a grid (CSV)");
  levelset_args.add_common(levelset);
  std::string res_text = "32";
  std::string bbox_text;
  double margin = 0.1;
  levelset->add_option("--res", res_text, "grid resolution: n or nx,ny,nz");
  levelset->add_option("--bbox", bbox_text, "x0,y0,z0,x1,y1,z1 (default: inflated cloud box)");
  levelset->add_option("--margin", margin, "bbox inflation as a diameter fraction");

  CLI::App* synth = app.add_subcommand("synth", "sample a synthetic shape with noise");
  std::string sy_shape = "sphere", sy_params, sy_eps = "0", sy_out, sy_outliers = "none";
  std::size_t sy_n = 10000;
  std::uint64_t sy_seed = 0;
  synth->add_option("--shape", sy_shape, "sphere|ellipsoid|plane|wedge");
  synth->add_option("--shape-params", sy_params, "shape parameters, e.g. 2,1.5,1");
  synth->add_option("--n", sy_n, "sample count");
  synth->add_option("--seed", sy_seed, "random seed");
  synth->add_option("--noise-eps", sy_eps, "Hausdorff amplitude (absolute or 0.1D)");
  synth->add_option("--outliers", sy_outliers,
                    "tiers f:min:max or f:box joined by '+', e.g. 0.9:0:0.02D+0.1:box");
  synth->add_option("--output", sy_out, "output cloud (.xyz or .ply, clean normals attached)");

  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep over synthetic data (CSV)");
  std::string sw_shape = "ellipsoid", sw_params = "2,1.5,1", sw_seeds = "1";
  std::string sw_noise = "0", sw_outliers = "none", sw_dist = "witnessed";
  std::string sw_k = "30", sw_R = "0.1D", sw_r = "0.1D", sw_ball = "dodeca", sw_out;
  std::size_t sw_n = 5000;
  unsigned sw_threads = 0;
  sweep->add_option("--shape", sw_shape, "sphere|ellipsoid|plane|wedge");
  sweep->add_option("--shape-params", sw_params, "shape parameters");
  sweep->add_option("--n", sw_n, "sample count per row");
  sweep->add_option("--seeds", sw_seeds, "comma list of seeds");
  sweep->add_option("--noise-list", sw_noise, "comma list of Hausdorff amplitudes");
  sweep->add_option("--outlier-list", sw_outliers, "semicolon list of outlier specs");
  sweep->add_option("--distance-list", sw_dist, "comma list of plain|witnessed|median");
  sweep->add_option("--k-list", sw_k, "comma list of k");
  sweep->add_option("--R-list", sw_R, "comma list of offset radii");
  sweep->add_option("--r-list", sw_r, "comma list of probe radii");
  sweep->add_option("--polyball", sw_ball, "dodeca|ico0..ico5");
  sweep->add_option("--threads", sw_threads, "worker threads (0 = auto)");
  sweep->add_option("--output", sw_out, "output CSV (resumable by row)");

  CLI::App* oracle =
      app.add_subcommand("oracle", "cross-check cell-based tensors against Monte Carlo");
  std::size_t or_n = 20, or_samples = 1000000;
  std::uint64_t or_seed = 1;
  double or_R = 0.3;
  std::string or_ball = "ico3";
  unsigned or_threads = 0;
  oracle->add_option("--n", or_n, "random site count");
  oracle->add_option("--seed", or_seed, "random seed");
  oracle->add_option("--R", or_R, "offset radius (absolute)");
  oracle->add_option("--samples", or_samples, "Monte Carlo samples (>= 1e4)");
  oracle->add_option("--polyball", or_ball, "dodeca|ico0..ico5");
  oracle->add_option("--threads", or_threads, "worker threads (0 = auto)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (normals->parsed()) return run_estimate(normals_args, QualityMode::curvature, false);
    if (curvature->parsed()) return run_estimate(curvature_args, QualityMode::curvature, false);
    if (features->parsed()) return run_estimate(features_args, QualityMode::feature_score, true);
    if (levelset->parsed()) return run_levelset(levelset_args, res_text, bbox_text, margin);
    if (synth->parsed()) {
      return run_synth(sy_shape, sy_params, sy_n, sy_seed, sy_eps, sy_outliers, sy_out);
    }
    if (sweep->parsed()) {
      return run_sweep_cmd(sw_shape, sw_params, sw_n, sw_seeds, sw_noise, sw_outliers,
                           sw_dist, sw_k, sw_R, sw_r, sw_ball, sw_threads, sw_out);
    }
    if (oracle->parsed()) {
      return run_oracle(or_n, or_seed, or_R, or_samples, or_ball, or_threads);
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\nrun with --help for details\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

}  // namespace dvcm
