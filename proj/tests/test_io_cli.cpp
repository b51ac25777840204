#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dvcm/cli.hpp"
#include "dvcm/cloud_io.hpp"
#include "dvcm/run_config.hpp"
#include "dvcm/synth.hpp"

using namespace dvcm;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("dvcm_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"dvcm"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  return cli_dispatch(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("read_cloud: XYZ basics and errors") {
  TempDir tmp;
  SUBCASE("two plain points") {
    write_file(tmp.file("a.xyz"), "0 0 0\n1 0 0\n");
    const LoadedCloud c = read_cloud(tmp.file("a.xyz"));
    REQUIRE(c.points.size() == 2);
    CHECK_FALSE(c.has_normals);
    CHECK(c.points[1] == Vec3{1, 0, 0});
  }
  SUBCASE("normals and quality columns") {
    write_file(tmp.file("b.xyz"), "0 0 0 0 0 1 0.5\n1 0 0 1 0 0 0.25\n");
    const LoadedCloud c = read_cloud(tmp.file("b.xyz"));
    REQUIRE(c.has_normals);
    REQUIRE(c.has_quality);
    CHECK(c.normals[0] == Vec3{0, 0, 1});
    CHECK(c.quality[1] == 0.25);
  }
  SUBCASE("non-numeric token reports the line") {
    write_file(tmp.file("c.xyz"), "a b c\n");
    try {
      read_cloud(tmp.file("c.xyz"));
      FAIL("expected parse error");
    } catch (const CloudParseError& e) {
      CHECK(std::string(e.what()).find(":1:") != std::string::npos);
    }
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_cloud(tmp.file("nope.xyz")), CloudParseError);
  }
}

TEST_CASE("read_cloud: PLY ascii, binary rejection, malformed headers") {
  TempDir tmp;
  SUBCASE("three vertices with normals") {
    write_file(tmp.file("a.ply"),
               "ply\nformat ascii 1.0\nelement vertex 3\n"
               "property float x\nproperty float y\nproperty float z\n"
               "property float nx\nproperty float ny\nproperty float nz\n"
               "end_header\n"
               "0 0 0 0 0 1\n1 0 0 0 0 1\n0 1 0 0 0 1\n");
    const LoadedCloud c = read_cloud(tmp.file("a.ply"));
    REQUIRE(c.points.size() == 3);
    CHECK(c.has_normals);
  }
  SUBCASE("binary PLY is rejected with an explicit message") {
    write_file(tmp.file("b.ply"),
               "ply\nformat binary_little_endian 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\nend_header\n");
    try {
      read_cloud(tmp.file("b.ply"));
      FAIL("expected parse error");
    } catch (const CloudParseError& e) {
      CHECK(std::string(e.what()).find("binary PLY") != std::string::npos);
    }
  }
  SUBCASE("malformed header keyword") {
    write_file(tmp.file("c.ply"), "ply\nformat ascii 1.0\nelephant vertex 3\nend_header\n");
    CHECK_THROWS_AS(read_cloud(tmp.file("c.ply")), CloudParseError);
  }
}

TEST_CASE("read_cloud: OBJ vertices only") {
  TempDir tmp;
  write_file(tmp.file("a.obj"), "# comment\nv 0 0 0\nv 1 2 3\nf 1 2 1\n");
  const LoadedCloud c = read_cloud(tmp.file("a.obj"));
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[1] == Vec3{1, 2, 3});
}

TEST_CASE("write_estimates_ply round trip") {
  TempDir tmp;
  std::vector<SiteEstimate> est(3);
  est[0].point = {0.123456789012345, -2.5, 7.0};
  est[0].normal = normalized(Vec3{0.3, 0.4, 0.5});
  est[0].mean_abs_curvature = 0.625;
  est[0].feature_score = 0.25;
  est[0].valid = true;
  est[1].point = {1, 1, 1};
  est[1].valid = false;  // emitted with quality -1
  est[2].point = {-4, 2, 0.25};
  est[2].normal = {0, 0, 1};
  est[2].feature_score = 0.75;
  est[2].valid = true;

  SUBCASE("curvature mode preserves coordinates and normals") {
    write_estimates_ply(tmp.file("e.ply"), est, QualityMode::curvature);
    const LoadedCloud back = read_cloud(tmp.file("e.ply"));
    REQUIRE(back.points.size() == 3);
    REQUIRE(back.has_normals);
    REQUIRE(back.has_quality);
    for (int i = 0; i < 3; ++i) {
      CHECK(dist(back.points[i], est[i].point) <=
            1e-9 * std::max(1.0, norm(est[i].point)));
    }
    CHECK(norm(back.normals[0] - est[0].normal) <= 1e-6);
    CHECK(back.quality[0] == doctest::Approx(0.625));
    CHECK(back.quality[1] == -1.0);
  }
  SUBCASE("feature mode writes scores in [0,1] for valid points") {
    write_estimates_ply(tmp.file("f.ply"), est, QualityMode::feature_score);
    const LoadedCloud back = read_cloud(tmp.file("f.ply"));
    CHECK(back.quality[0] == doctest::Approx(0.25));
    CHECK(back.quality[1] == -1.0);
    CHECK(back.quality[2] == doctest::Approx(0.75));
  }
}

TEST_CASE("run config: parsing, unknown keys, precedence") {
  TempDir tmp;
  SUBCASE("values load and comments are ignored") {
    write_file(tmp.file("run.cfg"), "# run\nk = 12\ndistance = median\n\nR = 0.1D\n");
    const RunConfig cfg = RunConfig::load(tmp.file("run.cfg"));
    CHECK(cfg.get("k") == "12");
    CHECK(cfg.get("distance") == "median");
    CHECK(cfg.get("R") == "0.1D");
  }
  SUBCASE("unknown keys are rejected") {
    write_file(tmp.file("bad.cfg"), "wat = 1\n");
    CHECK_THROWS(RunConfig::load(tmp.file("bad.cfg")));
  }
  SUBCASE("flags override config values") {
    write_file(tmp.file("run.cfg"), "k = 12\nR = 0.5\nr = 0.5\n");
    const ShapeSample s = sample_shape(SyntheticShape::parse("sphere", "1"), 300, 3);
    write_cloud_xyz(tmp.file("in.xyz"), s.points);
    // k comes from the config; R is overridden on the command line.
    CHECK(run_cli({"normals", "--config", tmp.file("run.cfg"), "--input", tmp.file("in.xyz"),
                   "--output", tmp.file("out.ply"), "--distance", "witnessed", "--R", "0.4",
                   "--threads", "1"}) == 0);
    CHECK(read_cloud(tmp.file("out.ply")).points.size() == 300);
  }
}

TEST_CASE("cli: usage errors exit 2, runtime errors exit 1") {
  TempDir tmp;
  CHECK(run_cli({"normals"}) == 2);                       // missing input
  CHECK(run_cli({"normals", "--wat", "1"}) == 2);         // unknown flag
  CHECK(run_cli({"nonsense"}) == 2);                      // unknown subcommand
  CHECK(run_cli({"features", "--input", "x.xyz", "--output", "y.ply", "--R", "0.1", "--r",
                 "0.1"}) == 2);                            // features need a threshold
  CHECK(run_cli({"normals", "--input", tmp.file("missing.xyz"), "--output",
                 tmp.file("o.ply"), "--R", "0.1", "--r", "0.1"}) == 1);
}

TEST_CASE("cli: documented pipeline runs end to end") {
  TempDir tmp;
  const std::string cloud = tmp.file("p.xyz");
  const std::string out = tmp.file("n.ply");

  // synth -> normals with the documented flag set.
  CHECK(run_cli({"synth", "--shape", "ellipsoid", "--shape-params", "2,1.5,1", "--n", "2000",
                 "--seed", "7", "--noise-eps", "0.01D", "--output", cloud}) == 0);
  CHECK(run_cli({"normals", "--input", cloud, "--distance", "witnessed", "--k", "30", "--R",
                 "0.04D", "--r", "0.04D", "--output", out, "--threads", "2"}) == 0);
  const LoadedCloud result = read_cloud(out);
  CHECK(result.points.size() == 2000);
  REQUIRE(result.has_normals);
  REQUIRE(result.has_quality);

  // curvature and features on the same cloud.
  CHECK(run_cli({"curvature", "--input", cloud, "--distance", "median", "--k", "10", "--R",
                 "0.06D", "--r", "0.04D", "--output", tmp.file("c.ply")}) == 0);
  CHECK(run_cli({"features", "--input", cloud, "--distance", "witnessed", "--k", "10", "--R",
                 "0.06D", "--r", "0.02D", "--threshold", "0.16", "--output",
                 tmp.file("f.ply")}) == 0);
  const LoadedCloud feat = read_cloud(tmp.file("f.ply"));
  for (double q : feat.quality) CHECK(q <= 1.0);

  // levelset export.
  CHECK(run_cli({"levelset", "--input", cloud, "--distance", "witnessed", "--k", "10",
                 "--res", "8", "--output", tmp.file("grid.csv")}) == 0);
  std::istringstream grid(slurp(tmp.file("grid.csv")));
  std::string header;
  std::getline(grid, header);
  CHECK(header == "x,y,z,value");

  // field dump alongside normals.
  CHECK(run_cli({"normals", "--input", cloud, "--distance", "witnessed", "--k", "10", "--R",
                 "0.05D", "--r", "0.05D", "--output", tmp.file("n2.ply"), "--field-out",
                 tmp.file("field.csv")}) == 0);
  std::istringstream field(slurp(tmp.file("field.csv")));
  std::getline(field, header);
  CHECK(header == "site_index,x,y,z,m11,m12,m13,m22,m23,m33");
}

TEST_CASE("cli: identical seeds give identical outputs across thread counts") {
  TempDir tmp;
  const std::string cloud = tmp.file("p.xyz");
  CHECK(run_cli({"synth", "--shape", "sphere", "--n", "1200", "--seed", "5", "--noise-eps",
                 "0.05D", "--outliers", "0.05:box", "--output", cloud}) == 0);
  for (const char* threads : {"1", "2", "8"}) {
    CHECK(run_cli({"normals", "--input", cloud, "--distance", "witnessed", "--k", "8", "--R",
                   "0.1D", "--r", "0.1D", "--threads", threads, "--output",
                   tmp.file(std::string("t") + threads + ".ply")}) == 0);
  }
  const std::string t1 = slurp(tmp.file("t1.ply"));
  CHECK(t1 == slurp(tmp.file("t2.ply")));
  CHECK(t1 == slurp(tmp.file("t8.ply")));
  CHECK(!t1.empty());
}

TEST_CASE("cli: oracle subcommand reports the cross-check") {
  CHECK(run_cli({"oracle", "--n", "12", "--seed", "1", "--samples", "20000", "--polyball",
                 "ico2"}) == 0);
}

TEST_CASE("cli binary: subprocess smoke test of exit codes") {
  // The in-process calls above cover the logic; one true subprocess run
  // guards the binary wiring itself.
  const std::string bin = DVCM_BIN;
  CHECK(std::system((bin + " --help > /dev/null").c_str()) == 0);
  CHECK(std::system((bin + " normals > /dev/null 2>&1").c_str()) != 0);
}
