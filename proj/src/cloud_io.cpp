#include "dvcm/cloud_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dvcm {

namespace {

std::string lower_ext(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return ext;
}

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& what) {
  throw CloudParseError(path + ":" + std::to_string(line) + ": " + what);
}

bool parse_double(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    return used == tok.size();
  } catch (const std::exception&) {
    return false;
  }
}

LoadedCloud read_xyz(std::istream& in, const std::string& path) {
  LoadedCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<std::string> toks;
    std::string tok;
    while (ss >> tok) toks.push_back(tok);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks.size() != 3 && toks.size() != 6 && toks.size() != 7) {
      fail(path, lineno, "expected 3, 6 or 7 columns, got " + std::to_string(toks.size()));
    }
    if (width == 0) width = toks.size();
    if (toks.size() != width) fail(path, lineno, "inconsistent column count");
    double v[7] = {};
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (!parse_double(toks[i], v[i])) fail(path, lineno, "non-numeric token '" + toks[i] + "'");
    }
    cloud.points.push_back({v[0], v[1], v[2]});
    if (width >= 6) {
      cloud.normals.push_back({v[3], v[4], v[5]});
      cloud.has_normals = true;
    }
    if (width == 7) {
      cloud.quality.push_back(v[6]);
      cloud.has_quality = true;
    }
  }
  if (cloud.points.empty()) fail(path, lineno, "no points found");
  return cloud;
}

LoadedCloud read_ply(std::istream& in, const std::string& path) {
  std::string line;
  std::size_t lineno = 0;

  auto next_line = [&](const char* why) {
    if (!std::getline(in, line)) fail(path, lineno, std::string("unexpected end: ") + why);
    ++lineno;
    return line;
  };

  if (next_line("magic") != "ply") fail(path, lineno, "missing 'ply' magic");

  std::size_t vertex_count = 0;
  std::vector<std::string> props;
  bool in_vertex_element = false;
  bool format_seen = false;
  while (true) {
    next_line("header");
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "comment") continue;
    if (kw == "format") {
      std::string fmt, version;
      ss >> fmt >> version;
      if (fmt == "binary_little_endian" || fmt == "binary_big_endian") {
        fail(path, lineno, "binary PLY is unsupported; convert to 'format ascii 1.0'");
      }
      if (fmt != "ascii" || version != "1.0") fail(path, lineno, "expected 'format ascii 1.0'");
      format_seen = true;
    } else if (kw == "element") {
      std::string name;
      std::size_t count = 0;
      ss >> name >> count;
      if (name == "vertex") {
        vertex_count = count;
        in_vertex_element = true;
      } else {
        in_vertex_element = false;
      }
    } else if (kw == "property") {
      if (!in_vertex_element) continue;
      std::string type, name;
      ss >> type >> name;
      if (type == "list") continue;
      if (type != "float" && type != "double" && type != "float32" && type != "float64") {
        fail(path, lineno, "vertex property '" + name + "' must be floating point");
      }
      props.push_back(name);
    } else if (kw == "end_header") {
      break;
    } else if (kw.empty()) {
      fail(path, lineno, "blank header line");
    } else {
      fail(path, lineno, "unknown header keyword '" + kw + "'");
    }
  }
  if (!format_seen) fail(path, lineno, "missing format line");

  auto prop_index = [&](const char* name) {
    const auto it = std::find(props.begin(), props.end(), name);
    return it == props.end() ? -1 : static_cast<int>(it - props.begin());
  };
  const int ix = prop_index("x"), iy = prop_index("y"), iz = prop_index("z");
  if (ix < 0 || iy < 0 || iz < 0) fail(path, lineno, "vertex element lacks x,y,z properties");
  const int inx = prop_index("nx"), iny = prop_index("ny"), inz = prop_index("nz");
  const int iq = prop_index("quality");

  LoadedCloud cloud;
  cloud.has_normals = inx >= 0 && iny >= 0 && inz >= 0;
  cloud.has_quality = iq >= 0;
  cloud.points.reserve(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    next_line("vertex data");
    std::istringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
      double d = 0.0;
      if (!parse_double(tok, d)) fail(path, lineno, "non-numeric token '" + tok + "'");
      vals.push_back(d);
    }
    if (vals.size() < props.size()) fail(path, lineno, "too few vertex values");
    cloud.points.push_back({vals[ix], vals[iy], vals[iz]});
    if (cloud.has_normals) cloud.normals.push_back({vals[inx], vals[iny], vals[inz]});
    if (cloud.has_quality) cloud.quality.push_back(vals[iq]);
  }
  return cloud;
}

LoadedCloud read_obj(std::istream& in, const std::string& path) {
  LoadedCloud cloud;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw != "v") continue;  // vertices only; faces and the rest are ignored
    double x, y, z;
    if (!(ss >> x >> y >> z)) fail(path, lineno, "malformed vertex line");
    cloud.points.push_back({x, y, z});
  }
  if (cloud.points.empty()) fail(path, lineno, "no 'v' lines found");
  return cloud;
}

}  // namespace

LoadedCloud read_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CloudParseError(path + ": cannot open file");
  std::string ext = lower_ext(path);
  if (ext != "xyz" && ext != "txt" && ext != "pts" && ext != "ply" && ext != "obj") {
    // Sniff: PLY magic, else OBJ vertex lines, else XYZ columns.
    std::string first;
    std::getline(in, first);
    in.seekg(0);
    if (first.rfind("ply", 0) == 0) ext = "ply";
    else if (first.rfind("v ", 0) == 0) ext = "obj";
    else ext = "xyz";
  }
  if (ext == "ply") return read_ply(in, path);
  if (ext == "obj") return read_obj(in, path);
  return read_xyz(in, path);
}

namespace {

void write_ply_header(std::ofstream& out, std::size_t count, bool normals, bool quality) {
  out << "ply\nformat ascii 1.0\ncomment produced by dvcm\n";
  out << "element vertex " << count << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (normals) out << "property double nx\nproperty double ny\nproperty double nz\n";
  if (quality) out << "property double quality\n";
  out << "end_header\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

}  // namespace

void write_estimates_ply(const std::string& path, std::span<const SiteEstimate> estimates,
                         QualityMode mode) {
  std::ofstream out = open_out(path);
  write_ply_header(out, estimates.size(), true, true);
  char buf[256];
  for (const SiteEstimate& e : estimates) {
    const double q = !e.valid ? -1.0
                     : mode == QualityMode::curvature ? e.mean_abs_curvature
                                                      : e.feature_score;
    const Vec3 n = e.valid ? e.normal : Vec3{0.0, 0.0, 0.0};
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.9g %.9g %.9g %.9g\n", e.point.x,
                  e.point.y, e.point.z, n.x, n.y, n.z, q);
    out << buf;
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_cloud_ply(const std::string& path, std::span<const Vec3> points,
                     std::span<const Vec3> normals) {
  std::ofstream out = open_out(path);
  const bool with_normals = !normals.empty();
  write_ply_header(out, points.size(), with_normals, false);
  char buf[256];
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (with_normals) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.9g %.9g %.9g\n", points[i].x,
                    points[i].y, points[i].z, normals[i].x, normals[i].y, normals[i].z);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", points[i].x, points[i].y,
                    points[i].z);
    }
    out << buf;
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

void write_cloud_xyz(const std::string& path, std::span<const Vec3> points,
                     std::span<const Vec3> normals) {
  std::ofstream out = open_out(path);
  const bool with_normals = !normals.empty();
  char buf[256];
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (with_normals) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.9g %.9g %.9g\n", points[i].x,
                    points[i].y, points[i].z, normals[i].x, normals[i].y, normals[i].z);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", points[i].x, points[i].y,
                    points[i].z);
    }
    out << buf;
  }
  if (!out) throw std::runtime_error(path + ": write failed");
}

}  // namespace dvcm
