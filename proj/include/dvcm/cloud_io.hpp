#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dvcm/estimators.hpp"
#include "dvcm/vec3.hpp"

namespace dvcm {

struct CloudParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;    // empty unless has_normals
  std::vector<double> quality;  // empty unless has_quality
  bool has_normals = false;
  bool has_quality = false;
};

// Formats: XYZ ascii (x y z [nx ny nz] [quality]), PLY ascii 1.0 with
// x,y,z floating-point vertex properties (optionally nx,ny,nz,quality),
// OBJ vertex lines. Format by extension, falling back to content sniffing.
// Malformed input reports the offending line number; binary PLY is rejected
// with an explicit message.
LoadedCloud read_cloud(const std::string& path);

enum class QualityMode { curvature, feature_score };

// PLY ascii with per-vertex x,y,z,nx,ny,nz,quality. Invalid estimates carry
// a zero normal and quality -1.
void write_estimates_ply(const std::string& path, std::span<const SiteEstimate> estimates,
                         QualityMode mode);

// PLY ascii point dump, optionally with normals.
void write_cloud_ply(const std::string& path, std::span<const Vec3> points,
                     std::span<const Vec3> normals = {});

void write_cloud_xyz(const std::string& path, std::span<const Vec3> points,
                     std::span<const Vec3> normals = {});

}  // namespace dvcm
