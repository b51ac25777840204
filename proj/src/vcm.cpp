#include "dvcm/vcm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>

#include "dvcm/moments.hpp"
#include "dvcm/parallel.hpp"
#include "dvcm/powerdiagram.hpp"

namespace dvcm {

double ProbeKernel::operator()(const Vec3& p) const {
  const double d = dist(p, center);
  switch (kind) {
    case Kind::ball_indicator:
      return d <= radius ? 1.0 : 0.0;
    case Kind::lipschitz_hat:
      return std::max(0.0, 1.0 - d / radius);
  }
  return 0.0;
}

bool VcmField::bitwise_equal_tensors(const VcmField& o) const {
  return tensors.size() == o.tensors.size() &&
         std::equal(tensors.begin(), tensors.end(), o.tensors.begin());
}

VcmField compute_field(const WeightedPointCloud& cloud, double R, const PolyBall& ball,
                       unsigned threads) {
  if (cloud.empty()) throw std::invalid_argument("compute_field: empty cloud");
  if (!(R > 0.0)) throw std::invalid_argument("compute_field: R must be positive");

  VcmField field;
  field.cloud = cloud;
  field.R = R;
  field.polyball_tag = ball.tag;
  field.tensors.resize(cloud.size());
  field.index = KdTree(field.cloud.sites(), field.cloud.weights());

  std::vector<unsigned char> empty_flags(cloud.size(), 0);
  parallel_for(cloud.size(), threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      const ConvexPolytope cell =
          build_cell(field.cloud, static_cast<int>(i), R, ball, &field.index);
      if (cell.empty()) {
        empty_flags[i] = 1;
        field.tensors[i] = SymTensor3{};
      } else {
        field.tensors[i] = polytope_second_moment(cell, field.cloud.sites()[i]);
      }
    }
  });
  for (unsigned char f : empty_flags) field.empty_cells += f;
  if (field.empty_cells * 10 > cloud.size()) {
    std::fprintf(stderr,
                 "warning: %zu of %zu offset cells are empty; R may be too small for the "
                 "site weights\n",
                 field.empty_cells, cloud.size());
  }
  return field;
}

SymTensor3 convolve(const VcmField& field, const ProbeKernel& probe) {
  const std::vector<int> support = field.index.radius(probe.center, probe.radius);
  std::vector<SymTensor3> terms;
  terms.reserve(support.size());
  for (int idx : support) {  // ascending site order
    const double chi = probe(field.cloud.sites()[idx]);
    if (chi != 0.0) terms.push_back(field.tensors[idx] * chi);
  }
  return pairwise_sum(terms);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct McAccumulator {
  double sum[7] = {};   // six tensor entries + trace
  double sum2[7] = {};  // squares, for the standard error
  std::size_t accepted = 0;

  void add(const SymTensor3& t) {
    const double v[7] = {t.xx, t.xy, t.xz, t.yy, t.yz, t.zz, t.trace()};
    for (int i = 0; i < 7; ++i) {
      sum[i] += v[i];
      sum2[i] += v[i] * v[i];
    }
    ++accepted;
  }
  McAccumulator& operator+=(const McAccumulator& o) {
    for (int i = 0; i < 7; ++i) {
      sum[i] += o.sum[i];
      sum2[i] += o.sum2[i];
    }
    accepted += o.accepted;
    return *this;
  }
};

}  // namespace

McVcmEstimate mc_oracle_vcm(const WeightedPointCloud& cloud, double R,
                            const ProbeKernel& probe, std::size_t n_samples,
                            std::uint64_t seed, unsigned threads) {
  if (cloud.empty()) throw std::invalid_argument("mc_oracle_vcm: empty cloud");
  if (n_samples < 10000) throw std::invalid_argument("mc_oracle_vcm: need >= 1e4 samples");

  // Bounding box of the sublevel set: union of the per-site balls of radius
  // sqrt(R^2 - w).
  Aabb box;
  bool any = false;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double r2 = R * R - cloud.weights()[i];
    if (r2 < 0.0) continue;
    const double r = std::sqrt(r2);
    const Vec3 p = cloud.sites()[i];
    const Vec3 lo = p - Vec3{r, r, r};
    const Vec3 hi = p + Vec3{r, r, r};
    if (!any) {
      box = {lo, hi};
      any = true;
    } else {
      box.expand(lo);
      box.expand(hi);
    }
  }
  if (!any) {
    throw std::runtime_error("mc_oracle_vcm: every site weight exceeds R^2");
  }
  const Vec3 ext = box.extent();
  const double box_volume = ext.x * ext.y * ext.z;

  const KdTree tree(cloud.sites(), cloud.weights());
  const double R2 = R * R;

  constexpr std::size_t kChunk = 1 << 16;
  const std::size_t n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<McAccumulator> partial(n_chunks);

  parallel_for(n_chunks, threads, [&](std::size_t lo_chunk, std::size_t hi_chunk) {
    for (std::size_t c = lo_chunk; c < hi_chunk; ++c) {
      std::mt19937_64 rng(splitmix64(seed ^ (0x517cc1b727220a95ULL + c)));
      std::uniform_real_distribution<double> ux(box.lo.x, box.hi.x);
      std::uniform_real_distribution<double> uy(box.lo.y, box.hi.y);
      std::uniform_real_distribution<double> uz(box.lo.z, box.hi.z);
      McAccumulator& acc = partial[c];
      const std::size_t count = std::min(kChunk, n_samples - c * kChunk);
      for (std::size_t s = 0; s < count; ++s) {
        const Vec3 x{ux(rng), uy(rng), uz(rng)};
        const auto [v2, idx] = tree.power_nearest(x);
        if (v2 > R2) continue;
        const Vec3 p = cloud.sites()[idx];
        const double chi = probe(p);
        if (chi == 0.0) {
          acc.accepted++;  // inside the domain, zero integrand
          continue;
        }
        acc.add(outer(x - p) * chi);
      }
    }
  });

  McAccumulator total;
  for (const McAccumulator& a : partial) total += a;
  if (total.accepted == 0) {
    throw std::runtime_error("mc_oracle_vcm: no sample hit the sublevel set");
  }

  const double n = static_cast<double>(n_samples);
  McVcmEstimate out;
  out.samples = n_samples;
  out.accepted = total.accepted;
  double mean[7], se[7];
  for (int i = 0; i < 7; ++i) {
    mean[i] = total.sum[i] / n;
    const double var = std::max(0.0, total.sum2[i] / n - mean[i] * mean[i]);
    se[i] = box_volume * std::sqrt(var / n);
  }
  out.tensor = SymTensor3{mean[0], mean[1], mean[2], mean[3], mean[4], mean[5]} * box_volume;
  out.component_se = {se[0], se[1], se[2], se[3], se[4], se[5]};
  out.trace_se = se[6];
  out.frobenius_se = std::sqrt(se[0] * se[0] + 2.0 * se[1] * se[1] + 2.0 * se[2] * se[2] +
                               se[3] * se[3] + 2.0 * se[4] * se[4] + se[5] * se[5]);
  return out;
}

void write_field_csv(std::ostream& os, const VcmField& field) {
  os << "site_index,x,y,z,m11,m12,m13,m22,m23,m33\n";
  char line[320];
  for (std::size_t i = 0; i < field.tensors.size(); ++i) {
    const Vec3& p = field.cloud.sites()[i];
    const SymTensor3& m = field.tensors[i];
    std::snprintf(line, sizeof line,
                  "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, p.x,
                  p.y, p.z, m.xx, m.xy, m.xz, m.yy, m.yz, m.zz);
    os << line;
  }
}

namespace {

static_assert(std::endian::native == std::endian::little,
              "binary field files are little-endian");

constexpr char kFieldMagic[8] = {'V', 'C', 'M', 'F', 'L', 'D', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void put_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

void write_field_binary(std::ostream& os, const VcmField& field) {
  os.write(kFieldMagic, sizeof kFieldMagic);
  put_u64(os, field.tensors.size());
  put_f64(os, field.R);
  for (std::size_t i = 0; i < field.tensors.size(); ++i) {
    const Vec3& p = field.cloud.sites()[i];
    const SymTensor3& m = field.tensors[i];
    put_u64(os, i);
    for (double v : {p.x, p.y, p.z, m.xx, m.xy, m.xz, m.yy, m.yz, m.zz}) put_f64(os, v);
  }
}

FieldRecords read_field_binary(std::istream& is) {
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kFieldMagic, sizeof magic) != 0) {
    throw std::runtime_error("not a binary field file");
  }
  std::uint64_t count = 0;
  double R = 0.0;
  is.read(reinterpret_cast<char*>(&count), sizeof count);
  is.read(reinterpret_cast<char*>(&R), sizeof R);
  FieldRecords rec;
  rec.site_index.resize(count);
  rec.sites.resize(count);
  rec.tensors.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    double v[9];
    is.read(reinterpret_cast<char*>(&rec.site_index[i]), sizeof(std::uint64_t));
    is.read(reinterpret_cast<char*>(v), sizeof v);
    if (!is) throw std::runtime_error("truncated binary field file");
    rec.sites[i] = {v[0], v[1], v[2]};
    rec.tensors[i] = {v[3], v[4], v[5], v[6], v[7], v[8]};
  }
  return rec;
}

}  // namespace dvcm
