#include <algorithm>
#include <cmath>
#include <limits>

#include "hodge3d/io.hpp"

namespace hodge3d {

namespace {

// Uniform bucket grid over a box; each bucket lists tet indices.
class BucketGrid {
 public:
  BucketGrid(const Vec3& lo, const Vec3& hi, std::size_t target_cells) : lo_(lo) {
    const Vec3 ext = (hi - lo).cwiseMax(1e-300);
    const double cell = std::cbrt(ext.prod() / static_cast<double>(std::max<std::size_t>(target_cells, 1)));
    for (int a = 0; a < 3; ++a) {
      n_[a] = std::clamp<long>(static_cast<long>(std::ceil(ext[a] / cell)), 1, 512);
      inv_[a] = static_cast<double>(n_[a]) / ext[a];
    }
    buckets_.resize(static_cast<std::size_t>(n_[0] * n_[1] * n_[2]));
  }

  std::array<long, 3> cell_of(const Vec3& p) const {
    std::array<long, 3> c{};
    for (int a = 0; a < 3; ++a)
      c[a] = std::clamp<long>(static_cast<long>(std::floor((p[a] - lo_[a]) * inv_[a])), 0, n_[a] - 1);
    return c;
  }
  std::vector<Index>& at(const std::array<long, 3>& c) {
    return buckets_[static_cast<std::size_t>((c[2] * n_[1] + c[1]) * n_[0] + c[0])];
  }
  const std::vector<Index>& at(const std::array<long, 3>& c) const {
    return buckets_[static_cast<std::size_t>((c[2] * n_[1] + c[1]) * n_[0] + c[0])];
  }
  const std::array<long, 3>& dims() const { return n_; }
  double min_cell() const { return 1.0 / std::max({inv_[0], inv_[1], inv_[2]}); }

 private:
  Vec3 lo_;
  std::array<long, 3> n_{};
  std::array<double, 3> inv_{};
  std::vector<std::vector<Index>> buckets_;
};

}  // namespace

Pcvf transfer_field(const Pcvf& source, const MeshPtr& target) {
  const TetMesh& src = *source.mesh();
  if (source.mesh() == target) return source;

  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity()), hi = -lo;
  for (const Vec3& p : src.vertices()) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  BucketGrid boxes(lo, hi, src.num_tets()), centers(lo, hi, src.num_tets());
  std::vector<Vec3> bary(src.num_tets());
  for (std::size_t t = 0; t < src.num_tets(); ++t) {
    Vec3 tlo = Vec3::Constant(std::numeric_limits<double>::infinity()), thi = -tlo;
    for (Index v : src.tets()[t]) {
      tlo = tlo.cwiseMin(src.vertices()[v]);
      thi = thi.cwiseMax(src.vertices()[v]);
    }
    const auto a = boxes.cell_of(tlo), b = boxes.cell_of(thi);
    for (long k = a[2]; k <= b[2]; ++k)
      for (long j = a[1]; j <= b[1]; ++j)
        for (long i = a[0]; i <= b[0]; ++i) boxes.at({i, j, k}).push_back(static_cast<Index>(t));
    bary[t] = src.barycenter(t);
    centers.at(centers.cell_of(bary[t])).push_back(static_cast<Index>(t));
  }

  auto contains = [&](Index t, const Vec3& p) {
    const TetGeometry& g = src.geometry(static_cast<std::size_t>(t));
    const Vec3 d = p - bary[static_cast<std::size_t>(t)];
    for (int k = 0; k < 4; ++k)
      if (0.25 + g.bary_gradients[k].dot(d) < -1e-12) return false;
    return true;
  };

  std::vector<Vec3> out(target->num_tets());
  for (std::size_t t = 0; t < target->num_tets(); ++t) {
    const Vec3 p = target->barycenter(t);
    Index hit = -1;
    for (Index s : boxes.at(boxes.cell_of(p)))
      if (contains(s, p)) {
        hit = s;
        break;
      }
    if (hit < 0) {
      // Nearest barycenter: grow rings until the best distance is inside the
      // searched region.
      const auto c = centers.cell_of(p);
      const auto& n = centers.dims();
      double best = std::numeric_limits<double>::infinity();
      const long max_ring = std::max({n[0], n[1], n[2]});
      for (long ring = 0; ring <= max_ring; ++ring) {
        for (long k = c[2] - ring; k <= c[2] + ring; ++k)
          for (long j = c[1] - ring; j <= c[1] + ring; ++j)
            for (long i = c[0] - ring; i <= c[0] + ring; ++i) {
              if (std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(k - c[2])}) != ring) continue;
              if (i < 0 || j < 0 || k < 0 || i >= n[0] || j >= n[1] || k >= n[2]) continue;
              for (Index s : centers.at({i, j, k})) {
                const double d = (bary[static_cast<std::size_t>(s)] - p).squaredNorm();
                if (d < best || (d == best && s < hit)) {
                  best = d;
                  hit = s;
                }
              }
            }
        if (hit >= 0 && std::sqrt(best) <= ring * centers.min_cell()) break;
      }
    }
    out[t] = source[static_cast<std::size_t>(hit)];
  }
  return Pcvf(target, std::move(out));
}

}  // namespace hodge3d
