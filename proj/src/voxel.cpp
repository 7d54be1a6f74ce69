#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "hodge3d/mesh.hpp"

namespace hodge3d {

namespace {

constexpr const char* kStage = "generate_voxel_domain";
// Moved tets keep at least this fraction of their voxel volume.
constexpr double kMinVolumeRatio = 0.05;

// Signed level function, <= 0 inside the domain.
std::function<double(const Vec3&)> level_function(const DomainSpec& d) {
  switch (d.kind) {
    case DomainKind::Ball:
      return [r = d.radius](const Vec3& p) { return p.norm() - r; };
    case DomainKind::BallWithCavity:
      return [r = d.radius, eps = d.inner_radius](const Vec3& p) {
        const double n = p.norm();
        return std::max(n - r, eps - n);
      };
    case DomainKind::SolidTorus:
      return [R = d.radius, r = d.inner_radius](const Vec3& p) {
        const double rho = std::hypot(p.x(), p.y()) - R;
        return std::hypot(rho, p.z()) - r;
      };
    case DomainKind::Cylinder:
      return [r = d.radius, half = 0.5 * d.length](const Vec3& p) {
        return std::max(std::hypot(p.x(), p.y()) - r, std::abs(p.z()) - half);
      };
    case DomainKind::Box:
      return [half = 0.5 * d.extents](const Vec3& p) {
        return (p.cwiseAbs() - half).maxCoeff();
      };
  }
  throw InputError(kStage, "unknown domain kind");
}

// Closest point of the domain surface.
Vec3 surface_point(const DomainSpec& d, const Vec3& p) {
  auto on_sphere = [](const Vec3& c, double r, const Vec3& q) {
    const Vec3 v = q - c;
    const double n = v.norm();
    return n > 0.0 ? Vec3(c + v * (r / n)) : Vec3(c + Vec3(r, 0.0, 0.0));
  };
  switch (d.kind) {
    case DomainKind::Ball:
      return on_sphere(Vec3::Zero(), d.radius, p);
    case DomainKind::BallWithCavity: {
      const double n = p.norm();
      const double r = std::abs(n - d.inner_radius) < std::abs(n - d.radius) ? d.inner_radius
                                                                                : d.radius;
      return on_sphere(Vec3::Zero(), r, p);
    }
    case DomainKind::SolidTorus: {
      const double rho = std::hypot(p.x(), p.y());
      const Vec3 core = rho > 0.0 ? Vec3(p.x() * d.radius / rho, p.y() * d.radius / rho, 0.0)
                                  : Vec3(d.radius, 0.0, 0.0);
      return on_sphere(core, d.inner_radius, p);
    }
    case DomainKind::Cylinder: {
      const double half = 0.5 * d.length;
      const double rho = std::hypot(p.x(), p.y());
      const Vec3 radial = rho > 0.0 ? Vec3(p.x() / rho, p.y() / rho, 0.0) : Vec3(1.0, 0.0, 0.0);
      if (rho <= d.radius && std::abs(p.z()) <= half) {
        // Inside: the nearer of side and caps.
        if (d.radius - rho <= half - std::abs(p.z())) return radial * d.radius + Vec3(0, 0, p.z());
        return Vec3(p.x(), p.y(), std::copysign(half, p.z()));
      }
      return radial * std::min(rho, d.radius) + Vec3(0, 0, std::clamp(p.z(), -half, half));
    }
    case DomainKind::Box: {
      const Vec3 half = 0.5 * d.extents;
      Vec3 q = p.cwiseMax(-half).cwiseMin(half);
      if ((p.cwiseAbs() - half).maxCoeff() <= 0.0) {
        Eigen::Index axis = 0;
        (half - p.cwiseAbs()).minCoeff(&axis);
        q[axis] = std::copysign(half[axis], p[axis]);
      }
      return q;
    }
  }
  return p;
}

// Moves the flagged vertices towards their targets, halving the step of every
// vertex of a tet whose signed volume would drop below `min_ratio` of its
// voxel value `original`.
void conform(std::vector<Vec3>& vertices, const std::vector<std::array<Index, 4>>& tets,
             const std::vector<Vec3>& target, const std::vector<std::uint8_t>& moving,
             double min_ratio, const std::vector<double>& original) {
  auto det = [](const std::array<Vec3, 4>& x) {
    return (x[1] - x[0]).dot((x[2] - x[0]).cross(x[3] - x[0]));
  };
  std::vector<double> step(vertices.size(), 1.0);
  auto position = [&](Index v) {
    return moving[v] ? Vec3(vertices[v] + step[v] * (target[v] - vertices[v])) : vertices[v];
  };
  for (int round = 0; round < 30; ++round) {
    bool bad = false;
    for (std::size_t t = 0; t < tets.size(); ++t) {
      std::array<Vec3, 4> x;
      for (int k = 0; k < 4; ++k) x[k] = position(tets[t][k]);
      if (det(x) / original[t] >= min_ratio) continue;
      bad = true;
      for (Index v : tets[t]) step[v] *= 0.5;
    }
    if (!bad) break;
    if (round == 29)
      for (Index v = 0; v < static_cast<Index>(vertices.size()); ++v) step[v] = 0.0;
  }
  for (Index v = 0; v < static_cast<Index>(vertices.size()); ++v) vertices[v] = position(v);
}

// Tangential Laplacian smoothing of the snapped boundary: each boundary vertex
// moves to the surface point nearest the mean of its boundary neighbours, and
// interior vertices next to the boundary to the mean of their neighbours.
void smooth(std::vector<Vec3>& vertices, const std::vector<std::array<Index, 4>>& tets,
            const DomainSpec& domain, const std::vector<std::uint8_t>& moving, int rounds, bool interior,
            double min_ratio, const std::vector<double>& original) {
  std::vector<std::array<Index, 3>> faces;
  faces.reserve(tets.size() * 4);
  for (const auto& t : tets)
    for (int skip = 0; skip < 4; ++skip) {
      std::array<Index, 3> f;
      int k = 0;
      for (int a = 0; a < 4; ++a)
        if (a != skip) f[k++] = t[a];
      std::sort(f.begin(), f.end());
      faces.push_back(f);
    }
  std::sort(faces.begin(), faces.end());
  std::vector<std::vector<Index>> bnb(vertices.size()), nb(vertices.size());
  std::vector<std::uint8_t> on_boundary(vertices.size(), 0);
  for (std::size_t i = 0; i < faces.size();) {
    std::size_t j = i;
    while (j < faces.size() && faces[j] == faces[i]) ++j;
    if (j - i == 1)
      for (int a = 0; a < 3; ++a) {
        on_boundary[faces[i][a]] = 1;
        for (int b = 0; b < 3; ++b)
          if (a != b) bnb[faces[i][a]].push_back(faces[i][b]);
      }
    i = j;
  }
  for (const auto& t : tets)
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        if (a != b) nb[t[a]].push_back(t[b]);
  for (auto* lists : {&bnb, &nb})
    for (auto& l : *lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  std::vector<std::uint8_t> inner(vertices.size(), 0);
  if (interior)
    for (std::size_t v = 0; v < vertices.size(); ++v)
      if (!on_boundary[v])
        for (Index w : nb[v])
          if (on_boundary[w]) inner[v] = 1;

  std::vector<Vec3> target(vertices.size());
  std::vector<std::uint8_t> active(vertices.size(), 0);
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t v = 0; v < vertices.size(); ++v) {
      active[v] = 0;
      if (on_boundary[v] && moving[v]) {
        Vec3 m = Vec3::Zero();
        for (Index w : bnb[v]) m += vertices[w];
        target[v] = surface_point(domain, m / static_cast<double>(bnb[v].size()));
        active[v] = 1;
      } else if (inner[v]) {
        Vec3 m = Vec3::Zero();
        for (Index w : nb[v]) m += vertices[w];
        target[v] = m / static_cast<double>(nb[v].size());
        active[v] = 1;
      }
    }
    conform(vertices, tets, target, active, min_ratio, original);
  }
}

Vec3 half_extent(const DomainSpec& d) {
  switch (d.kind) {
    case DomainKind::Ball:
    case DomainKind::BallWithCavity:
      return Vec3::Constant(d.radius);
    case DomainKind::SolidTorus:
      return Vec3(d.radius + d.inner_radius, d.radius + d.inner_radius, d.inner_radius);
    case DomainKind::Cylinder:
      return Vec3(d.radius, d.radius, 0.5 * d.length);
    case DomainKind::Box:
      return 0.5 * d.extents;
  }
  return Vec3::Zero();
}

// Occupancy of a padded cube grid.
class VoxelGrid {
 public:
  VoxelGrid(std::array<long, 3> lo, std::array<long, 3> n) : lo_(lo), n_(n) {
    cells_.assign(static_cast<std::size_t>(n[0] * n[1] * n[2]), 0);
  }
  const std::array<long, 3>& lo() const { return lo_; }
  const std::array<long, 3>& size() const { return n_; }
  std::size_t id(long i, long j, long k) const {
    return static_cast<std::size_t>((k * n_[1] + j) * n_[0] + i);
  }
  bool filled(long i, long j, long k) const { return cells_[id(i, j, k)] != 0; }
  void set(long i, long j, long k) { cells_[id(i, j, k)] = 1; }
  bool on_pad(long i, long j, long k) const {
    return i == 0 || j == 0 || k == 0 || i == n_[0] - 1 || j == n_[1] - 1 || k == n_[2] - 1;
  }

 private:
  std::array<long, 3> lo_, n_;
  std::vector<std::uint8_t> cells_;
};

// True if the cells selected by `mask` (bit b = cube (b&1, b>>1&1, b>>2&1) of a
// 2x2x2 block) are face-connected.
bool block_connected(unsigned mask) {
  if (mask == 0) return true;
  unsigned seen = mask & (~mask + 1);
  for (bool grew = true; grew;) {
    grew = false;
    for (unsigned b = 0; b < 8; ++b) {
      if (!(seen & (1u << b))) continue;
      for (unsigned axis = 0; axis < 3; ++axis) {
        const unsigned nb = b ^ (1u << axis);
        if ((mask & (1u << nb)) && !(seen & (1u << nb))) {
          seen |= 1u << nb;
          grew = true;
        }
      }
    }
  }
  return seen == mask;
}

// Adds cubes until the boundary of the cube union is a 2-manifold: no edge
// with a diagonal filled/empty pattern and no vertex whose filled or empty
// octants fall apart. Returns the number of cubes added.
std::size_t repair_pinches(VoxelGrid& grid, const std::function<double(long, long, long)>& depth) {
  const auto& n = grid.size();
  std::size_t added = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (long k = 1; k < n[2]; ++k)
      for (long j = 1; j < n[1]; ++j)
        for (long i = 1; i < n[0]; ++i) {
          // Block of the 8 cubes around grid vertex (i, j, k).
          unsigned mask = 0;
          for (unsigned b = 0; b < 8; ++b)
            if (grid.filled(i - 1 + (b & 1), j - 1 + ((b >> 1) & 1), k - 1 + ((b >> 2) & 1)))
              mask |= 1u << b;
          if (mask == 0 || mask == 0xff) continue;

          bool pinched = !block_connected(mask) || !block_connected(~mask & 0xffu);
          // Edges through this vertex: 4 cubes around each axis-aligned half edge.
          for (unsigned axis = 0; axis < 3 && !pinched; ++axis)
            for (unsigned side = 0; side < 2 && !pinched; ++side) {
              const unsigned a1 = 1u << ((axis + 1) % 3), a2 = 1u << ((axis + 2) % 3);
              const unsigned base = side ? (1u << axis) : 0u;
              const bool c00 = mask & (1u << base), c11 = mask & (1u << (base | a1 | a2));
              const bool c10 = mask & (1u << (base | a1)), c01 = mask & (1u << (base | a2));
              if (c00 == c11 && c10 == c01 && c00 != c10) pinched = true;
            }
          if (!pinched) continue;

          // Fill the empty cube of the block lying deepest inside the domain.
          double best = std::numeric_limits<double>::infinity();
          std::array<long, 3> pick{-1, -1, -1};
          for (unsigned b = 0; b < 8; ++b) {
            if (mask & (1u << b)) continue;
            const long ci = i - 1 + (b & 1), cj = j - 1 + ((b >> 1) & 1),
                       ck = k - 1 + ((b >> 2) & 1);
            const double dpt = depth(ci, cj, ck);
            if (dpt < best) {
              best = dpt;
              pick = {ci, cj, ck};
            }
          }
          if (grid.on_pad(pick[0], pick[1], pick[2]))
            throw InputError(kStage, "pinch repair reached the grid padding");
          grid.set(pick[0], pick[1], pick[2]);
          ++added;
          changed = true;
        }
  }
  return added;
}

}  // namespace

DomainSpec default_domain(DomainKind kind) {
  DomainSpec d;
  d.kind = kind;
  switch (kind) {
    case DomainKind::Ball:
      d.radius = 1.0;
      break;
    case DomainKind::BallWithCavity:
      d.radius = 1.0;
      d.inner_radius = 0.3;
      break;
    case DomainKind::SolidTorus:
      d.radius = 1.0;
      d.inner_radius = 0.4;
      break;
    case DomainKind::Cylinder:
      d.radius = 0.5;
      d.length = 2.0;
      break;
    case DomainKind::Box:
      d.extents = Vec3(1.0, 1.0, 1.0);
      break;
  }
  return d;
}

DomainKind parse_domain_kind(const std::string& name) {
  if (name == "ball") return DomainKind::Ball;
  if (name == "ball_with_cavity") return DomainKind::BallWithCavity;
  if (name == "solid_torus") return DomainKind::SolidTorus;
  if (name == "cylinder") return DomainKind::Cylinder;
  if (name == "box") return DomainKind::Box;
  throw InputError("config", "unknown domain '" + name + "'");
}

std::string to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::Ball: return "ball";
    case DomainKind::BallWithCavity: return "ball_with_cavity";
    case DomainKind::SolidTorus: return "solid_torus";
    case DomainKind::Cylinder: return "cylinder";
    case DomainKind::Box: return "box";
  }
  return "unknown";
}

BettiNumbers expected_betti(DomainKind kind) {
  switch (kind) {
    case DomainKind::BallWithCavity: return {1, 0, 1};
    case DomainKind::SolidTorus: return {1, 1, 0};
    default: return {1, 0, 0};
  }
}

MeshPtr generate_voxel_domain(const DomainSpec& domain, double h) {
  if (!(h > 0.0)) throw InputError(kStage, "voxel size must be positive");
  const auto inside = level_function(domain);
  const Vec3 ext = half_extent(domain);

  std::array<long, 3> lo{}, n{};
  for (int a = 0; a < 3; ++a) {
    lo[a] = static_cast<long>(std::floor(-ext[a] / h)) - 1;
    const long hi = static_cast<long>(std::ceil(ext[a] / h)) + 1;
    n[a] = hi - lo[a];
  }
  if (static_cast<double>(n[0]) * n[1] * n[2] > 2.0e8)
    throw InputError(kStage, "voxel grid too large for h = " + std::to_string(h));

  auto point = [&](long i, long j, long k) {
    return Vec3((lo[0] + i) * h, (lo[1] + j) * h, (lo[2] + k) * h);
  };

  // Level function at the grid points.
  const long px = n[0] + 1, py = n[1] + 1, pz = n[2] + 1;
  const double slack = 1e-12 * h;
  std::vector<std::uint8_t> point_inside(static_cast<std::size_t>(px * py * pz));
  for (long k = 0; k < pz; ++k)
    for (long j = 0; j < py; ++j)
      for (long i = 0; i < px; ++i)
        point_inside[(k * py + j) * px + i] = inside(point(i, j, k)) <= slack ? 1 : 0;

  VoxelGrid grid(lo, n);
  for (long k = 1; k + 1 < n[2]; ++k)
    for (long j = 1; j + 1 < n[1]; ++j)
      for (long i = 1; i + 1 < n[0]; ++i) {
        bool all = true;
        for (unsigned b = 0; b < 8 && all; ++b) {
          const long gi = i + (b & 1), gj = j + ((b >> 1) & 1), gk = k + ((b >> 2) & 1);
          all = point_inside[(gk * py + gj) * px + gi] != 0;
        }
        if (domain.conform_boundary) all = inside(point(i, j, k) + Vec3::Constant(0.5 * h)) < 0.0;
        if (all) grid.set(i, j, k);
      }

  repair_pinches(grid, [&](long i, long j, long k) {
    return inside(point(i, j, k) + Vec3::Constant(0.5 * h));
  });

  std::vector<Index> vertex_id(static_cast<std::size_t>(px * py * pz), -1);
  std::vector<Vec3> vertices;
  std::vector<std::array<Index, 4>> tets;
  auto vid = [&](long i, long j, long k) {
    Index& id = vertex_id[(k * py + j) * px + i];
    if (id < 0) {
      id = static_cast<Index>(vertices.size());
      vertices.push_back(point(i, j, k));
    }
    return id;
  };

  // Kuhn subdivision: one tet per monotone lattice path from corner 000 to 111.
  static constexpr std::array<std::array<int, 3>, 6> kPaths{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (long k = 0; k < n[2]; ++k)
    for (long j = 0; j < n[1]; ++j)
      for (long i = 0; i < n[0]; ++i) {
        if (!grid.filled(i, j, k)) continue;
        for (const auto& path : kPaths) {
          std::array<long, 3> c{i, j, k};
          std::array<Index, 4> tet{};
          tet[0] = vid(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[path[s]];
            tet[s + 1] = vid(c[0], c[1], c[2]);
          }
          tets.push_back(tet);
        }
      }
  if (tets.empty()) throw InputError(kStage, "no voxel lies inside the domain at this h");

  if (domain.conform_boundary) {
    std::vector<Vec3> target(vertices.size());
    std::vector<std::uint8_t> moving(vertices.size(), 0);
    for (long k = 1; k < pz - 1; ++k)
      for (long j = 1; j < py - 1; ++j)
        for (long i = 1; i < px - 1; ++i) {
          const Index v = vertex_id[(k * py + j) * px + i];
          if (v < 0) continue;
          unsigned count = 0;
          for (unsigned b = 0; b < 8; ++b)
            count += grid.filled(i - 1 + (b & 1), j - 1 + ((b >> 1) & 1), k - 1 + ((b >> 2) & 1));
          if (count == 8) continue;
          moving[v] = 1;
          target[v] = surface_point(domain, vertices[v]);
        }
    std::vector<double> original(tets.size());
    for (std::size_t t = 0; t < tets.size(); ++t) {
      const auto& x = tets[t];
      original[t] = (vertices[x[1]] - vertices[x[0]]).dot((vertices[x[2]] - vertices[x[0]]).cross(vertices[x[3]] - vertices[x[0]]));
    }
    conform(vertices, tets, target, moving, kMinVolumeRatio, original);
    smooth(vertices, tets, domain, moving, 3, true, kMinVolumeRatio, original);
  }

  MeshPtr mesh = build_complex(std::move(vertices), std::move(tets));
  const BettiNumbers got = betti_numbers(*mesh);
  const BettiNumbers want = expected_betti(domain.kind);
  if (!(got == want)) {
    std::ostringstream os;
    os << "topology not resolved at h = " << h << ": betti (" << got.b0 << "," << got.b1 << ","
       << got.b2 << "), expected (" << want.b0 << "," << want.b1 << "," << want.b2 << ")";
    throw InputError(kStage, os.str());
  }
  return mesh;
}

}  // namespace hodge3d
