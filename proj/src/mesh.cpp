#include "hodge3d/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace hodge3d {

namespace {

constexpr const char* kStage = "build_complex";

std::uint64_t edge_key(Index a, Index b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
         static_cast<std::uint32_t>(b);
}

std::array<Index, 3> sorted_triple(Index a, Index b, Index c) {
  std::array<Index, 3> k{a, b, c};
  std::sort(k.begin(), k.end());
  return k;
}

double signed_det(const std::array<Vec3, 4>& p) {
  return (p[1] - p[0]).dot((p[2] - p[0]).cross(p[3] - p[0]));
}

// Disjoint-set forest used for component counting.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

TetGeometry tet_geometry(const std::array<Vec3, 4>& p) {
  const Vec3 e1 = p[1] - p[0];
  const Vec3 e2 = p[2] - p[0];
  const Vec3 e3 = p[3] - p[0];
  const double det = e1.dot(e2.cross(e3));
  if (det == 0.0) throw InputError("tet_geometry", "degenerate tetrahedron (zero volume)");

  TetGeometry g;
  g.volume = std::abs(det) / 6.0;
  // Rows of the inverse Jacobian are the gradients of the barycentric coordinates 1..3.
  g.bary_gradients[1] = e2.cross(e3) / det;
  g.bary_gradients[2] = e3.cross(e1) / det;
  g.bary_gradients[3] = e1.cross(e2) / det;
  g.bary_gradients[0] = -(g.bary_gradients[1] + g.bary_gradients[2] + g.bary_gradients[3]);
  return g;
}

double TetMesh::total_volume() const {
  double v = 0.0;
  double c = 0.0;
  for (const auto& g : geometry_) {
    const double u = v + g.volume;
    c += std::abs(v) >= g.volume ? (v - u) + g.volume : (g.volume - u) + v;
    v = u;
  }
  return v + c;
}

Vec3 TetMesh::barycenter(std::size_t t) const {
  const auto& q = tets_[t];
  return 0.25 * (vertices_[q[0]] + vertices_[q[1]] + vertices_[q[2]] + vertices_[q[3]]);
}

MeshPtr build_complex(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets) {
  if (tets.empty()) throw InputError(kStage, "mesh has no tetrahedra");
  const auto n_v = static_cast<Index>(vertices.size());

  for (std::size_t t = 0; t < tets.size(); ++t) {
    const auto& q = tets[t];
    for (int k = 0; k < 4; ++k) {
      if (q[k] < 0 || q[k] >= n_v) {
        std::ostringstream os;
        os << "tet " << t << " references vertex " << q[k] << " out of range [0, " << n_v << ")";
        throw InputError(kStage, os.str());
      }
      for (int l = 0; l < k; ++l)
        if (q[k] == q[l]) {
          std::ostringstream os;
          os << "tet " << t << " repeats vertex " << q[k];
          throw InputError(kStage, os.str());
        }
    }
  }

  Vec3 lo = vertices.front(), hi = vertices.front();
  for (const auto& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const double diag = (hi - lo).norm();
  const double eps_vol = 1e-12 * diag * diag * diag;

  for (std::size_t t = 0; t < tets.size(); ++t) {
    auto& q = tets[t];
    const double det =
        signed_det({vertices[q[0]], vertices[q[1]], vertices[q[2]], vertices[q[3]]});
    if (std::abs(det) / 6.0 <= eps_vol) {
      std::ostringstream os;
      os << "tet " << t << " is degenerate (volume " << std::abs(det) / 6.0 << " <= " << eps_vol
         << ")";
      throw InputError(kStage, os.str());
    }
    if (det < 0.0) std::swap(q[2], q[3]);
  }

  {
    std::vector<std::array<Index, 4>> sorted(tets);
    for (auto& q : sorted) std::sort(q.begin(), q.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InputError(kStage, "non-manifold complex: duplicate tetrahedron");
  }

  {
    std::vector<std::uint8_t> used(vertices.size(), 0);
    for (const auto& q : tets)
      for (Index v : q) used[v] = 1;
    const auto it = std::find(used.begin(), used.end(), 0);
    if (it != used.end()) {
      std::ostringstream os;
      os << "vertex " << (it - used.begin()) << " is not used by any tetrahedron";
      throw InputError(kStage, os.str());
    }
  }

  auto mesh = std::shared_ptr<TetMesh>(new TetMesh());
  TetMesh& m = *mesh;
  const std::size_t n_t = tets.size();

  // Edges, oriented from the lower to the higher global vertex index.
  std::vector<std::uint64_t> keys;
  keys.reserve(6 * n_t);
  for (const auto& q : tets)
    for (const auto& le : kLocalEdges) keys.push_back(edge_key(q[le[0]], q[le[1]]));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  m.edges_.resize(keys.size());
  for (std::size_t e = 0; e < keys.size(); ++e)
    m.edges_[e] = {static_cast<Index>(keys[e] >> 32), static_cast<Index>(keys[e] & 0xffffffffu)};

  auto find_edge = [&keys](Index a, Index b) {
    return static_cast<Index>(std::lower_bound(keys.begin(), keys.end(), edge_key(a, b)) -
                              keys.begin());
  };

  m.tet_edges_.resize(n_t);
  m.tet_edge_signs_.resize(n_t);
  for (std::size_t t = 0; t < n_t; ++t) {
    const auto& q = tets[t];
    for (int k = 0; k < 6; ++k) {
      const Index a = q[kLocalEdges[k][0]];
      const Index b = q[kLocalEdges[k][1]];
      m.tet_edges_[t][k] = find_edge(a, b);
      m.tet_edge_signs_[t][k] = a < b ? 1 : -1;
    }
  }

  // Faces: sort (key, tet, local) records and group equal keys.
  struct FaceRecord {
    std::array<Index, 3> key;
    Index tet;
    std::int8_t local;
  };
  std::vector<FaceRecord> records;
  records.reserve(4 * n_t);
  for (std::size_t t = 0; t < n_t; ++t) {
    const auto& q = tets[t];
    records.push_back({sorted_triple(q[1], q[2], q[3]), static_cast<Index>(t), 0});
    records.push_back({sorted_triple(q[0], q[2], q[3]), static_cast<Index>(t), 1});
    records.push_back({sorted_triple(q[0], q[1], q[3]), static_cast<Index>(t), 2});
    records.push_back({sorted_triple(q[0], q[1], q[2]), static_cast<Index>(t), 3});
  }
  std::sort(records.begin(), records.end(), [](const FaceRecord& a, const FaceRecord& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.tet < b.tet;
  });

  m.tet_faces_.resize(n_t);
  for (std::size_t i = 0; i < records.size();) {
    std::size_t j = i + 1;
    while (j < records.size() && records[j].key == records[i].key) ++j;
    if (j - i > 2) {
      std::ostringstream os;
      os << "non-manifold face (" << records[i].key[0] << ", " << records[i].key[1] << ", "
         << records[i].key[2] << ") shared by " << (j - i) << " tetrahedra";
      throw InputError(kStage, os.str());
    }
    const auto f = static_cast<Index>(m.faces_.size());
    m.faces_.push_back(records[i].key);
    m.face_tets_.push_back({records[i].tet, j - i == 2 ? records[i + 1].tet : Index{-1}});
    for (std::size_t r = i; r < j; ++r) m.tet_faces_[records[r].tet][records[r].local] = f;
    i = j;
  }

  m.boundary_vertex_.assign(vertices.size(), 0);
  m.boundary_edge_.assign(m.edges_.size(), 0);
  std::size_t n_bf = 0;
  for (std::size_t f = 0; f < m.faces_.size(); ++f) {
    if (m.face_tets_[f][1] >= 0) continue;
    ++n_bf;
    const auto& k = m.faces_[f];
    for (Index v : k) m.boundary_vertex_[v] = 1;
    m.boundary_edge_[find_edge(k[0], k[1])] = 1;
    m.boundary_edge_[find_edge(k[0], k[2])] = 1;
    m.boundary_edge_[find_edge(k[1], k[2])] = 1;
  }

  m.geometry_.resize(n_t);
  for (std::size_t t = 0; t < n_t; ++t) {
    const auto& q = tets[t];
    m.geometry_[t] = tet_geometry({vertices[q[0]], vertices[q[1]], vertices[q[2]], vertices[q[3]]});
  }

  m.counts_.n_v = vertices.size();
  m.counts_.n_e = m.edges_.size();
  m.counts_.n_f = m.faces_.size();
  m.counts_.n_t = n_t;
  m.counts_.n_bf = n_bf;
  m.counts_.n_bv = static_cast<std::size_t>(
      std::count(m.boundary_vertex_.begin(), m.boundary_vertex_.end(), 1));
  m.counts_.n_be = static_cast<std::size_t>(
      std::count(m.boundary_edge_.begin(), m.boundary_edge_.end(), 1));

  m.vertices_ = std::move(vertices);
  m.tets_ = std::move(tets);
  return mesh;
}

namespace {

struct BoundarySurfaces {
  int count = 0;
  std::vector<long> euler;  // per component
};

BoundarySurfaces boundary_surfaces(const TetMesh& mesh) {
  const std::size_t n_f = mesh.num_faces();
  std::vector<Index> bfaces;
  for (std::size_t f = 0; f < n_f; ++f)
    if (mesh.is_boundary_face(f)) bfaces.push_back(static_cast<Index>(f));

  // Boundary faces are glued along boundary edges; each such edge must bound
  // exactly two boundary faces.
  struct EdgeUse {
    std::uint64_t key;
    Index bface;
  };
  std::vector<EdgeUse> uses;
  uses.reserve(3 * bfaces.size());
  for (std::size_t i = 0; i < bfaces.size(); ++i) {
    const auto& k = mesh.faces()[bfaces[i]];
    uses.push_back({edge_key(k[0], k[1]), static_cast<Index>(i)});
    uses.push_back({edge_key(k[0], k[2]), static_cast<Index>(i)});
    uses.push_back({edge_key(k[1], k[2]), static_cast<Index>(i)});
  }
  std::sort(uses.begin(), uses.end(), [](const EdgeUse& a, const EdgeUse& b) {
    return a.key != b.key ? a.key < b.key : a.bface < b.bface;
  });

  UnionFind uf(bfaces.size());
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i + 1;
    while (j < uses.size() && uses[j].key == uses[i].key) ++j;
    if (j - i != 2)
      throw InputError("betti_numbers", "non-manifold boundary: an edge bounds " +
                                            std::to_string(j - i) + " boundary faces");
    uf.unite(uses[i].bface, uses[i + 1].bface);
    i = j;
  }

  std::vector<int> comp_id(bfaces.size(), -1);
  std::vector<int> root_to_comp(bfaces.size(), -1);
  BoundarySurfaces out;
  for (std::size_t i = 0; i < bfaces.size(); ++i) {
    const std::size_t r = uf.find(i);
    if (root_to_comp[r] < 0) root_to_comp[r] = out.count++;
    comp_id[i] = root_to_comp[r];
  }

  std::vector<long> n_faces(out.count, 0), n_edges(out.count, 0), n_verts(out.count, 0);
  for (std::size_t i = 0; i < bfaces.size(); ++i) ++n_faces[comp_id[i]];
  for (std::size_t i = 0; i < uses.size(); i += 2) ++n_edges[comp_id[uses[i].bface]];

  std::vector<std::pair<Index, int>> vert_comp;
  vert_comp.reserve(3 * bfaces.size());
  for (std::size_t i = 0; i < bfaces.size(); ++i)
    for (Index v : mesh.faces()[bfaces[i]]) vert_comp.emplace_back(v, comp_id[i]);
  std::sort(vert_comp.begin(), vert_comp.end());
  vert_comp.erase(std::unique(vert_comp.begin(), vert_comp.end()), vert_comp.end());
  for (const auto& vc : vert_comp) ++n_verts[vc.second];

  out.euler.resize(out.count);
  for (int c = 0; c < out.count; ++c) out.euler[c] = n_verts[c] - n_edges[c] + n_faces[c];
  return out;
}

}  // namespace

int boundary_component_count(const TetMesh& mesh) { return boundary_surfaces(mesh).count; }

BettiNumbers betti_numbers(const TetMesh& mesh) {
  const std::size_t n_t = mesh.num_tets();
  UnionFind uf(n_t);
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const auto& ft = mesh.face_tets(f);
    if (ft[1] >= 0) uf.unite(ft[0], ft[1]);
  }
  int b0 = 0;
  for (std::size_t t = 0; t < n_t; ++t)
    if (uf.find(t) == t) ++b0;

  const BoundarySurfaces surfaces = boundary_surfaces(mesh);
  int genus_sum = 0;
  for (long chi : surfaces.euler) {
    if ((chi % 2) != 0 || chi > 2)
      throw InputError("betti_numbers", "boundary component with Euler characteristic " +
                                            std::to_string(chi) + " (non-manifold input)");
    genus_sum += static_cast<int>((2 - chi) / 2);
  }
  return {b0, genus_sum, surfaces.count - b0};
}

}  // namespace hodge3d
