#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "hodge3d/common.hpp"

namespace hodge3d {

/// Per-tetrahedron geometry. The barycentric gradients are constant on the tet.
struct TetGeometry {
  double volume = 0.0;
  std::array<Vec3, 4> bary_gradients;
};

struct MeshCounts {
  std::size_t n_v = 0, n_e = 0, n_f = 0, n_t = 0;
  std::size_t n_bv = 0, n_be = 0, n_bf = 0;

  std::size_t n_iv() const { return n_v - n_bv; }
  std::size_t n_ie() const { return n_e - n_be; }
  std::size_t n_if() const { return n_f - n_bf; }
  long euler_characteristic() const {
    return static_cast<long>(n_v) - static_cast<long>(n_e) + static_cast<long>(n_f) -
           static_cast<long>(n_t);
  }
};

/// Local edge k of a tet joins local vertices kLocalEdges[k][0] -> kLocalEdges[k][1].
inline constexpr std::array<std::array<int, 2>, 6> kLocalEdges{
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

/// Immutable simplicial 3-complex.
///
/// Edges are stored as (low, high) global vertex index pairs and faces as sorted
/// triples; both lists are sorted lexicographically. Local face k of a tet is the
/// face opposite local vertex k. Every tet is ordered so its signed volume is
/// positive.
class TetMesh {
 public:
  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<std::array<Index, 4>>& tets() const { return tets_; }
  const std::vector<std::array<Index, 2>>& edges() const { return edges_; }
  const std::vector<std::array<Index, 3>>& faces() const { return faces_; }

  /// Global edge indices of the 6 local edges (ordered as kLocalEdges).
  const std::array<Index, 6>& tet_edges(std::size_t t) const { return tet_edges_[t]; }
  /// +1 if local edge k runs along the global low->high orientation, -1 otherwise.
  const std::array<std::int8_t, 6>& tet_edge_signs(std::size_t t) const {
    return tet_edge_signs_[t];
  }
  const std::array<Index, 4>& tet_faces(std::size_t t) const { return tet_faces_[t]; }
  /// The one or two tets incident to a face; the second entry is -1 on the boundary.
  const std::array<Index, 2>& face_tets(std::size_t f) const { return face_tets_[f]; }

  bool is_boundary_vertex(std::size_t v) const { return boundary_vertex_[v] != 0; }
  bool is_boundary_edge(std::size_t e) const { return boundary_edge_[e] != 0; }
  bool is_boundary_face(std::size_t f) const { return face_tets_[f][1] < 0; }

  const TetGeometry& geometry(std::size_t t) const { return geometry_[t]; }
  const MeshCounts& counts() const { return counts_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_tets() const { return tets_.size(); }

  double total_volume() const;
  Vec3 barycenter(std::size_t t) const;

 private:
  friend std::shared_ptr<const TetMesh> build_complex(std::vector<Vec3>,
                                                      std::vector<std::array<Index, 4>>);
  TetMesh() = default;

  std::vector<Vec3> vertices_;
  std::vector<std::array<Index, 4>> tets_;
  std::vector<std::array<Index, 2>> edges_;
  std::vector<std::array<Index, 3>> faces_;
  std::vector<std::array<Index, 6>> tet_edges_;
  std::vector<std::array<std::int8_t, 6>> tet_edge_signs_;
  std::vector<std::array<Index, 4>> tet_faces_;
  std::vector<std::array<Index, 2>> face_tets_;
  std::vector<std::uint8_t> boundary_vertex_;
  std::vector<std::uint8_t> boundary_edge_;
  std::vector<TetGeometry> geometry_;
  MeshCounts counts_;
};

using MeshPtr = std::shared_ptr<const TetMesh>;

/// Builds and validates the complex. Throws InputError on out-of-range or unused
/// vertices, degenerate or duplicate tets, and faces shared by three or more tets.
MeshPtr build_complex(std::vector<Vec3> vertices, std::vector<std::array<Index, 4>> tets);

/// Volume and barycentric gradients of a tet given its four corners.
/// Throws InputError if the tet is flat (zero determinant).
TetGeometry tet_geometry(const std::array<Vec3, 4>& corners);

inline const TetGeometry& tet_geometry(const TetMesh& mesh, std::size_t t) {
  return mesh.geometry(t);
}

struct BettiNumbers {
  int b0 = 0, b1 = 0, b2 = 0;
  /// dim H^2(M): number of cavities, the dimension of the Neumann fields.
  int h2() const { return b2; }
  /// dim H^2(M, dM): number of handles, the dimension of the Dirichlet fields.
  int h2_relative() const { return b1; }

  friend bool operator==(const BettiNumbers&, const BettiNumbers&) = default;
};

/// Betti numbers of a complex embedded in R^3, from the Euler characteristics of
/// its boundary surface components.
BettiNumbers betti_numbers(const TetMesh& mesh);

/// Number of connected components of the boundary surface.
int boundary_component_count(const TetMesh& mesh);

// Voxel test domains.

enum class DomainKind { Ball, BallWithCavity, SolidTorus, Cylinder, Box };

struct DomainSpec {
  DomainKind kind = DomainKind::Ball;
  /// Ball radius, torus major radius R, or cylinder radius.
  double radius = 1.0;
  /// Cavity radius or torus tube radius r.
  double inner_radius = 0.3;
  /// Cylinder length along z, or box edge lengths.
  double length = 2.0;
  Vec3 extents = Vec3(1.0, 1.0, 1.0);
  /// Move the vertices of the voxel boundary onto the analytic surface.
  bool conform_boundary = true;
};

DomainSpec default_domain(DomainKind kind);
DomainKind parse_domain_kind(const std::string& name);
std::string to_string(DomainKind kind);

/// Topology the generator must reproduce for the given domain.
BettiNumbers expected_betti(DomainKind kind);

/// Voxelizes the domain on a grid of spacing h, repairs pinched edges and
/// vertices by adding cubes, and splits each cube into 6 tets along its main
/// diagonal.
///
/// With `conform_boundary` a cube is kept when its center lies in the domain, and
/// each boundary vertex is then moved to the closest point of the domain surface.
/// Three rounds of tangential smoothing follow: boundary vertices move to the
/// surface point nearest the mean of their boundary neighbours, and interior
/// vertices next to the boundary to the mean of their neighbours. Moves that
/// would flatten a tet below 2% of its voxel volume are halved until none does. Without it a cube is kept when all 8 corners lie in the
/// domain and the boundary stays a staircase, whose normals do not converge
/// under refinement.
/// Throws InputError if the result does not have the domain's topology.
MeshPtr generate_voxel_domain(const DomainSpec& domain, double h);

}  // namespace hodge3d
