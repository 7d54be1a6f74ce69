#pragma once

#include <vector>

#include "hodge3d/mesh.hpp"

namespace hodge3d {

enum class DofKind { EdgeBased, FaceBased };

/// Global numbering of the Nedelec (edge) or Crouzeix-Raviart (face) degrees of
/// freedom. Dof i is carried by edge i or face i of the mesh.
struct DofMap {
  DofKind kind = DofKind::EdgeBased;
  std::size_t n_dofs = 0;
  std::size_t dofs_per_tet = 0;
  /// True iff the carrying simplex is interior.
  std::vector<std::uint8_t> interior_mask;
  /// Flattened n_t x dofs_per_tet local-to-global map.
  std::vector<Index> tet_to_dof;
  /// Orientation of the local basis relative to the global one (+1 for faces).
  std::vector<std::int8_t> tet_to_sign;

  const Index* dofs(std::size_t t) const { return tet_to_dof.data() + t * dofs_per_tet; }
  const std::int8_t* signs(std::size_t t) const { return tet_to_sign.data() + t * dofs_per_tet; }
  std::size_t num_boundary() const;
};

/// Constant derivatives of the lowest-order basis functions on each tet.
///
/// cr_gradients[t][k] is the gradient of the face basis function of local face k,
/// psi = 1 - 3 phi_k. ned_curls[t][k] is the curl of the global edge basis function
/// of local edge k, 2 grad phi_a x grad phi_b, with the global orientation sign
/// already applied.
struct ElementTables {
  MeshPtr mesh;
  std::vector<std::array<Vec3, 4>> cr_gradients;
  std::vector<std::array<Vec3, 6>> ned_curls;
  DofMap edge_dofs;
  DofMap face_dofs;
};

ElementTables build_element_tables(const MeshPtr& mesh);

}  // namespace hodge3d
