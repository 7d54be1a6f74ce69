#include "hodge3d/fem.hpp"

#include <algorithm>

namespace hodge3d {

std::size_t DofMap::num_boundary() const {
  return static_cast<std::size_t>(std::count(interior_mask.begin(), interior_mask.end(), 0));
}

ElementTables build_element_tables(const MeshPtr& mesh) {
  const TetMesh& m = *mesh;
  const std::size_t n_t = m.num_tets();

  ElementTables tables;
  tables.mesh = mesh;
  tables.cr_gradients.resize(n_t);
  tables.ned_curls.resize(n_t);

  DofMap& ed = tables.edge_dofs;
  ed.kind = DofKind::EdgeBased;
  ed.n_dofs = m.num_edges();
  ed.dofs_per_tet = 6;
  ed.interior_mask.resize(ed.n_dofs);
  for (std::size_t e = 0; e < ed.n_dofs; ++e) ed.interior_mask[e] = m.is_boundary_edge(e) ? 0 : 1;
  ed.tet_to_dof.resize(6 * n_t);
  ed.tet_to_sign.resize(6 * n_t);

  DofMap& fd = tables.face_dofs;
  fd.kind = DofKind::FaceBased;
  fd.n_dofs = m.num_faces();
  fd.dofs_per_tet = 4;
  fd.interior_mask.resize(fd.n_dofs);
  for (std::size_t f = 0; f < fd.n_dofs; ++f) fd.interior_mask[f] = m.is_boundary_face(f) ? 0 : 1;
  fd.tet_to_dof.resize(4 * n_t);
  fd.tet_to_sign.assign(4 * n_t, 1);

  for (std::size_t t = 0; t < n_t; ++t) {
    const auto& grad = m.geometry(t).bary_gradients;
    for (int k = 0; k < 4; ++k) {
      tables.cr_gradients[t][k] = -3.0 * grad[k];
      fd.tet_to_dof[4 * t + k] = m.tet_faces(t)[k];
    }
    const auto& edges = m.tet_edges(t);
    const auto& signs = m.tet_edge_signs(t);
    for (int k = 0; k < 6; ++k) {
      const auto [a, b] = kLocalEdges[k];
      tables.ned_curls[t][k] = (2.0 * signs[k]) * grad[a].cross(grad[b]);
      ed.tet_to_dof[6 * t + k] = edges[k];
      ed.tet_to_sign[6 * t + k] = signs[k];
    }
  }
  return tables;
}

}  // namespace hodge3d
