#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "hodge3d/fem.hpp"
#include "hodge3d/fields.hpp"

namespace hodge3d {

/// Derivative space a Galerkin system projects onto.
enum class Space {
  CurlNedelec,  // curl of the Nedelec edge space
  GradCr,       // gradient of the Crouzeix-Raviart face space
};

std::string to_string(Space space);

/// Symmetric matrix in compressed sparse row form, both triangles stored.
/// Column indices are sorted within each row.
struct SparseSymMatrix {
  std::size_t n = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<Index> cols;
  std::vector<double> vals;
  /// Rows replaced by identity rows when boundary dofs are constrained.
  std::vector<std::uint8_t> filler;

  std::size_t nnz() const { return vals.size(); }
  /// Entry (i, j), zero if not stored.
  double coeff(std::size_t i, std::size_t j) const;
  Eigen::VectorXd diagonal() const;
  /// y = A x.
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;
  /// Largest absolute row sum.
  double norm_inf() const;
};

/// Gram matrix of the derivative basis: entry (i, j) = sum_t vol(t) <d_i, d_j>.
/// With `constrained`, boundary dofs get identity rows and no coupling, which
/// restricts the system to the interior-dof subspace.
SparseSymMatrix assemble_gram(const ElementTables& tables, Space space, bool constrained);

/// Right-hand side b_j = sum_t vol(t) <X_t, d_j>; boundary entries are zero when
/// `constrained`.
Eigen::VectorXd assemble_rhs(const Pcvf& x, const ElementTables& tables, Space space,
                             bool constrained);

/// The field sum_i c_i d_i.
Pcvf reconstruct(const Eigen::VectorXd& coeffs, const ElementTables& tables, Space space);

/// Writes the lower triangle in Matrix Market symmetric coordinate format.
void write_matrix_market(const SparseSymMatrix& a, std::ostream& out);

}  // namespace hodge3d
