#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hodge3d/assembly.hpp"

namespace hodge3d {

struct SolveReport {
  std::size_t iterations = 0;
  /// True residual ||A x - b|| / ||b|| (0 when b = 0).
  double relative_residual = 0.0;
  bool converged = false;
};

struct SolverOptions {
  double tol = 1e-12;
  /// 0 selects 10 * n.
  std::size_t max_iter = 0;
};

struct SolveResult {
  Eigen::VectorXd x;
  SolveReport report;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// semi-definite system with consistent right-hand side. Identity filler rows are
/// solved directly and kept out of the iteration. The kernel component of x is
/// arbitrary; it does not change the reconstructed field.
///
/// If `kernel` vectors are given, b must be orthogonal to each of them within 1e-8
/// relative, otherwise InputError is thrown. Non-convergence is reported, not thrown.
SolveResult solve_spsd(const SparseSymMatrix& a, const Eigen::VectorXd& b,
                       const SolverOptions& options = {},
                       std::span<const Eigen::VectorXd> kernel = {});


/// The known null space of a Gram matrix: discrete gradients of vertex functions
/// for the curl systems plus one harmonic vector per independent loop (curl(N))
/// or cavity (curl(N0)), constants per connected component for the unconstrained
/// gradient system.
///
/// An assembled right-hand side is orthogonal to this null space only up to
/// round-off. When the projection is (close to) zero that round-off dominates b
/// and conjugate gradients stall on the inconsistent part, so it is removed first.
class GramKernel {
 public:
  /// `gram` is the matrix assembled for the same space and constraint.
  GramKernel(const ElementTables& tables, const SparseSymMatrix& gram, Space space,
             bool constrained);

  /// Replaces b by its Euclidean projection onto the complement of the null space.
  void deflate(Eigen::VectorXd& b) const;

 private:
  void find_harmonic(const SparseSymMatrix& gram, int count);
  void deflate_known(Eigen::VectorXd& b) const;
  void deflate_gradients(Eigen::VectorXd& b) const;

  Space space_;
  std::size_t n_dofs_ = 0;
  // Curl systems: signed edge-vertex incidence restricted to active edges and
  // vertices, and its graph Laplacian.
  std::vector<std::array<Index, 2>> edge_vertices_;  // -1 for an inactive end
  std::vector<Index> edge_ids_;
  SparseSymMatrix laplacian_;
  std::vector<Index> vertex_component_;  // empty when the Laplacian is definite
  // Orthonormal null vectors of the curl Gram matrix orthogonal to the gradients.
  std::vector<Eigen::VectorXd> harmonic_;
  // Unconstrained gradient system: component of each face.
  std::vector<Index> face_component_;
  Index n_components_ = 0;
};

}  // namespace hodge3d
