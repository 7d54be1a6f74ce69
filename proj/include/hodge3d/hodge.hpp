#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hodge3d/assembly.hpp"
#include "hodge3d/fem.hpp"
#include "hodge3d/fields.hpp"
#include "hodge3d/solver.hpp"

namespace hodge3d {

/// Squared L2 norms below this are labelled zero.
inline constexpr double kZeroThreshold = 1e-10;

enum class Scheme {
  FN,     // curl(N) + grad(F0) + Neumann fields
  FD,     // curl(N0) + grad(F) + Dirichlet fields
  HMF_N,  // curl(N0) + grad(F0) + H cap curl(N) + Neumann fields
  HMF_D,  // curl(N0) + grad(F0) + H cap grad(F) + Dirichlet fields
  FULL,   // curl(N0) + grad(F0) + curl(N) cap grad(F) + Neumann + Dirichlet fields
};

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);

/// The subspaces a decomposition component can belong to.
enum class ComponentKind {
  CurlN,
  CurlN0,
  GradF,
  GradF0,
  HarmonicNeumann,
  HarmonicDirichlet,
  HarmonicInCurlN,
  HarmonicInGradF,
  Central,
};

std::string to_string(ComponentKind kind);

struct Component {
  ComponentKind kind;
  std::string name;
  Pcvf field;
  double sq_norm = 0.0;
  bool zero = false;
};

struct StageReport {
  std::string stage;
  SolveReport solve;
};

struct DecompositionResult {
  Scheme scheme = Scheme::FD;
  Pcvf input;
  double input_sq_norm = 0.0;
  std::vector<Component> components;
  std::vector<StageReport> stages;

  /// Throws std::out_of_range if the scheme has no such component.
  const Component& component(ComponentKind kind) const;
  Component& component(ComponentKind kind);
};

/// Projection engine bound to one mesh. Element tables are built up front; the
/// four Gram matrices are assembled on first use. All members are safe to call
/// concurrently.
class HodgeDecomposer {
 public:
  explicit HodgeDecomposer(MeshPtr mesh, SolverOptions options = {});

  const MeshPtr& mesh() const { return mesh_; }
  const ElementTables& tables() const { return tables_; }
  const SolverOptions& options() const { return options_; }

  const SparseSymMatrix& gram(Space space, bool constrained) const;
  const GramKernel& kernel(Space space, bool constrained) const;

  /// L2-orthogonal projection onto curl(N0) (constrained) or curl(N).
  Pcvf project_curl(const Pcvf& x, bool constrained, SolveReport* report = nullptr) const;
  /// L2-orthogonal projection onto grad(F0) (constrained) or grad(F).
  Pcvf project_grad(const Pcvf& x, bool constrained, SolveReport* report = nullptr) const;
  Pcvf project(const Pcvf& x, Space space, bool constrained, SolveReport* report = nullptr) const;

  /// Runs the residual chain of the scheme. Throws SolverError naming the stage
  /// whose solve missed the tolerance.
  DecompositionResult decompose(const Pcvf& x, Scheme scheme) const;

 private:
  MeshPtr mesh_;
  SolverOptions options_;
  ElementTables tables_;
  mutable std::array<std::once_flag, 4> once_;
  mutable std::array<std::optional<SparseSymMatrix>, 4> gram_;
  mutable std::array<std::once_flag, 4> kernel_once_;
  mutable std::array<std::optional<GramKernel>, 4> kernel_;
};

/// One-shot helpers that build a decomposer for the field's mesh.
Pcvf project_curl(const Pcvf& x, bool constrained, const SolverOptions& options = {});
Pcvf project_grad(const Pcvf& x, bool constrained, const SolverOptions& options = {});
DecompositionResult decompose(const Pcvf& x, Scheme scheme, const SolverOptions& options = {});

struct Check {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool passed() const;
};

/// Pairwise orthogonality is judged relative to the component norms for pairs
/// of non-zero components, and relative to the input norm when either component
/// is labelled zero.
inline constexpr double kOrthogonalityTol = 1e-8;
inline constexpr double kPythagorasTol = 1e-8;
inline constexpr double kReconstructionTol = 1e-10;

/// Checks reconstruction, Pythagoras, pairwise orthogonality and, for each
/// component, that its projections onto the spaces it must be orthogonal to
/// carry at most kZeroThreshold * max(1, |X|^2) energy.
VerificationReport verify_result(const DecompositionResult& result,
                                 const HodgeDecomposer& decomposer);

/// Largest |<C_i, C_j>| / (|C_i| |C_j|) over pairs of non-zero components.
double max_relative_cross_inner(const DecompositionResult& result);

enum class HarmonicKind { Neumann, Dirichlet, Central };

HarmonicKind parse_harmonic_kind(const std::string& name);
std::string to_string(HarmonicKind kind);

/// Dimension the theory predicts: b2, b1, or n_bf - b2 - 1.
int expected_harmonic_dimension(const TetMesh& mesh, HarmonicKind kind);

/// Numerical rank of the Gram matrix of the harmonic (or central) components of
/// `probes` seeded random fields. Eigenvalues count when they exceed 1e-8 times
/// the mean squared norm of the probe fields.
/// Throws InputError if probes < expected dimension + 5.
int estimate_harmonic_dimension(const HodgeDecomposer& decomposer, HarmonicKind kind, int probes,
                                std::uint64_t seed = 1);

}  // namespace hodge3d
