#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hodge3d/hodge.hpp"
#include "hodge3d/io.hpp"

namespace hodge3d {

/// Exit statuses of run().
inline constexpr int kExitOk = 0;
/// Bad input or a failed check (validate, dims).
inline constexpr int kExitInput = 1;
inline constexpr int kExitSolver = 2;

struct RunConfig {
  /// decompose | validate | dims | sweep | sample
  std::string command;

  // Mesh source: a file, or a generated domain at one or more voxel sizes.
  std::string mesh_path;
  std::optional<DomainSpec> domain;
  std::vector<double> h;

  /// Analytic id (X0 ... X4, X012, flow), "random", or "file:<path>".
  std::string field = "X0";
  std::string field_array;
  Resample resample = Resample::None;

  Scheme scheme = Scheme::FD;
  std::vector<double> rho{0.0};
  std::uint64_t seed = 1;

  std::string out_dir;
  SolverOptions solver;
  /// 0 picks the expected dimension plus 10.
  int probes = 0;
  std::vector<HarmonicKind> kinds{HarmonicKind::Neumann, HarmonicKind::Dirichlet};
  /// 0 leaves the worker cap alone.
  int threads = 0;
};

/// Throws InputError unless the config has exactly one mesh source, valid
/// voxel sizes and non-negative noise levels.
void check_config(const RunConfig& config);

/// Runs one subcommand. Normal output goes to `out`, diagnostics to `err`.
/// Returns kExitOk, kExitInput (input errors, failed checks) or kExitSolver.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Field named by `source` on `mesh`. Fields read from a file that carries its
/// own mesh are transferred cell by cell when that mesh differs from `mesh`.
Pcvf load_field(const std::string& source, const MeshPtr& mesh, std::uint64_t seed,
                Resample resample = Resample::None, const std::string& array_name = "");

}  // namespace hodge3d
