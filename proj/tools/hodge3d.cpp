#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hodge3d/app.hpp"

namespace {

struct Flags {
  std::string mesh;
  std::string domain;
  std::vector<double> h;
  double radius = 0.0;
  double inner_radius = 0.0;
  double length = 0.0;
  bool no_conform = false;
  std::string field = "X0";
  std::string field_array;
  std::string resample = "none";
  std::string scheme = "fd";
  std::vector<double> rho{0.0};
  std::uint64_t seed = 1;
  std::string out;
  double tol = 1e-12;
  std::size_t max_iter = 0;
  int probes = 0;
  std::vector<std::string> kinds{"neumann", "dirichlet"};
  int threads = 0;
};

void add_mesh_flags(CLI::App* cmd, Flags& f, bool lists) {
  cmd->add_option("--mesh", f.mesh, "Tetrahedral mesh file (.vtk or .msh)");
  cmd->add_option("--domain", f.domain, "Generated domain: ball, ball_with_cavity, solid_torus, cylinder, box");
  auto* h = cmd->add_option("--h", f.h, lists ? "Voxel sizes, comma separated" : "Voxel size");
  h->delimiter(',');
  cmd->add_option("--radius", f.radius, "Ball, torus major or cylinder radius");
  cmd->add_option("--inner-radius", f.inner_radius, "Cavity or torus tube radius");
  cmd->add_option("--length", f.length, "Cylinder length");
  cmd->add_flag("--no-conform", f.no_conform, "Keep the staircase voxel boundary");
}

void add_field_flags(CLI::App* cmd, Flags& f, bool lists) {
  cmd->add_option("--field", f.field, "X0..X4, X012, flow, random, or file:<path.vtk>")->capture_default_str();
  cmd->add_option("--field-array", f.field_array, "VECTORS array name in the field file");
  cmd->add_option("--resample", f.resample, "none or barycentric (point data)")->capture_default_str();
  auto* rho = cmd->add_option("--rho", f.rho, lists ? "Noise levels, comma separated" : "Noise level");
  rho->delimiter(',')->capture_default_str();
  cmd->add_option("--seed", f.seed, "Seed for noise, random fields and probes")->capture_default_str();
}

void add_solver_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--tol", f.tol, "Relative residual tolerance of CG")->capture_default_str();
  cmd->add_option("--max-iter", f.max_iter, "CG iteration cap, 0 for 10 n")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker cap, 0 keeps HODGE3D_THREADS or the default");
}

hodge3d::RunConfig to_config(const std::string& command, const Flags& f) {
  using namespace hodge3d;
  RunConfig c;
  c.command = command;
  c.mesh_path = f.mesh;
  if (!f.domain.empty()) {
    DomainSpec d = default_domain(parse_domain_kind(f.domain));
    if (f.radius > 0.0) d.radius = f.radius;
    if (f.inner_radius > 0.0) d.inner_radius = f.inner_radius;
    if (f.length > 0.0) {
      d.length = f.length;
      if (d.kind == DomainKind::Box) d.extents = Vec3::Constant(f.length);
    }
    d.conform_boundary = !f.no_conform;
    c.domain = d;
  } else if (command == "validate" && f.no_conform) {
    DomainSpec d;
    d.conform_boundary = false;
    c.domain = d;
  }
  c.h = f.h;
  c.field = f.field;
  c.field_array = f.field_array;
  if (f.resample == "barycentric") {
    c.resample = Resample::Barycentric;
  } else if (f.resample != "none") {
    throw InputError("config", "unknown resample mode '" + f.resample + "'");
  }
  c.scheme = parse_scheme(f.scheme);
  c.rho = f.rho;
  c.seed = f.seed;
  c.out_dir = f.out;
  c.solver.tol = f.tol;
  c.solver.max_iter = f.max_iter;
  c.probes = f.probes;
  c.kinds.clear();
  for (const auto& k : f.kinds) c.kinds.push_back(parse_harmonic_kind(k));
  c.threads = f.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hodge decomposition of piecewise constant vector fields on tetrahedral meshes"};
  app.set_version_flag("--version", std::string(HODGE3D_VERSION));
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  Flags f;

  auto* decompose = app.add_subcommand("decompose", "Decompose one field and write VTK components plus report.json");
  add_mesh_flags(decompose, f, false);
  add_field_flags(decompose, f, false);
  decompose->add_option("--scheme", f.scheme, "fn, fd, hmf_n, hmf_d or full")->capture_default_str();
  decompose->add_option("--out", f.out, "Output directory");
  add_solver_flags(decompose, f);

  auto* validate = app.add_subcommand("validate", "Run the built-in test fields on their domains");
  validate->add_option("--h", f.h, "Voxel size for every case");
  validate->add_flag("--no-conform", f.no_conform, "Keep the staircase voxel boundary");
  validate->add_option("--out", f.out, "Directory for validate.json");
  add_solver_flags(validate, f);

  auto* dims = app.add_subcommand("dims", "Estimate harmonic space dimensions and compare with topology");
  add_mesh_flags(dims, f, false);
  dims->add_option("--probes", f.probes, "Random probe fields, 0 for expected + 10");
  dims->add_option("--kinds", f.kinds, "neumann, dirichlet, central")->delimiter(',')->capture_default_str();
  dims->add_option("--seed", f.seed, "Probe seed")->capture_default_str();
  add_solver_flags(dims, f);

  auto* sweep = app.add_subcommand("sweep", "Decompose over lists of voxel sizes and noise levels");
  add_mesh_flags(sweep, f, true);
  add_field_flags(sweep, f, true);
  sweep->add_option("--scheme", f.scheme, "fn, fd, hmf_n, hmf_d or full")->capture_default_str();
  sweep->add_option("--out", f.out, "Output directory");
  add_solver_flags(sweep, f);

  auto* sample = app.add_subcommand("sample", "Write a generated mesh (.msh) or a sampled field (.vtk)");
  add_mesh_flags(sample, f, false);
  add_field_flags(sample, f, false);
  sample->add_option("--out", f.out, "Output file")->required();
  add_solver_flags(sample, f);

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return hodge3d::run(to_config(command, f), std::cout, std::cerr);
  } catch (const hodge3d::Error& e) {
    std::cerr << "error [" << e.stage() << "]: " << e.what() << "\n";
    return hodge3d::kExitInput;
  }
}
