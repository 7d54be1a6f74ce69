#include "hodge3d/app.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "hodge3d/parallel.hpp"

namespace hodge3d {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

bool is_file_field(const std::string& source) { return source.rfind("file:", 0) == 0; }

MeshPtr make_mesh(const RunConfig& c, double h) {
  if (!c.mesh_path.empty()) return read_mesh(c.mesh_path);
  return generate_voxel_domain(*c.domain, h);
}

json domain_json(const DomainSpec& d) {
  json j;
  j["kind"] = to_string(d.kind);
  switch (d.kind) {
    case DomainKind::Ball:
      j["radius"] = d.radius;
      break;
    case DomainKind::BallWithCavity:
    case DomainKind::SolidTorus:
      j["radius"] = d.radius;
      j["inner_radius"] = d.inner_radius;
      break;
    case DomainKind::Cylinder:
      j["radius"] = d.radius;
      j["length"] = d.length;
      break;
    case DomainKind::Box:
      j["extents"] = {d.extents[0], d.extents[1], d.extents[2]};
      break;
  }
  j["conform_boundary"] = d.conform_boundary;
  return j;
}

// Effective settings of one run; the worker count is left out so reports do not
// depend on it.
json settings_json(const RunConfig& c, std::optional<double> h, double rho) {
  json s;
  s["command"] = c.command;
  if (!c.mesh_path.empty()) {
    s["mesh"] = {{"path", c.mesh_path}};
  } else if (c.domain) {
    json m = domain_json(*c.domain);
    if (h) m["h"] = *h;
    s["mesh"] = std::move(m);
  }
  s["field"] = c.field;
  if (!c.field_array.empty()) s["field_array"] = c.field_array;
  s["resample"] = c.resample == Resample::Barycentric ? "barycentric" : "none";
  s["scheme"] = to_string(c.scheme);
  s["rho"] = rho;
  s["seed"] = c.seed;
  s["solver"] = {{"tol", c.solver.tol}, {"max_iter", c.solver.max_iter}};
  return s;
}

void print_components(std::ostream& out, const DecompositionResult& r) {
  out << pad("component", 22) << pad("sq_norm", 16) << pad("fraction", 12) << "zero\n";
  for (const auto& c : r.components) {
    const double f = r.input_sq_norm > 0.0 ? c.sq_norm / r.input_sq_norm : 0.0;
    out << pad(c.name, 22) << pad(fmt("%.9g", c.sq_norm), 16) << pad(fmt("%.6f", f), 12)
        << (c.zero ? "yes" : "no") << "\n";
  }
  out << pad("input", 22) << fmt("%.9g", r.input_sq_norm) << "\n";
}

Pcvf prepare_field(const RunConfig& c, const MeshPtr& mesh, double rho) {
  Pcvf x = load_field(c.field, mesh, c.seed, c.resample, c.field_array);
  if (rho > 0.0) x = add_noise(x, rho, c.seed);
  return x;
}

int run_decompose(const RunConfig& c, std::ostream& out) {
  const double h = c.h.empty() ? 0.0 : c.h.front();
  const double rho = c.rho.front();
  const MeshPtr mesh = make_mesh(c, h);
  const Pcvf x = prepare_field(c, mesh, rho);
  const HodgeDecomposer dec(mesh, c.solver);
  const DecompositionResult r = dec.decompose(x, c.scheme);
  print_components(out, r);
  const std::string dir = c.out_dir.empty() ? "out" : c.out_dir;
  for (const auto& path : write_outputs(r, dir, settings_json(c, c.mesh_path.empty() ? std::optional(h) : std::nullopt, rho)))
    out << "wrote " << path << "\n";
  return kExitOk;
}

struct ValidateCase {
  AnalyticField field;
  DomainKind domain;
  double h;
  std::optional<ComponentKind> dominant;
};

int run_validate(const RunConfig& c, std::ostream& out) {
  const std::vector<ValidateCase> cases{
      {AnalyticField::X0, DomainKind::Ball, 0.1, ComponentKind::CurlN0},
      {AnalyticField::X1, DomainKind::Ball, 0.1, ComponentKind::GradF0},
      {AnalyticField::X2, DomainKind::Ball, 0.1, ComponentKind::Central},
      {AnalyticField::X3, DomainKind::BallWithCavity, 0.15, ComponentKind::HarmonicNeumann},
      {AnalyticField::X4, DomainKind::SolidTorus, 0.15, ComponentKind::HarmonicDirichlet},
      {AnalyticField::X012, DomainKind::Ball, 0.1, std::nullopt},
  };
  const Scheme scheme = Scheme::FULL;
  const std::vector<ComponentKind> columns{ComponentKind::CurlN0, ComponentKind::GradF0, ComponentKind::Central,
                                           ComponentKind::HarmonicNeumann, ComponentKind::HarmonicDirichlet};

  out << pad("field", 6) << pad("domain", 18) << pad("h", 7) << pad("n_t", 9) << pad("|X|^2", 12);
  for (auto k : columns) out << pad(to_string(k), 20);
  out << pad("dominant", 10) << "checks\n";

  std::map<std::pair<DomainKind, double>, std::unique_ptr<HodgeDecomposer>> decomposers;
  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["tool"] = {{"name", "hodge3d"}, {"version", HODGE3D_VERSION}};
  report["scheme"] = to_string(scheme);
  json jcases = json::array();
  bool all_passed = true;

  for (const auto& vc : cases) {
    const double h = c.h.empty() ? vc.h : c.h.front();
    auto& dec = decomposers[{vc.domain, h}];
    DomainSpec spec = default_domain(vc.domain);
    if (c.domain) spec.conform_boundary = c.domain->conform_boundary;
    if (!dec) dec = std::make_unique<HodgeDecomposer>(generate_voxel_domain(spec, h), c.solver);
    const MeshPtr& mesh = dec->mesh();
    const BettiNumbers betti = betti_numbers(*mesh);
    const bool topology_ok = betti == expected_betti(vc.domain);

    const Pcvf x = sample_analytic(mesh, vc.field);
    const DecompositionResult r = dec->decompose(x, scheme);
    const VerificationReport v = verify_result(r, *dec);
    const bool passed = v.passed() && topology_ok;
    all_passed = all_passed && passed;

    out << pad(to_string(vc.field), 6) << pad(to_string(vc.domain), 18) << pad(fmt("%g", h), 7)
        << pad(std::to_string(mesh->num_tets()), 9) << pad(fmt("%.6g", r.input_sq_norm), 12);
    for (auto k : columns) out << pad(fmt("%.6g", r.component(k).sq_norm), 20);
    const double dominant =
        vc.dominant && r.input_sq_norm > 0.0 ? r.component(*vc.dominant).sq_norm / r.input_sq_norm : 0.0;
    out << pad(vc.dominant ? fmt("%.4f", dominant) : std::string("-"), 10) << (passed ? "pass" : "FAIL") << "\n";
    for (const auto& ch : v.checks)
      if (!ch.passed) out << "  failed " << ch.name << ": " << fmt("%.3g", ch.measured) << " > " << fmt("%.3g", ch.threshold) << "\n";
    if (!topology_ok) out << "  failed betti numbers\n";

    json jc;
    jc["field"] = to_string(vc.field);
    jc["domain"] = to_string(vc.domain);
    jc["h"] = h;
    if (vc.dominant) {
      jc["dominant"] = to_string(*vc.dominant);
      jc["dominant_fraction"] = dominant;
    }
    json checks = json::array();
    for (const auto& ch : v.checks)
      checks.push_back({{"name", ch.name}, {"measured", ch.measured}, {"threshold", ch.threshold}, {"passed", ch.passed}});
    jc["checks"] = std::move(checks);
    jc["passed"] = passed;
    jc["report"] = make_report(r);
    jcases.push_back(std::move(jc));
  }
  report["cases"] = std::move(jcases);
  report["passed"] = all_passed;

  if (!c.out_dir.empty()) {
    std::filesystem::create_directories(c.out_dir);
    const std::string path = (std::filesystem::path(c.out_dir) / "validate.json").string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("write_outputs", "cannot write '" + path + "'");
    f << report.dump(2) << "\n";
    out << "wrote " << path << "\n";
  }
  out << (all_passed ? "validate: all checks passed\n" : "validate: checks FAILED\n");
  return all_passed ? kExitOk : kExitInput;
}

int run_dims(const RunConfig& c, std::ostream& out) {
  const MeshPtr mesh = make_mesh(c, c.h.empty() ? 0.0 : c.h.front());
  const BettiNumbers b = betti_numbers(*mesh);
  out << "betti: (" << b.b0 << ", " << b.b1 << ", " << b.b2 << ")\n";
  const HodgeDecomposer dec(mesh, c.solver);
  bool ok = true;
  for (HarmonicKind kind : c.kinds) {
    const int expected = expected_harmonic_dimension(*mesh, kind);
    const int probes = c.probes > 0 ? c.probes : expected + 10;
    const int got = estimate_harmonic_dimension(dec, kind, probes, c.seed);
    out << to_string(kind) << ": " << got << " (expected " << expected << ")\n";
    ok = ok && got == expected;
  }
  return ok ? kExitOk : kExitInput;
}

int run_sweep(const RunConfig& c, std::ostream& out) {
  const std::string dir = c.out_dir.empty() ? "sweep" : c.out_dir;
  std::filesystem::create_directories(dir);
  const std::vector<double> hs = c.mesh_path.empty() ? c.h : std::vector<double>{0.0};

  std::ostringstream csv;
  bool header = false;
  int level = 0;
  for (const double h : hs) {
    const MeshPtr mesh = make_mesh(c, h);
    const HodgeDecomposer dec(mesh, c.solver);
    for (const double rho : c.rho) {
      const Pcvf x = prepare_field(c, mesh, rho);
      const DecompositionResult r = dec.decompose(x, c.scheme);
      if (!header) {
        csv << "level,h,rho,n_t,input_sq_norm";
        for (const auto& comp : r.components) csv << "," << comp.name << "_sq_norm";
        for (const auto& comp : r.components) csv << "," << comp.name << "_fraction";
        csv << "\n";
        header = true;
      }
      csv << level << "," << (c.mesh_path.empty() ? format_double(h) : std::string()) << ","
          << format_double(rho) << "," << mesh->num_tets() << "," << format_double(r.input_sq_norm);
      for (const auto& comp : r.components) csv << "," << format_double(comp.sq_norm);
      for (const auto& comp : r.components)
        csv << "," << format_double(r.input_sq_norm > 0.0 ? comp.sq_norm / r.input_sq_norm : 0.0);
      csv << "\n";

      const std::string path = (std::filesystem::path(dir) / ("level_" + std::to_string(level) + ".json")).string();
      std::ofstream f(path, std::ios::binary);
      if (!f) throw InputError("write_outputs", "cannot write '" + path + "'");
      f << make_report(r, settings_json(c, c.mesh_path.empty() ? std::optional(h) : std::nullopt, rho)).dump(2)
        << "\n";
      out << "level " << level << ": n_t=" << mesh->num_tets();
      for (const auto& comp : r.components)
        out << " " << comp.name << "=" << fmt("%.4f", r.input_sq_norm > 0.0 ? comp.sq_norm / r.input_sq_norm : 0.0);
      out << "\n";
      ++level;
    }
  }
  const std::string path = (std::filesystem::path(dir) / "sweep.csv").string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("write_outputs", "cannot write '" + path + "'");
  f << csv.str();
  out << "wrote " << path << "\n";
  return kExitOk;
}

int run_sample(const RunConfig& c, std::ostream& out) {
  if (c.out_dir.empty()) throw InputError("config", "sample needs --out <file.vtk|file.msh>");
  const MeshPtr mesh = make_mesh(c, c.h.empty() ? 0.0 : c.h.front());
  if (mesh_format_for_path(c.out_dir) == MeshFormat::GmshMsh) {
    write_gmsh(c.out_dir, *mesh);
  } else {
    const Pcvf x = prepare_field(c, mesh, c.rho.front());
    write_vtk(c.out_dir, *mesh, {{"field", &x}});
  }
  out << "wrote " << c.out_dir << " (" << mesh->num_tets() << " tets)\n";
  return kExitOk;
}

}  // namespace

void check_config(const RunConfig& c) {
  static const char* kCommands[] = {"decompose", "validate", "dims", "sweep", "sample"};
  if (std::find(std::begin(kCommands), std::end(kCommands), c.command) == std::end(kCommands))
    throw InputError("config", "unknown command '" + c.command + "'");
  for (double rho : c.rho)
    if (!(rho >= 0.0)) throw InputError("config", "noise level rho must be >= 0");
  if (c.rho.empty()) throw InputError("config", "empty rho list");
  for (double h : c.h)
    if (!(h > 0.0)) throw InputError("config", "voxel size h must be positive");
  if (!(c.solver.tol > 0.0)) throw InputError("config", "solver tolerance must be positive");
  if (c.command == "validate") {
    if (!c.mesh_path.empty()) throw InputError("config", "validate generates its own domains; drop --mesh");
    if (c.h.size() > 1) throw InputError("config", "validate takes at most one --h");
    return;
  }
  if (c.mesh_path.empty() == !c.domain.has_value())
    throw InputError("config", "give exactly one mesh source: --mesh <file> or --domain <name>");
  if (c.domain && c.h.empty()) throw InputError("config", "--domain needs --h");
  if (!c.mesh_path.empty() && !c.h.empty()) throw InputError("config", "--h applies to generated domains only");
  if (c.command != "sweep") {
    if (c.h.size() > 1) throw InputError("config", c.command + " takes a single --h; use sweep for lists");
    if (c.rho.size() > 1) throw InputError("config", c.command + " takes a single --rho; use sweep for lists");
  }
}

Pcvf load_field(const std::string& source, const MeshPtr& mesh, std::uint64_t seed, Resample resample,
                const std::string& array_name) {
  if (source == "random") return random_field(mesh, seed);
  if (!is_file_field(source)) return sample_analytic(mesh, parse_analytic_field(source));

  const std::string path = source.substr(5);
  VtkDocument doc;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("read_field", "cannot open '" + path + "'");
    try {
      doc = parse_vtk(in);
    } catch (const InputError& e) {
      throw InputError("read_field", e.what());
    }
  }
  if (doc.tets.empty()) return read_field(path, mesh, resample, array_name);
  const MeshPtr own = build_complex(std::move(doc.points), std::move(doc.tets));
  const Pcvf x = read_field(path, own, resample, array_name);
  if (mesh_hash(*own) == mesh_hash(*mesh) && own->num_tets() == mesh->num_tets())
    return Pcvf(mesh, x.vectors());
  return transfer_field(x, mesh);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    check_config(config);
    if (config.threads > 0) parallel::set_max_threads(config.threads);
    if (config.command == "decompose") return run_decompose(config, out);
    if (config.command == "validate") return run_validate(config, out);
    if (config.command == "dims") return run_dims(config, out);
    if (config.command == "sweep") return run_sweep(config, out);
    return run_sample(config, out);
  } catch (const SolverError& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "error [" << e.stage() << "]: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error [write_outputs]: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace hodge3d
