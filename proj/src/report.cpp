#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "hodge3d/io.hpp"

namespace hodge3d {

namespace {

class Fnv1a {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= c[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  void real(double v) { bytes(&v, sizeof v); }
  void index(Index v) { bytes(&v, sizeof v); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::uint64_t mesh_hash(const TetMesh& mesh) {
  Fnv1a h;
  for (const Vec3& p : mesh.vertices())
    for (int k = 0; k < 3; ++k) h.real(p[k]);
  for (const auto& t : mesh.tets())
    for (Index v : t) h.index(v);
  return h.value();
}

std::uint64_t field_hash(const Pcvf& field) {
  Fnv1a h;
  for (const Vec3& x : field.vectors())
    for (int k = 0; k < 3; ++k) h.real(x[k]);
  return h.value();
}

nlohmann::ordered_json make_report(const DecompositionResult& result,
                                   const nlohmann::ordered_json& settings) {
  using json = nlohmann::ordered_json;
  const TetMesh& mesh = *result.input.mesh();
  json r;
  r["schema_version"] = kReportSchemaVersion;
  r["tool"] = {{"name", "hodge3d"}, {"version", HODGE3D_VERSION}};
  r["scheme"] = to_string(result.scheme);
  r["input"] = {{"sq_norm", result.input_sq_norm},
                {"mesh_hash", hex(mesh_hash(mesh))},
                {"field_hash", hex(field_hash(result.input))}};

  json comps = json::array();
  for (const auto& c : result.components) {
    const double fraction = result.input_sq_norm > 0.0 ? c.sq_norm / result.input_sq_norm : 0.0;
    comps.push_back({{"name", c.name}, {"sq_norm", c.sq_norm}, {"fraction", fraction}, {"zero", c.zero}});
  }
  r["components"] = std::move(comps);

  const MeshCounts n = mesh.counts();
  const BettiNumbers b = betti_numbers(mesh);
  r["mesh"] = {{"n_v", n.n_v},   {"n_e", n.n_e},   {"n_f", n.n_f},   {"n_t", n.n_t},
               {"n_bv", n.n_bv}, {"n_be", n.n_be}, {"n_bf", n.n_bf},
               {"volume", mesh.total_volume()},
               {"betti", {{"b0", b.b0}, {"b1", b.b1}, {"b2", b.b2}}}};

  json solver = json::array();
  for (const auto& s : result.stages)
    solver.push_back({{"stage", s.stage},
                      {"iterations", s.solve.iterations},
                      {"relative_residual", s.solve.relative_residual},
                      {"converged", s.solve.converged}});
  r["solver"] = std::move(solver);
  r["settings"] = settings;
  return r;
}

std::vector<std::string> write_outputs(const DecompositionResult& result, const std::string& out_dir,
                                       const nlohmann::ordered_json& settings) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InputError("write_outputs", "cannot create '" + out_dir + "': " + ec.message());

  std::vector<std::string> written;
  const TetMesh& mesh = *result.input.mesh();
  for (const auto& c : result.components) {
    const std::string path = (fs::path(out_dir) / (c.name + ".vtk")).string();
    write_vtk(path, mesh, {{c.name, &c.field}});
    written.push_back(path);
  }

  const std::string path = (fs::path(out_dir) / "report.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("write_outputs", "cannot write '" + path + "'");
  out << make_report(result, settings).dump(2) << "\n";
  if (!out) throw InputError("write_outputs", "write to '" + path + "' failed");
  written.push_back(path);
  return written;
}

}  // namespace hodge3d
