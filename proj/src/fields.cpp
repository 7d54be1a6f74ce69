#include "hodge3d/fields.hpp"

#include <cmath>
#include <random>

namespace hodge3d {

namespace {

void require_same_mesh(const Pcvf& x, const Pcvf& y, const char* stage) {
  if (!x.same_mesh(y)) throw InputError(stage, "fields live on different meshes");
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

Pcvf::Pcvf(MeshPtr mesh) : mesh_(std::move(mesh)) {
  vectors_.assign(mesh_ ? mesh_->num_tets() : 0, Vec3::Zero());
}

Pcvf::Pcvf(MeshPtr mesh, std::vector<Vec3> vectors)
    : mesh_(std::move(mesh)), vectors_(std::move(vectors)) {
  if (!mesh_) throw InputError("field", "field without a mesh");
  if (vectors_.size() != mesh_->num_tets())
    throw InputError("field", "field has " + std::to_string(vectors_.size()) +
                                  " vectors but the mesh has " +
                                  std::to_string(mesh_->num_tets()) + " tetrahedra");
}

double l2_inner(const Pcvf& x, const Pcvf& y) {
  require_same_mesh(x, y, "l2_inner");
  const TetMesh& mesh = *x.mesh();
  // Neumaier summation: cell volumes vary by orders of magnitude near the boundary.
  double s = 0.0;
  double c = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) {
    const double v = mesh.geometry(t).volume * x[t].dot(y[t]);
    const double u = s + v;
    c += std::abs(s) >= std::abs(v) ? (s - u) + v : (v - u) + s;
    s = u;
  }
  return s + c;
}

Pcvf combine(const Pcvf& x, const Pcvf& y, double a, double b) {
  require_same_mesh(x, y, "combine");
  Pcvf out(x.mesh());
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = a * x[t] + b * y[t];
  return out;
}

AnalyticField parse_analytic_field(const std::string& name) {
  if (name == "X0") return AnalyticField::X0;
  if (name == "X1") return AnalyticField::X1;
  if (name == "X2") return AnalyticField::X2;
  if (name == "X3") return AnalyticField::X3;
  if (name == "X4") return AnalyticField::X4;
  if (name == "X012") return AnalyticField::X012;
  if (name == "flow") return AnalyticField::Flow;
  throw InputError("config", "unknown analytic field '" + name + "'");
}

std::string to_string(AnalyticField field) {
  switch (field) {
    case AnalyticField::X0: return "X0";
    case AnalyticField::X1: return "X1";
    case AnalyticField::X2: return "X2";
    case AnalyticField::X3: return "X3";
    case AnalyticField::X4: return "X4";
    case AnalyticField::X012: return "X012";
    case AnalyticField::Flow: return "flow";
  }
  return "unknown";
}

Vec3 evaluate(AnalyticField field, const Vec3& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  switch (field) {
    case AnalyticField::X0:
      return {y, -x, 0.0};
    case AnalyticField::X1:
      return {x, y, z};
    case AnalyticField::X2:
      return {-0.5, -0.5, -0.5};
    case AnalyticField::X3: {
      const double r = p.norm();
      if (r < 1e-9) throw InputError("sample_analytic", "X3 sampled within 1e-9 of the origin");
      return p / (r * r * r);
    }
    case AnalyticField::X4: {
      const double rho2 = x * x + y * y;
      if (std::sqrt(rho2) < 1e-9)
        throw InputError("sample_analytic", "X4 sampled within 1e-9 of the z-axis");
      return Vec3(y, -x, 0.0) / rho2;
    }
    case AnalyticField::X012:
      return (evaluate(AnalyticField::X0, p) + evaluate(AnalyticField::X1, p)) +
             evaluate(AnalyticField::X2, p);
    case AnalyticField::Flow: {
      // Axial profile falling off with radius, plus swirl and a weak radial part
      // so that both curl and gradient components are present.
      const double s = x * x + y * y;
      return {0.3 * y + 0.2 * x * z, -0.3 * x + 0.2 * y * z, 1.0 - 2.0 * s};
    }
  }
  return Vec3::Zero();
}

Pcvf sample_analytic(const MeshPtr& mesh, AnalyticField field) {
  Pcvf out(mesh);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = evaluate(field, mesh->barycenter(t));
  return out;
}

Vec3 gaussian_vector(std::uint64_t seed, std::uint64_t stream) {
  std::mt19937_64 gen(splitmix64(splitmix64(seed) ^ stream));
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = normal(gen);
  const double b = normal(gen);
  const double c = normal(gen);
  return {a, b, c};
}

Pcvf add_noise(const Pcvf& x, double rho, std::uint64_t seed) {
  if (rho < 0.0) throw InputError("add_noise", "noise factor must be non-negative");
  if (rho == 0.0) return x;
  Pcvf out(x.mesh());
  for (std::size_t t = 0; t < x.size(); ++t)
    out[t] = x[t] + rho * x[t].norm() * gaussian_vector(seed, t);
  return out;
}

Pcvf random_field(const MeshPtr& mesh, std::uint64_t seed) {
  Pcvf out(mesh);
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = gaussian_vector(seed, t);
  return out;
}

}  // namespace hodge3d
