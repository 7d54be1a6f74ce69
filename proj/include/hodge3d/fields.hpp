#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hodge3d/mesh.hpp"

namespace hodge3d {

/// Piecewise constant vector field: one 3-vector per tetrahedron of a mesh.
///
/// Fields compare meshes by identity (the shared pointer), not by content.
class Pcvf {
 public:
  Pcvf() = default;
  /// Zero field on `mesh`.
  explicit Pcvf(MeshPtr mesh);
  /// Throws InputError if `vectors.size() != mesh->num_tets()`.
  Pcvf(MeshPtr mesh, std::vector<Vec3> vectors);

  const MeshPtr& mesh() const { return mesh_; }
  const std::vector<Vec3>& vectors() const { return vectors_; }
  std::vector<Vec3>& vectors() { return vectors_; }
  const Vec3& operator[](std::size_t t) const { return vectors_[t]; }
  Vec3& operator[](std::size_t t) { return vectors_[t]; }
  std::size_t size() const { return vectors_.size(); }

  bool same_mesh(const Pcvf& other) const { return mesh_ && mesh_ == other.mesh_; }

 private:
  MeshPtr mesh_;
  std::vector<Vec3> vectors_;
};

/// L2 product: sum over tets of vol(t) <X_t, Y_t>.
double l2_inner(const Pcvf& x, const Pcvf& y);
inline double sq_norm(const Pcvf& x) { return l2_inner(x, x); }

/// Per-tet a*X + b*Y.
Pcvf combine(const Pcvf& x, const Pcvf& y, double a, double b);
inline Pcvf operator+(const Pcvf& x, const Pcvf& y) { return combine(x, y, 1.0, 1.0); }
inline Pcvf operator-(const Pcvf& x, const Pcvf& y) { return combine(x, y, 1.0, -1.0); }

enum class AnalyticField {
  X0,    // (y, -x, 0): fluxless knot on the ball
  X1,    // (x, y, z): grounded gradient on the unit ball
  X2,    // -(1, 1, 1)/2: curly gradient
  X3,    // (x, y, z)/|r|^3: harmonic Neumann field around a cavity
  X4,    // (y, -x, 0)/(x^2 + y^2): harmonic Dirichlet field on a solid torus
  X012,  // X0 + X1 + X2
  Flow,  // axial Poiseuille profile plus a weak swirl; test flow for cylinders
};

AnalyticField parse_analytic_field(const std::string& name);
std::string to_string(AnalyticField field);
Vec3 evaluate(AnalyticField field, const Vec3& p);

/// Samples the field at every tet barycenter. X3 and X4 throw InputError when a
/// barycenter comes within 1e-9 of the singular set.
Pcvf sample_analytic(const MeshPtr& mesh, AnalyticField field);

/// Per tet v + rho |v| sigma with sigma a standard normal 3-vector drawn from a
/// generator seeded by (seed, tet index). rho = 0 returns the input unchanged.
Pcvf add_noise(const Pcvf& x, double rho, std::uint64_t seed);

/// Field of i.i.d. standard normal vectors, seeded by (seed, tet index).
Pcvf random_field(const MeshPtr& mesh, std::uint64_t seed);

/// Standard normal 3-vector of the (seed, stream) generator.
Vec3 gaussian_vector(std::uint64_t seed, std::uint64_t stream);

}  // namespace hodge3d
