#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hodge3d/fields.hpp"
#include "hodge3d/hodge.hpp"

namespace hodge3d {

enum class MeshFormat { VtkLegacy, GmshMsh };

/// ".vtk" or ".msh"; throws InputError otherwise.
MeshFormat mesh_format_for_path(const std::string& path);

/// Contents of a legacy ASCII VTK unstructured grid. Only VECTORS arrays are
/// kept from the attribute sections.
struct VtkDocument {
  std::vector<Vec3> points;
  std::vector<std::array<Index, 4>> tets;
  std::vector<std::pair<std::string, std::vector<Vec3>>> cell_vectors;
  std::vector<std::pair<std::string, std::vector<Vec3>>> point_vectors;
};

/// Parse errors name the line. Cells other than tetrahedra (type 10) are
/// rejected with "unsupported cell type".
VtkDocument parse_vtk(std::istream& in);

/// Gmsh 4.1 ASCII. Tetrahedra (element type 4) form the mesh; points, lines and
/// triangles are ignored, other volume elements rejected. Nodes not used by any
/// tetrahedron are dropped.
struct GmshDocument {
  std::vector<Vec3> points;
  std::vector<std::array<Index, 4>> tets;
};
GmshDocument parse_gmsh(std::istream& in);

MeshPtr read_mesh(const std::string& path, MeshFormat format);
/// Format from the file extension.
MeshPtr read_mesh(const std::string& path);

enum class Resample {
  None,
  /// Vertex vectors are averaged over the 4 vertices of each tet.
  Barycentric,
};

/// Loads a VTK vector array as a field on `mesh`. Cell data is taken as is.
/// Point data needs Resample::Barycentric. With an empty `array_name` the first
/// VECTORS array is used, cell data first.
/// Errors: length mismatch, NaN or Inf entries, point data without resampling.
Pcvf read_field(const std::string& path, const MeshPtr& mesh, Resample resample = Resample::None,
                const std::string& array_name = "");

/// Cell field on another mesh: each target tet takes the vector of the source tet
/// containing its barycenter, or of the source tet with the nearest barycenter.
Pcvf transfer_field(const Pcvf& source, const MeshPtr& target);

/// Mesh plus any number of CELL_DATA vector arrays. Doubles are written in
/// shortest round-trip form, so reading back is bit-exact.
void write_vtk(std::ostream& out, const TetMesh& mesh,
               const std::vector<std::pair<std::string, const Pcvf*>>& cell_fields,
               const std::string& title = "hodge3d");
void write_vtk(const std::string& path, const TetMesh& mesh,
               const std::vector<std::pair<std::string, const Pcvf*>>& cell_fields);

void write_gmsh(std::ostream& out, const TetMesh& mesh);
void write_gmsh(const std::string& path, const TetMesh& mesh);

/// 64-bit FNV-1a of the vertex coordinates and tet connectivity.
std::uint64_t mesh_hash(const TetMesh& mesh);
/// 64-bit FNV-1a of the field vectors.
std::uint64_t field_hash(const Pcvf& field);

inline constexpr int kReportSchemaVersion = 1;

/// JSON report of a decomposition. `settings` is stored verbatim.
nlohmann::ordered_json make_report(const DecompositionResult& result,
                                   const nlohmann::ordered_json& settings = nlohmann::ordered_json::object());

/// Writes <component>.vtk for every component and report.json into `out_dir`,
/// creating it if needed. Returns the paths written.
std::vector<std::string> write_outputs(const DecompositionResult& result, const std::string& out_dir,
                                       const nlohmann::ordered_json& settings = nlohmann::ordered_json::object());

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace hodge3d
