#include <fstream>
#include <map>
#include <string>

#include "hodge3d/io.hpp"
#include "text_reader.hpp"

namespace hodge3d {

namespace {

constexpr int kGmshTet = 4;

// Nodes per element for the linear and common quadratic Gmsh element types, and
// whether the element is a volume element.
struct ElementInfo {
  int nodes = 0;
  bool volume = false;
};

ElementInfo element_info(std::int64_t type) {
  switch (type) {
    case 1: return {2, false};   // line
    case 2: return {3, false};   // triangle
    case 3: return {4, false};   // quadrangle
    case 4: return {4, true};    // tetrahedron
    case 5: return {8, true};    // hexahedron
    case 6: return {6, true};    // prism
    case 7: return {5, true};    // pyramid
    case 8: return {3, false};   // 3-node line
    case 9: return {6, false};   // 6-node triangle
    case 10: return {9, false};  // 9-node quadrangle
    case 11: return {10, true};  // 10-node tetrahedron
    case 12: return {27, true};  // 27-node hexahedron
    case 13: return {18, true};  // 18-node prism
    case 14: return {14, true};  // 14-node pyramid
    case 15: return {1, false};  // point
    case 16: return {8, false};  // 8-node quadrangle
    case 17: return {20, true};  // 20-node hexahedron
    case 18: return {15, true};  // 15-node prism
    case 19: return {13, true};  // 13-node pyramid
    default: return {0, false};
  }
}

void skip_section(detail::TextReader& r, const std::string& name) {
  const std::string end = "$End" + name.substr(1);
  while (r.token() != end) {
  }
}

}  // namespace

GmshDocument parse_gmsh(std::istream& in) {
  detail::TextReader r(in, "read_mesh");
  std::map<std::int64_t, Vec3> nodes;
  std::vector<std::array<std::int64_t, 4>> tets;
  bool have_format = false;

  while (!r.at_end()) {
    const std::string section(r.token());
    if (section.empty() || section[0] != '$') r.fail("expected a section, got '" + section + "'");
    if (section == "$MeshFormat") {
      const std::string version(r.token());
      if (version.rfind("4", 0) != 0) r.fail("unsupported Gmsh version " + version + " (expected 4.1)");
      if (r.integer() != 0) r.fail("binary Gmsh files are not supported");
      r.integer();
      r.expect("$EndMeshFormat");
      have_format = true;
    } else if (section == "$Nodes") {
      const std::int64_t blocks = r.integer();
      r.integer();
      r.integer();
      r.integer();
      for (std::int64_t b = 0; b < blocks; ++b) {
        const std::int64_t dim = r.integer();
        r.integer();
        const std::int64_t parametric = r.integer();
        const std::int64_t count = r.integer();
        if (count < 0) r.fail("negative node count");
        std::vector<std::int64_t> tags(static_cast<std::size_t>(count));
        for (auto& t : tags) t = r.integer();
        for (const std::int64_t tag : tags) {
          Vec3 x;
          x[0] = r.real();
          x[1] = r.real();
          x[2] = r.real();
          if (parametric) for (std::int64_t k = 0; k < dim; ++k) r.real();
          if (!nodes.emplace(tag, x).second) r.fail("duplicate node tag " + std::to_string(tag));
        }
      }
      r.expect("$EndNodes");
    } else if (section == "$Elements") {
      const std::int64_t blocks = r.integer();
      r.integer();
      r.integer();
      r.integer();
      for (std::int64_t b = 0; b < blocks; ++b) {
        r.integer();
        r.integer();
        const std::int64_t type = r.integer();
        const std::int64_t count = r.integer();
        const ElementInfo info = element_info(type);
        if (info.nodes == 0) r.fail("unsupported element type " + std::to_string(type));
        if (info.volume && type != kGmshTet)
          r.fail("unsupported cell type " + std::to_string(type) + " (only tetrahedra, type 4)");
        for (std::int64_t e = 0; e < count; ++e) {
          r.integer();
          std::array<std::int64_t, 4> t{};
          for (int k = 0; k < info.nodes; ++k) {
            const std::int64_t v = r.integer();
            if (type == kGmshTet) t[static_cast<std::size_t>(k)] = v;
          }
          if (type == kGmshTet) tets.push_back(t);
        }
      }
      r.expect("$EndElements");
    } else {
      skip_section(r, section);
    }
  }
  if (!have_format) r.fail("missing $MeshFormat section");

  // Nodes used by tets, numbered in tag order.
  std::map<std::int64_t, Index> index;
  for (const auto& t : tets)
    for (const std::int64_t tag : t) {
      if (!nodes.count(tag)) r.fail("element refers to unknown node " + std::to_string(tag));
      index.emplace(tag, 0);
    }
  GmshDocument doc;
  for (auto& [tag, id] : index) {
    id = static_cast<Index>(doc.points.size());
    doc.points.push_back(nodes.at(tag));
  }
  doc.tets.reserve(tets.size());
  for (const auto& t : tets) doc.tets.push_back({index[t[0]], index[t[1]], index[t[2]], index[t[3]]});
  return doc;
}

void write_gmsh(std::ostream& out, const TetMesh& mesh) {
  const std::size_t nv = mesh.num_vertices(), nt = mesh.num_tets();
  std::string s;
  s.reserve(64 * (nv + nt));
  s += "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
  s += "$Nodes\n1 " + std::to_string(nv) + " 1 " + std::to_string(nv) + "\n";
  s += "3 1 0 " + std::to_string(nv) + "\n";
  for (std::size_t v = 1; v <= nv; ++v) s += std::to_string(v) + "\n";
  for (const Vec3& p : mesh.vertices())
    s += format_double(p[0]) + " " + format_double(p[1]) + " " + format_double(p[2]) + "\n";
  s += "$EndNodes\n";
  s += "$Elements\n1 " + std::to_string(nt) + " 1 " + std::to_string(nt) + "\n";
  s += "3 1 4 " + std::to_string(nt) + "\n";
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& c = mesh.tets()[t];
    s += std::to_string(t + 1) + " " + std::to_string(c[0] + 1) + " " + std::to_string(c[1] + 1) + " " +
         std::to_string(c[2] + 1) + " " + std::to_string(c[3] + 1) + "\n";
  }
  s += "$EndElements\n";
  out << s;
}

void write_gmsh(const std::string& path, const TetMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("write_outputs", "cannot write '" + path + "'");
  write_gmsh(out, mesh);
  if (!out) throw InputError("write_outputs", "write to '" + path + "' failed");
}

}  // namespace hodge3d
