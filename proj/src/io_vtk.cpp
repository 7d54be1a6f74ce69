#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hodge3d/io.hpp"
#include "text_reader.hpp"

namespace hodge3d {

namespace {

constexpr int kVtkTetra = 10;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<Vec3> read_vectors(detail::TextReader& r, std::size_t n) {
  std::vector<Vec3> v(n);
  for (auto& x : v) {
    x[0] = r.real();
    x[1] = r.real();
    x[2] = r.real();
  }
  return v;
}

void skip_values(detail::TextReader& r, std::int64_t n) {
  for (std::int64_t i = 0; i < n; ++i) r.token();
}

Index checked_index(detail::TextReader& r, std::int64_t v, std::size_t n_points) {
  if (v < 0 || static_cast<std::size_t>(v) >= n_points)
    r.fail("point index " + std::to_string(v) + " out of range");
  return static_cast<Index>(v);
}

// Reads one attribute section (CELL_DATA or POINT_DATA) of `count` tuples until
// the next section keyword, which is returned (empty at end of file).
std::string read_attributes(detail::TextReader& r, std::int64_t count,
                            std::vector<std::pair<std::string, std::vector<Vec3>>>& vectors) {
  while (!r.at_end()) {
    const std::string key = lower(r.token());
    if (key == "vectors" || key == "normals") {
      const std::string name(r.token());
      r.token();  // data type
      auto v = read_vectors(r, static_cast<std::size_t>(count));
      if (key == "vectors") vectors.emplace_back(name, std::move(v));
    } else if (key == "scalars") {
      r.token();
      r.token();
      // Optional component count on the same line.
      std::int64_t components = 1;
      if (const std::string_view rest = r.rest_of_line(); rest.find_first_not_of(" \t") != std::string_view::npos) {
        const auto first = rest.find_first_not_of(" \t");
        const auto [p, ec] = std::from_chars(rest.data() + first, rest.data() + rest.size(), components);
        if (ec != std::errc()) r.fail("malformed SCALARS header");
        (void)p;
      }
      r.expect("LOOKUP_TABLE");
      r.token();
      skip_values(r, count * components);
    } else if (key == "tensors") {
      r.token();
      r.token();
      skip_values(r, 9 * count);
    } else if (key == "texture_coordinates") {
      r.token();
      const std::int64_t dim = r.integer();
      r.token();
      skip_values(r, dim * count);
    } else if (key == "color_scalars") {
      r.token();
      const std::int64_t nv = r.integer();
      skip_values(r, nv * count);
    } else if (key == "lookup_table") {
      r.token();
      const std::int64_t size = r.integer();
      skip_values(r, 4 * size);
    } else if (key == "field") {
      r.token();
      const std::int64_t arrays = r.integer();
      for (std::int64_t a = 0; a < arrays; ++a) {
        r.token();
        const std::int64_t comps = r.integer();
        const std::int64_t tuples = r.integer();
        r.token();
        skip_values(r, comps * tuples);
      }
    } else if (key == "metadata") {
      // Skipped up to the terminating blank line.
      r.rest_of_line();
      while (!r.at_end() && !r.rest_of_line().empty()) {
      }
    } else if (key == "cell_data" || key == "point_data") {
      return key;
    } else {
      r.fail("unknown keyword '" + key + "'");
    }
  }
  return {};
}

}  // namespace

VtkDocument parse_vtk(std::istream& in) {
  detail::TextReader r(in, "read_mesh");
  VtkDocument doc;

  const std::string_view magic = r.rest_of_line();
  if (magic.rfind("# vtk DataFile", 0) != 0) r.fail("missing '# vtk DataFile' header");
  r.rest_of_line();  // title
  const std::string encoding = lower(r.token());
  if (encoding == "binary") r.fail("binary VTK files are not supported");
  if (encoding != "ascii") r.fail("expected ASCII, got '" + encoding + "'");
  r.expect("DATASET");
  if (const std::string_view t = r.token(); lower(t) != "unstructured_grid")
    r.fail("unsupported dataset type '" + std::string(t) + "'");

  std::vector<std::array<Index, 4>> cells;
  std::vector<std::size_t> cell_sizes;
  bool have_types = false;
  std::string pending;
  while (!pending.empty() || !r.at_end()) {
    const std::string key = pending.empty() ? lower(r.token()) : pending;
    pending.clear();
    if (key == "points") {
      const std::int64_t n = r.integer();
      if (n < 0) r.fail("negative point count");
      r.token();
      doc.points = read_vectors(r, static_cast<std::size_t>(n));
    } else if (key == "cells") {
      const std::int64_t a = r.integer();
      const std::int64_t b = r.integer();
      if (a < 0 || b < 0) r.fail("negative cell counts");
      std::string next(r.token());
      if (lower(next) == "offsets") {
        // Version 5 layout: OFFSETS and CONNECTIVITY arrays.
        r.token();
        std::vector<std::int64_t> offsets(static_cast<std::size_t>(a));
        for (auto& o : offsets) o = r.integer();
        r.expect("CONNECTIVITY");
        r.token();
        std::vector<std::int64_t> conn(static_cast<std::size_t>(b));
        for (auto& c : conn) c = r.integer();
        for (std::size_t c = 0; c + 1 < offsets.size(); ++c) {
          const std::int64_t lo = offsets[c], hi = offsets[c + 1];
          if (lo < 0 || hi < lo || hi > b) r.fail("bad cell offsets");
          cell_sizes.push_back(static_cast<std::size_t>(hi - lo));
          std::array<Index, 4> t{-1, -1, -1, -1};
          for (std::int64_t k = lo; k < hi && k - lo < 4; ++k)
            t[static_cast<std::size_t>(k - lo)] = checked_index(r, conn[static_cast<std::size_t>(k)], doc.points.size());
          cells.push_back(t);
        }
      } else {
        std::int64_t npts = 0;
        {
          const auto [p, ec] = std::from_chars(next.data(), next.data() + next.size(), npts);
          if (ec != std::errc() || p != next.data() + next.size()) r.fail("expected a cell size");
        }
        for (std::int64_t c = 0; c < a; ++c) {
          if (c > 0) npts = r.integer();
          if (npts < 0) r.fail("negative cell size");
          cell_sizes.push_back(static_cast<std::size_t>(npts));
          std::array<Index, 4> t{-1, -1, -1, -1};
          for (std::int64_t k = 0; k < npts; ++k) {
            const std::int64_t v = r.integer();
            if (k < 4) t[static_cast<std::size_t>(k)] = checked_index(r, v, doc.points.size());
          }
          cells.push_back(t);
        }
      }
    } else if (key == "cell_types") {
      const std::int64_t n = r.integer();
      if (static_cast<std::size_t>(n) != cells.size()) r.fail("CELL_TYPES count differs from CELLS");
      for (std::int64_t c = 0; c < n; ++c) {
        const std::int64_t type = r.integer();
        if (type != kVtkTetra || cell_sizes[static_cast<std::size_t>(c)] != 4)
          r.fail("unsupported cell type " + std::to_string(type) + " (only tetrahedra, type 10)");
      }
      have_types = true;
    } else if (key == "cell_data") {
      const std::int64_t n = r.integer();
      pending = read_attributes(r, n, doc.cell_vectors);
    } else if (key == "point_data") {
      const std::int64_t n = r.integer();
      pending = read_attributes(r, n, doc.point_vectors);
    } else if (key == "field") {
      r.token();
      const std::int64_t arrays = r.integer();
      for (std::int64_t a = 0; a < arrays; ++a) {
        r.token();
        const std::int64_t comps = r.integer();
        const std::int64_t tuples = r.integer();
        r.token();
        skip_values(r, comps * tuples);
      }
    } else if (key == "metadata") {
      r.rest_of_line();
      while (!r.at_end() && !r.rest_of_line().empty()) {
      }
    } else {
      r.fail("unknown keyword '" + key + "'");
    }
  }
  if (!cells.empty() && !have_types) r.fail("missing CELL_TYPES section");
  doc.tets = std::move(cells);
  return doc;
}

MeshFormat mesh_format_for_path(const std::string& path) {
  auto ends_with = [&](const std::string& suffix) {
    return path.size() >= suffix.size() &&
           lower(path.substr(path.size() - suffix.size())) == suffix;
  };
  if (ends_with(".vtk")) return MeshFormat::VtkLegacy;
  if (ends_with(".msh")) return MeshFormat::GmshMsh;
  throw InputError("read_mesh", "cannot tell the mesh format of '" + path + "' (expected .vtk or .msh)");
}

MeshPtr read_mesh(const std::string& path, MeshFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("read_mesh", "cannot open '" + path + "'");
  std::vector<Vec3> points;
  std::vector<std::array<Index, 4>> tets;
  if (format == MeshFormat::VtkLegacy) {
    VtkDocument doc = parse_vtk(in);
    points = std::move(doc.points);
    tets = std::move(doc.tets);
  } else {
    GmshDocument doc = parse_gmsh(in);
    points = std::move(doc.points);
    tets = std::move(doc.tets);
  }
  if (tets.empty()) throw InputError("read_mesh", "'" + path + "' contains no tetrahedra");
  return build_complex(std::move(points), std::move(tets));
}

MeshPtr read_mesh(const std::string& path) { return read_mesh(path, mesh_format_for_path(path)); }

Pcvf read_field(const std::string& path, const MeshPtr& mesh, Resample resample,
                const std::string& array_name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("read_field", "cannot open '" + path + "'");
  VtkDocument doc;
  try {
    doc = parse_vtk(in);
  } catch (const InputError& e) {
    throw InputError("read_field", e.what());
  }

  auto find = [&](const std::vector<std::pair<std::string, std::vector<Vec3>>>& arrays)
      -> const std::vector<Vec3>* {
    for (const auto& [name, v] : arrays)
      if (array_name.empty() || name == array_name) return &v;
    return nullptr;
  };

  auto check_finite = [&](const std::vector<Vec3>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!v[i].allFinite())
        throw InputError("read_field", "entry " + std::to_string(i) + " of '" + path + "' is NaN or Inf");
  };

  if (const auto* cell = find(doc.cell_vectors)) {
    if (cell->size() != mesh->num_tets())
      throw InputError("read_field", "field has " + std::to_string(cell->size()) + " cell vectors, mesh has " +
                                         std::to_string(mesh->num_tets()) + " tets");
    check_finite(*cell);
    return Pcvf(mesh, *cell);
  }
  if (const auto* point = find(doc.point_vectors)) {
    if (resample != Resample::Barycentric)
      throw InputError("read_field", "'" + path +
                                         "' holds point data; pass --resample barycentric to average it over each tet");
    if (point->size() != mesh->num_vertices())
      throw InputError("read_field", "field has " + std::to_string(point->size()) + " point vectors, mesh has " +
                                         std::to_string(mesh->num_vertices()) + " vertices");
    check_finite(*point);
    std::vector<Vec3> v(mesh->num_tets());
    for (std::size_t t = 0; t < v.size(); ++t) {
      Vec3 s = Vec3::Zero();
      for (Index p : mesh->tets()[t]) s += (*point)[static_cast<std::size_t>(p)];
      v[t] = 0.25 * s;
    }
    return Pcvf(mesh, std::move(v));
  }
  throw InputError("read_field", array_name.empty()
                                     ? "'" + path + "' has no VECTORS array"
                                     : "'" + path + "' has no VECTORS array named '" + array_name + "'");
}

std::string format_double(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

void write_vtk(std::ostream& out, const TetMesh& mesh,
               const std::vector<std::pair<std::string, const Pcvf*>>& cell_fields,
               const std::string& title) {
  std::string s;
  s.reserve(64 * (mesh.num_vertices() + mesh.num_tets() * (1 + cell_fields.size())));
  auto vec = [&](const Vec3& x) {
    s += format_double(x[0]);
    s += ' ';
    s += format_double(x[1]);
    s += ' ';
    s += format_double(x[2]);
    s += '\n';
  };
  s += "# vtk DataFile Version 3.0\n";
  s += title;
  s += "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  s += "POINTS " + std::to_string(mesh.num_vertices()) + " double\n";
  for (const Vec3& p : mesh.vertices()) vec(p);
  s += "CELLS " + std::to_string(mesh.num_tets()) + " " + std::to_string(5 * mesh.num_tets()) + "\n";
  for (const auto& t : mesh.tets())
    s += "4 " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " + std::to_string(t[2]) + " " +
         std::to_string(t[3]) + "\n";
  s += "CELL_TYPES " + std::to_string(mesh.num_tets()) + "\n";
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) s += "10\n";
  if (!cell_fields.empty()) {
    s += "CELL_DATA " + std::to_string(mesh.num_tets()) + "\n";
    for (const auto& [name, field] : cell_fields) {
      if (field->size() != mesh.num_tets()) throw InputError("write_outputs", "field '" + name + "' has the wrong length");
      s += "VECTORS " + name + " double\n";
      for (const Vec3& x : field->vectors()) vec(x);
    }
  }
  out << s;
}

void write_vtk(const std::string& path, const TetMesh& mesh,
               const std::vector<std::pair<std::string, const Pcvf*>>& cell_fields) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("write_outputs", "cannot write '" + path + "'");
  write_vtk(out, mesh, cell_fields);
  if (!out) throw InputError("write_outputs", "write to '" + path + "' failed");
}

}  // namespace hodge3d
