#include "hodge3d/assembly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include "hodge3d/parallel.hpp"

namespace hodge3d {

namespace {

struct LocalBasis {
  const Vec3* derivs;
  const Index* dofs;
  std::size_t size;
};

const DofMap& dof_map(const ElementTables& tables, Space space) {
  return space == Space::CurlNedelec ? tables.edge_dofs : tables.face_dofs;
}

LocalBasis local_basis(const ElementTables& tables, Space space, std::size_t t) {
  if (space == Space::CurlNedelec)
    return {tables.ned_curls[t].data(), tables.edge_dofs.dofs(t), 6};
  return {tables.cr_gradients[t].data(), tables.face_dofs.dofs(t), 4};
}

}  // namespace

std::string to_string(Space space) {
  return space == Space::CurlNedelec ? "curl_ned" : "grad_cr";
}

double SparseSymMatrix::coeff(std::size_t i, std::size_t j) const {
  const auto begin = cols.begin() + row_ptr[i];
  const auto end = cols.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(begin, end, static_cast<Index>(j));
  return (it != end && *it == static_cast<Index>(j)) ? vals[it - cols.begin()] : 0.0;
}

Eigen::VectorXd SparseSymMatrix::diagonal() const {
  Eigen::VectorXd d(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = coeff(i, i);
  return d;
}

void SparseSymMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  y.resize(static_cast<Eigen::Index>(n));
  parallel::for_blocks(n, 8192, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double s = 0.0;
      for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += vals[k] * x[cols[k]];
      y[static_cast<Eigen::Index>(i)] = s;
    }
  });
}

Eigen::VectorXd SparseSymMatrix::operator*(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y;
  multiply(x, y);
  return y;
}

double SparseSymMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += std::abs(vals[k]);
    best = std::max(best, s);
  }
  return best;
}

SparseSymMatrix assemble_gram(const ElementTables& tables, Space space, bool constrained) {
  const TetMesh& mesh = *tables.mesh;
  const DofMap& dm = dof_map(tables, space);
  const std::size_t n = dm.n_dofs;
  const std::size_t n_t = mesh.num_tets();
  auto coupled = [&](Index i) { return !constrained || dm.interior_mask[i] != 0; };

  // Upper-triangle triplets, bucketed by row in tet order so the per-entry
  // summation order is fixed.
  std::vector<std::int64_t> upper_ptr(n + 1, 0);
  for (std::size_t t = 0; t < n_t; ++t) {
    const LocalBasis lb = local_basis(tables, space, t);
    for (std::size_t a = 0; a < lb.size; ++a)
      for (std::size_t b = a; b < lb.size; ++b) {
        const Index i = lb.dofs[a], j = lb.dofs[b];
        if (coupled(i) && coupled(j)) ++upper_ptr[std::min(i, j) + 1];
      }
  }
  std::partial_sum(upper_ptr.begin(), upper_ptr.end(), upper_ptr.begin());

  std::vector<Index> tcols(static_cast<std::size_t>(upper_ptr[n]));
  std::vector<double> tvals(tcols.size());
  {
    std::vector<std::int64_t> fill(upper_ptr.begin(), upper_ptr.end() - 1);
    for (std::size_t t = 0; t < n_t; ++t) {
      const LocalBasis lb = local_basis(tables, space, t);
      const double vol = mesh.geometry(t).volume;
      for (std::size_t a = 0; a < lb.size; ++a)
        for (std::size_t b = a; b < lb.size; ++b) {
          const Index i = lb.dofs[a], j = lb.dofs[b];
          if (!(coupled(i) && coupled(j))) continue;
          const auto slot = fill[std::min(i, j)]++;
          tcols[slot] = std::max(i, j);
          tvals[slot] = vol * lb.derivs[a].dot(lb.derivs[b]);
        }
    }
  }

  // Merge duplicates row by row (stable sort keeps tet order among equals).
  std::vector<std::int64_t> merged_ptr(n + 1, 0);
  std::vector<Index> mcols;
  std::vector<double> mvals;
  mcols.reserve(tcols.size() / 2);
  mvals.reserve(tcols.size() / 2);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    const auto begin = static_cast<std::size_t>(upper_ptr[i]);
    const auto end = static_cast<std::size_t>(upper_ptr[i + 1]);
    order.resize(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return tcols[a] < tcols[b]; });
    if (constrained && dm.interior_mask[i] == 0) {
      mcols.push_back(static_cast<Index>(i));
      mvals.push_back(1.0);
    }
    for (std::size_t k = 0; k < order.size();) {
      const Index c = tcols[order[k]];
      double s = 0.0;
      for (; k < order.size() && tcols[order[k]] == c; ++k) s += tvals[order[k]];
      mcols.push_back(c);
      mvals.push_back(s);
    }
    merged_ptr[i + 1] = static_cast<std::int64_t>(mcols.size());
  }
  tcols = {};
  tvals = {};

  // Mirror into full storage: row r = (lower entries, ascending) + (upper part).
  SparseSymMatrix a;
  a.n = n;
  a.filler.assign(n, 0);
  if (constrained)
    for (std::size_t i = 0; i < n; ++i) a.filler[i] = dm.interior_mask[i] == 0 ? 1 : 0;
  a.row_ptr.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (auto k = merged_ptr[i]; k < merged_ptr[i + 1]; ++k) {
      ++a.row_ptr[i + 1];
      if (static_cast<std::size_t>(mcols[k]) != i) ++a.row_ptr[mcols[k] + 1];
    }
  std::partial_sum(a.row_ptr.begin(), a.row_ptr.end(), a.row_ptr.begin());
  a.cols.resize(static_cast<std::size_t>(a.row_ptr[n]));
  a.vals.resize(a.cols.size());
  std::vector<std::int64_t> fill(a.row_ptr.begin(), a.row_ptr.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    // Lower entries of row i were placed while visiting earlier rows.
    for (auto k = merged_ptr[i]; k < merged_ptr[i + 1]; ++k) {
      const auto c = static_cast<std::size_t>(mcols[k]);
      a.cols[fill[i]] = mcols[k];
      a.vals[fill[i]++] = mvals[k];
      if (c != i) {
        a.cols[fill[c]] = static_cast<Index>(i);
        a.vals[fill[c]++] = mvals[k];
      }
    }
  }
  return a;
}

Eigen::VectorXd assemble_rhs(const Pcvf& x, const ElementTables& tables, Space space,
                             bool constrained) {
  if (x.mesh() != tables.mesh) throw InputError("assemble_rhs", "field and tables mesh differ");
  const TetMesh& mesh = *tables.mesh;
  const DofMap& dm = dof_map(tables, space);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dm.n_dofs));
  for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
    const LocalBasis lb = local_basis(tables, space, t);
    const Vec3 w = mesh.geometry(t).volume * x[t];
    for (std::size_t a = 0; a < lb.size; ++a) b[lb.dofs[a]] += w.dot(lb.derivs[a]);
  }
  if (constrained)
    for (std::size_t i = 0; i < dm.n_dofs; ++i)
      if (dm.interior_mask[i] == 0) b[static_cast<Eigen::Index>(i)] = 0.0;
  return b;
}

Pcvf reconstruct(const Eigen::VectorXd& coeffs, const ElementTables& tables, Space space) {
  const DofMap& dm = dof_map(tables, space);
  if (static_cast<std::size_t>(coeffs.size()) != dm.n_dofs)
    throw InputError("reconstruct", "coefficient vector has the wrong length");
  Pcvf out(tables.mesh);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const LocalBasis lb = local_basis(tables, space, t);
    Vec3 v = Vec3::Zero();
    for (std::size_t a = 0; a < lb.size; ++a) v += coeffs[lb.dofs[a]] * lb.derivs[a];
    out[t] = v;
  }
  return out;
}

void write_matrix_market(const SparseSymMatrix& a, std::ostream& out) {
  std::size_t lower = 0;
  for (std::size_t i = 0; i < a.n; ++i)
    for (auto k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k)
      if (static_cast<std::size_t>(a.cols[k]) <= i) ++lower;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.n << ' ' << a.n << ' ' << lower << '\n';
  char buf[64];
  for (std::size_t i = 0; i < a.n; ++i)
    for (auto k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
      if (static_cast<std::size_t>(a.cols[k]) > i) continue;
      const auto res = std::to_chars(buf, buf + sizeof(buf), a.vals[k]);
      out << (i + 1) << ' ' << (a.cols[k] + 1) << ' ' << std::string_view(buf, res.ptr - buf)
          << '\n';
    }
}

}  // namespace hodge3d
