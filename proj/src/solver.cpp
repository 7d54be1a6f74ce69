#include "hodge3d/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hodge3d {

namespace {

// Jacobi PCG on the rows where `active` is 1, for an operator y = A x. Restarts
// from the true residual when the recursive one has drifted below the target.
template <class Apply>
SolveReport pcg(const Apply& apply, const Eigen::VectorXd& inv_diag, const Eigen::VectorXd& active,
                const Eigen::VectorXd& b, double tol, std::size_t max_iter, Eigen::VectorXd& x) {
  SolveReport report;
  const double b_norm = b.norm();
  const double target = tol * b_norm;

  Eigen::VectorXd r, z, p, q;
  auto true_residual = [&] {
    apply(x, q);
    q = b - q;
    r = q.cwiseProduct(active);
    return q.norm();
  };

  double res = true_residual();
  std::size_t it = 0;
  while (res > target && it < max_iter) {
    z = inv_diag.cwiseProduct(r);
    p = z;
    double rz = r.dot(z);
    while (it < max_iter) {
      apply(p, q);
      const double pq = p.dot(q);
      if (!(pq > 0.0)) break;
      const double alpha = rz / pq;
      x += alpha * p;
      r -= alpha * q;
      ++it;
      if (r.norm() <= target) break;
      z = inv_diag.cwiseProduct(r);
      const double rz_next = r.dot(z);
      p = z + (rz_next / rz) * p;
      rz = rz_next;
    }
    const double previous = res;
    res = true_residual();
    if (res > target && res >= previous) break;  // stagnated at round-off level
  }

  report.iterations = it;
  report.relative_residual = b_norm > 0.0 ? res / b_norm : 0.0;
  report.converged = res <= target;
  return report;
}

// Inverse diagonal and active-row mask; filler rows are inactive.
void jacobi_setup(const SparseSymMatrix& a, Eigen::VectorXd& inv_diag, Eigen::VectorXd& active) {
  const auto n = static_cast<Eigen::Index>(a.n);
  inv_diag = a.diagonal();
  active = Eigen::VectorXd::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!a.filler.empty() && a.filler[static_cast<std::size_t>(i)]) {
      active[i] = 0.0;
      inv_diag[i] = 0.0;
    } else {
      // A zero diagonal in a semi-definite matrix means an all-zero row.
      inv_diag[i] = inv_diag[i] > 0.0 ? 1.0 / inv_diag[i] : 0.0;
    }
  }
}

}  // namespace

SolveResult solve_spsd(const SparseSymMatrix& a, const Eigen::VectorXd& b,
                       const SolverOptions& options, std::span<const Eigen::VectorXd> kernel) {
  const auto n = static_cast<Eigen::Index>(a.n);
  if (b.size() != n) throw InputError("solve_spsd", "right-hand side has the wrong length");
  if (!(options.tol > 0.0)) throw InputError("solve_spsd", "tolerance must be positive");

  const double b_norm = b.norm();
  for (const auto& k : kernel) {
    const double kn = k.norm();
    if (kn > 0.0 && std::abs(k.dot(b)) > 1e-8 * kn * b_norm)
      throw InputError("solve_spsd", "right-hand side is not orthogonal to the kernel");
  }

  SolveResult result;
  result.x = Eigen::VectorXd::Zero(n);
  if (b_norm == 0.0) {
    result.report.converged = true;
    return result;
  }

  Eigen::VectorXd inv_diag, active;
  jacobi_setup(a, inv_diag, active);
  // Filler rows are identity rows with no coupling: x_i = b_i.
  for (Eigen::Index i = 0; i < n; ++i)
    if (active[i] == 0.0) result.x[i] = b[i];

  const std::size_t max_iter = options.max_iter > 0 ? options.max_iter : 10 * a.n;
  result.report = pcg([&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { a.multiply(x, y); },
                      inv_diag, active, b, options.tol, max_iter, result.x);
  return result;
}

namespace {

Index find_root(std::vector<Index>& parent, Index i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

// Relabels union-find roots as 0..k-1 and returns k.
Index label_components(std::vector<Index>& parent, std::vector<Index>& label) {
  label.assign(parent.size(), -1);
  std::vector<Index> root_label(parent.size(), -1);
  Index k = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const Index r = find_root(parent, static_cast<Index>(i));
    if (root_label[r] < 0) root_label[r] = k++;
    label[i] = root_label[r];
  }
  return k;
}

}  // namespace

GramKernel::GramKernel(const ElementTables& tables, const SparseSymMatrix& gram, Space space,
                       bool constrained)
    : space_(space) {
  const TetMesh& mesh = *tables.mesh;
  if (space == Space::GradCr) {
    n_dofs_ = mesh.num_faces();
    if (constrained) return;  // definite
    std::vector<Index> parent(mesh.num_faces());
    for (std::size_t f = 0; f < parent.size(); ++f) parent[f] = static_cast<Index>(f);
    for (std::size_t t = 0; t < mesh.num_tets(); ++t) {
      const auto& fs = mesh.tet_faces(t);
      for (int k = 1; k < 4; ++k) {
        const Index a = find_root(parent, fs[0]), b = find_root(parent, fs[k]);
        if (a != b) parent[b] = a;
      }
    }
    n_components_ = label_components(parent, face_component_);
    return;
  }

  n_dofs_ = mesh.num_edges();
  const std::size_t nv = mesh.num_vertices();
  auto active_vertex = [&](Index v) { return !constrained || !mesh.is_boundary_vertex(v); };
  std::vector<Index> degree(nv, 0);
  std::vector<std::pair<Index, Index>> off;
  for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
    if (constrained && mesh.is_boundary_edge(e)) continue;
    auto [a, b] = mesh.edges()[e];
    const Index ea = active_vertex(a) ? a : -1, eb = active_vertex(b) ? b : -1;
    if (ea < 0 && eb < 0) continue;
    edge_ids_.push_back(static_cast<Index>(e));
    edge_vertices_.push_back({ea, eb});
    if (ea >= 0) ++degree[ea];
    if (eb >= 0) ++degree[eb];
    if (ea >= 0 && eb >= 0) {
      off.emplace_back(ea, eb);
      off.emplace_back(eb, ea);
    }
  }
  for (std::size_t v = 0; v < nv; ++v) off.emplace_back(static_cast<Index>(v), static_cast<Index>(v));
  std::sort(off.begin(), off.end());

  SparseSymMatrix& l = laplacian_;
  l.n = nv;
  l.row_ptr.assign(nv + 1, 0);
  l.cols.reserve(off.size());
  l.vals.reserve(off.size());
  for (const auto& [i, j] : off) {
    ++l.row_ptr[static_cast<std::size_t>(i) + 1];
    l.cols.push_back(j);
    l.vals.push_back(i == j ? static_cast<double>(degree[i]) : -1.0);
  }
  for (std::size_t v = 0; v < nv; ++v) l.row_ptr[v + 1] += l.row_ptr[v];
  // Inactive vertices become identity rows with zero right-hand side.
  l.filler.assign(nv, 0);
  for (std::size_t v = 0; v < nv; ++v) {
    if (!active_vertex(static_cast<Index>(v))) {
      l.filler[v] = 1;
      l.vals[static_cast<std::size_t>(l.row_ptr[v])] = 1.0;
    }
  }

  if (!constrained) {
    std::vector<Index> parent(nv);
    for (std::size_t v = 0; v < nv; ++v) parent[v] = static_cast<Index>(v);
    for (const auto& [a, b] : edge_vertices_) {
      const Index ra = find_root(parent, a), rb = find_root(parent, b);
      if (ra != rb) parent[rb] = ra;
    }
    n_components_ = label_components(parent, vertex_component_);
  }

  const BettiNumbers betti = betti_numbers(mesh);
  const int n_harmonic = constrained ? betti.b2 : betti.b1;
  if (n_harmonic > 0) find_harmonic(gram, n_harmonic);
}

// For a random r, r minus the solution of A y = A r is a null vector of A up to
// the solver tolerance. Its gradient part is removed, then a few correction
// solves against the residual A h bring |A h| down to round-off. The corrections
// use a loose tolerance: their right-hand sides are tiny, so their round-off
// component along h caps the attainable relative residual.
void GramKernel::find_harmonic(const SparseSymMatrix& gram, int count) {
  const auto n = static_cast<Eigen::Index>(gram.n);
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal;

  auto correct = [&](Eigen::VectorXd& h, double tol) {
    SolverOptions opt;
    opt.tol = tol;
    Eigen::VectorXd rhs = gram * h;
    deflate_known(rhs);
    h -= solve_spsd(gram, rhs, opt).x;
    deflate_gradients(h);
    for (const auto& prev : harmonic_) h -= prev.dot(h) * prev;
  };

  for (int attempt = 0; static_cast<int>(harmonic_.size()) < count && attempt < 2 * count; ++attempt) {
    Eigen::VectorXd h(n);
    for (Eigen::Index i = 0; i < n; ++i)
      h[i] = gram.filler.empty() || !gram.filler[static_cast<std::size_t>(i)] ? normal(rng) : 0.0;
    const double r_norm = h.norm();
    correct(h, 1e-12);
    if (!(h.norm() > 1e-6 * r_norm)) continue;
    h.normalize();
    for (int pass = 0; pass < 3; ++pass) {
      correct(h, 1e-6);
      h.normalize();
    }
    harmonic_.push_back(h);
  }
}

void GramKernel::deflate(Eigen::VectorXd& b) const {
  if (static_cast<std::size_t>(b.size()) != n_dofs_)
    throw InputError("solve_spsd", "right-hand side has the wrong length");

  if (space_ == Space::GradCr) {
    if (n_components_ == 0) return;
    std::vector<double> sum(n_components_, 0.0);
    std::vector<double> count(n_components_, 0.0);
    for (std::size_t f = 0; f < n_dofs_; ++f) {
      sum[face_component_[f]] += b[f];
      count[face_component_[f]] += 1.0;
    }
    for (std::size_t f = 0; f < n_dofs_; ++f) b[f] -= sum[face_component_[f]] / count[face_component_[f]];
    return;
  }

  deflate_known(b);
}

void GramKernel::deflate_known(Eigen::VectorXd& b) const {
  deflate_gradients(b);
  for (const auto& h : harmonic_) b -= h.dot(b) * h;
}

void GramKernel::deflate_gradients(Eigen::VectorXd& b) const {
  if (edge_ids_.empty()) return;
  // Two passes: the second removes what the inexact Laplacian solve left behind.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(laplacian_.n));
    for (std::size_t k = 0; k < edge_ids_.size(); ++k) {
      const double be = b[edge_ids_[k]];
      const auto [va, vb] = edge_vertices_[k];
      if (va >= 0) g[va] -= be;
      if (vb >= 0) g[vb] += be;
    }
    if (n_components_ > 0) {
      std::vector<double> sum(n_components_, 0.0);
      std::vector<double> count(n_components_, 0.0);
      for (Eigen::Index v = 0; v < g.size(); ++v) {
        sum[vertex_component_[v]] += g[v];
        count[vertex_component_[v]] += 1.0;
      }
      for (Eigen::Index v = 0; v < g.size(); ++v)
        g[v] -= sum[vertex_component_[v]] / count[vertex_component_[v]];
    }
    SolverOptions opt;
    opt.tol = 1e-10;
    const SolveResult y = solve_spsd(laplacian_, g, opt);
    for (std::size_t k = 0; k < edge_ids_.size(); ++k) {
      const auto [va, vb] = edge_vertices_[k];
      b[edge_ids_[k]] -= (vb >= 0 ? y.x[vb] : 0.0) - (va >= 0 ? y.x[va] : 0.0);
    }
  }
}

}  // namespace hodge3d
