#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "hodge3d/hodge.hpp"

namespace testing {

using hodge3d::Index;
using hodge3d::MeshPtr;
using hodge3d::Vec3;

inline MeshPtr reference_tet(double scale = 1.0) {
  return hodge3d::build_complex(
      {Vec3(0, 0, 0), scale * Vec3(1, 0, 0), scale * Vec3(0, 1, 0), scale * Vec3(0, 0, 1)}, {{0, 1, 2, 3}});
}

// Two tets sharing the face (1, 2, 3).
inline MeshPtr two_tets() {
  return hodge3d::build_complex({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1), Vec3(1, 1, 1)},
                                {{0, 1, 2, 3}, {1, 2, 3, 4}});
}

// Single cube split into 6 tets around the main diagonal: one interior edge.
inline MeshPtr kuhn_cube(double jitter = 0.0, std::uint64_t seed = 0) {
  std::vector<Vec3> v;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-jitter, jitter);
  for (int i = 0; i < 8; ++i)
    v.emplace_back((i & 1) + u(rng), ((i >> 1) & 1) + u(rng), ((i >> 2) & 1) + u(rng));
  return hodge3d::build_complex(std::move(v), {{{0, 1, 3, 7}},
                                               {{0, 1, 5, 7}},
                                               {{0, 2, 3, 7}},
                                               {{0, 2, 6, 7}},
                                               {{0, 4, 5, 7}},
                                               {{0, 4, 6, 7}}});
}

// Rank over GF(2) of a 0/1 matrix given as lists of column indices per row.
inline std::size_t gf2_rank(const std::vector<std::vector<std::size_t>>& rows, std::size_t n_cols) {
  const std::size_t words = (n_cols + 63) / 64;
  std::vector<std::vector<std::uint64_t>> m;
  m.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<std::uint64_t> bits(words, 0);
    for (std::size_t c : r) bits[c / 64] ^= std::uint64_t{1} << (c % 64);
    m.push_back(std::move(bits));
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n_cols && rank < m.size(); ++col) {
    const std::size_t w = col / 64;
    const std::uint64_t bit = std::uint64_t{1} << (col % 64);
    std::size_t pivot = rank;
    while (pivot < m.size() && !(m[pivot][w] & bit)) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = rank + 1; r < m.size(); ++r)
      if (m[r][w] & bit)
        for (std::size_t k = w; k < words; ++k) m[r][k] ^= m[rank][k];
    ++rank;
  }
  return rank;
}

// Betti numbers from the mod-2 ranks of the simplicial boundary maps, computed
// from the raw tet list only.
inline hodge3d::BettiNumbers gf2_betti(const std::vector<std::array<Index, 4>>& tets, std::size_t n_v) {
  using Edge = std::array<Index, 2>;
  using Face = std::array<Index, 3>;
  std::vector<Edge> edges;
  std::vector<Face> faces;
  for (auto t : tets) {
    std::sort(t.begin(), t.end());
    for (int a = 0; a < 4; ++a)
      for (int b = a + 1; b < 4; ++b) edges.push_back({t[a], t[b]});
    for (int skip = 0; skip < 4; ++skip) {
      Face f;
      int k = 0;
      for (int a = 0; a < 4; ++a)
        if (a != skip) f[k++] = t[a];
      faces.push_back(f);
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::sort(faces.begin(), faces.end());
  faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  auto edge_id = [&](Index a, Index b) {
    return static_cast<std::size_t>(std::lower_bound(edges.begin(), edges.end(), Edge{a, b}) - edges.begin());
  };
  auto face_id = [&](Face f) {
    return static_cast<std::size_t>(std::lower_bound(faces.begin(), faces.end(), f) - faces.begin());
  };

  std::vector<std::vector<std::size_t>> d1, d2, d3;
  for (const auto& e : edges) d1.push_back({std::size_t(e[0]), std::size_t(e[1])});
  for (const auto& f : faces) d2.push_back({edge_id(f[0], f[1]), edge_id(f[0], f[2]), edge_id(f[1], f[2])});
  for (auto t : tets) {
    std::sort(t.begin(), t.end());
    d3.push_back({face_id({t[1], t[2], t[3]}), face_id({t[0], t[2], t[3]}), face_id({t[0], t[1], t[3]}),
                  face_id({t[0], t[1], t[2]})});
  }
  const std::size_t r1 = gf2_rank(d1, n_v);
  const std::size_t r2 = gf2_rank(d2, edges.size());
  const std::size_t r3 = gf2_rank(d3, faces.size());
  hodge3d::BettiNumbers b;
  b.b0 = static_cast<int>(n_v - r1);
  b.b1 = static_cast<int>(edges.size() - r1 - r2);
  b.b2 = static_cast<int>(faces.size() - r2 - r3);
  return b;
}

inline Eigen::VectorXd random_coefficients(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd c(static_cast<Eigen::Index>(n));
  for (auto& x : c) x = g(rng);
  return c;
}

// Random element of curl(N) or grad(F); with `interior_only` boundary dofs are
// zero, giving curl(N0) or grad(F0).
inline hodge3d::Pcvf random_element(const hodge3d::ElementTables& tables, hodge3d::Space space,
                                    bool interior_only, std::uint64_t seed) {
  const auto& dofs = space == hodge3d::Space::CurlNedelec ? tables.edge_dofs : tables.face_dofs;
  Eigen::VectorXd c = random_coefficients(dofs.n_dofs, seed);
  if (interior_only)
    for (std::size_t i = 0; i < dofs.n_dofs; ++i)
      if (!dofs.interior_mask[i]) c[static_cast<Eigen::Index>(i)] = 0.0;
  return hodge3d::reconstruct(c, tables, space);
}

inline double rel_diff(const hodge3d::Pcvf& a, const hodge3d::Pcvf& b) {
  const double d = hodge3d::sq_norm(a - b);
  const double n = std::max(hodge3d::sq_norm(a), hodge3d::sq_norm(b));
  return n > 0.0 ? std::sqrt(d / n) : std::sqrt(d);
}

// Barycentric gradient of vertex i: normal of the opposite face scaled so that it
// rises by one from that face to vertex i.
inline Vec3 hand_gradient(const std::array<Vec3, 4>& p, int i) {
  int o[3], k = 0;
  for (int j = 0; j < 4; ++j)
    if (j != i) o[k++] = j;
  const Vec3 c = (p[o[1]] - p[o[0]]).cross(p[o[2]] - p[o[0]]);
  return c / c.dot(p[i] - p[o[0]]);
}

inline double hand_volume(const std::array<Vec3, 4>& p) {
  return std::abs((p[1] - p[0]).cross(p[2] - p[0]).dot(p[3] - p[0])) / 6.0;
}

using Key = std::vector<Index>;

// Gram matrices keyed by sorted global vertex tuples, from the raw tet list.
inline std::map<std::pair<Key, Key>, double> hand_gram(const std::vector<Vec3>& v,
                                                       const std::vector<std::array<Index, 4>>& tets,
                                                       hodge3d::Space space) {
  std::map<std::pair<Key, Key>, double> g;
  for (const auto& t : tets) {
    std::array<Vec3, 4> p;
    for (int i = 0; i < 4; ++i) p[i] = v[t[i]];
    const double vol = hand_volume(p);
    std::vector<std::pair<Key, Vec3>> d;
    if (space == hodge3d::Space::GradCr) {
      for (int i = 0; i < 4; ++i) {
        Key f;
        for (int j = 0; j < 4; ++j)
          if (j != i) f.push_back(t[j]);
        std::sort(f.begin(), f.end());
        d.emplace_back(f, -3.0 * hand_gradient(p, i));
      }
    } else {
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
          const int lo = t[a] < t[b] ? a : b, hi = t[a] < t[b] ? b : a;
          d.emplace_back(Key{t[lo], t[hi]}, 2.0 * hand_gradient(p, lo).cross(hand_gradient(p, hi)));
        }
    }
    for (const auto& [ki, di] : d)
      for (const auto& [kj, dj] : d) g[{ki, kj}] += vol * di.dot(dj);
  }
  return g;
}

inline Key dof_key(const hodge3d::TetMesh& m, hodge3d::Space space, std::size_t i) {
  if (space == hodge3d::Space::GradCr) return Key(m.faces()[i].begin(), m.faces()[i].end());
  return Key(m.edges()[i].begin(), m.edges()[i].end());
}

inline bool dof_interior(const hodge3d::TetMesh& m, hodge3d::Space space, std::size_t i) {
  return space == hodge3d::Space::GradCr ? !m.is_boundary_face(i) : !m.is_boundary_edge(i);
}

// Largest deviation of the assembled Gram matrices (both spaces, with and without
// constraints) from hand_gram, relative to the largest oracle entry.
inline double hand_gram_error(const std::vector<Vec3>& v, const std::vector<std::array<Index, 4>>& tets) {
  const auto m = hodge3d::build_complex(v, tets);
  const auto tables = hodge3d::build_element_tables(m);
  double worst = 0.0;
  for (auto space : {hodge3d::Space::GradCr, hodge3d::Space::CurlNedelec}) {
    const auto oracle = hand_gram(v, tets, space);
    double scale = 1.0;
    for (const auto& [k, x] : oracle) scale = std::max(scale, std::abs(x));
    for (bool constrained : {false, true}) {
      const auto a = hodge3d::assemble_gram(tables, space, constrained);
      for (std::size_t i = 0; i < a.n; ++i)
        for (std::size_t j = 0; j < a.n; ++j) {
          double expected = 0.0;
          if (!constrained || (dof_interior(*m, space, i) && dof_interior(*m, space, j))) {
            auto it = oracle.find({dof_key(*m, space, i), dof_key(*m, space, j)});
            if (it != oracle.end()) expected = it->second;
          } else if (i == j) {
            expected = 1.0;
          }
          worst = std::max(worst, std::abs(a.coeff(i, j) - expected) / scale);
        }
    }
  }
  return worst;
}

// Random two-tet mesh sharing a face, with shuffled vertex numbering.
inline std::pair<std::vector<Vec3>, std::vector<std::array<Index, 4>>> random_two_tets(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::vector<Vec3> v(5);
    for (int i = 0; i < 4; ++i) v[i] = Vec3(u(rng), u(rng), u(rng));
    // Reflect v0 through the plane of (v1, v2, v3) so the second tet is on the far side.
    const Vec3 n = (v[2] - v[1]).cross(v[3] - v[1]).normalized();
    const double d = n.dot(v[0] - v[1]);
    if (std::abs(d) < 0.2) continue;
    v[4] = v[0] - 2.0 * d * n + 0.2 * Vec3(u(rng), u(rng), u(rng));
    std::vector<Index> perm{0, 1, 2, 3, 4};
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vec3> w(5);
    for (int i = 0; i < 5; ++i) w[perm[i]] = v[i];
    return {w, {{perm[0], perm[1], perm[2], perm[3]}, {perm[1], perm[2], perm[3], perm[4]}}};
  }
}

}  // namespace testing
