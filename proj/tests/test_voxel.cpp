#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "support.hpp"

using namespace hodge3d;

TEST_CASE("generated domains have the expected topology", "[voxel]") {
  CHECK(betti_numbers(*generate_voxel_domain(default_domain(DomainKind::Ball), 0.25)) == BettiNumbers{1, 0, 0});

  DomainSpec cavity = default_domain(DomainKind::BallWithCavity);
  CHECK(cavity.radius == 1.0);
  CHECK(cavity.inner_radius == 0.3);
  CHECK(betti_numbers(*generate_voxel_domain(cavity, 0.15)) == BettiNumbers{1, 0, 1});

  DomainSpec torus = default_domain(DomainKind::SolidTorus);
  CHECK(torus.radius == 1.0);
  CHECK(torus.inner_radius == 0.4);
  CHECK(betti_numbers(*generate_voxel_domain(torus, 0.15)) == BettiNumbers{1, 1, 0});

  CHECK(betti_numbers(*generate_voxel_domain(default_domain(DomainKind::Cylinder), 0.2)) == BettiNumbers{1, 0, 0});
  CHECK(betti_numbers(*generate_voxel_domain(default_domain(DomainKind::Box), 0.25)) == BettiNumbers{1, 0, 0});
}

TEST_CASE("ball volume stays below and approaches the sphere volume", "[voxel]") {
  const double exact = 4.0 * std::numbers::pi / 3.0;
  double previous = 1e9;
  for (double h : {0.25, 0.2, 0.1}) {
    for (bool conform : {true, false}) {
      DomainSpec d = default_domain(DomainKind::Ball);
      d.conform_boundary = conform;
      const auto m = generate_voxel_domain(d, h);
      INFO("h=" << h << " conform=" << conform);
      CHECK(m->total_volume() < exact);
      if (conform) {
        const double err = exact - m->total_volume();
        CHECK(err < previous);
        previous = err;
      }
    }
  }
}

TEST_CASE("staircase ball keeps every vertex inside", "[voxel]") {
  DomainSpec d = default_domain(DomainKind::Ball);
  d.conform_boundary = false;
  const auto m = generate_voxel_domain(d, 0.2);
  for (const auto& v : m->vertices()) CHECK(v.norm() <= 1.0 + 1e-12);
  // Every vertex lies on the grid.
  for (const auto& v : m->vertices())
    for (int k = 0; k < 3; ++k) CHECK(std::abs(v[k] / 0.2 - std::round(v[k] / 0.2)) < 1e-9);
}

TEST_CASE("conforming ball puts boundary vertices on the sphere", "[voxel]") {
  const double h = 0.2;
  const auto m = generate_voxel_domain(default_domain(DomainKind::Ball), h);
  std::size_t on_sphere = 0;
  for (std::size_t v = 0; v < m->num_vertices(); ++v) {
    const double r = m->vertices()[v].norm();
    // Kept cubes have their center inside, so no corner is further out than
    // half a cube diagonal, and moves only go towards the surface.
    CHECK(r <= 1.0 + 0.5 * std::sqrt(3.0) * h);
    if (m->is_boundary_vertex(v) && std::abs(r - 1.0) < 1e-12) ++on_sphere;
  }
  // Moves are only cut short where a tet would drop below 5% of its voxel share.
  CHECK(on_sphere * 2 > m->counts().n_bv);
  for (std::size_t t = 0; t < m->num_tets(); ++t) CHECK(m->geometry(t).volume >= 0.05 * h * h * h / 6.0 * (1 - 1e-9));
}

TEST_CASE("generation is deterministic", "[voxel][property]") {
  for (auto kind : {DomainKind::Ball, DomainKind::BallWithCavity, DomainKind::SolidTorus}) {
    const auto a = generate_voxel_domain(default_domain(kind), 0.3);
    const auto b = generate_voxel_domain(default_domain(kind), 0.3);
    CHECK(a->tets() == b->tets());
    CHECK(a->vertices() == b->vertices());
  }
}

TEST_CASE("random domain parameters keep their topology", "[voxel][property]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const DomainKind kind = std::array{DomainKind::Ball, DomainKind::BallWithCavity, DomainKind::SolidTorus}[trial % 3];
    DomainSpec d = default_domain(kind);
    d.radius = 0.8 + 0.4 * u(rng);
    d.inner_radius = (0.3 + 0.15 * u(rng)) * d.radius;
    d.conform_boundary = u(rng) < 0.7;
    const double h = d.inner_radius / (2.5 + 1.5 * u(rng));
    INFO(to_string(kind) << " R=" << d.radius << " r=" << d.inner_radius << " h=" << h
                         << " conform=" << d.conform_boundary);
    const auto m = generate_voxel_domain(d, h);
    CHECK(betti_numbers(*m) == expected_betti(kind));
    for (std::size_t t = 0; t < m->num_tets(); ++t) CHECK(m->geometry(t).volume > 0.0);
  }
}

TEST_CASE("bad voxel sizes are rejected", "[voxel]") {
  CHECK_THROWS_AS(generate_voxel_domain(default_domain(DomainKind::Ball), 0.0), InputError);
  CHECK_THROWS_AS(generate_voxel_domain(default_domain(DomainKind::Ball), -1.0), InputError);
  // Too coarse to resolve the cavity.
  CHECK_THROWS_AS(generate_voxel_domain(default_domain(DomainKind::BallWithCavity), 0.9), InputError);
}

TEST_CASE("domain names parse", "[voxel]") {
  for (auto kind : {DomainKind::Ball, DomainKind::BallWithCavity, DomainKind::SolidTorus, DomainKind::Cylinder,
                    DomainKind::Box})
    CHECK(parse_domain_kind(to_string(kind)) == kind);
  CHECK_THROWS_AS(parse_domain_kind("sphere"), InputError);
}
