#include <catch_amalgamated.hpp>

#include <map>
#include <memory>

#include "hodge3d/parallel.hpp"
#include "support.hpp"

using namespace hodge3d;

namespace {

const HodgeDecomposer& ball(double h) {
  static std::map<double, std::unique_ptr<HodgeDecomposer>> cache;
  auto& d = cache[h];
  if (!d) d = std::make_unique<HodgeDecomposer>(generate_voxel_domain(default_domain(DomainKind::Ball), h));
  return *d;
}

const HodgeDecomposer& torus() {
  static const HodgeDecomposer d(generate_voxel_domain(default_domain(DomainKind::SolidTorus), 0.15));
  return d;
}

const HodgeDecomposer& cavity() {
  static const HodgeDecomposer d(generate_voxel_domain(default_domain(DomainKind::BallWithCavity), 0.15));
  return d;
}

double fraction(const DecompositionResult& r, ComponentKind k) { return r.component(k).sq_norm / r.input_sq_norm; }

std::vector<std::string> names(const DecompositionResult& r) {
  std::vector<std::string> n;
  for (const auto& c : r.components) n.push_back(c.name);
  return n;
}

}  // namespace

TEST_CASE("projection onto curl(N0) is idempotent", "[hodge]") {
  const auto& dec = ball(0.2);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const Pcvf x = testing::random_element(dec.tables(), Space::CurlNedelec, true, s);
    CHECK(testing::rel_diff(dec.project_curl(x, true), x) <= 1e-10);
  }
}

TEST_CASE("projection onto grad(F) is idempotent", "[hodge]") {
  const auto& dec = ball(0.2);
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const Pcvf x = testing::random_element(dec.tables(), Space::GradCr, false, s);
    CHECK(testing::rel_diff(dec.project_grad(x, false), x) <= 1e-10);
  }
}

TEST_CASE("grad(F0) is orthogonal to curl(N)", "[hodge]") {
  const auto& dec = torus();
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const Pcvf x = testing::random_element(dec.tables(), Space::GradCr, true, s);
    CHECK(sq_norm(dec.project_curl(x, false)) <= 1e-10);
  }
}

TEST_CASE("curl(N0) is orthogonal to grad(F)", "[hodge]") {
  const auto& dec = torus();
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const Pcvf x = testing::random_element(dec.tables(), Space::CurlNedelec, true, s);
    CHECK(sq_norm(dec.project_grad(x, false)) <= 1e-10);
  }
}

TEST_CASE("X0 lies in curl(N0) and X1 in grad(F0) on the ball", "[hodge]") {
  const auto& dec = ball(0.1);
  const Pcvf x0 = sample_analytic(dec.mesh(), AnalyticField::X0);
  CHECK(sq_norm(dec.project_curl(x0, true)) / sq_norm(x0) >= 0.99);
  const Pcvf x1 = sample_analytic(dec.mesh(), AnalyticField::X1);
  CHECK(sq_norm(dec.project_grad(x1, true)) / sq_norm(x1) >= 0.99);
}

TEST_CASE("X2 is central under the full scheme", "[hodge]") {
  const auto& dec = ball(0.1);
  const auto r = dec.decompose(sample_analytic(dec.mesh(), AnalyticField::X2), Scheme::FULL);
  CHECK(fraction(r, ComponentKind::Central) >= 0.99);
  CHECK(r.component(ComponentKind::HarmonicNeumann).zero);
  CHECK(r.component(ComponentKind::HarmonicDirichlet).zero);
}

TEST_CASE("X4 is a Dirichlet field on the torus", "[hodge]") {
  const auto& dec = torus();
  const auto r = dec.decompose(sample_analytic(dec.mesh(), AnalyticField::X4), Scheme::FD);
  CHECK(fraction(r, ComponentKind::HarmonicDirichlet) >= 0.95);
  CHECK(fraction(r, ComponentKind::GradF) <= 0.01);
  for (const auto& c : r.components) CHECK(fraction(r, ComponentKind::HarmonicDirichlet) >= fraction(r, c.kind));

  // The Dirichlet part has no gradient content left.
  CHECK(sq_norm(dec.project_grad(r.component(ComponentKind::HarmonicDirichlet).field, false)) <= 1e-10);
}

TEST_CASE("X3 is a Neumann field around the cavity", "[hodge]") {
  const auto& dec = cavity();
  const auto r = dec.decompose(sample_analytic(dec.mesh(), AnalyticField::X3), Scheme::FULL);
  for (const auto& c : r.components)
    CHECK(fraction(r, ComponentKind::HarmonicNeumann) >= fraction(r, c.kind));
  CHECK(fraction(r, ComponentKind::HarmonicNeumann) >= 0.95);
}

TEST_CASE("zero field gives zero components", "[hodge]") {
  const auto& dec = torus();
  for (Scheme s : {Scheme::FN, Scheme::FD, Scheme::HMF_N, Scheme::HMF_D, Scheme::FULL}) {
    const auto r = dec.decompose(Pcvf(dec.mesh()), s);
    for (const auto& c : r.components) {
      CHECK(c.zero);
      CHECK(c.sq_norm == 0.0);
    }
    CHECK(verify_result(r, dec).passed());
  }
}

TEST_CASE("scheme component lists", "[hodge]") {
  const auto& dec = ball(0.3);
  const Pcvf x = random_field(dec.mesh(), 1);
  using V = std::vector<std::string>;
  CHECK(names(dec.decompose(x, Scheme::FN)) == V{"curl_N", "grad_F0", "harmonic_neumann"});
  CHECK(names(dec.decompose(x, Scheme::FD)) == V{"curl_N0", "grad_F", "harmonic_dirichlet"});
  CHECK(names(dec.decompose(x, Scheme::HMF_N)) ==
        V{"curl_N0", "grad_F0", "harmonic_in_curl_N", "harmonic_neumann"});
  CHECK(names(dec.decompose(x, Scheme::HMF_D)) ==
        V{"curl_N0", "grad_F0", "harmonic_in_grad_F", "harmonic_dirichlet"});
  CHECK(names(dec.decompose(x, Scheme::FULL)) ==
        V{"curl_N0", "grad_F0", "central", "harmonic_neumann", "harmonic_dirichlet"});
  for (const auto& [name, s] : std::vector<std::pair<std::string, Scheme>>{
           {"fn", Scheme::FN}, {"fd", Scheme::FD}, {"hmf_n", Scheme::HMF_N}, {"hmf_d", Scheme::HMF_D}, {"full", Scheme::FULL}})
    CHECK(parse_scheme(name) == s);
  CHECK_THROWS_AS(parse_scheme("xyz"), InputError);
  CHECK_THROWS_AS(dec.decompose(x, Scheme::FD).component(ComponentKind::Central), std::out_of_range);
}

TEST_CASE("random fields decompose orthogonally under every scheme", "[hodge][property]") {
  for (const HodgeDecomposer* dec : {&ball(0.2), &torus(), &cavity()})
    for (Scheme s : {Scheme::FN, Scheme::FD, Scheme::HMF_N, Scheme::HMF_D, Scheme::FULL})
      for (std::uint64_t seed = 0; seed < 2; ++seed) {
        const auto r = dec->decompose(add_noise(random_field(dec->mesh(), seed), 0.0, 0), s);
        INFO(to_string(s) << " seed " << seed << " n_t " << dec->mesh()->num_tets());
        CHECK(max_relative_cross_inner(r) <= 1e-8);
        double total = 0.0;
        for (const auto& c : r.components) total += c.sq_norm;
        CHECK(std::abs(total - r.input_sq_norm) <= 1e-8 * r.input_sq_norm);
        const auto v = verify_result(r, *dec);
        for (const auto& c : v.checks) {
          INFO(c.name << " " << c.measured);
          CHECK(c.passed);
        }
      }
}

TEST_CASE("verification catches a perturbed component", "[hodge]") {
  const auto& dec = ball(0.3);
  auto r = dec.decompose(sample_analytic(dec.mesh(), AnalyticField::X012), Scheme::FULL);
  REQUIRE(verify_result(r, dec).passed());
  auto& c = r.component(ComponentKind::GradF0);
  c.field[0] += Vec3::Constant(1e-3);
  const auto v = verify_result(r, dec);
  CHECK_FALSE(v.passed());
  CHECK_FALSE(v.checks.front().passed);
  CHECK(v.checks.front().name == "reconstruction");
}

TEST_CASE("harmonic dimensions follow the topology", "[hodge]") {
  CHECK(estimate_harmonic_dimension(ball(0.2), HarmonicKind::Neumann, 10) == 0);
  CHECK(estimate_harmonic_dimension(ball(0.2), HarmonicKind::Dirichlet, 10) == 0);
  CHECK(estimate_harmonic_dimension(torus(), HarmonicKind::Dirichlet, 11) == 1);
  CHECK(estimate_harmonic_dimension(torus(), HarmonicKind::Neumann, 10) == 0);
  CHECK(estimate_harmonic_dimension(cavity(), HarmonicKind::Neumann, 11) == 1);
  CHECK(estimate_harmonic_dimension(cavity(), HarmonicKind::Dirichlet, 10) == 0);
  CHECK_THROWS_AS(estimate_harmonic_dimension(torus(), HarmonicKind::Dirichlet, 5), InputError);
}

TEST_CASE("central dimension on a tiny ball", "[hodge]") {
  const HodgeDecomposer dec(generate_voxel_domain(default_domain(DomainKind::Ball), 0.4));
  REQUIRE(dec.mesh()->num_tets() <= 500);
  const int n_bf = static_cast<int>(dec.mesh()->counts().n_bf);
  CHECK(expected_harmonic_dimension(*dec.mesh(), HarmonicKind::Central) == n_bf - 1);
  CHECK(estimate_harmonic_dimension(dec, HarmonicKind::Central, n_bf + 5) == n_bf - 1);
}

TEST_CASE("results do not depend on the worker count", "[hodge]") {
  const MeshPtr m = generate_voxel_domain(default_domain(DomainKind::SolidTorus), 0.2);
  const Pcvf x = random_field(m, 4);
  std::vector<std::vector<Vec3>> runs;
  for (int threads : {1, 3, 8}) {
    parallel::set_max_threads(threads);
    const auto r = HodgeDecomposer(m).decompose(x, Scheme::FULL);
    std::vector<Vec3> all;
    for (const auto& c : r.components) all.insert(all.end(), c.field.vectors().begin(), c.field.vectors().end());
    runs.push_back(std::move(all));
  }
  parallel::set_max_threads(0);
  CHECK(runs[0] == runs[1]);
  CHECK(runs[0] == runs[2]);
}

TEST_CASE("solver failure names the stage", "[hodge]") {
  SolverOptions opt;
  opt.max_iter = 3;
  const HodgeDecomposer dec(generate_voxel_domain(default_domain(DomainKind::Ball), 0.3), opt);
  try {
    dec.decompose(random_field(dec.mesh(), 1), Scheme::FD);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.stage() == "project_curl_N0");
  }
  const Pcvf other = random_field(generate_voxel_domain(default_domain(DomainKind::Ball), 0.3), 1);
  CHECK_THROWS_AS(ball(0.3).project_curl(other, true), InputError);
}
