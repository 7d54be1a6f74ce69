#include "hodge3d/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hodge3d {

namespace {

std::size_t gram_slot(Space space, bool constrained) {
  return (space == Space::CurlNedelec ? 0u : 2u) + (constrained ? 1u : 0u);
}

std::string stage_name(Space space, bool constrained) {
  if (space == Space::CurlNedelec) return constrained ? "project_curl_N0" : "project_curl_N";
  return constrained ? "project_grad_F0" : "project_grad_F";
}

// Spaces a component must be L2-orthogonal to.
std::vector<std::pair<Space, bool>> orthogonal_spaces(ComponentKind kind) {
  constexpr auto curl_n = std::pair{Space::CurlNedelec, false};
  constexpr auto curl_n0 = std::pair{Space::CurlNedelec, true};
  constexpr auto grad_f = std::pair{Space::GradCr, false};
  constexpr auto grad_f0 = std::pair{Space::GradCr, true};
  switch (kind) {
    case ComponentKind::CurlN: return {grad_f0};
    case ComponentKind::CurlN0: return {grad_f};
    case ComponentKind::GradF: return {curl_n0};
    case ComponentKind::GradF0: return {curl_n};
    case ComponentKind::HarmonicNeumann: return {curl_n, grad_f0};
    case ComponentKind::HarmonicDirichlet: return {curl_n0, grad_f};
    case ComponentKind::HarmonicInCurlN:
    case ComponentKind::HarmonicInGradF:
    case ComponentKind::Central: return {curl_n0, grad_f0};
  }
  return {};
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "fn") return Scheme::FN;
  if (s == "fd") return Scheme::FD;
  if (s == "hmf_n") return Scheme::HMF_N;
  if (s == "hmf_d") return Scheme::HMF_D;
  if (s == "full") return Scheme::FULL;
  throw InputError("config", "unknown scheme '" + name + "'");
}

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::FN: return "FN";
    case Scheme::FD: return "FD";
    case Scheme::HMF_N: return "HMF_N";
    case Scheme::HMF_D: return "HMF_D";
    case Scheme::FULL: return "FULL";
  }
  return "unknown";
}

std::string to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::CurlN: return "curl_N";
    case ComponentKind::CurlN0: return "curl_N0";
    case ComponentKind::GradF: return "grad_F";
    case ComponentKind::GradF0: return "grad_F0";
    case ComponentKind::HarmonicNeumann: return "harmonic_neumann";
    case ComponentKind::HarmonicDirichlet: return "harmonic_dirichlet";
    case ComponentKind::HarmonicInCurlN: return "harmonic_in_curl_N";
    case ComponentKind::HarmonicInGradF: return "harmonic_in_grad_F";
    case ComponentKind::Central: return "central";
  }
  return "unknown";
}

const Component& DecompositionResult::component(ComponentKind kind) const {
  for (const auto& c : components)
    if (c.kind == kind) return c;
  throw std::out_of_range("scheme " + to_string(scheme) + " has no component " + to_string(kind));
}

Component& DecompositionResult::component(ComponentKind kind) {
  return const_cast<Component&>(std::as_const(*this).component(kind));
}

HodgeDecomposer::HodgeDecomposer(MeshPtr mesh, SolverOptions options)
    : mesh_(std::move(mesh)), options_(options), tables_(build_element_tables(mesh_)) {}

const SparseSymMatrix& HodgeDecomposer::gram(Space space, bool constrained) const {
  const std::size_t slot = gram_slot(space, constrained);
  std::call_once(once_[slot],
                 [&] { gram_[slot].emplace(assemble_gram(tables_, space, constrained)); });
  return *gram_[slot];
}

const GramKernel& HodgeDecomposer::kernel(Space space, bool constrained) const {
  const std::size_t slot = gram_slot(space, constrained);
  std::call_once(kernel_once_[slot],
                 [&] { kernel_[slot].emplace(tables_, gram(space, constrained), space, constrained); });
  return *kernel_[slot];
}

Pcvf HodgeDecomposer::project(const Pcvf& x, Space space, bool constrained,
                              SolveReport* report) const {
  if (x.mesh() != mesh_) throw InputError(stage_name(space, constrained), "field is on another mesh");
  Eigen::VectorXd b = assemble_rhs(x, tables_, space, constrained);
  kernel(space, constrained).deflate(b);
  const SolveResult sol = solve_spsd(gram(space, constrained), b, options_);
  if (report) *report = sol.report;
  return reconstruct(sol.x, tables_, space);
}

Pcvf HodgeDecomposer::project_curl(const Pcvf& x, bool constrained, SolveReport* report) const {
  return project(x, Space::CurlNedelec, constrained, report);
}

Pcvf HodgeDecomposer::project_grad(const Pcvf& x, bool constrained, SolveReport* report) const {
  return project(x, Space::GradCr, constrained, report);
}

DecompositionResult HodgeDecomposer::decompose(const Pcvf& x, Scheme scheme) const {
  DecompositionResult r;
  r.scheme = scheme;
  r.input = x;
  r.input_sq_norm = sq_norm(x);

  auto stage = [&](const Pcvf& f, Space space, bool constrained) {
    SolveReport rep;
    Pcvf out = project(f, space, constrained, &rep);
    const std::string name = stage_name(space, constrained);
    r.stages.push_back({name, rep});
    if (!rep.converged) {
      std::ostringstream os;
      os << to_string(scheme) << ": solve did not converge (relative residual "
         << rep.relative_residual << " after " << rep.iterations << " iterations)";
      throw SolverError(name, os.str());
    }
    return out;
  };
  auto add = [&](ComponentKind kind, Pcvf field) {
    Component c{kind, to_string(kind), std::move(field)};
    c.sq_norm = sq_norm(c.field);
    c.zero = c.sq_norm < kZeroThreshold;
    r.components.push_back(std::move(c));
  };

  switch (scheme) {
    case Scheme::FN:
    case Scheme::HMF_N: {
      Pcvf curl_n = stage(x, Space::CurlNedelec, false);
      const Pcvf rest = x - curl_n;
      Pcvf grad_f0 = stage(rest, Space::GradCr, true);
      Pcvf neumann = rest - grad_f0;
      if (scheme == Scheme::FN) {
        add(ComponentKind::CurlN, std::move(curl_n));
        add(ComponentKind::GradF0, std::move(grad_f0));
        add(ComponentKind::HarmonicNeumann, std::move(neumann));
      } else {
        Pcvf curl_n0 = stage(curl_n, Space::CurlNedelec, true);
        Pcvf harmonic_curl = curl_n - curl_n0;
        add(ComponentKind::CurlN0, std::move(curl_n0));
        add(ComponentKind::GradF0, std::move(grad_f0));
        add(ComponentKind::HarmonicInCurlN, std::move(harmonic_curl));
        add(ComponentKind::HarmonicNeumann, std::move(neumann));
      }
      break;
    }
    case Scheme::FD:
    case Scheme::HMF_D:
    case Scheme::FULL: {
      Pcvf curl_n0 = stage(x, Space::CurlNedelec, true);
      const Pcvf rest = x - curl_n0;
      Pcvf grad_f = stage(rest, Space::GradCr, false);
      Pcvf dirichlet = rest - grad_f;
      if (scheme == Scheme::FD) {
        add(ComponentKind::CurlN0, std::move(curl_n0));
        add(ComponentKind::GradF, std::move(grad_f));
        add(ComponentKind::HarmonicDirichlet, std::move(dirichlet));
        break;
      }
      Pcvf grad_f0 = stage(grad_f, Space::GradCr, true);
      Pcvf harmonic_grad = grad_f - grad_f0;
      if (scheme == Scheme::HMF_D) {
        add(ComponentKind::CurlN0, std::move(curl_n0));
        add(ComponentKind::GradF0, std::move(grad_f0));
        add(ComponentKind::HarmonicInGradF, std::move(harmonic_grad));
        add(ComponentKind::HarmonicDirichlet, std::move(dirichlet));
        break;
      }
      Pcvf central = stage(harmonic_grad, Space::CurlNedelec, false);
      Pcvf neumann = harmonic_grad - central;
      add(ComponentKind::CurlN0, std::move(curl_n0));
      add(ComponentKind::GradF0, std::move(grad_f0));
      add(ComponentKind::Central, std::move(central));
      add(ComponentKind::HarmonicNeumann, std::move(neumann));
      add(ComponentKind::HarmonicDirichlet, std::move(dirichlet));
      break;
    }
  }
  return r;
}

Pcvf project_curl(const Pcvf& x, bool constrained, const SolverOptions& options) {
  SolveReport rep;
  Pcvf out = HodgeDecomposer(x.mesh(), options).project_curl(x, constrained, &rep);
  if (!rep.converged) throw SolverError(stage_name(Space::CurlNedelec, constrained), "solve did not converge");
  return out;
}

Pcvf project_grad(const Pcvf& x, bool constrained, const SolverOptions& options) {
  SolveReport rep;
  Pcvf out = HodgeDecomposer(x.mesh(), options).project_grad(x, constrained, &rep);
  if (!rep.converged) throw SolverError(stage_name(Space::GradCr, constrained), "solve did not converge");
  return out;
}

DecompositionResult decompose(const Pcvf& x, Scheme scheme, const SolverOptions& options) {
  return HodgeDecomposer(x.mesh(), options).decompose(x, scheme);
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

double max_relative_cross_inner(const DecompositionResult& result) {
  double worst = 0.0;
  const auto& cs = result.components;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      if (cs[i].zero || cs[j].zero) continue;
      const double denom = std::sqrt(cs[i].sq_norm * cs[j].sq_norm);
      worst = std::max(worst, std::abs(l2_inner(cs[i].field, cs[j].field)) / denom);
    }
  return worst;
}

VerificationReport verify_result(const DecompositionResult& result,
                                 const HodgeDecomposer& decomposer) {
  VerificationReport report;
  const double x2 = result.input_sq_norm;
  const double x_norm = std::sqrt(x2);

  {
    Pcvf sum(result.input.mesh());
    for (const auto& c : result.components) sum = sum + c.field;
    const double err = std::sqrt(sq_norm(sum - result.input));
    const double rel = x_norm > 0.0 ? err / x_norm : err;
    report.checks.push_back({"reconstruction", rel, kReconstructionTol, rel <= kReconstructionTol});
  }
  {
    double total = 0.0;
    for (const auto& c : result.components) total += c.sq_norm;
    const double gap = std::abs(x2 - total);
    const double rel = x2 > 0.0 ? gap / x2 : gap;
    report.checks.push_back({"pythagoras", rel, kPythagorasTol, rel <= kPythagorasTol});
  }

  const auto& cs = result.components;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const double ip = std::abs(l2_inner(cs[i].field, cs[j].field));
      const double denom =
          (cs[i].zero || cs[j].zero) ? x2 : std::sqrt(cs[i].sq_norm * cs[j].sq_norm);
      const double rel = denom > 0.0 ? ip / denom : ip;
      report.checks.push_back({"orthogonal(" + cs[i].name + "," + cs[j].name + ")", rel,
                               kOrthogonalityTol, rel <= kOrthogonalityTol});
    }

  const double energy_cap = kZeroThreshold * std::max(1.0, x2);
  for (const auto& c : cs) {
    for (const auto& [space, constrained] : orthogonal_spaces(c.kind)) {
      SolveReport rep;
      const Pcvf p = decomposer.project(c.field, space, constrained, &rep);
      const double e = sq_norm(p);
      report.checks.push_back({"residual(" + c.name + " on " + stage_name(space, constrained).substr(8) + ")",
                               e, energy_cap, rep.converged && e <= energy_cap});
    }
  }
  return report;
}

HarmonicKind parse_harmonic_kind(const std::string& name) {
  if (name == "neumann") return HarmonicKind::Neumann;
  if (name == "dirichlet") return HarmonicKind::Dirichlet;
  if (name == "central") return HarmonicKind::Central;
  throw InputError("config", "unknown harmonic space '" + name + "'");
}

std::string to_string(HarmonicKind kind) {
  switch (kind) {
    case HarmonicKind::Neumann: return "neumann";
    case HarmonicKind::Dirichlet: return "dirichlet";
    case HarmonicKind::Central: return "central";
  }
  return "unknown";
}

int expected_harmonic_dimension(const TetMesh& mesh, HarmonicKind kind) {
  const BettiNumbers b = betti_numbers(mesh);
  switch (kind) {
    case HarmonicKind::Neumann: return b.h2();
    case HarmonicKind::Dirichlet: return b.h2_relative();
    case HarmonicKind::Central: return static_cast<int>(mesh.counts().n_bf) - b.h2() - 1;
  }
  return 0;
}

int estimate_harmonic_dimension(const HodgeDecomposer& decomposer, HarmonicKind kind, int probes,
                                std::uint64_t seed) {
  const int expected = expected_harmonic_dimension(*decomposer.mesh(), kind);
  if (probes < expected + 5) {
    std::ostringstream os;
    os << "need at least " << expected + 5 << " probes for the " << to_string(kind)
       << " space, got " << probes;
    throw InputError("estimate_harmonic_dimension", os.str());
  }

  Scheme scheme = Scheme::FULL;
  ComponentKind component = ComponentKind::Central;
  if (kind == HarmonicKind::Neumann) {
    scheme = Scheme::FN;
    component = ComponentKind::HarmonicNeumann;
  } else if (kind == HarmonicKind::Dirichlet) {
    scheme = Scheme::FD;
    component = ComponentKind::HarmonicDirichlet;
  }

  std::vector<Pcvf> parts;
  parts.reserve(static_cast<std::size_t>(probes));
  double probe_energy = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Pcvf x = random_field(decomposer.mesh(), seed + static_cast<std::uint64_t>(p));
    DecompositionResult r = decomposer.decompose(x, scheme);
    probe_energy += r.input_sq_norm;
    parts.push_back(std::move(r.component(component).field));
  }
  probe_energy /= probes;

  Eigen::MatrixXd gram(probes, probes);
  for (int i = 0; i < probes; ++i)
    for (int j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = l2_inner(parts[i], parts[j]);
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                                  gram, Eigen::EigenvaluesOnly).eigenvalues();
  return static_cast<int>((eig.array() > 1e-8 * probe_energy).count());
}

}  // namespace hodge3d
