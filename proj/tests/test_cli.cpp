#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hodge3d/app.hpp"
#include "support.hpp"

using namespace hodge3d;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hodge3d_test_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

RunConfig domain_config(const std::string& command, DomainKind kind, double h) {
  RunConfig c;
  c.command = command;
  c.domain = default_domain(kind);
  c.h = {h};
  return c;
}

struct Outcome {
  int status;
  std::string out, err;
};

Outcome run_config(const RunConfig& c) {
  std::ostringstream out, err;
  const int status = run(c, out, err);
  return {status, out.str(), err.str()};
}

// Runs the command line tool with stdout and stderr captured.
Outcome run_tool(const std::string& args, const fs::path& dir) {
  const char* tool = std::getenv("HODGE3D_CLI");
  if (!tool) SKIP("HODGE3D_CLI not set");
  const std::string cmd = "cd '" + dir.string() + "' && '" + tool + "' " + args + " > stdout.txt 2> stderr.txt";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_text(dir / "stdout.txt"), read_text(dir / "stderr.txt")};
}

}  // namespace

TEST_CASE("config checks", "[cli]") {
  RunConfig c;
  c.command = "decompose";
  CHECK_THROWS_AS(check_config(c), InputError);
  c.mesh_path = "a.vtk";
  c.domain = default_domain(DomainKind::Ball);
  CHECK_THROWS_AS(check_config(c), InputError);
  c.mesh_path.clear();
  CHECK_THROWS_AS(check_config(c), InputError);
  c.h = {0.1};
  CHECK_NOTHROW(check_config(c));
  c.rho = {-0.1};
  CHECK_THROWS_AS(check_config(c), InputError);
  c.rho = {0.2};
  c.h = {-0.1};
  CHECK_THROWS_AS(check_config(c), InputError);
  c.h = {0.1, 0.2};
  CHECK_THROWS_AS(check_config(c), InputError);
  c.command = "sweep";
  CHECK_NOTHROW(check_config(c));
  c.command = "bogus";
  CHECK_THROWS_AS(check_config(c), InputError);
}

TEST_CASE("decompose writes a report with the central share of X2", "[cli]") {
  const auto dir = scratch_dir("decompose");
  RunConfig c = domain_config("decompose", DomainKind::Ball, 0.1);
  c.field = "X2";
  c.scheme = Scheme::FULL;
  c.out_dir = (dir / "out").string();
  const auto o = run_config(c);
  REQUIRE(o.status == kExitOk);
  const auto j = nlohmann::json::parse(read_text(dir / "out" / "report.json"));
  bool found = false;
  for (const auto& comp : j["components"])
    if (comp["name"] == "central") {
      found = true;
      CHECK(comp["fraction"].get<double>() >= 0.99);
    }
  CHECK(found);
  CHECK(j["settings"]["solver"]["tol"] == 1e-12);
  CHECK(j["settings"]["mesh"]["h"] == 0.1);
  CHECK_FALSE(j["settings"].contains("threads"));
}

TEST_CASE("exit statuses", "[cli]") {
  RunConfig c = domain_config("decompose", DomainKind::Ball, 0.3);
  c.field = "random";
  c.out_dir = scratch_dir("status").string();
  c.solver.max_iter = 2;
  auto o = run_config(c);
  CHECK(o.status == kExitSolver);
  CHECK_THAT(o.err, Catch::Matchers::StartsWith("error [project_curl_N0]"));

  c.solver.max_iter = 0;
  c.field = "X7";
  o = run_config(c);
  CHECK(o.status == kExitInput);
  CHECK_THAT(o.err, Catch::Matchers::StartsWith("error [config]"));

  c.field = "file:/nonexistent/f.vtk";
  o = run_config(c);
  CHECK(o.status == kExitInput);
  CHECK_THAT(o.err, Catch::Matchers::ContainsSubstring("read_field"));

  RunConfig m;
  m.command = "decompose";
  m.mesh_path = "/nonexistent/m.vtk";
  o = run_config(m);
  CHECK(o.status == kExitInput);
  CHECK_THAT(o.err, Catch::Matchers::StartsWith("error [read_mesh]"));
}

TEST_CASE("dims reports the Dirichlet space of the torus", "[cli]") {
  const auto o = run_config(domain_config("dims", DomainKind::SolidTorus, 0.15));
  CHECK(o.status == kExitOk);
  CHECK_THAT(o.out, Catch::Matchers::ContainsSubstring("dirichlet: 1 (expected 1)"));
  CHECK_THAT(o.out, Catch::Matchers::ContainsSubstring("neumann: 0 (expected 0)"));
}

TEST_CASE("sweep over resolutions with a file field", "[cli]") {
  const auto dir = scratch_dir("sweep");
  RunConfig s = domain_config("sample", DomainKind::Cylinder, 0.1);
  s.field = "flow";
  s.out_dir = (dir / "flow.vtk").string();
  REQUIRE(run_config(s).status == kExitOk);

  RunConfig c = domain_config("sweep", DomainKind::Cylinder, 0.2);
  c.h = {0.2, 0.1, 0.05};
  c.field = "file:" + (dir / "flow.vtk").string();
  c.scheme = Scheme::FD;
  c.out_dir = (dir / "sweep").string();
  const auto o = run_config(c);
  REQUIRE(o.status == kExitOk);
  for (int i = 0; i < 3; ++i) CHECK(fs::exists(dir / "sweep" / ("level_" + std::to_string(i) + ".json")));
  std::istringstream csv(read_text(dir / "sweep" / "sweep.csv"));
  std::vector<std::string> lines;
  for (std::string line; std::getline(csv, line);) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK_THAT(lines[0], Catch::Matchers::StartsWith("level,h,rho,n_t,input_sq_norm,curl_N0_sq_norm"));
  CHECK_THAT(lines[0], Catch::Matchers::ContainsSubstring("harmonic_dirichlet_fraction"));
}

TEST_CASE("file field on its own mesh loads without transfer", "[cli]") {
  const auto dir = scratch_dir("own");
  const auto m = generate_voxel_domain(default_domain(DomainKind::Ball), 0.3);
  const Pcvf x = random_field(m, 9);
  write_vtk((dir / "x.vtk").string(), *m, {{"x", &x}});
  const Pcvf y = load_field("file:" + (dir / "x.vtk").string(), m, 1);
  CHECK(y.mesh() == m);
  CHECK(y.vectors() == x.vectors());
}

TEST_CASE("outputs are identical across runs and worker counts", "[cli]") {
  const auto dir = scratch_dir("determinism");
  RunConfig c = domain_config("decompose", DomainKind::SolidTorus, 0.2);
  c.field = "X4";
  c.rho = {0.5};
  c.seed = 3;
  c.scheme = Scheme::FULL;
  for (int threads : {1, 2, 5}) {
    c.threads = threads;
    c.out_dir = (dir / ("t" + std::to_string(threads))).string();
    REQUIRE(run_config(c).status == kExitOk);
  }
  for (const auto& entry : fs::directory_iterator(dir / "t1")) {
    const auto name = entry.path().filename();
    CHECK(read_text(dir / "t1" / name) == read_text(dir / "t2" / name));
    CHECK(read_text(dir / "t1" / name) == read_text(dir / "t5" / name));
  }
}

TEST_CASE("command line tool", "[cli]") {
  const auto dir = scratch_dir("tool");
  auto o = run_tool("dims --domain solid_torus --h 0.15", dir);
  CHECK(o.status == 0);
  CHECK_THAT(o.out, Catch::Matchers::ContainsSubstring("dirichlet: 1 (expected 1)"));

  o = run_tool("decompose --domain ball --h 0.3 --field X2 --scheme full --out out/", dir);
  CHECK(o.status == 0);
  CHECK(fs::exists(dir / "out" / "central.vtk"));

  o = run_tool("decompose --domain ball --h 0.3 --rho -1 --out bad", dir);
  CHECK(o.status == 1);
  CHECK_THAT(o.err, Catch::Matchers::ContainsSubstring("rho"));

  o = run_tool("decompose --domain ball --h 0.3 --scheme nope", dir);
  CHECK(o.status == 1);

  o = run_tool("decompose --domain ball --h 0.3 --field random --max-iter 2 --out s", dir);
  CHECK(o.status == 2);

  o = run_tool("sample --domain ball --h 0.4 --out ball.msh", dir);
  CHECK(o.status == 0);
  o = run_tool("dims --mesh ball.msh --kinds neumann,dirichlet", dir);
  CHECK(o.status == 0);
  CHECK_THAT(o.out, Catch::Matchers::ContainsSubstring("neumann: 0 (expected 0)"));

  CHECK(run_tool("--help", dir).status == 0);
  CHECK(run_tool("frobnicate", dir).status != 0);
}
