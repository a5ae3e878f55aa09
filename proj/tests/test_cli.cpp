#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lurecert/builtin.hpp"
#include "lurecert/config.hpp"
#include "lurecert/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

using namespace lurecert;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("lurecert_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const TempDir& dir, const std::string& args,
                  const std::string& env_prefix = "") {
  const fs::path log = dir.path / "stdout.txt";
  const std::string cmd = env_prefix + "\"" LURECERT_CLI_PATH "\" " + args +
                          " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult res;
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.output = slurp(log);
  return res;
}

fs::path write_config(const TempDir& dir, const std::string& name,
                      const ProblemConfig& cfg) {
  const fs::path p = dir.path / name;
  std::ofstream out(p, std::ios::binary);
  out << emit_yaml(config_to_yaml(cfg));
  return p;
}

std::string extract_hash(const std::string& output) {
  const std::string key = "(hash ";
  const size_t at = output.find(key);
  if (at == std::string::npos) return "";
  const size_t end = output.find(')', at);
  return output.substr(at + key.size(), end - at - key.size());
}

}  // namespace

TEST_CASE("certify succeeds on the four-state bundle with a stable hash") {
  TempDir dir;
  const fs::path cfg = write_config(dir, "e2.yaml", builtin::example2_config());
  const RunResult first = run_cli(
      dir, "certify --config \"" + cfg.string() + "\" --out \"" +
               (dir.path / "a").string() + "\"");
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("contraction: holds") != std::string::npos);
  CHECK(first.output.find("dissipation: holds") != std::string::npos);
  CHECK(fs::exists(dir.path / "a" / "report.yaml"));

  const RunResult second = run_cli(
      dir, "certify --config \"" + cfg.string() + "\" --out \"" +
               (dir.path / "b").string() + "\"");
  CHECK(second.exit_code == 0);
  const std::string h1 = extract_hash(first.output);
  const std::string h2 = extract_hash(second.output);
  CHECK(h1.size() == 16);
  CHECK(h1 == h2);
}

TEST_CASE("certify reports failure above the stability threshold") {
  TempDir dir;
  ProblemConfig cfg = builtin::example1_config(3.0);
  cfg.nonlinearity.slope = 91.0;
  const fs::path p = write_config(dir, "unstable.yaml", cfg);
  const RunResult res = run_cli(
      dir, "certify --config \"" + p.string() + "\" --out \"" +
               (dir.path / "out").string() + "\"");
  CHECK(res.exit_code == 1);
  CHECK(res.output.find("contraction: fails") != std::string::npos);
}

TEST_CASE("usage and config errors exit with code 2") {
  TempDir dir;
  const RunResult missing =
      run_cli(dir, "certify --config \"" + (dir.path / "nope.yaml").string() +
                       "\" --out \"" + (dir.path / "out").string() + "\"");
  CHECK(missing.exit_code == 2);

  const fs::path broken = dir.path / "broken.yaml";
  std::ofstream(broken) << "system: [unclosed\n";
  const RunResult malformed =
      run_cli(dir, "certify --config \"" + broken.string() + "\" --out \"" +
                       (dir.path / "out").string() + "\"");
  CHECK(malformed.exit_code == 2);

  const fs::path incomplete = dir.path / "incomplete.yaml";
  std::ofstream(incomplete) << "system:\n  A: [[-1.0]]\n";
  const RunResult partial =
      run_cli(dir, "certify --config \"" + incomplete.string() +
                       "\" --out \"" + (dir.path / "out").string() + "\"");
  CHECK(partial.exit_code == 2);

  const RunResult no_sub = run_cli(dir, "");
  CHECK(no_sub.exit_code == 2);
  const RunResult help = run_cli(dir, "--help");
  CHECK(help.exit_code == 0);
}

TEST_CASE("simulate writes deterministic full-precision CSV") {
  TempDir dir;
  const fs::path cfg = write_config(dir, "e2.yaml", builtin::example2_config());
  const std::string base = "simulate --config \"" + cfg.string() +
                           "\" --horizon 2 --out \"";
  const RunResult first =
      run_cli(dir, base + (dir.path / "a").string() + "\"");
  REQUIRE(first.exit_code == 0);

  const fs::path csv = dir.path / "a" / "ap.csv";
  REQUIRE(fs::exists(csv));
  const std::string text = slurp(csv);
  CHECK(text.rfind("t,x1,x2,x3,x4,y1_1,y2_1,w1\n", 0) == 0);

  // full 17-digit values reparse to identical doubles
  const CsvData data = read_csv(csv.string());
  REQUIRE(data.header.size() == 8);
  REQUIRE(data.values.rows() == 2001);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", data.values(1717, 3));
  const double reparsed = std::strtod(buffer, nullptr);
  CHECK(reparsed == data.values(1717, 3));

  const RunResult second =
      run_cli(dir, base + (dir.path / "b").string() + "\"",
              "LURECERT_THREADS=3 ");
  REQUIRE(second.exit_code == 0);
  CHECK(slurp(dir.path / "b" / "ap.csv") == text);
}

TEST_CASE("threshold locates the scalar pole from a config") {
  TempDir dir;
  ProblemConfig cfg;
  cfg.system.emplace(Matrix::Constant(1, 1, -2.0), Matrix::Ones(1, 1),
                     Matrix::Ones(1, 1), Matrix::Ones(1, 1),
                     Matrix::Ones(1, 1));
  cfg.nonlinearity.kind = "linear";
  cfg.nonlinearity.S = Matrix::Ones(1, 1);
  cfg.threshold.present = true;
  cfg.threshold.lo = 0.0;
  cfg.threshold.hi = 10.0;
  cfg.threshold.tol = 1e-3;
  const fs::path p = write_config(dir, "scalar.yaml", cfg);
  const RunResult res = run_cli(
      dir, "threshold --config \"" + p.string() + "\" --out \"" +
               (dir.path / "out").string() + "\"");
  REQUIRE(res.exit_code == 0);
  double value = 0.0;
  REQUIRE(std::sscanf(res.output.c_str(), "threshold: %lf", &value) == 1);
  CHECK(value == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("verify passes the bundled estimates and flags corrupted rates") {
  TempDir dir;
  const fs::path cfg = write_config(dir, "e2.yaml", builtin::example2_config());
  const RunResult good = run_cli(
      dir, "verify --config \"" + cfg.string() + "\" --horizon 10 --out \"" +
               (dir.path / "out").string() + "\"");
  CHECK(good.exit_code == 0);
  CHECK(good.output.find("VIOLATED") == std::string::npos);
  CHECK(good.output.find("cumulative_io: holds") != std::string::npos);

  ProblemConfig corrupted = builtin::example2_config();
  corrupted.xi = 1.0;  // infeasible gain budget at this rate
  const fs::path bad = write_config(dir, "bad.yaml", corrupted);
  const RunResult flagged = run_cli(
      dir, "verify --config \"" + bad.string() + "\" --horizon 5 --out \"" +
               (dir.path / "out2").string() + "\"");
  CHECK(flagged.exit_code == 1);
}

TEST_CASE("verify with nothing requested is a clean no-op") {
  TempDir dir;
  ProblemConfig cfg = builtin::example2_config();
  cfg.pairs.clear();
  const fs::path p = write_config(dir, "empty.yaml", cfg);
  const RunResult res = run_cli(
      dir, "verify --config \"" + p.string() + "\" --out \"" +
               (dir.path / "out").string() + "\"");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("nothing requested") != std::string::npos);
}

TEST_CASE("equilibrium command solves and probes the bundled fixture") {
  TempDir dir;
  ProblemConfig cfg = builtin::example2_config();
  cfg.equilibrium.present = true;
  cfg.equilibrium.w_star = Vector::Constant(1, 2.0);
  cfg.equilibrium.hold_horizon = 5.0;
  const fs::path p = write_config(dir, "eq.yaml", cfg);
  const RunResult res = run_cli(
      dir, "equilibrium --config \"" + p.string() + "\" --out \"" +
               (dir.path / "out").string() + "\"");
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("uniqueness probe: agree") != std::string::npos);
  CHECK(res.output.find("nonnegative: yes") != std::string::npos);
}

TEST_CASE("config emission is canonical after one round trip") {
  for (const ProblemConfig& cfg :
       {builtin::example1_config(3.0), builtin::example2_config()}) {
    const std::string once = emit_yaml(config_to_yaml(cfg));
    const ProblemConfig reparsed = parse_config(YAML::Load(once));
    const std::string twice = emit_yaml(config_to_yaml(reparsed));
    CHECK(once == twice);
  }
}

TEST_CASE("shipped config files parse and match the built-in studies") {
  const fs::path dir{LURECERT_CONFIG_DIR};

  const std::string shipped1 =
      emit_yaml(config_to_yaml(load_config((dir / "example1.yaml").string())));
  CHECK(shipped1 == emit_yaml(config_to_yaml(builtin::example1_config(3.0))));

  const std::string shipped2 =
      emit_yaml(config_to_yaml(load_config((dir / "example2.yaml").string())));
  CHECK(shipped2 == emit_yaml(config_to_yaml(builtin::example2_config())));

  // The annotated template exercises every section of the format.
  const ProblemConfig tpl = load_config((dir / "template.yaml").string());
  CHECK(tpl.system.has_value());
  CHECK(tpl.nonlinearity.kind == "saturation");
  CHECK(tpl.xi == doctest::Approx(0.5));
  REQUIRE(tpl.q.has_value());
  REQUIRE(tpl.r.has_value());
  CHECK(tpl.signals.size() == 4);
  CHECK(tpl.trajectories.size() == 4);
  CHECK(tpl.pairs.size() == 3);
  CHECK(tpl.threshold.present);
  CHECK(tpl.equilibrium.present);
}
