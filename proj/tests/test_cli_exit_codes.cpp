#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + SPARSEJT_CLI + "\" " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "sparsejt_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_config(const std::string& name, const std::string& body) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << body;
  return p;
}

const char* kTiny = "L = 4\nN = 2\nK = 3\nS = 2\ntau = 3\nC_bits_per_use = 60\ndrops = 1\nfades = 2\n";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("run --drops notanumber") == 2);
}

TEST_CASE("help exits with 0") { CHECK(run("--help") == 0); }

TEST_CASE("bad configs exit with 2") {
  const fs::path unknown = write_config("unknown.cfg", "bogus_key = 1\n");
  CHECK(run("run --config " + unknown.string()) == 2);
  CHECK(run("run --config " + (scratch() / "missing.cfg").string()) == 2);
  CHECK(run("validate --level extreme") == 2);
  const fs::path starved = write_config("starved.cfg", std::string(kTiny) + "C_bits_per_use = 0.5\n");
  CHECK(run("run --config " + starved.string()) == 2);
}

TEST_CASE("plan and run succeed and write CSV") {
  const fs::path cfg = write_config("tiny.cfg", kTiny);
  const fs::path plan_out = scratch() / "plan.csv";
  CHECK(run("plan --config " + cfg.string() + " --out " + plan_out.string()) == 0);
  CHECK(slurp(plan_out).rfind("C_bits_per_use,U,B,B_bar,rate_csi,rate_data\n", 0) == 0);

  const fs::path run_out = scratch() / "run.csv";
  CHECK(run("run --config " + cfg.string() + " --scheme rcc_zf --out " + run_out.string()) == 0);
  const std::string csv = slurp(run_out);
  CHECK(csv.rfind("seed,drop,fade,scheme", 0) == 0);
  CHECK(csv.find("rcc_zf") != std::string::npos);
}

TEST_CASE("fast validation passes") { CHECK(run("validate --level fast") == 0); }
