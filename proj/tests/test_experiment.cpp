#include <doctest.h>

#include "sparsejt/experiment.hpp"

#include <cstdlib>
#include <sstream>

using namespace sparsejt;

namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec spec;
  spec.net.L = 4;
  spec.net.N = 2;
  spec.net.K = 3;
  spec.net.S = 2;
  spec.net.tau = 3;
  spec.net.C_bits_per_use = 60.0;
  spec.n_drops = 2;
  spec.n_fades = 2;
  return spec;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("config text round-trips through serialization") {
  ExperimentSpec spec = tiny_spec();
  spec.net.P_dbm = 27.123456789012345;
  spec.net.corr_r = 0.1;
  spec.net.seed = 12345678901234ULL;
  spec.schemes = {"rcc_zf", "sparse_jt"};
  spec.sweep_values = {10.0, 8.0, 2.5};
  spec.axis = SweepAxis::C;
  spec.out_path = "out.csv";
  spec.plan_override = PlanOverride{3, 5, 9};
  const ExperimentSpec back = parse_spec(serialize_spec(spec));
  CHECK(back == spec);
}

TEST_CASE("parser accepts comments and blank lines") {
  const ExperimentSpec s = parse_spec("# network\n\nL = 5  # RRHs\nK=2\n  schemes = sparse_jt, sc_zf\n");
  CHECK(s.net.L == 5);
  CHECK(s.net.K == 2);
  CHECK(s.schemes == std::vector<std::string>{"sparse_jt", "sc_zf"});
}

TEST_CASE("parser rejects malformed input with a config error") {
  for (const char* bad : {"nonsense = 1\n", "L = abc\n", "L 5\n", "schemes = magic\n", "L = 3.5\n", "tau = 0\n"}) {
    try {
      parse_spec(bad).validate();
      FAIL("accepted: " << bad);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
    }
  }
}

TEST_CASE("presets") {
  const ExperimentSpec small = preset("small");
  CHECK(small.net.L == 10);
  CHECK(small.net.N == 2);
  CHECK(small.net.K == 6);
  CHECK(small.net.C_bits_per_use == 100.0);
  CHECK(small.sweep_values == std::vector<double>{10, 8, 6, 4, 2});
  CHECK(small.n_drops == 50);
  CHECK(small.n_fades == 4);
  const ExperimentSpec big = preset("large");
  CHECK(plan_for(big, big.net).rrh[0].U == 6);
  CHECK_THROWS_AS(preset("nope"), Error);
}

TEST_CASE("run yields one row per scheme per realization") {
  ExperimentSpec spec = tiny_spec();
  spec.n_drops = 2;
  spec.n_fades = 2;
  const auto rows = run_realizations(spec, 1);
  CHECK(rows.size() == 12);
  std::ostringstream os;
  write_run_csv(os, spec, rows);
  int ok = 0;
  for (const auto& r : rows) ok += r.outcome.ok ? 1 : 0;
  CHECK(count_lines(os.str()) == 1 + ok);
  CHECK(os.str().rfind("seed,drop,fade,scheme,S,objective_bits,sum_se_true,sparsity,active_count,", 0) == 0);
}

TEST_CASE("run output does not depend on the thread count") {
  const ExperimentSpec spec = tiny_spec();
  std::ostringstream a, b;
  write_run_csv(a, spec, run_realizations(spec, 1));
  write_run_csv(b, spec, run_realizations(spec, 3));
  CHECK(a.str() == b.str());
}

TEST_CASE("sweep rows and statistics") {
  ExperimentSpec spec = tiny_spec();
  spec.sweep_values = {4, 2};
  const auto rows = run_sweep(spec, 1);
  REQUIRE(rows.size() == 6);
  for (const auto& r : rows) {
    CHECK(r.n_ok + r.n_failed == 4);
    CHECK(static_cast<int>(r.samples.size()) == r.n_ok);
    double mean = 0.0;
    for (double x : r.samples) mean += x;
    mean /= static_cast<double>(r.samples.size());
    CHECK(r.mean_sum_se == doctest::Approx(mean));
  }
  CHECK(rows[0].value == 4.0);
  CHECK(rows[3].value == 2.0);
}

TEST_CASE("plan CSV marks infeasible capacities") {
  NetworkConfig net;
  net.K = 3;
  std::ostringstream os;
  write_plan_csv(os, net, {2.0, 300.0});
  const std::string s = os.str();
  CHECK(count_lines(s) == 1 + 2 * 3);
  CHECK(s.find("infeasible") != std::string::npos);
  CHECK(s.find("300,1,") != std::string::npos);
}

TEST_CASE("CSV quoting and number formatting") {
  CHECK(csv_quote("plain") == "plain");
  CHECK(csv_quote("a,b") == "\"a,b\"");
  CHECK(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1.0 / 3.0) == "0.3333333333");
  CHECK(format_number(std::nan("")).empty());
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  setenv("SPARSEJT_THREADS", "5", 1);
  CHECK(resolve_threads(0) == 5);
  unsetenv("SPARSEJT_THREADS");
  CHECK(resolve_threads(0) == 1);
}
