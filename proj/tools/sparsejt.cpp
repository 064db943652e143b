// Command-line front end: plan, run, sweep, validate.

#include "sparsejt/experiment.hpp"
#include "sparsejt/se_metrics.hpp"
#include "sparsejt/validate.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace {

using namespace sparsejt;

struct Flags {
  std::string config;
  std::string preset = "default";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string schemes;
  std::string sweep_s;
  std::string sweep_c;
  std::optional<int> drops;
  std::optional<int> fades;
  int threads = 0;
};

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, std::string("bad value in ") + flag + ": '" + item + "'");
    }
  }
  return out;
}

ExperimentSpec build_spec(const Flags& fl) {
  ExperimentSpec spec = preset(fl.preset);
  if (!fl.config.empty()) spec = load_spec(fl.config, spec);
  if (fl.seed) spec.net.seed = *fl.seed;
  if (!fl.out.empty()) spec.out_path = fl.out;
  if (!fl.schemes.empty()) spec = parse_spec("schemes=" + fl.schemes, spec);
  if (!fl.sweep_s.empty() && !fl.sweep_c.empty()) {
    throw Error(ErrorCode::ConfigError, "--sweep-s and --sweep-c are mutually exclusive");
  }
  if (!fl.sweep_s.empty()) {
    spec.axis = SweepAxis::S;
    spec.sweep_values = parse_list(fl.sweep_s, "--sweep-s");
  }
  if (!fl.sweep_c.empty()) {
    spec.axis = SweepAxis::C;
    spec.sweep_values = parse_list(fl.sweep_c, "--sweep-c");
  }
  if (fl.drops) spec.n_drops = *fl.drops;
  if (fl.fades) spec.n_fades = *fl.fades;
  spec.validate();
  return spec;
}

// Writes to the spec's output path, or standard output when it is empty.
template <typename Fn>
void emit(const std::string& path, Fn&& write) {
  if (path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorCode::ConfigError, "cannot open output '" + path + "'");
  write(os);
}

void add_common(CLI::App* cmd, Flags& fl) {
  cmd->add_option("--config", fl.config, "key=value config file");
  cmd->add_option("--preset", fl.preset, "default, large or small");
  cmd->add_option("--seed", fl.seed, "master seed");
  cmd->add_option("--out", fl.out, "CSV output path (default: stdout)");
}

void add_experiment(CLI::App* cmd, Flags& fl) {
  add_common(cmd, fl);
  cmd->add_option("--scheme", fl.schemes, "comma list of sparse_jt,rcc_zf,sc_zf");
  cmd->add_option("--drops", fl.drops, "topology drops");
  cmd->add_option("--fades", fl.fades, "fading draws per drop");
  cmd->add_option("--threads", fl.threads, "worker threads (env SPARSEJT_THREADS)");
}

int cmd_plan(const Flags& fl) {
  const ExperimentSpec spec = build_spec(fl);
  std::vector<double> caps = spec.axis == SweepAxis::C ? spec.sweep_values : std::vector<double>{};
  if (caps.empty()) caps.push_back(spec.net.C_bits_per_use);
  emit(spec.out_path, [&](std::ostream& os) { write_plan_csv(os, spec.net, caps); });
  return 0;
}

int cmd_run(const Flags& fl) {
  const ExperimentSpec spec = build_spec(fl);
  const auto rows = run_realizations(spec, resolve_threads(fl.threads));
  emit(spec.out_path, [&](std::ostream& os) { write_run_csv(os, spec, rows); });

  std::ostream& log = spec.out_path.empty() ? std::cerr : std::cout;
  std::map<std::string, std::vector<double>> by_scheme;
  for (const auto& r : rows) {
    if (r.outcome.ok) {
      by_scheme[r.outcome.scheme].push_back(r.outcome.sum_se);
    } else {
      std::cerr << "failed: drop " << r.drop << " fade " << r.fade << " " << r.outcome.scheme << ": "
                << r.outcome.error << '\n';
    }
  }
  for (const auto& scheme : spec.schemes) {
    const auto& xs = by_scheme[scheme];
    log << scheme << ": mean sum SE " << format_number(mean_of(xs)) << " +/- " << format_number(std_error_of(xs))
        << " bit/s/Hz over " << xs.size() << " realizations\n";
  }
  return 0;
}

int cmd_sweep(const Flags& fl) {
  const ExperimentSpec spec = build_spec(fl);
  const auto rows = run_sweep(spec, resolve_threads(fl.threads));
  emit(spec.out_path, [&](std::ostream& os) { write_sweep_csv(os, rows); });
  return 0;
}

int cmd_validate(const std::string& level) {
  if (level != "fast" && level != "full") throw Error(ErrorCode::ConfigError, "level must be fast or full");
  const auto reports = run_validation(level == "full" ? ValidateLevel::Full : ValidateLevel::Fast);
  return print_report(std::cout, reports) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse joint-transmission simulator for C-RAN with finite fronthaul"};
  app.require_subcommand(1);

  Flags plan_flags;
  auto* plan = app.add_subcommand("plan", "fronthaul bit allocation table");
  add_common(plan, plan_flags);
  plan->add_option("--sweep-c", plan_flags.sweep_c, "comma list of capacities in bits per channel use");

  Flags run_flags;
  auto* run = app.add_subcommand("run", "one solve per drop, fade and scheme");
  add_experiment(run, run_flags);

  Flags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "ergodic SE over S or C");
  add_experiment(sweep, sweep_flags);
  sweep->add_option("--sweep-s", sweep_flags.sweep_s, "comma list of sparsity levels");
  sweep->add_option("--sweep-c", sweep_flags.sweep_c, "comma list of capacities");

  std::string level = "fast";
  auto* validate = app.add_subcommand("validate", "run built-in invariant suites");
  validate->add_option("--level", level, "fast or full");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*plan) return cmd_plan(plan_flags);
    if (*run) return cmd_run(run_flags);
    if (*sweep) return cmd_sweep(sweep_flags);
    if (*validate) return cmd_validate(level);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::CapacityTooSmall ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
