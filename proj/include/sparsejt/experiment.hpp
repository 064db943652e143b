// Experiment plumbing behind the command-line tool: config files, presets,
// per-realization scheme evaluation, and CSV emission for plan/run/sweep.

#ifndef SPARSEJT_EXPERIMENT_HPP
#define SPARSEJT_EXPERIMENT_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/fronthaul.hpp"
#include "sparsejt/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sparsejt {

enum class SweepAxis { S, C };

struct ExperimentSpec {
  NetworkConfig net;
  std::vector<std::string> schemes{"sparse_jt", "rcc_zf", "sc_zf"};
  SweepAxis axis = SweepAxis::S;
  std::vector<double> sweep_values;
  int n_drops = 100;
  int n_fades = 10;
  std::string out_path;  // empty: standard output
  PlanOverride plan_override;

  // Throws Error(ConfigError).
  void validate() const;

  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

const std::vector<std::string>& known_schemes();

// Flat key=value text, '#' starts a comment, unknown keys are errors.
ExperimentSpec parse_spec(const std::string& text, const ExperimentSpec& base = {});
ExperimentSpec load_spec(const std::string& path, const ExperimentSpec& base = {});
std::string serialize_spec(const ExperimentSpec& spec);

// "default", "large" (30 RRHs, 4 antennas, 12 users) and "small" (10 RRHs, 2 antennas, 6 users).
ExperimentSpec preset(const std::string& name);

QuantizationPlan plan_for(const ExperimentSpec& spec, const NetworkConfig& net);

// One scheme on one realization.
struct SchemeOutcome {
  std::string scheme;
  bool ok = false;
  std::string error;
  double objective_bits = 0.0;
  double sum_se = 0.0;  // training prefactor applied
  double sparsity = 0.0;
  int active_count = 0;
  // Solver diagnostics, sparse_jt only.
  bool has_solver_stats = false;
  SolveStatus status = SolveStatus::Converged;
  int inner_iters = 0;
  int outer_iters = 0;
  double kkt_residual = 0.0;
  CheckState second_order = CheckState::NotChecked;
};

std::vector<SchemeOutcome> evaluate_realization(const NetworkConfig& net,
                                                const QuantizationPlan& plan,
                                                const std::vector<std::string>& schemes,
                                                std::uint64_t seed, int drop, int fade,
                                                const SolverOptions& opt = {});

struct RunRow {
  int drop = 0;
  int fade = 0;
  SchemeOutcome outcome;
};

std::vector<RunRow> run_realizations(const ExperimentSpec& spec, int threads,
                                     const SolverOptions& opt = {});

struct SweepRow {
  SweepAxis axis = SweepAxis::S;
  double value = 0.0;
  std::string scheme;
  int n_ok = 0;
  int n_failed = 0;
  double mean_sum_se = 0.0;
  double stderr_sum_se = 0.0;
  double mean_active_count = 0.0;
  std::vector<double> samples;
};

std::vector<SweepRow> run_sweep(const ExperimentSpec& spec, int threads,
                                const SolverOptions& opt = {});

// CSV writers: header line, RFC-4180 quoting, fixed number formatting.
std::string csv_quote(const std::string& field);
std::string format_number(double x);
void write_plan_csv(std::ostream& os, const NetworkConfig& net, const std::vector<double>& capacities);
void write_run_csv(std::ostream& os, const ExperimentSpec& spec, const std::vector<RunRow>& rows);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

// Threads from the flag, else SPARSEJT_THREADS, else 1.
int resolve_threads(int flag_value);

}  // namespace sparsejt

#endif  // SPARSEJT_EXPERIMENT_HPP
