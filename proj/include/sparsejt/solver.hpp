// Sparse joint-transmission solver: generalized power iteration inside a
// bisection on the sparsity multiplier lambda, followed by a per-RRH power
// projection.

#ifndef SPARSEJT_SOLVER_HPP
#define SPARSEJT_SOLVER_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/fronthaul.hpp"
#include "sparsejt/net_model.hpp"
#include "sparsejt/precoder.hpp"
#include "sparsejt/spca_core.hpp"

#include <utility>
#include <vector>

namespace sparsejt {

struct SolverOptions {
  double eps_tol = 0.05;      // |sparsity - S| accepted by the bisection
  double inner_tol = 1e-8;    // relative change of gamma between iterations
  double step_tol = 1e-8;     // relative change of f between iterations
  int max_inner = 500;
  int max_outer = 200;
  int max_doublings = 60;
  double bracket_width = 1e-8;
  bool warm_start = true;
  bool dense_reference = false;  // dense LDLT solves instead of the structured pencil
  VTermMode vterm = VTermMode::Lagged;
  bool check_second_order = true;
  int second_order_max_dim = 1024;
  double active_threshold = 1e-3;
  double stationarity_tol = 1e-5;
};

struct GpiResult {
  StackedPrecoder f;
  int iterations = 0;
  bool converged = false;  // false: max_iter hit, f is the best iterate seen
  double log_gamma = 0.0;
};

// Power iteration at fixed lambda:
//   f <- M_B(f)^-1 (M_A(f) + lambda mu L / ||f||^2 I) f,  ||f||^2 = sum budgets.
// The shift vanishes at lambda = 0. In lagged mode lp.c is refreshed from
// each iterate, so lp is updated in place.
GpiResult gpi_inner(const StackedPrecoder& f0, double lambda, LiftedProblem& lp,
                    const SolverOptions& opt = {});

enum class SolveStatus {
  Converged,           // |g(lambda)| <= eps_tol
  ConstraintInactive,  // g(0) <= eps_tol, lambda = 0 solution returned
  BracketFailure,      // no sign change after max_doublings; lambda = 0 solution
  ToleranceNotMet,     // bracket collapsed first; closest evaluation returned
  NotStationary,       // final KKT residual above stationarity_tol
};

const char* to_string(SolveStatus s);

enum class CheckState { Pass, Fail, NotChecked };

const char* to_string(CheckState s);

struct SolverResult {
  SolveStatus status = SolveStatus::Converged;
  StackedPrecoder f;  // after per-RRH projection
  double lambda = 0.0;
  double objective_bits = 0.0;
  double sparsity = 0.0;
  std::vector<int> active;
  int inner_iters = 0;
  int outer_iters = 0;
  bool inner_max_iter_hit = false;
  double kkt_residual = 0.0;
  CheckState second_order_pass = CheckState::NotChecked;
  double second_order_margin = 0.0;
  double rank_one_margin = 0.0;
  std::vector<std::pair<double, double>> g_trace;  // (lambda, g) in evaluation order

  bool success() const {
    return status == SolveStatus::Converged || status == SolveStatus::ConstraintInactive;
  }
};

// Regularized ZF from the quantized estimates, scaled to ||f||^2 = sum budgets.
StackedPrecoder zf_init(const CsiKnowledge& csi, const QuantizationPlan& plan);

SolverResult solve(const CsiKnowledge& csi, const QuantizationPlan& plan,
                   const NetworkConfig& cfg, const SolverOptions& opt = {});

std::vector<int> active_set(const StackedPrecoder& f, double threshold_frac = 1e-3);

// Uniform rescale so max_l p_l equals min_l budgets[l].
StackedPrecoder project_per_rrh_power(const StackedPrecoder& f, const RVec& budgets);

}  // namespace sparsejt

#endif  // SPARSEJT_SOLVER_HPP
