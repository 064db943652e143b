// Generalized sparse-PCA form of the sum-SE problem.
//
// With the network-wide vector f (see StackedPrecoder), the SE lower bound is
//   sum_k log2(f^H A_k f / f^H B_k f)
// and the group-sparsity count is approximated by
//   sum_l mu_eps log2(f^H C_l f).
// The matrices are never needed densely by the solver:
//   A_k = I_K (x) M_k + c_k I,    M_k = h_k h_k^H + Phi_k + Q_k
//   B_k = A_k - e_k e_k^T (x) h_k h_k^H
//   C_l = I_K (x) (eps^-1 a_l a_l^T (x) I_N + I_LN / L)
// so every product reduces to LN x LN work per user. Dense builders exist for
// reference checks at small sizes.

#ifndef SPARSEJT_SPCA_CORE_HPP
#define SPARSEJT_SPCA_CORE_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/fronthaul.hpp"
#include "sparsejt/net_model.hpp"
#include "sparsejt/precoder.hpp"

#include <vector>

namespace sparsejt {

// How the data-quantization term Tr(R beta V(F)) enters A_k.
enum class VTermMode {
  Lagged,  // scalar c_k recomputed from the previous iterate
  Exact,   // folded into M_k as a quadratic form, c_k = sigma^2 / (P sum budgets)
};

double mu_epsilon(double eps);

class LiftedProblem {
 public:
  int L = 0;
  int N = 0;
  int K = 0;
  std::vector<CMat> M;  // K blocks, LN x LN
  std::vector<CVec> h;  // K stacked quantized channels
  RVec c;               // K scalar terms
  double eps = 1e-2;
  double mu_eps = 0.0;
  RVec budgets;         // (1 + eta_l)^-1
  double S = 0.0;
  VTermMode mode = VTermMode::Lagged;

  // Inputs of the data-quantization term.
  RMat rdiag_beta;  // (l*N + n, k) -> beta_{l,k} R_{l,k}[n, n]
  RVec eta;
  double P = 1.0;
  double sigma2 = 0.0;

  int dim() const { return L * N * K; }
  int user_dim() const { return L * N; }
  double power_norm() const { return budgets.sum(); }

  // Lagged mode: c_k from V_l(F_prev). No-op in exact mode.
  void refresh_noise_term(const StackedPrecoder& f_prev);

  double quad_A(int k, const StackedPrecoder& f) const;
  double quad_B(int k, const StackedPrecoder& f) const;
  double quad_C(int l, const StackedPrecoder& f) const;
  // Diagonal of C~_l (length LN); C_l = I_K (x) diag(c_tilde_diag(l)).
  RVec c_tilde_diag(int l) const;

  CMat dense_A(int k) const;
  CMat dense_B(int k) const;
  CMat dense_C(int l) const;
};

LiftedProblem build_lifted(const CsiKnowledge& csi, const QuantizationPlan& plan,
                           const NetworkConfig& cfg, const StackedPrecoder& f_prev,
                           VTermMode mode = VTermMode::Lagged);

// Dense builders, one per lifted matrix.
CMat build_A(const CsiKnowledge& csi, const QuantizationPlan& plan, const NetworkConfig& cfg,
             const StackedPrecoder& f_prev, int k, VTermMode mode = VTermMode::Lagged);
CMat build_B(const CMat& A_k, const CVec& h_k, int k, int K);
CMat build_C(int l, int L, int N, int K, double eps);

// Quadratic forms of one precoder against every lifted matrix.
struct QuadForms {
  RVec a;  // f^H A_k f
  RVec b;  // f^H B_k f
  RVec c;  // f^H C_l f
  double norm2 = 0.0;
};

QuadForms quad_forms(const StackedPrecoder& f, const LiftedProblem& lp);

// ln gamma(f, lambda); throws InvalidArgument on a nonpositive denominator.
double log_gamma(const StackedPrecoder& f, double lambda, const LiftedProblem& lp);
double gamma(const StackedPrecoder& f, double lambda, const LiftedProblem& lp);
// log2 gamma(f, 0), the SE lower bound at the in-loop normalization.
double objective_bits(const StackedPrecoder& f, const LiftedProblem& lp);

// sum_l mu_eps log2(f^H C_l f) after rescaling f to ||f||^2 = sum budgets.
double sparsity_measure(const StackedPrecoder& f, const LiftedProblem& lp);

struct KktGradient {
  CVec gradient;           // sum A f/a - sum B f/b - lambda mu sum C f/c
  CVec tangential;         // gradient with its component along f removed
  double gradient_norm = 0.0;  // ||gradient|| / ||f||
  double residual = 0.0;       // ||tangential|| / ||f||
};

KktGradient kkt_gradient(const StackedPrecoder& f, double lambda, const LiftedProblem& lp);

struct SecondOrderResult {
  bool pass = false;
  // -(largest eigenvalue of the reduced Hessian) * ||f||^2; > 0 certifies a strict local max.
  double margin = 0.0;
  // rho_min(sum A f f^H A / a^2) - rho_max(sum B f f^H B / b^2 + lambda mu sum C f f^H C / c^2)
  double rank_one_margin = 0.0;
  double residual = 0.0;
  int reduced_dim = 0;
};

// rho_min(a_side) - rho_max(b_side) for Hermitian inputs.
double compare_curvature_terms(const CMat& a_side, const CMat& b_side);

// Throws NotStationary when the KKT residual exceeds 10 * stationarity_tol.
SecondOrderResult second_order_check(const StackedPrecoder& f, double lambda,
                                     const LiftedProblem& lp, double stationarity_tol = 1e-5);

// The functional pencil of the power iteration at a fixed point f:
//   M_A(f) = sum_k A_k / (f^H A_k f)
//   M_B(f, lambda) = sum_k B_k / (f^H B_k f) + lambda mu sum_l C_l / (f^H C_l f)
// Both are block diagonal over users; M_B's blocks share one Hermitian part
// D and differ by a rank-one correction, so a solve costs one LN Cholesky
// plus K Sherman-Morrison updates.
class FunctionalPencil {
 public:
  FunctionalPencil(const StackedPrecoder& f, double lambda, const LiftedProblem& lp);

  const QuadForms& forms() const { return forms_; }
  CVec apply_A(const CVec& x) const;
  CVec apply_B(const CVec& x) const;
  // M_B^-1 y; throws SingularSystem if a block is not positive definite.
  CVec solve_B(const CVec& y) const;

 private:
  const LiftedProblem& lp_;
  QuadForms forms_;
  CMat W_A_;
  double s_A_ = 0.0;
  CMat D_;  // shared Hermitian part of the M_B blocks
  Eigen::LLT<CMat> D_llt_;
  bool llt_ok_ = false;
};

// Dense functional matrices M_A(f) = sum A_k / a_k and
// M_B(f, lambda) = sum B_k / b_k + lambda mu sum C_l / c_l.
CMat dense_functional_A(const StackedPrecoder& f, const LiftedProblem& lp);
CMat dense_functional_B(const StackedPrecoder& f, double lambda, const LiftedProblem& lp);

}  // namespace sparsejt

#endif  // SPARSEJT_SPCA_CORE_HPP
