#include "sparsejt/spca_core.hpp"

#include "sparsejt/se_metrics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace sparsejt {

namespace {

void check_dims(const StackedPrecoder& f, const LiftedProblem& lp) {
  if (f.L() != lp.L || f.N() != lp.N || f.K() != lp.K) {
    throw Error(ErrorCode::DimensionMismatch, "precoder does not match lifted problem");
  }
}

// Users as columns: F = [f_1, ..., f_K], LN x K.
Eigen::Map<const CMat> user_columns(const StackedPrecoder& f) {
  return Eigen::Map<const CMat>(f.vec().data(), f.user_dim(), f.K());
}

// Real representation [[Re M, -Im M], [Im M, Re M]].
RMat real_rep(const CMat& M) {
  const Eigen::Index n = M.rows();
  RMat out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = M.real();
  out.topRightCorner(n, n) = -M.imag();
  out.bottomLeftCorner(n, n) = M.imag();
  out.bottomRightCorner(n, n) = M.real();
  return out;
}

RVec real_vec(const CVec& v) {
  RVec out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

// A_k x using the Kronecker structure.
CVec apply_lifted_A(const LiftedProblem& lp, int k, const CVec& x) {
  const int n = lp.user_dim();
  CVec out(x.size());
  for (int i = 0; i < lp.K; ++i) {
    out.segment(i * n, n) = lp.M[k] * x.segment(i * n, n) + lp.c[k] * x.segment(i * n, n);
  }
  return out;
}

CVec apply_lifted_B(const LiftedProblem& lp, int k, const CVec& x) {
  const int n = lp.user_dim();
  CVec out = apply_lifted_A(lp, k, x);
  const cplx proj = lp.h[k].dot(x.segment(k * n, n));
  out.segment(k * n, n) -= lp.h[k] * proj;
  return out;
}

CVec apply_lifted_C(const LiftedProblem& lp, int l, const CVec& x) {
  const int n = lp.user_dim();
  const RVec d = lp.c_tilde_diag(l);
  CVec out(x.size());
  for (int i = 0; i < lp.K; ++i) out.segment(i * n, n) = d.cwiseProduct(x.segment(i * n, n));
  return out;
}

}  // namespace

double mu_epsilon(double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  return 1.0 / std::log2(1.0 + 1.0 / eps);
}

void LiftedProblem::refresh_noise_term(const StackedPrecoder& f_prev) {
  if (mode == VTermMode::Exact) return;
  const double denom = P * power_norm();
  c = RVec::Zero(K);
  for (int k = 0; k < K; ++k) {
    double dq = 0.0;
    for (int l = 0; l < L; ++l) {
      for (int n = 0; n < N; ++n) {
        double row_power = 0.0;
        for (int i = 0; i < K; ++i) row_power += std::norm(f_prev.block(l, i)[n]);
        dq += rdiag_beta(l * N + n, k) * P * eta[l] * row_power;
      }
    }
    c[k] = (dq + sigma2) / denom;
  }
}

double LiftedProblem::quad_A(int k, const StackedPrecoder& f) const {
  double total = 0.0;
  for (int i = 0; i < K; ++i) total += f.user(i).dot(M[k] * f.user(i)).real();
  return total + c[k] * f.squared_norm();
}

double LiftedProblem::quad_B(int k, const StackedPrecoder& f) const {
  return quad_A(k, f) - std::norm(h[k].dot(f.user(k)));
}

double LiftedProblem::quad_C(int l, const StackedPrecoder& f) const {
  return f.rrh_power(l) / eps + f.squared_norm() / L;
}

RVec LiftedProblem::c_tilde_diag(int l) const {
  RVec d = RVec::Constant(user_dim(), 1.0 / L);
  d.segment(l * N, N).array() += 1.0 / eps;
  return d;
}

CMat LiftedProblem::dense_A(int k) const {
  const int n = user_dim();
  CMat A = CMat::Zero(dim(), dim());
  for (int i = 0; i < K; ++i) A.block(i * n, i * n, n, n) = M[k];
  A.diagonal().array() += c[k];
  return A;
}

CMat LiftedProblem::dense_B(int k) const {
  CMat B = dense_A(k);
  const int n = user_dim();
  B.block(k * n, k * n, n, n) -= h[k] * h[k].adjoint();
  return B;
}

CMat LiftedProblem::dense_C(int l) const {
  const RVec d = c_tilde_diag(l);
  CVec diag(dim());
  for (int i = 0; i < K; ++i) diag.segment(i * user_dim(), user_dim()) = d.cast<cplx>();
  return diag.asDiagonal();
}

LiftedProblem build_lifted(const CsiKnowledge& csi, const QuantizationPlan& plan,
                           const NetworkConfig& cfg, const StackedPrecoder& f_prev,
                           VTermMode mode) {
  if (static_cast<int>(plan.rrh.size()) != csi.L) {
    throw Error(ErrorCode::DimensionMismatch, "plan must have one entry per RRH");
  }
  if (f_prev.L() != csi.L || f_prev.N() != csi.N || f_prev.K() != csi.K) {
    throw Error(ErrorCode::DimensionMismatch, "previous precoder does not match channels");
  }
  LiftedProblem lp;
  lp.L = csi.L;
  lp.N = csi.N;
  lp.K = csi.K;
  lp.eps = cfg.epsilon_sparse;
  lp.mu_eps = mu_epsilon(cfg.epsilon_sparse);
  lp.S = cfg.S;
  lp.mode = mode;
  lp.P = cfg.tx_power_w();
  lp.sigma2 = cfg.noise_w();
  lp.budgets.resize(csi.L);
  lp.eta.resize(csi.L);
  for (int l = 0; l < csi.L; ++l) {
    lp.eta[l] = plan.rrh[l].eta;
    lp.budgets[l] = 1.0 / (1.0 + plan.rrh[l].eta);
  }

  const int n = csi.L * csi.N;
  lp.rdiag_beta = RMat::Zero(n, csi.K);
  for (int l = 0; l < csi.L; ++l) {
    for (int k = 0; k < csi.K; ++k) {
      const CMat& R = csi.R[csi.index(l, k)];
      for (int a = 0; a < csi.N; ++a) {
        lp.rdiag_beta(l * csi.N + a, k) = csi.beta(l, k) * R(a, a).real();
      }
    }
  }

  lp.M.resize(csi.K);
  lp.h.resize(csi.K);
  for (int k = 0; k < csi.K; ++k) {
    lp.h[k] = stacked_channel(csi, k);
    CMat Mk = lp.h[k] * lp.h[k].adjoint() + stacked_error_cov(csi, k);
    if (mode == VTermMode::Exact) {
      for (int l = 0; l < csi.L; ++l) {
        for (int a = 0; a < csi.N; ++a) {
          Mk(l * csi.N + a, l * csi.N + a) += lp.eta[l] * lp.rdiag_beta(l * csi.N + a, k);
        }
      }
    }
    lp.M[k] = std::move(Mk);
  }

  if (mode == VTermMode::Exact) {
    lp.c = RVec::Constant(csi.K, lp.sigma2 / (lp.P * lp.power_norm()));
  } else {
    lp.refresh_noise_term(f_prev);
  }
  return lp;
}

CMat build_A(const CsiKnowledge& csi, const QuantizationPlan& plan, const NetworkConfig& cfg,
             const StackedPrecoder& f_prev, int k, VTermMode mode) {
  if (k < 0 || k >= csi.K) throw Error(ErrorCode::InvalidArgument, "user index out of range");
  return build_lifted(csi, plan, cfg, f_prev, mode).dense_A(k);
}

CMat build_B(const CMat& A_k, const CVec& h_k, int k, int K) {
  const Eigen::Index n = h_k.size();
  if (A_k.rows() != n * K || A_k.cols() != n * K) {
    throw Error(ErrorCode::DimensionMismatch, "A_k must be LNK x LNK");
  }
  CMat B = A_k;
  B.block(k * n, k * n, n, n) -= h_k * h_k.adjoint();
  return B;
}

CMat build_C(int l, int L, int N, int K, double eps) {
  if (l < 0 || l >= L) throw Error(ErrorCode::InvalidArgument, "RRH index out of range");
  const int n = L * N;
  CVec diag = CVec::Constant(static_cast<Eigen::Index>(n) * K, cplx(1.0 / L, 0.0));
  for (int k = 0; k < K; ++k) {
    diag.segment(k * n + l * N, N).array() += cplx(1.0 / eps, 0.0);
  }
  return diag.asDiagonal();
}

QuadForms quad_forms(const StackedPrecoder& f, const LiftedProblem& lp) {
  check_dims(f, lp);
  QuadForms q;
  q.norm2 = f.squared_norm();
  const auto F = user_columns(f);
  // trace(M_k F F^H) = sum_ij M_k(i, j) G(j, i) with G = F F^H.
  const CMat G = F * F.adjoint();
  q.a.resize(lp.K);
  q.b.resize(lp.K);
  for (int k = 0; k < lp.K; ++k) {
    const double tr = lp.M[k].cwiseProduct(G.transpose()).sum().real();
    q.a[k] = tr + lp.c[k] * q.norm2;
    q.b[k] = q.a[k] - std::norm(lp.h[k].dot(F.col(k)));
  }
  q.c.resize(lp.L);
  const RVec p = f.rrh_powers();
  for (int l = 0; l < lp.L; ++l) q.c[l] = p[l] / lp.eps + q.norm2 / lp.L;
  return q;
}

double log_gamma(const StackedPrecoder& f, double lambda, const LiftedProblem& lp) {
  const QuadForms q = quad_forms(f, lp);
  if ((q.b.array() <= 0.0).any() || (q.c.array() <= 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "quadratic form in the denominator is not positive");
  }
  return q.a.array().log().sum() - q.b.array().log().sum() -
         lambda * lp.mu_eps * q.c.array().log().sum();
}

double gamma(const StackedPrecoder& f, double lambda, const LiftedProblem& lp) {
  return std::exp(log_gamma(f, lambda, lp));
}

double objective_bits(const StackedPrecoder& f, const LiftedProblem& lp) {
  return log_gamma(f, 0.0, lp) / std::log(2.0);
}

double sparsity_measure(const StackedPrecoder& f, const LiftedProblem& lp) {
  check_dims(f, lp);
  const double norm2 = f.squared_norm();
  if (!(norm2 > 0.0)) throw Error(ErrorCode::ZeroVector, "sparsity of a zero precoder");
  const double scale = lp.power_norm() / norm2;
  const RVec p = f.rrh_powers();
  double total = 0.0;
  for (int l = 0; l < lp.L; ++l) {
    total += std::log2(scale * (p[l] / lp.eps + norm2 / lp.L));
  }
  return lp.mu_eps * total;
}

FunctionalPencil::FunctionalPencil(const StackedPrecoder& f, double lambda,
                                   const LiftedProblem& lp)
    : lp_(lp), forms_(quad_forms(f, lp)) {
  if ((forms_.b.array() <= 0.0).any()) {
    throw Error(ErrorCode::SingularSystem, "f^H B_k f is not positive");
  }
  const int n = lp.user_dim();
  W_A_ = CMat::Zero(n, n);
  D_ = CMat::Zero(n, n);
  double s_B = 0.0;
  for (int k = 0; k < lp.K; ++k) {
    W_A_ += lp.M[k] / forms_.a[k];
    D_ += lp.M[k] / forms_.b[k];
    s_A_ += lp.c[k] / forms_.a[k];
    s_B += lp.c[k] / forms_.b[k];
  }
  RVec d = RVec::Constant(n, s_B);
  if (lambda != 0.0) {
    for (int l = 0; l < lp.L; ++l) d += lambda * lp.mu_eps * lp.c_tilde_diag(l) / forms_.c[l];
  }
  D_.diagonal() += d.cast<cplx>();
  D_llt_.compute(D_);
  llt_ok_ = D_llt_.info() == Eigen::Success;
}

CVec FunctionalPencil::apply_A(const CVec& x) const {
  const int n = lp_.user_dim();
  CVec out(x.size());
  for (int i = 0; i < lp_.K; ++i) {
    out.segment(i * n, n) = W_A_ * x.segment(i * n, n) + s_A_ * x.segment(i * n, n);
  }
  return out;
}

CVec FunctionalPencil::apply_B(const CVec& x) const {
  const int n = lp_.user_dim();
  CVec out(x.size());
  for (int i = 0; i < lp_.K; ++i) {
    const auto xi = x.segment(i * n, n);
    out.segment(i * n, n) = D_ * xi - lp_.h[i] * (lp_.h[i].dot(xi) / forms_.b[i]);
  }
  return out;
}

CVec FunctionalPencil::solve_B(const CVec& y) const {
  const int n = lp_.user_dim();
  CVec out(y.size());
  for (int i = 0; i < lp_.K; ++i) {
    const CVec yi = y.segment(i * n, n);
    const double bi = forms_.b[i];
    bool done = false;
    if (llt_ok_) {
      // (D - h h^H / b)^-1 y = z + w (h^H z) / (b - h^H w), z = D^-1 y, w = D^-1 h.
      const CVec z = D_llt_.solve(yi);
      const CVec w = D_llt_.solve(lp_.h[i]);
      const double denom = bi - lp_.h[i].dot(w).real();
      if (denom > 1e-12 * bi) {
        out.segment(i * n, n) = z + w * (lp_.h[i].dot(z) / denom);
        done = true;
      }
    }
    if (!done) {
      const CMat block = D_ - lp_.h[i] * lp_.h[i].adjoint() / bi;
      Eigen::LDLT<CMat> ldlt(block);
      if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().real().array() > 0.0).all()) {
        throw Error(ErrorCode::SingularSystem, "M_B block is not positive definite");
      }
      out.segment(i * n, n) = ldlt.solve(yi);
    }
  }
  return out;
}

KktGradient kkt_gradient(const StackedPrecoder& f, double lambda, const LiftedProblem& lp) {
  check_dims(f, lp);
  const double norm2 = f.squared_norm();
  if (!(norm2 > 0.0)) throw Error(ErrorCode::ZeroVector, "gradient at a zero precoder");
  const FunctionalPencil pencil(f, lambda, lp);
  KktGradient out;
  out.gradient = pencil.apply_A(f.vec()) - pencil.apply_B(f.vec());
  const double along = f.vec().dot(out.gradient).real() / norm2;
  out.tangential = out.gradient - along * f.vec();
  const double fn = std::sqrt(norm2);
  out.gradient_norm = out.gradient.norm() / fn;
  out.residual = out.tangential.norm() / fn;
  return out;
}

double compare_curvature_terms(const CMat& a_side, const CMat& b_side) {
  if (a_side.rows() != b_side.rows() || a_side.rows() != a_side.cols() ||
      b_side.rows() != b_side.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "curvature terms must be square and equal size");
  }
  Eigen::SelfAdjointEigenSolver<CMat> ea(a_side, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<CMat> eb(b_side, Eigen::EigenvaluesOnly);
  return ea.eigenvalues().minCoeff() - eb.eigenvalues().maxCoeff();
}

SecondOrderResult second_order_check(const StackedPrecoder& f, double lambda,
                                     const LiftedProblem& lp, double stationarity_tol) {
  const KktGradient kkt = kkt_gradient(f, lambda, lp);
  if (kkt.residual > 10.0 * stationarity_tol) {
    throw Error(ErrorCode::NotStationary,
                "KKT residual " + std::to_string(kkt.residual) + " too large for a curvature test");
  }
  const QuadForms q = quad_forms(f, lp);
  const int n = lp.dim();
  const double norm2 = q.norm2;
  const double lm = lambda * lp.mu_eps;

  // Hessian of ln gamma in real coordinates, up to a factor of 2.
  CMat G = dense_functional_A(f, lp) - dense_functional_B(f, lambda, lp);
  G.diagonal().array() += lm * lp.L / norm2;
  RMat H = real_rep(G);

  CMat a_side = CMat::Zero(n, n);
  CMat b_side = CMat::Zero(n, n);
  for (int k = 0; k < lp.K; ++k) {
    const CVec Af = apply_lifted_A(lp, k, f.vec());
    const CVec Bf = apply_lifted_B(lp, k, f.vec());
    const RVec ua = real_vec(Af);
    const RVec ub = real_vec(Bf);
    H.noalias() -= (2.0 / (q.a[k] * q.a[k])) * ua * ua.transpose();
    H.noalias() += (2.0 / (q.b[k] * q.b[k])) * ub * ub.transpose();
    a_side.noalias() += Af * Af.adjoint() / (q.a[k] * q.a[k]);
    b_side.noalias() += Bf * Bf.adjoint() / (q.b[k] * q.b[k]);
  }
  if (lm != 0.0) {
    for (int l = 0; l < lp.L; ++l) {
      const CVec Cf = apply_lifted_C(lp, l, f.vec());
      const RVec uc = real_vec(Cf);
      H.noalias() += (2.0 * lm / (q.c[l] * q.c[l])) * uc * uc.transpose();
      b_side.noalias() += lm * Cf * Cf.adjoint() / (q.c[l] * q.c[l]);
    }
  }

  // ln gamma is invariant to scaling f and to a phase rotation of each f_k;
  // those directions carry zero curvature and are removed before testing.
  std::vector<RVec> fixed;
  fixed.push_back(real_vec(f.vec()));
  const int un = lp.user_dim();
  for (int k = 0; k < lp.K; ++k) {
    if (f.user(k).squaredNorm() <= 1e-24 * norm2) continue;
    CVec dir = CVec::Zero(n);
    dir.segment(k * un, un) = cplx(0.0, 1.0) * f.user(k);
    fixed.push_back(real_vec(dir));
  }
  RMat V(2 * n, static_cast<Eigen::Index>(fixed.size()));
  for (size_t j = 0; j < fixed.size(); ++j) V.col(static_cast<Eigen::Index>(j)) = fixed[j];
  Eigen::HouseholderQR<RMat> qr(V);
  const RMat Q = qr.householderQ();
  const Eigen::Index m = V.cols();
  const RMat Z = Q.rightCols(2 * n - m);
  const RMat Hz = Z.transpose() * H * Z;
  Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (Hz + Hz.transpose()), Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  const double spread = eig.eigenvalues().cwiseAbs().maxCoeff();

  SecondOrderResult out;
  out.residual = kkt.residual;
  out.reduced_dim = static_cast<int>(2 * n - m);
  out.margin = -top * norm2;
  out.pass = out.margin > 1e-12 * (1.0 + spread * norm2);
  out.rank_one_margin = compare_curvature_terms(a_side, b_side);
  return out;
}

CMat dense_functional_A(const StackedPrecoder& f, const LiftedProblem& lp) {
  const QuadForms q = quad_forms(f, lp);
  CMat out = CMat::Zero(lp.dim(), lp.dim());
  for (int k = 0; k < lp.K; ++k) out += lp.dense_A(k) / q.a[k];
  return out;
}

CMat dense_functional_B(const StackedPrecoder& f, double lambda, const LiftedProblem& lp) {
  const QuadForms q = quad_forms(f, lp);
  CMat out = CMat::Zero(lp.dim(), lp.dim());
  for (int k = 0; k < lp.K; ++k) out += lp.dense_B(k) / q.b[k];
  if (lambda != 0.0) {
    for (int l = 0; l < lp.L; ++l) out += lambda * lp.mu_eps * lp.dense_C(l) / q.c[l];
  }
  return out;
}

}  // namespace sparsejt
