#include "sparsejt/solver.hpp"

#include "sparsejt/se_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sparsejt {

namespace {

void normalize_to(StackedPrecoder& f, double norm2) {
  const double cur = f.squared_norm();
  if (!(cur > 0.0) || !std::isfinite(cur)) {
    throw Error(ErrorCode::ZeroVector, "precoder vanished during iteration");
  }
  f.scale(std::sqrt(norm2 / cur));
}

CVec dense_step(const StackedPrecoder& f, double lambda, double shift, const LiftedProblem& lp) {
  CMat MA = dense_functional_A(f, lp);
  MA.diagonal().array() += shift;
  const CMat MB = dense_functional_B(f, lambda, lp);
  Eigen::LDLT<CMat> ldlt(MB);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().real().array() > 0.0).all()) {
    throw Error(ErrorCode::SingularSystem, "M_B is not positive definite");
  }
  return ldlt.solve(MA * f.vec());
}

double log_gamma_of(const QuadForms& q, double lambda, double mu) {
  return q.a.array().log().sum() - q.b.array().log().sum() -
         lambda * mu * q.c.array().log().sum();
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::ConstraintInactive: return "constraint_inactive";
    case SolveStatus::BracketFailure: return "bracket_failure";
    case SolveStatus::ToleranceNotMet: return "tolerance_not_met";
    case SolveStatus::NotStationary: return "not_stationary";
  }
  return "unknown";
}

const char* to_string(CheckState s) {
  switch (s) {
    case CheckState::Pass: return "pass";
    case CheckState::Fail: return "fail";
    case CheckState::NotChecked: return "not_checked";
  }
  return "unknown";
}

GpiResult gpi_inner(const StackedPrecoder& f0, double lambda, LiftedProblem& lp,
                    const SolverOptions& opt) {
  if (f0.L() != lp.L || f0.N() != lp.N || f0.K() != lp.K) {
    throw Error(ErrorCode::DimensionMismatch, "initial precoder does not match problem");
  }
  if (!(f0.squared_norm() > 0.0)) throw Error(ErrorCode::ZeroVector, "initial precoder is zero");
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");

  const double norm2 = lp.power_norm();
  const double shift = lambda * lp.mu_eps * lp.L / norm2;
  StackedPrecoder f = f0;
  normalize_to(f, norm2);

  GpiResult res;
  res.f = f;
  res.log_gamma = -std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::quiet_NaN();

  for (int t = 1; t <= opt.max_inner; ++t) {
    lp.refresh_noise_term(f);
    CVec next;
    double lg = 0.0;
    if (opt.dense_reference) {
      lg = log_gamma_of(quad_forms(f, lp), lambda, lp.mu_eps);
      next = dense_step(f, lambda, shift, lp);
    } else {
      const FunctionalPencil pencil(f, lambda, lp);
      lg = log_gamma_of(pencil.forms(), lambda, lp.mu_eps);
      next = pencil.solve_B(pencil.apply_A(f.vec()) + shift * f.vec());
    }
    if (lg > res.log_gamma) {
      res.log_gamma = lg;
      res.f = f;
    }

    StackedPrecoder g(lp.L, lp.N, lp.K, std::move(next));
    normalize_to(g, norm2);
    const double step = (g.vec() - f.vec()).norm() / std::sqrt(norm2);
    const bool small_change = std::isfinite(prev) && std::abs(lg - prev) <= opt.inner_tol;
    f = std::move(g);
    res.iterations = t;
    // |gamma_t - gamma_{t-1}| / gamma ~ |ln gamma_t - ln gamma_{t-1}| at this scale.
    if (small_change && step <= opt.step_tol) {
      res.converged = true;
      break;
    }
    prev = lg;
  }

  if (res.converged) {
    lp.refresh_noise_term(f);
    res.f = f;
    res.log_gamma = log_gamma(f, lambda, lp);
  } else {
    lp.refresh_noise_term(res.f);
  }
  return res;
}

StackedPrecoder zf_init(const CsiKnowledge& csi, const QuantizationPlan& plan) {
  const int n = csi.L * csi.N;
  if (csi.K > n) throw Error(ErrorCode::RankDeficient, "more users than transmit antennas");
  CMat H(n, csi.K);
  for (int k = 0; k < csi.K; ++k) H.col(k) = stacked_channel(csi, k);
  const CMat gram = H.adjoint() * H;
  const double delta = 1e-6 * gram.trace().real() / csi.K;
  CMat reg = gram;
  reg.diagonal().array() += delta;
  Eigen::LDLT<CMat> ldlt(reg);
  if (ldlt.info() != Eigen::Success || !(delta > 0.0)) {
    throw Error(ErrorCode::RankDeficient, "channel Gram matrix is singular");
  }
  const CMat F = H * ldlt.solve(CMat::Identity(csi.K, csi.K));
  StackedPrecoder f(csi.L, csi.N, csi.K);
  for (int k = 0; k < csi.K; ++k) f.user(k) = F.col(k);
  normalize_to(f, plan.power_budget_sum());
  return f;
}

std::vector<int> active_set(const StackedPrecoder& f, double threshold_frac) {
  const RVec p = f.rrh_powers();
  const double top = p.size() > 0 ? p.maxCoeff() : 0.0;
  std::vector<int> out;
  if (!(top > 0.0)) return out;
  for (int l = 0; l < p.size(); ++l) {
    if (p[l] > threshold_frac * top) out.push_back(l);
  }
  return out;
}

StackedPrecoder project_per_rrh_power(const StackedPrecoder& f, const RVec& budgets) {
  if (budgets.size() != f.L()) throw Error(ErrorCode::DimensionMismatch, "one budget per RRH");
  if (!(budgets.minCoeff() > 0.0)) throw Error(ErrorCode::InvalidArgument, "budgets must be positive");
  const double top = f.rrh_powers().maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorCode::ZeroVector, "cannot project a zero precoder");
  StackedPrecoder out = f;
  out.scale(std::sqrt(budgets.minCoeff() / top));
  return out;
}

SolverResult solve(const CsiKnowledge& csi, const QuantizationPlan& plan,
                   const NetworkConfig& cfg, const SolverOptions& opt) {
  if (cfg.S > csi.L) throw Error(ErrorCode::InvalidArgument, "S must not exceed L");
  const StackedPrecoder f_zf = zf_init(csi, plan);
  LiftedProblem lp = build_lifted(csi, plan, cfg, f_zf, opt.vterm);

  SolverResult res;
  struct Eval {
    double lambda;
    double g;
    GpiResult gpi;
    RVec c;  // noise terms consistent with gpi.f
  };
  auto evaluate = [&](double lambda, const StackedPrecoder& start) {
    GpiResult gpi = gpi_inner(opt.warm_start ? start : f_zf, lambda, lp, opt);
    res.inner_iters += gpi.iterations;
    res.inner_max_iter_hit = res.inner_max_iter_hit || !gpi.converged;
    ++res.outer_iters;
    const double g = sparsity_measure(gpi.f, lp) - cfg.S;
    res.g_trace.emplace_back(lambda, g);
    return Eval{lambda, g, std::move(gpi), lp.c};
  };

  const Eval at_zero = evaluate(0.0, f_zf);
  Eval chosen = at_zero;
  if (at_zero.g <= opt.eps_tol) {
    res.status = SolveStatus::ConstraintInactive;
  } else {
    Eval hi = evaluate(1.0, at_zero.gpi.f);
    Eval lo = at_zero;
    int doublings = 0;
    while (hi.g >= 0.0 && std::abs(hi.g) > opt.eps_tol && doublings < opt.max_doublings) {
      lo = hi;
      hi = evaluate(2.0 * hi.lambda, lo.gpi.f);
      ++doublings;
    }
    if (std::abs(hi.g) <= opt.eps_tol) {
      chosen = hi;
      res.status = SolveStatus::Converged;
    } else if (hi.g >= 0.0) {
      chosen = at_zero;
      res.status = SolveStatus::BracketFailure;
    } else {
      // Inner-converged evaluations rank ahead of truncated ones.
      auto better = [](const Eval& a, const Eval& b) {
        if (a.gpi.converged != b.gpi.converged) return a.gpi.converged;
        return std::abs(a.g) < std::abs(b.g);
      };
      Eval best = better(lo, hi) ? lo : hi;
      res.status = SolveStatus::ToleranceNotMet;
      while (hi.lambda - lo.lambda >= opt.bracket_width && res.outer_iters < opt.max_outer) {
        const double mid = 0.5 * (lo.lambda + hi.lambda);
        // Start from the less sparse endpoint: from the sparser one the
        // iteration stays trapped on the support it has already shed.
        Eval e = evaluate(mid, lo.gpi.f);
        if (better(e, best)) best = e;
        if (std::abs(e.g) <= opt.eps_tol) {
          best = e;
          res.status = SolveStatus::Converged;
          break;
        }
        if (e.g > 0.0) {
          lo = std::move(e);
        } else {
          hi = std::move(e);
        }
      }
      chosen = std::move(best);
    }
  }

  lp.c = chosen.c;
  const StackedPrecoder& f = chosen.gpi.f;
  res.lambda = chosen.lambda;
  res.sparsity = sparsity_measure(f, lp);
  res.objective_bits = objective_bits(f, lp);
  res.kkt_residual = kkt_gradient(f, chosen.lambda, lp).residual;
  if (res.success() && !(res.kkt_residual < opt.stationarity_tol)) {
    res.status = SolveStatus::NotStationary;
  }

  if (opt.check_second_order && lp.dim() <= opt.second_order_max_dim) {
    try {
      const SecondOrderResult so = second_order_check(f, chosen.lambda, lp, opt.stationarity_tol);
      res.second_order_pass = so.pass ? CheckState::Pass : CheckState::Fail;
      res.second_order_margin = so.margin;
      res.rank_one_margin = so.rank_one_margin;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotStationary) throw;
      res.second_order_pass = CheckState::Fail;
    }
  }

  res.f = project_per_rrh_power(f, lp.budgets);
  res.active = active_set(res.f, opt.active_threshold);
  return res;
}

}  // namespace sparsejt
