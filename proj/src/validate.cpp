#include "sparsejt/validate.hpp"

#include "sparsejt/baselines.hpp"
#include "sparsejt/fronthaul.hpp"
#include "sparsejt/net_model.hpp"
#include "sparsejt/rng.hpp"
#include "sparsejt/se_metrics.hpp"
#include "sparsejt/solver.hpp"
#include "sparsejt/spca_core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

namespace sparsejt {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

CheckReport make(const std::string& module, const std::string& name, bool ok, const std::string& detail) {
  return CheckReport{module, name, ok ? CheckOutcome::Pass : CheckOutcome::Fail, detail};
}

NetworkConfig small_net(int L, int N, int K, int S) {
  NetworkConfig cfg;
  cfg.L = L;
  cfg.N = N;
  cfg.K = K;
  cfg.S = S;
  cfg.tau = std::max(K, 1);
  cfg.C_bits_per_use = 100.0;
  return cfg;
}

StackedPrecoder random_precoder(int L, int N, int K, Rng& rng) {
  return StackedPrecoder(L, N, K, complex_normal_vector(rng, L * N * K));
}

double quantizer_ratio(QuantMode mode, int bits, int samples, std::uint64_t seed) {
  Rng rng = substream(seed, 7);
  std::normal_distribution<double> dist(0.0, 1.0);
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = dist(rng);
    const double q = mode == QuantMode::Uniform ? uniform_quantize(x, 1.0, bits) : companded_quantize(x, 1.0, bits);
    acc += (q - x) * (q - x);
  }
  return acc / samples / quant_eta(bits);
}

}  // namespace

std::vector<CheckReport> run_validation(ValidateLevel level) {
  const bool full = level == ValidateLevel::Full;
  std::vector<CheckReport> out;

  {
    Eigen::SelfAdjointEigenSolver<CMat> es(spatial_covariance(8, 0.9), Eigen::EigenvaluesOnly);
    const double m = es.eigenvalues().minCoeff();
    out.push_back(make("net_model", "covariance_psd", m >= -1e-12, "min eig " + fmt(m)));
  }
  {
    double worst = 0.0;
    for (double r : {0.0, 0.5, 0.9}) {
      const CMat Phi = estimation_error_cov(1e-9, spatial_covariance(4, r), 1e-11);
      Eigen::SelfAdjointEigenSolver<CMat> es(Phi, Eigen::EigenvaluesOnly);
      worst = std::min(worst, es.eigenvalues().minCoeff() / 1e-9);
    }
    out.push_back(make("net_model", "error_covariance_psd", worst >= -1e-10, "min scaled eig " + fmt(worst)));
  }
  {
    const int B = plan_csi_bits(300.0, 6, 4);
    out.push_back(make("fronthaul", "plan_csi_bits", B == 6, "plan_csi_bits(300,6,4)=" + std::to_string(B)));
  }
  {
    const double comp = quantizer_ratio(QuantMode::Companded, 6, 100000, 11);
    out.push_back(make("fronthaul", "companded_quantizer_calibration", std::abs(comp - 1.0) <= 0.15,
                       "empirical/model=" + fmt(comp)));
    const double uni = quantizer_ratio(QuantMode::Uniform, 6, 100000, 11);
    out.push_back(CheckReport{"fronthaul", "uniform_quantizer_calibration", CheckOutcome::Info,
                              "empirical/model=" + fmt(uni) + " (model describes the companded quantizer)"});
  }

  const NetworkConfig net = small_net(4, 2, 3, 2);
  const QuantizationPlan plan = make_plan(net);
  {
    double worst = 0.0;
    double worst_lifted = 0.0;
    double worst_b = 0.0;
    for (int i = 0; i < 20; ++i) {
      const ChannelSet ch = draw_realization(net, plan, 100 + i, 0, 0);
      Rng rng = substream(200 + i, 1);
      StackedPrecoder f = random_precoder(net.L, net.N, net.K, rng);
      const double a = se_lower_bound(f, ch.csi, plan, net).sum;
      const double b = se_lower_bound_per_rrh(f, ch.csi, plan, net).sum;
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), 1e-300));

      f.scale(std::sqrt(plan.power_budget_sum() / f.squared_norm()));
      const LiftedProblem lp = build_lifted(ch.csi, plan, net, f);
      const double lifted = objective_bits(f, lp);
      const double direct = se_lower_bound(f, ch.csi, plan, net).sum;
      worst_lifted = std::max(worst_lifted, std::abs(lifted - direct) / std::abs(direct));
      for (int k = 0; k < net.K; ++k) {
        Eigen::SelfAdjointEigenSolver<CMat> es(lp.dense_B(k), Eigen::EigenvaluesOnly);
        worst_b = std::min(worst_b, es.eigenvalues().minCoeff());
      }
    }
    out.push_back(make("se_metrics", "two_path_equality", worst < 1e-9, "max rel diff " + fmt(worst)));
    out.push_back(make("spca_core", "lifted_objective_equals_lower_bound", worst_lifted < 1e-9,
                       "max rel diff " + fmt(worst_lifted)));
    out.push_back(make("spca_core", "B_psd", worst_b >= -1e-12, "min eig " + fmt(worst_b)));
  }
  {
    double worst = 0.0;
    const int points = full ? 10 : 4;
    for (int i = 0; i < points; ++i) {
      const ChannelSet ch = draw_realization(net, plan, 300 + i, 0, 0);
      Rng rng = substream(400 + i, 1);
      const StackedPrecoder f = random_precoder(net.L, net.N, net.K, rng);
      const LiftedProblem lp = build_lifted(ch.csi, plan, net, f);
      const double lambda = 0.3;
      const KktGradient kg = kkt_gradient(f, lambda, lp);
      const CVec d = complex_normal_vector(rng, f.dim());
      const double h = 1e-6 * f.vec().norm() / d.norm();
      const StackedPrecoder fp(net.L, net.N, net.K, f.vec() + h * d);
      const StackedPrecoder fm(net.L, net.N, net.K, f.vec() - h * d);
      const double fd = (log_gamma(fp, lambda, lp) - log_gamma(fm, lambda, lp)) / (2.0 * h);
      const double an = 2.0 * d.dot(kg.gradient).real();
      worst = std::max(worst, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
    }
    out.push_back(make("spca_core", "gradient_finite_difference", worst < 1e-4, "max rel err " + fmt(worst)));
  }
  {
    double worst = 0.0;
    const int instances = full ? 20 : 5;
    for (int i = 0; i < instances; ++i) {
      const NetworkConfig one = small_net(2 + i % 5, 2, 1, 1);
      const QuantizationPlan p1 = make_plan(one);
      const ChannelSet ch = draw_realization(one, p1, 500 + i, 0, 0);
      const StackedPrecoder f0 = zf_init(ch.csi, p1);
      LiftedProblem lp = build_lifted(ch.csi, p1, one, f0, VTermMode::Exact);
      SolverOptions opt;
      opt.max_inner = 5000;
      const GpiResult g = gpi_inner(f0, 0.0, lp, opt);
      Eigen::GeneralizedSelfAdjointEigenSolver<CMat> ges(lp.dense_A(0), lp.dense_B(0), Eigen::EigenvaluesOnly);
      const double top = ges.eigenvalues().maxCoeff();
      worst = std::max(worst, std::abs(std::exp(g.log_gamma) - top) / top);
    }
    out.push_back(make("solver", "gpi_matches_generalized_eigensolver", worst < 1e-6, "max rel diff " + fmt(worst)));
  }
  {
    const int instances = full ? 50 : 10;
    int converged = 0;
    int good = 0;
    int so_pass = 0;
    for (int i = 0; i < instances; ++i) {
      const ChannelSet ch = draw_realization(net, plan, 600 + i, 0, 0);
      const SolverResult r = solve(ch.csi, plan, net);
      if (!r.success()) continue;
      ++converged;
      // An inactive constraint only has to stay below the target.
      const bool on_target = r.status == SolveStatus::Converged ? std::abs(r.sparsity - net.S) <= 0.05
                                                                 : r.sparsity <= net.S + 0.05;
      if (r.kkt_residual < 1e-5 && on_target) ++good;
      if (r.second_order_pass == CheckState::Pass) ++so_pass;
    }
    out.push_back(make("solver", "kkt_certification", converged > 0 && good == converged,
                       std::to_string(good) + "/" + std::to_string(converged) + " certified, " +
                           std::to_string(instances - converged) + " unconverged"));
    out.push_back(make("solver", "second_order_audit", converged > 0 && so_pass * 50 >= 48 * converged,
                       std::to_string(so_pass) + "/" + std::to_string(converged) + " pass"));
  }
  {
    const ChannelSet ch = draw_realization(net, plan, 700, 0, 0);
    bool ok = true;
    for (int S = 1; S <= net.L + 1; ++S) {
      const BaselineResult b = rcc_zf(ch.csi, plan, net, S);
      ok = ok && static_cast<int>(b.active.size()) == std::min(S, net.L);
    }
    out.push_back(make("baselines", "rcc_active_size", ok, "active size equals min(S, L)"));
  }
  return out;
}

bool print_report(std::ostream& os, const std::vector<CheckReport>& reports) {
  bool ok = true;
  for (const auto& r : reports) {
    const char* tag = r.outcome == CheckOutcome::Pass ? "PASS" : r.outcome == CheckOutcome::Fail ? "FAIL" : "INFO";
    if (r.outcome == CheckOutcome::Fail) ok = false;
    os << tag << ' ' << r.module << '.' << r.name << ' ' << r.detail << '\n';
  }
  return ok;
}

}  // namespace sparsejt
