#include <doctest.h>

#include "sparsejt/rng.hpp"
#include "sparsejt/se_metrics.hpp"

#include <cmath>

using namespace sparsejt;

namespace {

NetworkConfig unit_config() {
  NetworkConfig cfg;
  cfg.L = 1;
  cfg.N = 1;
  cfg.K = 1;
  cfg.S = 1;
  cfg.tau = 1;
  cfg.P_dbm = 30.0;     // 1 W
  cfg.noise_dbm = 30.0; // 1 W
  return cfg;
}

CsiKnowledge scalar_csi(cplx h, double phi, double q) {
  CsiKnowledge csi;
  csi.L = csi.N = csi.K = 1;
  csi.beta = RMat::Constant(1, 1, 1.0);
  csi.R = {CMat::Identity(1, 1)};
  csi.h_bar = {CVec::Constant(1, h)};
  csi.Phi = {CMat::Constant(1, 1, phi)};
  csi.Q = {CMat::Constant(1, 1, q)};
  csi.selected = {{0}};
  csi.known = {1};
  return csi;
}

QuantizationPlan no_data_noise(int L) {
  RrhPlan r;
  r.U = 1;
  r.B = 8;
  r.B_bar = 30;
  r.eta = 0.0;
  return QuantizationPlan{std::vector<RrhPlan>(L, r)};
}

NetworkConfig small_config() {
  NetworkConfig cfg;
  cfg.L = 3;
  cfg.N = 2;
  cfg.K = 3;
  cfg.S = 2;
  cfg.tau = 3;
  cfg.C_bits_per_use = 60.0;
  return cfg;
}

}  // namespace

TEST_CASE("noise budget reduces to thermal noise without impairments") {
  const NetworkConfig cfg = unit_config();
  const CsiKnowledge csi = scalar_csi(1.0, 0.0, 0.0);
  const StackedPrecoder f(1, 1, 1, CVec::Constant(1, 1.0));
  const NoiseBudget nb = effective_noise_var(f, csi, no_data_noise(1), cfg, 0);
  CHECK(nb.sigma_tilde_sq == doctest::Approx(cfg.noise_w()));
  CHECK(nb.estimation == 0.0);
}

TEST_CASE("scalar noise budget arithmetic") {
  const NetworkConfig cfg = unit_config();
  const CsiKnowledge csi = scalar_csi(1.0, 0.1, 0.05);
  const StackedPrecoder f(1, 1, 1, CVec::Constant(1, 1.0));
  const NoiseBudget nb = effective_noise_var(f, csi, no_data_noise(1), cfg, 0);
  CHECK(nb.sigma_tilde_sq == doctest::Approx(1.15).epsilon(1e-12));
  CHECK(nb.sigma_tilde_sq == doctest::Approx(nb.estimation + nb.csi_quant + nb.data_quant + nb.thermal));
}

TEST_CASE("impairment terms scale quadratically with the precoder") {
  const NetworkConfig cfg = small_config();
  const QuantizationPlan plan = make_plan(cfg);
  const ChannelSet ch = draw_realization(cfg, plan, 4, 0, 0);
  Rng rng = substream(4, 9);
  StackedPrecoder f(cfg.L, cfg.N, cfg.K, complex_normal_vector(rng, 18));
  const NoiseBudget a = effective_noise_var(f, ch.csi, plan, cfg, 1);
  f.scale(3.0);
  const NoiseBudget b = effective_noise_var(f, ch.csi, plan, cfg, 1);
  CHECK(b.estimation == doctest::Approx(9.0 * a.estimation).epsilon(1e-12));
  CHECK(b.csi_quant == doctest::Approx(9.0 * a.csi_quant).epsilon(1e-12));
  CHECK(b.data_quant == doctest::Approx(9.0 * a.data_quant).epsilon(1e-12));
  CHECK(b.thermal == a.thermal);
}

TEST_CASE("single-user unit lower bound is one bit") {
  const NetworkConfig cfg = unit_config();
  const CsiKnowledge csi = scalar_csi(1.0, 0.0, 0.0);
  const StackedPrecoder f(1, 1, 1, CVec::Constant(1, 1.0));
  CHECK(se_lower_bound(f, csi, no_data_noise(1), cfg).sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("precoder orthogonal to the channel gets no rate") {
  NetworkConfig cfg = unit_config();
  cfg.N = 2;
  CsiKnowledge csi = scalar_csi(1.0, 0.0, 0.0);
  csi.N = 2;
  csi.R = {CMat::Identity(2, 2)};
  csi.h_bar = {CVec::Unit(2, 0)};
  csi.Phi = {CMat::Zero(2, 2)};
  csi.Q = {CMat::Zero(2, 2)};
  const StackedPrecoder f(1, 2, 1, CVec::Unit(2, 1));
  CHECK(se_lower_bound(f, csi, no_data_noise(1), cfg).per_user[0] == 0.0);
}

TEST_CASE("stacked and per-RRH lower bounds agree") {
  const NetworkConfig cfg = small_config();
  const QuantizationPlan plan = make_plan(cfg);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const ChannelSet ch = draw_realization(cfg, plan, 10 + i, 0, 0);
    Rng rng = substream(50 + i, 0);
    const StackedPrecoder f(cfg.L, cfg.N, cfg.K, complex_normal_vector(rng, 18));
    const double a = se_lower_bound(f, ch.csi, plan, cfg).sum;
    const double b = se_lower_bound_per_rrh(f, ch.csi, plan, cfg).sum;
    CHECK(a >= 0.0);
    worst = std::max(worst, std::abs(a - b) / a);
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("true SINR for an interference-free user") {
  const NetworkConfig cfg = unit_config();
  ChannelSet ch;
  ch.csi = scalar_csi(cplx(0.6, 0.8), 0.0, 0.0);
  ch.h_true = {CVec::Constant(1, cplx(0.6, 0.8))};
  ch.h_est = ch.h_true;
  const StackedPrecoder f(1, 1, 1, CVec::Constant(1, 2.0));
  const SinrResult s = sinr_true(ch, f, no_data_noise(1), cfg);
  CHECK(s.sinr[0] == doctest::Approx(cfg.tx_power_w() * 4.0 / cfg.noise_w()).epsilon(1e-12));
}

TEST_CASE("true SINR matches the lower bound with perfect unquantized CSI") {
  NetworkConfig cfg = small_config();
  const QuantizationPlan plan = no_data_noise(cfg.L);
  ChannelSet ch = draw_realization(cfg, make_plan(cfg), 3, 0, 0);
  for (int i = 0; i < cfg.L * cfg.K; ++i) {
    ch.csi.h_bar[i] = ch.h_true[i];
    ch.csi.Phi[i].setZero();
    ch.csi.Q[i].setZero();
    ch.csi.known[i] = 1;
  }
  Rng rng = substream(3, 3);
  const StackedPrecoder f(cfg.L, cfg.N, cfg.K, complex_normal_vector(rng, 18));
  CHECK(sinr_true(ch, f, plan, cfg).sum_se == doctest::Approx(se_lower_bound(f, ch.csi, plan, cfg).sum).epsilon(1e-12));
}

TEST_CASE("a user whose only other streams are zero sees just noise") {
  NetworkConfig cfg = small_config();
  const QuantizationPlan plan = no_data_noise(cfg.L);
  const ChannelSet ch = draw_realization(cfg, make_plan(cfg), 5, 0, 0);
  StackedPrecoder f(cfg.L, cfg.N, cfg.K);
  f.user(1).setOnes();
  const SinrResult s = sinr_true(ch, f, plan, cfg);
  cplx acc(0.0, 0.0);
  for (int l = 0; l < cfg.L; ++l) acc += ch.h_true[ch.index(l, 1)].dot(f.block(l, 1));
  CHECK(s.sinr[1] == doctest::Approx(std::norm(acc) / (cfg.noise_w() / cfg.tx_power_w())).epsilon(1e-12));
  CHECK(s.sinr[0] == 0.0);
}

TEST_CASE("ergodic SE: prefactor, zero strategy, determinism, CLT scaling") {
  NetworkConfig cfg = small_config();
  const QuantizationPlan plan = make_plan(cfg);
  CHECK(cfg.training_prefactor() == 1.0);

  const PrecoderStrategy zero = [](const CsiKnowledge& c, const QuantizationPlan&, const NetworkConfig&) {
    return StackedPrecoder(c.L, c.N, c.K);
  };
  const ErgodicResult z = ergodic_se(cfg, plan, zero, 2, 2, 1);
  CHECK(z.mean == 0.0);
  CHECK(z.n_ok == 4);

  const PrecoderStrategy matched = [](const CsiKnowledge& c, const QuantizationPlan&, const NetworkConfig&) {
    StackedPrecoder f(c.L, c.N, c.K);
    for (int k = 0; k < c.K; ++k) f.user(k) = stacked_channel(c, k).normalized();
    return f;
  };
  const ErgodicResult a = ergodic_se(cfg, plan, matched, 4, 200, 7);
  const ErgodicResult b = ergodic_se(cfg, plan, matched, 4, 400, 7);
  CHECK(a.samples == ergodic_se(cfg, plan, matched, 4, 200, 7).samples);
  // Doubling the sample count shrinks the standard error by 1/sqrt(2).
  CHECK(b.std_error / a.std_error == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.2));

  cfg.tau_u = 20;
  cfg.tau_d = 30;
  const ErgodicResult c = ergodic_se(cfg, plan, matched, 4, 200, 7);
  CHECK(c.mean == doctest::Approx(0.75 * a.mean).epsilon(1e-12));
}

TEST_CASE("strategy failures are counted and skipped") {
  const NetworkConfig cfg = small_config();
  const QuantizationPlan plan = make_plan(cfg);
  int calls = 0;
  const PrecoderStrategy flaky = [&calls](const CsiKnowledge& c, const QuantizationPlan&, const NetworkConfig&) {
    if (calls++ % 2 == 1) throw Error(ErrorCode::SingularSystem, "boom");
    return StackedPrecoder(c.L, c.N, c.K);
  };
  const ErgodicResult r = ergodic_se(cfg, plan, flaky, 2, 2, 1);
  CHECK(r.n_ok == 2);
  CHECK(r.n_failed == 2);
  CHECK(r.failures.size() == 2);
}

TEST_CASE("strategies never see the true channel") {
  const NetworkConfig cfg = small_config();
  const QuantizationPlan plan = make_plan(cfg);
  ChannelSet ch = draw_realization(cfg, plan, 8, 0, 0);
  const CsiKnowledge before = ch.csi;
  for (auto& h : ch.h_true) h *= 5.0;
  const PrecoderStrategy matched = [](const CsiKnowledge& c, const QuantizationPlan&, const NetworkConfig&) {
    StackedPrecoder f(c.L, c.N, c.K);
    for (int k = 0; k < c.K; ++k) f.user(k) = stacked_channel(c, k);
    return f;
  };
  CHECK(matched(before, plan, cfg).vec() == matched(ch.csi, plan, cfg).vec());
}
