#include "sparsejt/se_metrics.hpp"

#include "sparsejt/parallel.hpp"
#include "sparsejt/rng.hpp"

#include <cmath>
#include <exception>
#include <numeric>

namespace sparsejt {

namespace {

void check_dims(const StackedPrecoder& f, const CsiKnowledge& csi) {
  if (f.L() != csi.L || f.N() != csi.N || f.K() != csi.K) {
    throw Error(ErrorCode::DimensionMismatch, "precoder does not match channel dimensions");
  }
}

// sum_l Tr(R_{l,k} beta_{l,k} V_l) for the precoder f.
double data_quant_term(const StackedPrecoder& f, const CsiKnowledge& csi,
                       const QuantizationPlan& plan, double P, int k) {
  double total = 0.0;
  for (int l = 0; l < csi.L; ++l) {
    const CMat V = data_quant_noise_cov(f.rrh_matrix(l), plan.rrh[l].eta, P);
    const CMat& R = csi.R[csi.index(l, k)];
    total += csi.beta(l, k) * (R * V).trace().real();
  }
  return total;
}

}  // namespace

CVec stacked_channel(const CsiKnowledge& csi, int k) {
  CVec h(csi.L * csi.N);
  for (int l = 0; l < csi.L; ++l) h.segment(l * csi.N, csi.N) = csi.h_bar[csi.index(l, k)];
  return h;
}

CMat stacked_error_cov(const CsiKnowledge& csi, int k) {
  const int n = csi.L * csi.N;
  CMat E = CMat::Zero(n, n);
  for (int l = 0; l < csi.L; ++l) {
    if (!csi.is_known(l, k)) continue;
    const int i = csi.index(l, k);
    E.block(l * csi.N, l * csi.N, csi.N, csi.N) = csi.Phi[i] + csi.Q[i];
  }
  return E;
}

NoiseBudget effective_noise_var(const StackedPrecoder& f, const CsiKnowledge& csi,
                                const QuantizationPlan& plan, const NetworkConfig& cfg, int k) {
  check_dims(f, csi);
  const double P = cfg.tx_power_w();
  NoiseBudget nb;
  for (int l = 0; l < csi.L; ++l) {
    if (!csi.is_known(l, k)) continue;
    const int idx = csi.index(l, k);
    for (int i = 0; i < csi.K; ++i) {
      const auto fi = f.block(l, i);
      nb.estimation += P * fi.dot(csi.Phi[idx] * fi).real();
      nb.csi_quant += P * fi.dot(csi.Q[idx] * fi).real();
    }
  }
  nb.data_quant = data_quant_term(f, csi, plan, P, k);
  nb.thermal = cfg.noise_w();
  nb.sigma_tilde_sq = nb.estimation + nb.csi_quant + nb.data_quant + nb.thermal;
  return nb;
}

SeBreakdown se_lower_bound(const StackedPrecoder& f, const CsiKnowledge& csi,
                           const QuantizationPlan& plan, const NetworkConfig& cfg) {
  check_dims(f, csi);
  const double P = cfg.tx_power_w();
  SeBreakdown out;
  out.per_user = RVec::Zero(csi.K);
  for (int k = 0; k < csi.K; ++k) {
    const CVec h = stacked_channel(csi, k);
    const CMat E = stacked_error_cov(csi, k);
    double signal = 0.0;
    double interference = 0.0;
    double error_power = 0.0;
    for (int i = 0; i < csi.K; ++i) {
      const auto fi = f.user(i);
      const double p = std::norm(h.dot(fi));
      (i == k ? signal : interference) += p;
      error_power += fi.dot(E * fi).real();
    }
    const double noise = error_power + (data_quant_term(f, csi, plan, P, k) + cfg.noise_w()) / P;
    out.per_user[k] = std::log2(1.0 + signal / (interference + noise));
  }
  out.sum = out.per_user.sum();
  return out;
}

SeBreakdown se_lower_bound_per_rrh(const StackedPrecoder& f, const CsiKnowledge& csi,
                                   const QuantizationPlan& plan, const NetworkConfig& cfg) {
  check_dims(f, csi);
  const double P = cfg.tx_power_w();
  SeBreakdown out;
  out.per_user = RVec::Zero(csi.K);
  for (int k = 0; k < csi.K; ++k) {
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < csi.K; ++i) {
      cplx acc(0.0, 0.0);
      for (int l = 0; l < csi.L; ++l) acc += csi.h_bar[csi.index(l, k)].dot(f.block(l, i));
      (i == k ? signal : interference) += std::norm(acc);
    }
    const NoiseBudget nb = effective_noise_var(f, csi, plan, cfg, k);
    out.per_user[k] = std::log2(1.0 + signal / (interference + nb.sigma_tilde_sq / P));
  }
  out.sum = out.per_user.sum();
  return out;
}

SinrResult sinr_true(const ChannelSet& ch, const StackedPrecoder& f,
                     const QuantizationPlan& plan, const NetworkConfig& cfg) {
  const CsiKnowledge& csi = ch.csi;
  check_dims(f, csi);
  const double P = cfg.tx_power_w();
  std::vector<CMat> V(csi.L);
  for (int l = 0; l < csi.L; ++l) V[l] = data_quant_noise_cov(f.rrh_matrix(l), plan.rrh[l].eta, P);

  SinrResult out;
  out.sinr = RVec::Zero(csi.K);
  out.se = RVec::Zero(csi.K);
  for (int k = 0; k < csi.K; ++k) {
    double signal = 0.0;
    double interference = 0.0;
    for (int i = 0; i < csi.K; ++i) {
      cplx acc(0.0, 0.0);
      for (int l = 0; l < csi.L; ++l) acc += ch.h_true[ch.index(l, k)].dot(f.block(l, i));
      (i == k ? signal : interference) += std::norm(acc);
    }
    double quant = 0.0;
    for (int l = 0; l < csi.L; ++l) {
      const CVec& h = ch.h_true[ch.index(l, k)];
      quant += h.dot(V[l] * h).real();
    }
    out.sinr[k] = signal / (interference + quant / P + cfg.noise_w() / P);
    out.se[k] = std::log2(1.0 + out.sinr[k]);
  }
  out.sum_se = out.se.sum();
  return out;
}

ChannelSet draw_realization(const NetworkConfig& cfg, const QuantizationPlan& plan,
                            std::uint64_t seed, int drop, int fade, QuantMode mode) {
  Rng topo_rng = substream(seed, static_cast<std::uint64_t>(drop), 0, 1);
  const Topology topo = generate_topology(cfg, topo_rng);
  Rng fade_rng = substream(seed, static_cast<std::uint64_t>(drop),
                           static_cast<std::uint64_t>(fade) + 1, 2);
  return acquire_channels(topo, cfg, plan, fade_rng, mode);
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double std_error_of(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

ErgodicResult ergodic_se(const NetworkConfig& cfg, const QuantizationPlan& plan,
                         const PrecoderStrategy& strategy, int n_drops, int n_fades,
                         std::uint64_t seed, int threads) {
  if (n_drops < 1 || n_fades < 1) {
    throw Error(ErrorCode::InvalidArgument, "n_drops and n_fades must be >= 1");
  }
  const int total = n_drops * n_fades;
  std::vector<double> value(total, 0.0);
  std::vector<std::string> error(total);
  std::vector<char> ok(total, 0);
  const double prefactor = cfg.training_prefactor();

  parallel_for(total, threads, [&](int idx) {
    const int drop = idx / n_fades;
    const int fade = idx % n_fades;
    try {
      const ChannelSet ch = draw_realization(cfg, plan, seed, drop, fade);
      const StackedPrecoder f = strategy(ch.csi, plan, cfg);
      value[idx] = prefactor * sinr_true(ch, f, plan, cfg).sum_se;
      ok[idx] = 1;
    } catch (const std::exception& e) {
      error[idx] = "drop " + std::to_string(drop) + " fade " + std::to_string(fade) + ": " + e.what();
    }
  });

  ErgodicResult res;
  for (int i = 0; i < total; ++i) {
    if (ok[i]) {
      res.samples.push_back(value[i]);
    } else {
      res.failures.push_back(error[i]);
    }
  }
  res.n_ok = static_cast<int>(res.samples.size());
  res.n_failed = total - res.n_ok;
  res.mean = mean_of(res.samples);
  res.std_error = std_error_of(res.samples);
  return res;
}

}  // namespace sparsejt
