#include "sparsejt/fronthaul.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <tuple>

namespace sparsejt {

namespace {

// log2(2^x - 1) for x > 0 without overflow.
double log2_pow2_minus_one(double x) {
  return x + std::log1p(-std::exp2(-x)) / std::log(2.0);
}

// log2(1 + 2^(2 bits) / kQuantConst)
double bits_per_coefficient(int bits) {
  const double t = 2.0 * bits - std::log2(kQuantConst);
  // log2(1 + 2^t)
  return t > 0 ? t + std::log2(1.0 + std::exp2(-t)) : std::log2(1.0 + std::exp2(t));
}

int floor_half_log2_bits(double x) {
  return static_cast<int>(std::floor(0.5 * (std::log2(kQuantConst) + log2_pow2_minus_one(x))));
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double std_normal_quantile(double p) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p); }

}  // namespace

double QuantizationPlan::power_budget_sum() const {
  double s = 0.0;
  for (const auto& r : rrh) s += 1.0 / (1.0 + r.eta);
  return s;
}

double QuantizationPlan::min_rrh_budget() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rrh) m = std::min(m, 1.0 / (1.0 + r.eta));
  return m;
}

double quant_eta(int bits) { return kQuantConst * std::exp2(-2.0 * bits); }

int plan_csi_bits(double C, int U, int N) {
  if (!(C > 0.0) || U * N < 1) {
    throw Error(ErrorCode::InvalidArgument, "plan_csi_bits needs C > 0 and U*N >= 1");
  }
  const int B = floor_half_log2_bits(C / (static_cast<double>(U) * N));
  if (B < 1) {
    throw Error(ErrorCode::CapacityTooSmall,
                "C=" + std::to_string(C) + " cannot carry 1 bit for U=" + std::to_string(U));
  }
  return B;
}

int plan_csi_users(double C, int B, int N, int K) {
  if (!(C > 0.0)) throw Error(ErrorCode::InvalidArgument, "plan_csi_users needs C > 0");
  const double per_user = N * bits_per_coefficient(B);
  const double raw = std::floor(C / per_user);
  const int U = static_cast<int>(std::min<double>(K, raw));
  if (U < 1) {
    throw Error(ErrorCode::CapacityTooSmall,
                "C=" + std::to_string(C) + " cannot carry one user at B=" + std::to_string(B));
  }
  return U;
}

int plan_data_bits(double C, int N) {
  if (!(C > 0.0) || N < 1) throw Error(ErrorCode::InvalidArgument, "plan_data_bits needs C > 0");
  const int B_bar = floor_half_log2_bits(C / N);
  if (B_bar < 1) {
    throw Error(ErrorCode::CapacityTooSmall, "C=" + std::to_string(C) + " too small for data");
  }
  return B_bar;
}

std::pair<double, double> fronthaul_rates(int U, int N, int B, int B_bar) {
  return {static_cast<double>(U) * N * bits_per_coefficient(B),
          static_cast<double>(N) * bits_per_coefficient(B_bar)};
}

QuantizationPlan make_plan(const NetworkConfig& cfg, const PlanOverride& ov) {
  const double C = cfg.C_bits_per_use;
  if (ov.U < 0 || ov.U > cfg.K) throw Error(ErrorCode::ConfigError, "override U outside [1, K]");
  if (ov.B < 0 || ov.B_bar < 0) throw Error(ErrorCode::ConfigError, "override bits must be >= 1");

  int U = ov.U;
  int B = ov.B;
  if (U == 0 && B != 0) {
    U = plan_csi_users(C, B, cfg.N, cfg.K);
  } else if (U == 0) {
    for (int u = cfg.K; u >= 1 && U == 0; --u) {
      if (floor_half_log2_bits(C / (static_cast<double>(u) * cfg.N)) >= 1) U = u;
    }
    if (U == 0) throw Error(ErrorCode::CapacityTooSmall, "no feasible CSI allocation");
  }
  if (B == 0) B = plan_csi_bits(C, U, cfg.N);
  const int B_bar = ov.B_bar != 0 ? ov.B_bar : plan_data_bits(C, cfg.N);

  RrhPlan r;
  r.U = U;
  r.B = B;
  r.B_bar = B_bar;
  r.eta = quant_eta(B_bar);
  std::tie(r.rate_csi, r.rate_data) = fronthaul_rates(U, cfg.N, B, B_bar);
  return QuantizationPlan{std::vector<RrhPlan>(cfg.L, r)};
}

std::vector<int> select_channels(const std::vector<double>& gains, int U) {
  const int K = static_cast<int>(gains.size());
  if (U < 0 || U > K) throw Error(ErrorCode::InvalidArgument, "U must lie in [0, K]");
  std::vector<int> idx(K);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return gains[a] > gains[b]; });
  idx.resize(U);
  return idx;
}

CMat csi_quant_noise_cov(double beta, const CMat& R, double noise_ratio, int B) {
  const CMat est = estimate_covariance(beta, R, noise_ratio);
  const int N = static_cast<int>(R.rows());
  CMat Q = CMat::Zero(N, N);
  const double scale = quant_eta(B);
  for (int n = 0; n < N; ++n) Q(n, n) = scale * est(n, n).real();
  return Q;
}

double uniform_quantizer_mse(int bits, double loading) {
  const long M = 1L << bits;
  const double step = 2.0 * loading / static_cast<double>(M);
  // [Phi(x) - x phi(x)] + 2q [phi(x)] + q^2 [Phi(x)] over each cell.
  auto antideriv = [](double x, double q) {
    if (std::isinf(x)) return x > 0 ? 1.0 + q * q : 0.0;
    const double cdf = std_normal_cdf(x);
    const double pdf = std_normal_pdf(x);
    return cdf - x * pdf + 2.0 * q * pdf + q * q * cdf;
  };
  const double inf = std::numeric_limits<double>::infinity();
  double mse = 0.0;
  for (long i = -M / 2; i < M / 2; ++i) {
    const double a = (i == -M / 2) ? -inf : static_cast<double>(i) * step;
    const double b = (i == M / 2 - 1) ? inf : static_cast<double>(i + 1) * step;
    const double q = (static_cast<double>(i) + 0.5) * step;
    mse += antideriv(b, q) - antideriv(a, q);
  }
  return mse;
}

double uniform_loading_factor(int bits) {
  if (bits < 1 || bits > 16) throw Error(ErrorCode::InvalidArgument, "uniform quantizer bits in [1, 16]");
  static std::mutex mu;
  static std::map<int, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(bits); it != cache.end()) return it->second;
  }
  // Golden-section search; the MSE is unimodal in the loading factor.
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = 0.5;
  double hi = 8.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  double f1 = uniform_quantizer_mse(bits, x1);
  double f2 = uniform_quantizer_mse(bits, x2);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = uniform_quantizer_mse(bits, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = uniform_quantizer_mse(bits, x2);
    }
  }
  const double best = 0.5 * (lo + hi);
  std::lock_guard<std::mutex> lock(mu);
  cache[bits] = best;
  return best;
}

double uniform_quantize(double x, double sigma, int bits) {
  if (sigma <= 0.0) return x;
  const long M = 1L << bits;
  const double step = 2.0 * uniform_loading_factor(bits) * sigma / static_cast<double>(M);
  double idx = std::floor(x / step);
  idx = std::clamp(idx, -static_cast<double>(M / 2), static_cast<double>(M / 2 - 1));
  return (idx + 0.5) * step;
}

double companded_quantize(double x, double sigma, int bits) {
  if (sigma <= 0.0) return x;
  const double M = std::exp2(bits);
  // Compressor matched to the p^(1/3) point density of a Gaussian source.
  const double spread = std::sqrt(3.0) * sigma;
  const double y = std_normal_cdf(x / spread);
  const double idx = std::min(std::floor(y * M), M - 1.0);
  return spread * std_normal_quantile((idx + 0.5) / M);
}

CVec quantize_csi(const CVec& h_est, const CMat& Q, int B, Rng& rng, QuantMode mode) {
  const int N = static_cast<int>(h_est.size());
  CVec out(N);
  for (int n = 0; n < N; ++n) {
    const double qvar = std::max(Q(n, n).real(), 0.0);
    switch (mode) {
      case QuantMode::Statistical:
        out[n] = h_est[n] + std::sqrt(qvar) * complex_normal(rng);
        break;
      case QuantMode::Uniform:
      case QuantMode::Companded: {
        // Q[n, n] = eta(B) E|h_est^n|^2, so each real part has variance Q / (2 eta).
        const double sigma = std::sqrt(qvar / quant_eta(B) / 2.0);
        auto quant = mode == QuantMode::Uniform ? uniform_quantize : companded_quantize;
        out[n] = cplx(quant(h_est[n].real(), sigma, B), quant(h_est[n].imag(), sigma, B));
        break;
      }
    }
  }
  return out;
}

CMat data_quant_noise_cov(const CMat& F_l, double eta, double P) {
  if (eta < 0.0) throw Error(ErrorCode::InvalidArgument, "eta must be >= 0");
  const int N = static_cast<int>(F_l.rows());
  CMat V = CMat::Zero(N, N);
  for (int n = 0; n < N; ++n) V(n, n) = P * eta * F_l.row(n).squaredNorm();
  return V;
}

ChannelSet acquire_channels(const Topology& topo, const NetworkConfig& cfg,
                            const QuantizationPlan& plan, Rng& rng, QuantMode mode) {
  const int L = cfg.L;
  const int N = cfg.N;
  const int K = cfg.K;
  if (static_cast<int>(plan.rrh.size()) != L) {
    throw Error(ErrorCode::DimensionMismatch, "plan has wrong RRH count");
  }
  const double c = cfg.pilot_noise_ratio();
  const CMat R = spatial_covariance(N, cfg.corr_r);

  ChannelSet ch;
  CsiKnowledge& csi = ch.csi;
  csi.L = L;
  csi.N = N;
  csi.K = K;
  csi.beta = topo.beta;
  csi.R.assign(L * K, R);
  csi.h_bar.assign(L * K, CVec::Zero(N));
  csi.Phi.resize(L * K);
  csi.Q.assign(L * K, CMat::Zero(N, N));
  csi.selected.resize(L);
  csi.known.assign(L * K, 0);
  ch.h_true.resize(L * K);
  ch.h_est.resize(L * K);

  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      ChannelDraw d = sample_channel_and_estimate(topo.beta(l, k), R, c, rng);
      const int i = csi.index(l, k);
      ch.h_true[i] = std::move(d.h_true);
      ch.h_est[i] = std::move(d.h_est);
      csi.Phi[i] = std::move(d.Phi);
    }
  }
  for (int l = 0; l < L; ++l) {
    std::vector<double> gains(K);
    for (int k = 0; k < K; ++k) gains[k] = ch.h_est[csi.index(l, k)].squaredNorm();
    csi.selected[l] = select_channels(gains, plan.rrh[l].U);
    for (int k : csi.selected[l]) {
      const int i = csi.index(l, k);
      csi.known[i] = 1;
      csi.Q[i] = csi_quant_noise_cov(topo.beta(l, k), R, c, plan.rrh[l].B);
      csi.h_bar[i] = quantize_csi(ch.h_est[i], csi.Q[i], plan.rrh[l].B, rng, mode);
    }
  }
  return ch;
}

}  // namespace sparsejt
