#include "sparsejt/net_model.hpp"

#include <algorithm>
#include <cmath>

namespace sparsejt {

Topology generate_topology(const NetworkConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> coord(0.0, cfg.area_m);
  Topology topo;
  topo.rrh_xy.reserve(cfg.L);
  topo.user_xy.reserve(cfg.K);
  for (int l = 0; l < cfg.L; ++l) {
    const double x = coord(rng);
    const double y = coord(rng);
    topo.rrh_xy.emplace_back(x, y);
  }
  for (int k = 0; k < cfg.K; ++k) {
    const double x = coord(rng);
    const double y = coord(rng);
    topo.user_xy.emplace_back(x, y);
  }
  topo.beta.resize(cfg.L, cfg.K);
  for (int l = 0; l < cfg.L; ++l) {
    for (int k = 0; k < cfg.K; ++k) {
      const double d = (topo.rrh_xy[l] - topo.user_xy[k]).norm();
      topo.beta(l, k) = std::pow(10.0, -pathloss_db(d, cfg) / 10.0);
    }
  }
  return topo;
}

double pathloss_db(double d_m, const NetworkConfig& cfg) {
  const double d_km = std::max(d_m, kMinDistanceM) / 1000.0;
  const double log_f = std::log10(cfg.carrier_mhz);
  const double log_hb = std::log10(cfg.h_rrh_m);
  const double a_hm = (1.1 * log_f - 0.7) * cfg.h_user_m - (1.56 * log_f - 0.8);
  return 46.3 + 33.9 * log_f - 13.82 * log_hb - a_hm + (44.9 - 6.55 * log_hb) * std::log10(d_km);
}

CMat spatial_covariance(int N, double corr_r) {
  CMat R(N, N);
  for (int m = 0; m < N; ++m) {
    for (int n = 0; n < N; ++n) R(m, n) = std::pow(corr_r, std::abs(m - n));
  }
  return R;
}

CMat estimate_covariance(double beta, const CMat& R, double noise_ratio) {
  if (!(noise_ratio > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "pilot noise ratio must be > 0");
  }
  const int N = static_cast<int>(R.rows());
  const CMat G = beta * R + noise_ratio * CMat::Identity(N, N);
  CMat S = beta * beta * R * G.llt().solve(R);
  return 0.5 * (S + S.adjoint());
}

CMat estimation_error_cov(double beta, const CMat& R, double noise_ratio) {
  CMat Phi = beta * R - estimate_covariance(beta, R, noise_ratio);
  return 0.5 * (Phi + Phi.adjoint());
}

CVec sample_complex_gaussian(const CMat& cov, Rng& rng) {
  const int n = static_cast<int>(cov.rows());
  Eigen::SelfAdjointEigenSolver<CMat> eig(cov);
  const RVec sqrt_ev = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const CVec w = complex_normal_vector(rng, n);
  return eig.eigenvectors() * (sqrt_ev.cast<cplx>().asDiagonal() * w);
}

ChannelDraw sample_channel_and_estimate(double beta, const CMat& R, double noise_ratio, Rng& rng) {
  ChannelDraw draw;
  const CMat est_cov = estimate_covariance(beta, R, noise_ratio);
  draw.Phi = beta * R - est_cov;
  draw.Phi = 0.5 * (draw.Phi + draw.Phi.adjoint()).eval();
  // e is independent of the estimate, and h = h_est - e.
  draw.h_est = sample_complex_gaussian(est_cov, rng);
  const CVec e = sample_complex_gaussian(draw.Phi, rng);
  draw.h_true = draw.h_est - e;
  return draw;
}

}  // namespace sparsejt
