// Topology, large-scale fading, correlated small-scale channels and the MMSE
// channel-estimation error model.

#ifndef SPARSEJT_NET_MODEL_HPP
#define SPARSEJT_NET_MODEL_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/rng.hpp"
#include "sparsejt/types.hpp"

#include <vector>

namespace sparsejt {

inline constexpr double kMinDistanceM = 10.0;

struct Topology {
  std::vector<Eigen::Vector2d> rrh_xy;
  std::vector<Eigen::Vector2d> user_xy;
  RMat beta;  // L x K linear large-scale gains
};

// What the BBU knows about one realization. Precoding strategies only ever
// see this; the true channels stay in ChannelSet.
struct CsiKnowledge {
  int L = 0;
  int N = 0;
  int K = 0;
  RMat beta;                              // L x K
  std::vector<CMat> R;                    // spatial covariance per (l, k)
  std::vector<CVec> h_bar;                // quantized estimate, zero when unknown
  std::vector<CMat> Phi;                  // estimation-error covariance
  std::vector<CMat> Q;                    // CSI-quantization covariance, zero when unknown
  std::vector<std::vector<int>> selected; // K_l, descending gain order
  std::vector<char> known;                // known[(l, k)] == (k in K_l)

  int index(int l, int k) const { return l * K + k; }
  bool is_known(int l, int k) const { return known[index(l, k)] != 0; }
};

struct ChannelSet {
  CsiKnowledge csi;
  std::vector<CVec> h_true;
  std::vector<CVec> h_est;

  int index(int l, int k) const { return csi.index(l, k); }
};

struct ChannelDraw {
  CVec h_true;
  CVec h_est;
  CMat Phi;
};

Topology generate_topology(const NetworkConfig& cfg, Rng& rng);

// COST-231 Hata (medium city), distances below kMinDistanceM are clamped.
double pathloss_db(double d_m, const NetworkConfig& cfg);

// Exponential correlation model R[m, n] = r^|m - n|.
CMat spatial_covariance(int N, double corr_r);

// beta^2 R (beta R + c I)^-1 R, the covariance of the MMSE estimate.
CMat estimate_covariance(double beta, const CMat& R, double noise_ratio);

// beta R - beta^2 R (beta R + c I)^-1 R with c = sigma^2 / (tau p_ul).
CMat estimation_error_cov(double beta, const CMat& R, double noise_ratio);

ChannelDraw sample_channel_and_estimate(double beta, const CMat& R, double noise_ratio, Rng& rng);

// Draws x ~ CN(0, cov) for a Hermitian PSD cov.
CVec sample_complex_gaussian(const CMat& cov, Rng& rng);

}  // namespace sparsejt

#endif  // SPARSEJT_NET_MODEL_HPP
