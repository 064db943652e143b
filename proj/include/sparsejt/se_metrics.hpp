// True SINR, the GMI-based spectral-efficiency lower bound the optimizer
// works with, and Monte Carlo ergodic spectral efficiency.

#ifndef SPARSEJT_SE_METRICS_HPP
#define SPARSEJT_SE_METRICS_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/fronthaul.hpp"
#include "sparsejt/net_model.hpp"
#include "sparsejt/precoder.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sparsejt {

struct NoiseBudget {
  double sigma_tilde_sq = 0.0;
  double estimation = 0.0;
  double csi_quant = 0.0;
  double data_quant = 0.0;
  double thermal = 0.0;
};

struct SeBreakdown {
  RVec per_user;
  double sum = 0.0;
};

struct SinrResult {
  RVec sinr;
  RVec se;
  double sum_se = 0.0;
};

// Stacked LN-vector of quantized estimates for user k, zero blocks where unknown.
CVec stacked_channel(const CsiKnowledge& csi, int k);
// blkdiag(Phi_{l,k} + Q_{l,k}) over known l, zero elsewhere.
CMat stacked_error_cov(const CsiKnowledge& csi, int k);

NoiseBudget effective_noise_var(const StackedPrecoder& f, const CsiKnowledge& csi,
                                const QuantizationPlan& plan, const NetworkConfig& cfg, int k);

// Evaluated with stacked per-user vectors.
SeBreakdown se_lower_bound(const StackedPrecoder& f, const CsiKnowledge& csi,
                           const QuantizationPlan& plan, const NetworkConfig& cfg);

// Same quantity accumulated RRH by RRH from the unstacked blocks.
SeBreakdown se_lower_bound_per_rrh(const StackedPrecoder& f, const CsiKnowledge& csi,
                                   const QuantizationPlan& plan, const NetworkConfig& cfg);

SinrResult sinr_true(const ChannelSet& ch, const StackedPrecoder& f,
                     const QuantizationPlan& plan, const NetworkConfig& cfg);

// A precoding scheme sees only what the BBU knows.
using PrecoderStrategy = std::function<StackedPrecoder(
    const CsiKnowledge&, const QuantizationPlan&, const NetworkConfig&)>;

// One (drop, fade) draw; topology depends on the drop only.
ChannelSet draw_realization(const NetworkConfig& cfg, const QuantizationPlan& plan,
                            std::uint64_t seed, int drop, int fade,
                            QuantMode mode = QuantMode::Statistical);

struct ErgodicResult {
  double mean = 0.0;
  double std_error = 0.0;
  int n_ok = 0;
  int n_failed = 0;
  std::vector<double> samples;  // prefactor-scaled sum-SE per successful realization
  std::vector<std::string> failures;
};

ErgodicResult ergodic_se(const NetworkConfig& cfg, const QuantizationPlan& plan,
                         const PrecoderStrategy& strategy, int n_drops, int n_fades,
                         std::uint64_t seed, int threads = 1);

double mean_of(const std::vector<double>& xs);
double std_error_of(const std::vector<double>& xs);

}  // namespace sparsejt

#endif  // SPARSEJT_SE_METRICS_HPP
