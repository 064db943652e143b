// CSI selection/quantization, precoded-signal quantization, and the
// capacity-driven bit allocation for each fronthaul link.

#ifndef SPARSEJT_FRONTHAUL_HPP
#define SPARSEJT_FRONTHAUL_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/net_model.hpp"
#include "sparsejt/rng.hpp"
#include "sparsejt/types.hpp"

#include <utility>
#include <vector>

namespace sparsejt {

struct RrhPlan {
  int U = 0;         // users whose CSI is forwarded
  int B = 0;         // CSI bits per real component
  int B_bar = 0;     // data bits per real component
  double eta = 0.0;  // data quantization noise scale
  double rate_csi = 0.0;
  double rate_data = 0.0;
};

struct QuantizationPlan {
  std::vector<RrhPlan> rrh;

  // sum_l (1 + eta_l)^-1, the relaxed network-wide power budget.
  double power_budget_sum() const;
  double min_rrh_budget() const;
};

// Zero entries mean "derive from capacity".
struct PlanOverride {
  int U = 0;
  int B = 0;
  int B_bar = 0;

  bool empty() const { return U == 0 && B == 0 && B_bar == 0; }
  friend bool operator==(const PlanOverride&, const PlanOverride&) = default;
};

// (pi sqrt(3) / 2) 2^(-2 bits)
double quant_eta(int bits);

int plan_csi_bits(double C, int U, int N);
int plan_csi_users(double C, int B, int N, int K);
int plan_data_bits(double C, int N);

std::pair<double, double> fronthaul_rates(int U, int N, int B, int B_bar);

// Same plan for every RRH. With no override, U = K is used when it leaves at
// least one CSI bit, otherwise the largest feasible U; B and B_bar follow
// from capacity. Overridden fields are taken as given.
QuantizationPlan make_plan(const NetworkConfig& cfg, const PlanOverride& ov = {});

// Indices of the U largest gains, descending, ties to the lower index.
std::vector<int> select_channels(const std::vector<double>& gains, int U);

CMat csi_quant_noise_cov(double beta, const CMat& R, double noise_ratio, int B);

enum class QuantMode {
  Statistical,  // h_bar = h_est + CN(0, Q)
  Uniform,      // clipped uniform mid-rise quantizer, MSE-optimal loading
  Companded,    // uniform quantizer behind a Gaussian compander
};

// The quantizer modes need B to recover each component's variance from Q.
CVec quantize_csi(const CVec& h_est, const CMat& Q, int B, Rng& rng,
                  QuantMode mode = QuantMode::Statistical);

// Scalar quantizers for a real component of standard deviation sigma.
double uniform_quantize(double x, double sigma, int bits);
double companded_quantize(double x, double sigma, int bits);
// Clipping level / sigma minimizing Gaussian MSE of the uniform quantizer.
double uniform_loading_factor(int bits);
// Exact MSE (unit-variance Gaussian input) of the uniform quantizer.
double uniform_quantizer_mse(int bits, double loading);

// V_l = P eta diag(sum_k |f^n_{l,k}|^2), returned as a dense diagonal matrix.
CMat data_quant_noise_cov(const CMat& F_l, double eta, double P);

// Draws channels for every (l, k), selects and quantizes CSI per the plan.
ChannelSet acquire_channels(const Topology& topo, const NetworkConfig& cfg,
                            const QuantizationPlan& plan, Rng& rng,
                            QuantMode mode = QuantMode::Statistical);

}  // namespace sparsejt

#endif  // SPARSEJT_FRONTHAUL_HPP
