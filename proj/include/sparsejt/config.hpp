// Scenario parameters for a downlink C-RAN with finite-capacity fronthaul.

#ifndef SPARSEJT_CONFIG_HPP
#define SPARSEJT_CONFIG_HPP

#include <cstdint>

namespace sparsejt {

struct NetworkConfig {
  int L = 30;  // RRHs
  int N = 4;   // antennas per RRH
  int K = 12;  // single-antenna users
  double area_m = 2000.0;
  double P_dbm = 40.0;
  double noise_dbm = -113.0;  // thermal noise over the full bandwidth
  double bandwidth_hz = 10e6;
  double carrier_mhz = 2000.0;
  double h_rrh_m = 32.0;
  double h_user_m = 1.5;
  int tau = 12;  // uplink pilot length, >= K
  double p_ul_dbm = 23.0;
  int tau_u = 0;
  int tau_d = 0;
  int tau_c = 200;
  double C_bits_per_use = 300.0;
  int S = 6;
  double epsilon_sparse = 1e-2;
  double corr_r = 0.5;
  std::uint64_t seed = 1;

  // Throws Error(ConfigError) naming the first violated invariant.
  void validate() const;

  double tx_power_w() const;
  double noise_w() const;
  double pilot_power_w() const;
  // sigma^2 / (tau * p_ul), the effective pilot-domain noise level.
  double pilot_noise_ratio() const;
  // (1 - (tau_u + tau_d) / tau_c)
  double training_prefactor() const;

  friend bool operator==(const NetworkConfig&, const NetworkConfig&) = default;
};

// Fronthaul rate in bits/s normalized to bits per channel use.
inline double capacity_bits_per_use(double capacity_bps, double bandwidth_hz) {
  return capacity_bps / bandwidth_hz;
}

}  // namespace sparsejt

#endif  // SPARSEJT_CONFIG_HPP
