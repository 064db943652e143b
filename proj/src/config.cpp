#include "sparsejt/config.hpp"

#include "sparsejt/types.hpp"

#include <string>

namespace sparsejt {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::CapacityTooSmall: return "CapacityTooSmall";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NotStationary: return "NotStationary";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::ConfigError, what);
}

}  // namespace

void NetworkConfig::validate() const {
  require(L >= 1, "L must be >= 1");
  require(N >= 1, "N must be >= 1");
  require(K >= 1, "K must be >= 1");
  require(S >= 1 && S <= L, "S must lie in [1, L]");
  require(corr_r >= 0.0 && corr_r < 1.0, "corr_r must lie in [0, 1)");
  require(tau >= K, "tau must be >= K");
  require(epsilon_sparse > 0.0, "epsilon_sparse must be > 0");
  require(area_m >= 0.0, "area_m must be >= 0");
  require(bandwidth_hz > 0.0, "bandwidth_hz must be > 0");
  require(carrier_mhz > 0.0, "carrier_mhz must be > 0");
  require(h_rrh_m > 0.0 && h_user_m > 0.0, "antenna heights must be > 0");
  require(C_bits_per_use > 0.0, "C_bits_per_use must be > 0");
  require(tau_u >= 0 && tau_d >= 0 && tau_c >= 1, "training lengths must be nonnegative, tau_c >= 1");
  require(tau_u + tau_d < tau_c, "training overhead must be shorter than the coherence block");
}

double NetworkConfig::tx_power_w() const { return dbm_to_watt(P_dbm); }
double NetworkConfig::noise_w() const { return dbm_to_watt(noise_dbm); }
double NetworkConfig::pilot_power_w() const { return dbm_to_watt(p_ul_dbm); }

double NetworkConfig::pilot_noise_ratio() const {
  return noise_w() / (static_cast<double>(tau) * pilot_power_w());
}

double NetworkConfig::training_prefactor() const {
  return 1.0 - static_cast<double>(tau_u + tau_d) / static_cast<double>(tau_c);
}

}  // namespace sparsejt
