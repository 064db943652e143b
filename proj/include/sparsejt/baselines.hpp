// Zero-forcing comparison schemes: RRH-centric clustering (RCC-ZF) and
// ZF restricted to the support found by the sparse-JT solver (SC-ZF).

#ifndef SPARSEJT_BASELINES_HPP
#define SPARSEJT_BASELINES_HPP

#include "sparsejt/config.hpp"
#include "sparsejt/fronthaul.hpp"
#include "sparsejt/net_model.hpp"
#include "sparsejt/precoder.hpp"
#include "sparsejt/solver.hpp"

#include <string>
#include <vector>

namespace sparsejt {

struct BaselineResult {
  StackedPrecoder f;
  std::vector<int> active;
  std::string scheme;
};

// Regularized ZF on the columns of H (rows are the transmit antennas in use),
// delta = 1e-6 trace(H^H H) / K, each column scaled to unit norm.
CMat regularized_zf(const CMat& H);

BaselineResult rcc_zf(const CsiKnowledge& csi, const QuantizationPlan& plan,
                      const NetworkConfig& cfg, int S);

inline constexpr double kSupportThreshold = 1e-3;

BaselineResult sc_zf(const SolverResult& sparse_jt, const CsiKnowledge& csi,
                     const QuantizationPlan& plan, const NetworkConfig& cfg);

}  // namespace sparsejt

#endif  // SPARSEJT_BASELINES_HPP
