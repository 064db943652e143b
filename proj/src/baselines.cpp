#include "sparsejt/baselines.hpp"

#include "sparsejt/se_metrics.hpp"

#include <algorithm>
#include <numeric>

namespace sparsejt {

namespace {

// Indices sorted by descending value, ties to the lower index.
std::vector<int> rank_descending(const RVec& v) {
  std::vector<int> idx(static_cast<size_t>(v.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return v[a] > v[b]; });
  return idx;
}

}  // namespace

CMat regularized_zf(const CMat& H) {
  const Eigen::Index K = H.cols();
  const CMat gram = H.adjoint() * H;
  const double delta = 1e-6 * gram.trace().real() / static_cast<double>(K);
  if (!(delta > 0.0)) throw Error(ErrorCode::RankDeficient, "channel matrix is zero");
  CMat reg = gram;
  reg.diagonal().array() += delta;
  CMat W = H * reg.ldlt().solve(CMat::Identity(K, K));
  for (Eigen::Index k = 0; k < K; ++k) {
    const double n = W.col(k).norm();
    if (n > 0.0) W.col(k) /= n;
  }
  return W;
}

BaselineResult rcc_zf(const CsiKnowledge& csi, const QuantizationPlan& plan,
                      const NetworkConfig& cfg, int S) {
  (void)cfg;
  if (S < 1) throw Error(ErrorCode::InvalidArgument, "S must be >= 1");
  const int s = std::min(S, csi.L);
  const int N = csi.N;

  RVec rrh_gain = RVec::Zero(csi.L);
  for (int l = 0; l < csi.L; ++l) {
    for (int k = 0; k < csi.K; ++k) rrh_gain[l] += csi.h_bar[csi.index(l, k)].squaredNorm();
  }
  std::vector<int> active = rank_descending(rrh_gain);
  active.resize(static_cast<size_t>(s));
  std::sort(active.begin(), active.end());

  RVec user_gain = RVec::Zero(csi.K);
  for (int k = 0; k < csi.K; ++k) {
    for (int l : active) user_gain[k] += csi.h_bar[csi.index(l, k)].squaredNorm();
  }
  std::vector<int> users = rank_descending(user_gain);
  users.resize(static_cast<size_t>(std::min(csi.K, s * N)));
  std::sort(users.begin(), users.end());

  CMat H(s * N, static_cast<Eigen::Index>(users.size()));
  for (size_t j = 0; j < users.size(); ++j) {
    for (int a = 0; a < s; ++a) {
      H.col(static_cast<Eigen::Index>(j)).segment(a * N, N) = csi.h_bar[csi.index(active[a], users[j])];
    }
  }
  const CMat W = regularized_zf(H);

  StackedPrecoder f(csi.L, N, csi.K);
  for (size_t j = 0; j < users.size(); ++j) {
    for (int a = 0; a < s; ++a) {
      f.block(active[a], users[j]) = W.col(static_cast<Eigen::Index>(j)).segment(a * N, N);
    }
  }
  RVec budgets(csi.L);
  for (int l = 0; l < csi.L; ++l) budgets[l] = 1.0 / (1.0 + plan.rrh[l].eta);
  return BaselineResult{project_per_rrh_power(f, budgets), std::move(active), "rcc_zf"};
}

BaselineResult sc_zf(const SolverResult& sparse_jt, const CsiKnowledge& csi,
                     const QuantizationPlan& plan, const NetworkConfig& cfg) {
  (void)cfg;
  const StackedPrecoder& ref = sparse_jt.f;
  if (ref.L() != csi.L || ref.N() != csi.N || ref.K() != csi.K) {
    throw Error(ErrorCode::DimensionMismatch, "sparse-JT precoder does not match channels");
  }
  const int N = csi.N;
  double top = 0.0;
  for (int l = 0; l < csi.L; ++l) {
    for (int k = 0; k < csi.K; ++k) top = std::max(top, ref.block(l, k).squaredNorm());
  }
  if (!(top > 0.0)) throw Error(ErrorCode::EmptySupport, "sparse-JT precoder is zero");

  std::vector<std::vector<int>> support(static_cast<size_t>(csi.K));
  for (int k = 0; k < csi.K; ++k) {
    for (int l = 0; l < csi.L; ++l) {
      if (ref.block(l, k).squaredNorm() > kSupportThreshold * top) support[k].push_back(l);
    }
  }

  // Full channel of all users on the RRHs in one user's support; the regularized
  // pseudo-inverse column for that user nulls interference where it can.
  StackedPrecoder f(csi.L, N, csi.K);
  for (int k = 0; k < csi.K; ++k) {
    const auto& sup = support[k];
    if (sup.empty()) continue;
    const int rows = static_cast<int>(sup.size()) * N;
    CMat H(rows, csi.K);
    for (int i = 0; i < csi.K; ++i) {
      for (size_t a = 0; a < sup.size(); ++a) {
        H.col(i).segment(static_cast<Eigen::Index>(a) * N, N) = csi.h_bar[csi.index(sup[a], i)];
      }
    }
    const CMat gram = H.adjoint() * H;
    const double delta = 1e-6 * gram.trace().real() / csi.K;
    if (!(delta > 0.0)) continue;
    CMat reg = gram;
    reg.diagonal().array() += delta;
    const CVec e = CVec::Unit(csi.K, k);
    CVec w = H * reg.ldlt().solve(e);
    const double n = w.norm();
    if (!(n > 0.0)) continue;
    w /= n;
    for (size_t a = 0; a < sup.size(); ++a) {
      f.block(sup[a], k) = w.segment(static_cast<Eigen::Index>(a) * N, N);
    }
  }
  if (!(f.squared_norm() > 0.0)) throw Error(ErrorCode::EmptySupport, "no user has a usable support");

  RVec budgets(csi.L);
  for (int l = 0; l < csi.L; ++l) budgets[l] = 1.0 / (1.0 + plan.rrh[l].eta);
  BaselineResult out{project_per_rrh_power(f, budgets), {}, "sc_zf"};
  out.active = active_set(out.f, 0.0);
  return out;
}

}  // namespace sparsejt
