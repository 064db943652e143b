#include "sparsejt/precoder.hpp"

#include <utility>

namespace sparsejt {

StackedPrecoder::StackedPrecoder(int L, int N, int K)
    : L_(L), N_(N), K_(K), f_(CVec::Zero(static_cast<Eigen::Index>(L) * N * K)) {}

StackedPrecoder::StackedPrecoder(int L, int N, int K, CVec f)
    : L_(L), N_(N), K_(K), f_(std::move(f)) {
  if (f_.size() != static_cast<Eigen::Index>(L) * N * K) {
    throw Error(ErrorCode::DimensionMismatch, "precoder length must be L*N*K");
  }
}

StackedPrecoder StackedPrecoder::stack(int L, int N, int K, const std::vector<CVec>& blocks) {
  if (static_cast<int>(blocks.size()) != L * K) {
    throw Error(ErrorCode::DimensionMismatch, "expected L*K blocks");
  }
  StackedPrecoder p(L, N, K);
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const CVec& b = blocks[l * K + k];
      if (b.size() != N) throw Error(ErrorCode::DimensionMismatch, "block length must be N");
      p.block(l, k) = b;
    }
  }
  return p;
}

std::vector<CVec> StackedPrecoder::unstack() const {
  std::vector<CVec> blocks(static_cast<size_t>(L_) * K_);
  for (int l = 0; l < L_; ++l) {
    for (int k = 0; k < K_; ++k) blocks[l * K_ + k] = block(l, k);
  }
  return blocks;
}

CMat StackedPrecoder::rrh_matrix(int l) const {
  CMat F(N_, K_);
  for (int k = 0; k < K_; ++k) F.col(k) = block(l, k);
  return F;
}

double StackedPrecoder::rrh_power(int l) const {
  double p = 0.0;
  for (int k = 0; k < K_; ++k) p += block(l, k).squaredNorm();
  return p;
}

RVec StackedPrecoder::rrh_powers() const {
  RVec p(L_);
  for (int l = 0; l < L_; ++l) p[l] = rrh_power(l);
  return p;
}

}  // namespace sparsejt
