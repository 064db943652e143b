// Network-wide precoding vector: blocks f_{l,k} of length N, stacked
// user-major, then RRH, then antenna. Block (l, k) starts at (k L + l) N.

#ifndef SPARSEJT_PRECODER_HPP
#define SPARSEJT_PRECODER_HPP

#include "sparsejt/types.hpp"

#include <vector>

namespace sparsejt {

class StackedPrecoder {
 public:
  StackedPrecoder() = default;
  StackedPrecoder(int L, int N, int K);
  StackedPrecoder(int L, int N, int K, CVec f);

  // blocks[l * K + k] = f_{l,k}
  static StackedPrecoder stack(int L, int N, int K, const std::vector<CVec>& blocks);
  std::vector<CVec> unstack() const;

  int L() const { return L_; }
  int N() const { return N_; }
  int K() const { return K_; }
  int dim() const { return L_ * N_ * K_; }
  int user_dim() const { return L_ * N_; }
  int offset(int l, int k) const { return (k * L_ + l) * N_; }

  const CVec& vec() const { return f_; }
  CVec& vec() { return f_; }

  auto block(int l, int k) { return f_.segment(offset(l, k), N_); }
  auto block(int l, int k) const { return f_.segment(offset(l, k), N_); }
  // f_k, the LN-vector of user k across all RRHs.
  auto user(int k) { return f_.segment(k * L_ * N_, L_ * N_); }
  auto user(int k) const { return f_.segment(k * L_ * N_, L_ * N_); }

  // F_l = [f_{l,1}, ..., f_{l,K}], N x K
  CMat rrh_matrix(int l) const;
  double rrh_power(int l) const;
  RVec rrh_powers() const;
  double squared_norm() const { return f_.squaredNorm(); }

  void scale(double a) { f_ *= a; }

 private:
  int L_ = 0;
  int N_ = 0;
  int K_ = 0;
  CVec f_;
};

}  // namespace sparsejt

#endif  // SPARSEJT_PRECODER_HPP
