#include <doctest.h>

#include "sparsejt/precoder.hpp"
#include "sparsejt/rng.hpp"

using namespace sparsejt;

TEST_CASE("single block is the identity layout") {
  CVec b(1);
  b << cplx(0.3, -0.4);
  const StackedPrecoder f = StackedPrecoder::stack(1, 1, 1, {b});
  CHECK(f.vec() == b);
  CHECK(f.unstack()[0] == b);
}

TEST_CASE("stack then unstack round-trips") {
  Rng rng = substream(1, 2);
  const int L = 3, N = 2, K = 4;
  std::vector<CVec> blocks;
  for (int i = 0; i < L * K; ++i) blocks.push_back(complex_normal_vector(rng, N));
  const StackedPrecoder f = StackedPrecoder::stack(L, N, K, blocks);
  const auto back = f.unstack();
  for (size_t i = 0; i < blocks.size(); ++i) CHECK(back[i] == blocks[i]);
}

TEST_CASE("block (l, k) sits at offset (k L + l) N") {
  const int L = 3, N = 2, K = 4;
  std::vector<CVec> blocks;
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) blocks.push_back(CVec::Constant(N, cplx(l, k)));
  }
  const StackedPrecoder f = StackedPrecoder::stack(L, N, K, blocks);
  for (int l = 0; l < L; ++l) {
    for (int k = 0; k < K; ++k) {
      const int off = (k * L + l) * N;
      CHECK(f.offset(l, k) == off);
      for (int n = 0; n < N; ++n) CHECK(f.vec()[off + n] == cplx(l, k));
    }
  }
  // user(k) is the contiguous run of RRH blocks for that user.
  CHECK(f.user(2)[0] == cplx(0, 2));
  CHECK(f.user(2)[N * (L - 1)] == cplx(L - 1, 2));
}

TEST_CASE("dimension errors") {
  CHECK_THROWS_AS(StackedPrecoder(2, 2, 2, CVec::Zero(7)), Error);
  CHECK_THROWS_AS(StackedPrecoder::stack(2, 2, 2, std::vector<CVec>(3, CVec::Zero(2))), Error);
  CHECK_THROWS_AS(StackedPrecoder::stack(1, 2, 1, {CVec::Zero(3)}), Error);
}

TEST_CASE("per-RRH powers and matrices") {
  Rng rng = substream(2, 2);
  const StackedPrecoder f(3, 2, 2, complex_normal_vector(rng, 12));
  const RVec p = f.rrh_powers();
  CHECK(p.sum() == doctest::Approx(f.squared_norm()));
  for (int l = 0; l < 3; ++l) {
    const CMat F = f.rrh_matrix(l);
    CHECK(F.squaredNorm() == doctest::Approx(p[l]));
    CHECK(F.col(1) == f.block(l, 1));
  }
}
