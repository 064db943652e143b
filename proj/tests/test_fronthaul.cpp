#include <doctest.h>

#include "sparsejt/fronthaul.hpp"
#include "sparsejt/rng.hpp"

#include <cmath>
#include <random>

using namespace sparsejt;

namespace {

// Hand-written reference for the bit formula, no overflow guards needed at these sizes.
int ref_bits(double C, double units) {
  return static_cast<int>(std::floor(0.5 * std::log2(M_PI * std::sqrt(3.0) / 2.0 * (std::exp2(C / units) - 1.0))));
}

double ref_rate_per_coeff(int B) { return std::log2(1.0 + 2.0 / (M_PI * std::sqrt(3.0)) * std::exp2(2.0 * B)); }

double empirical_ratio(QuantMode mode, int bits, int n, std::uint64_t seed) {
  Rng rng = substream(seed, 3);
  std::normal_distribution<double> g(0.0, 2.0);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g(rng);
    const double q = mode == QuantMode::Uniform ? uniform_quantize(x, 2.0, bits) : companded_quantize(x, 2.0, bits);
    acc += (q - x) * (q - x);
  }
  return acc / n / (4.0 * quant_eta(bits));
}

}  // namespace

TEST_CASE("plan_csi_bits reproduces the 300 bits/use tuple") {
  CHECK(plan_csi_bits(300.0, 6, 4) == 6);
  CHECK(plan_csi_bits(300.0, 6, 4) == ref_bits(300.0, 24.0));
}

TEST_CASE("plan_csi_bits grows like C / (2 U N)") {
  const int B = plan_csi_bits(2000.0, 1, 2);
  CHECK(std::abs(B - 2000.0 / 4.0) <= 1.0);
  CHECK(plan_csi_bits(600.0, 2, 3) == ref_bits(600.0, 6.0));
}

TEST_CASE("plan_csi_bits rejects capacities below one bit") {
  CHECK_THROWS_AS(plan_csi_bits(10.0, 6, 4), Error);
  try {
    plan_csi_bits(10.0, 6, 4);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapacityTooSmall);
  }
}

TEST_CASE("plan_csi_users") {
  CHECK(300.0 / (4.0 * ref_rate_per_coeff(6)) == doctest::Approx(7.1).epsilon(0.01));
  CHECK(plan_csi_users(300.0, 6, 4, 12) == 7);
  CHECK(plan_csi_users(300.0, 6, 4, 5) == 5);
  CHECK(plan_csi_users(1e4, 2, 1, 1) == 1);
  CHECK_THROWS_AS(plan_csi_users(300.0, 60, 4, 12), Error);
}

TEST_CASE("plan_data_bits") {
  CHECK(plan_data_bits(300.0, 4) == 38);
  CHECK(plan_data_bits(8.0, 4) == 1);
  CHECK(plan_data_bits(300.0, 8) < plan_data_bits(300.0, 4));
  CHECK_THROWS_AS(plan_data_bits(1.0, 4), Error);
}

TEST_CASE("planned rates never exceed capacity") {
  for (double C = 20.0; C <= 600.0; C += 7.0) {
    for (int N : {1, 2, 4}) {
      const int B_bar = plan_data_bits(C, N);
      CHECK(fronthaul_rates(1, N, 1, B_bar).second <= C + 1e-9);
      for (int U = 1; U <= 12; ++U) {
        int B = 0;
        try {
          B = plan_csi_bits(C, U, N);
        } catch (const Error&) {
          continue;
        }
        CHECK(fronthaul_rates(U, N, B, B_bar).first <= C + 1e-9);
      }
      for (int B = 1; B <= 8; ++B) {
        try {
          const int U = plan_csi_users(C, B, N, 12);
          CHECK(fronthaul_rates(U, N, B, B_bar).first <= C + 1e-9);
        } catch (const Error&) {
        }
      }
    }
  }
}

TEST_CASE("fronthaul rates against the high-resolution approximation") {
  const auto [csi, data] = fronthaul_rates(6, 4, 6, 12);
  CHECK(csi == doctest::Approx(253.4).epsilon(5e-4));
  CHECK(std::abs(csi - 24.0 * (12.0 - 1.444)) < 0.2);
  CHECK(data == doctest::Approx(4.0 * std::log2(1.0 + 1.0 / quant_eta(12))).epsilon(1e-12));
  const double zero_bits = fronthaul_rates(6, 4, 0, 12).first;
  CHECK(zero_bits / 24.0 == doctest::Approx(0.452).epsilon(2e-3));
}

TEST_CASE("select_channels orders by descending gain with low-index ties") {
  CHECK(select_channels({3.0, 1.0, 2.0}, 2) == std::vector<int>{0, 2});
  CHECK(select_channels({1.0, 1.0, 1.0}, 2) == std::vector<int>{0, 1});
  CHECK(select_channels({0.5, 4.0, 2.0, 3.0}, 4) == std::vector<int>{1, 3, 2, 0});
  CHECK_THROWS_AS(select_channels({1.0}, 2), Error);
}

TEST_CASE("CSI quantization covariance") {
  const CMat R = CMat::Identity(1, 1);
  const CMat Q = csi_quant_noise_cov(1.0, R, 0.1, 6);
  CHECK(Q(0, 0).real() == doctest::Approx(2.7207 * std::exp2(-12) * (1.0 / 1.1)).epsilon(1e-4));
  CHECK(Q(0, 0).real() == doctest::Approx(6.04e-4).epsilon(2e-3));

  const CMat R3 = spatial_covariance(3, 0.7);
  const CMat Q5 = csi_quant_noise_cov(2.0, R3, 0.2, 5);
  const CMat Q6 = csi_quant_noise_cov(2.0, R3, 0.2, 6);
  CHECK((Q5 - 4.0 * Q6).norm() < 1e-15 * Q5.norm() + 1e-300);
  CHECK(Q6(0, 1) == cplx(0.0, 0.0));
  CHECK(csi_quant_noise_cov(2.0, R3, 0.2, 40).norm() < 1e-20);
}

TEST_CASE("statistical quantization with zero covariance is the identity") {
  Rng rng = substream(1, 1);
  CVec h(2);
  h << cplx(1.0, 2.0), cplx(-0.5, 0.25);
  CHECK(quantize_csi(h, CMat::Zero(2, 2), 6, rng) == h);
}

TEST_CASE("statistical quantization noise has covariance Q") {
  Rng rng = substream(2, 2);
  CMat Q = CMat::Zero(2, 2);
  Q(0, 0) = 0.3;
  Q(1, 1) = 0.05;
  const CVec h = CVec::Zero(2);
  RVec acc = RVec::Zero(2);
  const int n = 100000;
  for (int i = 0; i < n; ++i) acc += quantize_csi(h, Q, 6, rng).cwiseAbs2();
  acc /= n;
  CHECK(acc[0] == doctest::Approx(0.3).epsilon(0.02));
  CHECK(acc[1] == doctest::Approx(0.05).epsilon(0.02));
}

TEST_CASE("uniform quantizer closed-form MSE matches simulation") {
  for (int bits : {2, 4, 6}) {
    const double load = uniform_loading_factor(bits);
    Rng rng = substream(4, static_cast<std::uint64_t>(bits));
    std::normal_distribution<double> g(0.0, 1.0);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double x = g(rng);
      const double q = uniform_quantize(x, 1.0, bits);
      acc += (q - x) * (q - x);
    }
    CHECK(acc / n == doctest::Approx(uniform_quantizer_mse(bits, load)).epsilon(0.03));
  }
}

TEST_CASE("uniform loading factor minimizes the MSE") {
  for (int bits : {3, 6, 8}) {
    const double a = uniform_loading_factor(bits);
    const double best = uniform_quantizer_mse(bits, a);
    CHECK(best <= uniform_quantizer_mse(bits, a * 1.02));
    CHECK(best <= uniform_quantizer_mse(bits, a * 0.98));
  }
}

TEST_CASE("companded quantizer follows the high-resolution variance model") {
  for (int bits : {6, 8}) CHECK(std::abs(empirical_ratio(QuantMode::Companded, bits, 100000, 8) - 1.0) < 0.15);
}

TEST_CASE("uniform quantizer sits far from the variance model at 6 and 8 bits") {
  // Documented behaviour, see the README: the model is the companded one.
  CHECK(empirical_ratio(QuantMode::Uniform, 6, 100000, 8) > 1.3);
  CHECK(empirical_ratio(QuantMode::Uniform, 8, 100000, 8) > 1.6);
}

TEST_CASE("data quantization covariance") {
  CHECK(data_quant_noise_cov(CMat::Zero(3, 2), 0.1, 5.0).norm() == 0.0);

  CMat F(1, 2);
  F << std::sqrt(0.3), cplx(0.0, std::sqrt(0.2));
  CHECK(data_quant_noise_cov(F, 0.01, 1.0)(0, 0).real() == doctest::Approx(0.005).epsilon(1e-12));

  Rng rng = substream(6, 0);
  const CMat G = Eigen::Map<const CMat>(complex_normal_vector(rng, 12).data(), 4, 3);
  const CMat V = data_quant_noise_cov(G, 0.02, 3.0);
  CHECK(V.trace().real() == doctest::Approx(3.0 * 0.02 * G.squaredNorm()).epsilon(1e-12));
  CHECK(V(0, 1) == cplx(0.0, 0.0));
  CHECK_THROWS_AS(data_quant_noise_cov(G, -1.0, 1.0), Error);
}

TEST_CASE("make_plan") {
  NetworkConfig cfg;
  const QuantizationPlan p = make_plan(cfg);
  REQUIRE(p.rrh.size() == 30);
  CHECK(p.rrh[0].U == 12);
  CHECK(p.rrh[0].B == plan_csi_bits(300.0, 12, 4));
  CHECK(p.rrh[0].B_bar == 38);
  CHECK(p.rrh[0].eta == doctest::Approx(quant_eta(38)));
  CHECK(p.power_budget_sum() == doctest::Approx(30.0 / (1.0 + quant_eta(38))));

  const QuantizationPlan q = make_plan(cfg, PlanOverride{6, 6, 12});
  CHECK(q.rrh[0].U == 6);
  CHECK(q.rrh[0].B == 6);
  CHECK(q.rrh[0].B_bar == 12);
  CHECK(q.min_rrh_budget() == doctest::Approx(1.0 / (1.0 + quant_eta(12))));

  cfg.C_bits_per_use = 20.0;
  const QuantizationPlan r = make_plan(cfg);
  CHECK(r.rrh[0].U < 12);
  CHECK(r.rrh[0].B >= 1);
}
