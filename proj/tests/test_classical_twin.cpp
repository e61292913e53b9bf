#include "catch_amalgamated.hpp"

#include <random>

#include "oqho/classical_twin.hpp"
#include "oqho/quadrature.hpp"
#include "oqho/random_model.hpp"
#include "test_support.hpp"

using namespace oqho;
using testing::code_of;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("augmented invariant covariance reproduces P + i Theta") {
  std::mt19937_64 rng(51);
  const OqhoModel m = random_model(rng, 4, 2, 0.2);
  const CovarianceKernel k(m);
  const Mat c = invariant_classical_cov(k);
  const Eigen::Index n = 4;
  // E(zeta zeta^*) = Cxx + Cyy + i (Cyx - Cxy)
  const Mat re = c.topLeftCorner(n, n) + c.bottomRightCorner(n, n);
  const Mat im = c.bottomLeftCorner(n, n) - c.topRightCorner(n, n);
  CHECK((re - k.P()).norm() < 1e-14);
  CHECK((im - m.Theta).norm() < 1e-14);
  CHECK(min_eigenvalue_hermitian(c) > -1e-12);
}

TEST_CASE("exact step noise is the integrated diffusion") {
  std::mt19937_64 rng(52);
  const OqhoModel m = random_model(rng, 2, 2, 0.2);
  const double h = 0.3;
  const AugmentedStepper st = make_stepper(m, h);
  CHECK((st.Phi() * st.P_aug() * st.Phi().transpose() + st.noise_cov() - st.P_aug()).norm() < 1e-14);
  CHECK((st.noise_chol() * st.noise_chol().transpose() - st.noise_cov()).norm() < 1e-13);
  // noise = int_0^h e^{sA} Q e^{sA^T} ds with Q the diffusion of the augmented OU process
  Mat aa = Mat::Zero(4, 4);
  aa.topLeftCorner(2, 2) = m.A;
  aa.bottomRightCorner(2, 2) = m.A;
  const Mat q = -(aa * st.P_aug() + st.P_aug() * aa.transpose());
  const Mat oracle = integrate_line(
      [&](double s) -> Mat {
        const Mat e = expm(aa, s);
        return e * q * e.transpose();
      },
      0.0, h, QuadratureSpec{1e-14, 1e-13});
  CHECK((oracle - st.noise_cov()).norm() < 1e-12);
}

TEST_CASE("simulation is deterministic in the seed") {
  const OqhoModel m = testing::model_of(tiny_example());
  const TrajectoryBatch a = simulate(m, 0.1, 20, 50, 9);
  const TrajectoryBatch b = simulate(m, 0.1, 20, 50, 9);
  const TrajectoryBatch c = simulate(m, 0.1, 20, 50, 10);
  CHECK(a.recorded == std::vector<long>{0, 20});
  CHECK((a.at(20) - b.at(20)).norm() == 0.0);
  CHECK((a.at(20) - c.at(20)).norm() > 0.0);
  CHECK(path_seed(1, 0) != path_seed(1, 1));
  CHECK(code_of([&] { a.at(5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("noiseless stepper follows the matrix exponential") {
  // B = 0: the augmented state just decays
  Mat a(2, 2);
  a << -0.5, 1.0, -1.0, -0.5;
  const AugmentedStepper st(a, Mat::Zero(4, 4), 0.25);
  CHECK(st.noise_chol().norm() == 0.0);
  Mat x0(4, 3);
  x0.setRandom();
  const TrajectoryBatch b = simulate(st, x0, 8, 3, 1, {8});
  const Mat e = expm(a, 2.0);
  Mat expect(4, 3);
  expect.topRows(2) = e * x0.topRows(2);
  expect.bottomRows(2) = e * x0.bottomRows(2);
  CHECK((b.at(8) - expect).norm() < 1e-13);
  CHECK(code_of([&] { simulate(st, Mat::Zero(4, 2), 8, 3, 1); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { AugmentedStepper(a, Mat::Zero(4, 4), 0.0); }) == ErrorCode::StepperConstructionFailure);
}

TEST_CASE("quadratic form variance: classical twin against Monte Carlo") {
  const Fixture f = tiny_example();
  const OqhoModel m = testing::model_of(f);
  CHECK_THAT(classical_quadform_variance(m, f.Pi), WithinRel(1.0, 1e-14));
  CHECK_THAT(quantum_quadform_variance(m, f.Pi), WithinAbs(0.0, 1e-15));
  const TrajectoryBatch b = simulate(m, 0.1, 10, 20000, 3, {5, 10});
  const McEstimate est = mc_quadform_variance(b, f.Pi, 10);
  CHECK(std::abs(est.value - 1.0) < 4.0 * est.std_error);

  const StationaryStats st = mc_stationary_stats(b, 5);
  const CMat target = CovarianceKernel(m).steady().quantum_cov;
  CHECK(((st.cov0.value - target).real().cwiseAbs().array() < 4.0 * st.cov0.std_error_re.array() + 1e-12).all());
  CHECK(((st.cov0.value - target).imag().cwiseAbs().array() < 4.0 * st.cov0.std_error_im.array() + 1e-12).all());

  const TrajectoryBatch few = simulate(m, 0.1, 2, 50, 3);
  CHECK(code_of([&] { mc_quadform_variance(few, f.Pi, 2); }) == ErrorCode::InsufficientPaths);
  CHECK(code_of([&] { mc_stationary_stats(few, 1); }) == ErrorCode::InsufficientPaths);
}

TEST_CASE("tiny spectral supremum and log-det rates") {
  const Fixture f = tiny_example();
  const OqhoModel m = testing::model_of(f);
  CHECK_THAT(classical_spectral_sup(m, f.Pi), WithinRel(2.0, 1e-10));
  for (double th : {0.05, 0.1, 0.3}) {
    const double sde = 1.0 - std::sqrt(1.0 - 2.0 * th);
    CHECK_THAT(classical_rs_rate_sde(m, f.Pi, th), WithinRel(sde, 1e-8));
    CHECK_THAT(classical_rs_rate_half(m, f.Pi, th), WithinRel(0.5 * sde, 1e-8));
  }
  CHECK(classical_rs_rate_sde(m, f.Pi, 0.0) == 0.0);
  CHECK(code_of([&] { classical_rs_rate_sde(m, f.Pi, 0.6); }) == ErrorCode::ThetaOutOfRange);
}

TEST_CASE("log-det series converges to the exact rate") {
  std::mt19937_64 rng(53);
  const OqhoModel m = random_model(rng, 4, 2, 0.3);
  const Mat Pi = random_psd(rng, 4);
  const double th = 0.25 / classical_spectral_sup(m, Pi);
  const double exact = classical_rs_rate_half(m, Pi, th);
  const double s1 = classical_rs_rate_series(m, Pi, th, 1);
  const double s30 = classical_rs_rate_series(m, Pi, th, 30);
  CHECK(s1 < exact);
  CHECK_THAT(s30, WithinRel(exact, 1e-8));
}

TEST_CASE("risk-sensitive Monte Carlo input checks") {
  const Fixture f = tiny_example();
  const OqhoModel m = testing::model_of(f);
  CHECK(code_of([&] { mc_rs_rate(m, f.Pi, 0.1, 1.0, 50, 1); }) == ErrorCode::InsufficientPaths);
  CHECK(code_of([&] { mc_rs_rate(m, f.Pi, 0.1, 0.0, 500, 1); }) == ErrorCode::NegativeTime);
  CHECK(code_of([&] { mc_rs_rate(m, f.Pi, -0.1, 1.0, 500, 1); }) == ErrorCode::NegativeTheta);
  CHECK(mc_rs_rate(m, f.Pi, 0.0, 1.0, 500, 1).rate.value == 0.0);
  const RsRateEstimate a = mc_rs_rate(m, f.Pi, 0.1, 4.0, 2000, 5);
  const RsRateEstimate b = mc_rs_rate(m, f.Pi, 0.1, 4.0, 2000, 5);
  CHECK(a.rate.value == b.rate.value);
  CHECK(a.rate.std_error > 0);
}
