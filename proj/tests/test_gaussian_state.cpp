#include "catch_amalgamated.hpp"

#include <random>

#include "oqho/gaussian_state.hpp"
#include "oqho/quadrature.hpp"
#include "oqho/random_model.hpp"
#include "test_support.hpp"

using namespace oqho;
using testing::code_of;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

OqhoModel stable_model(std::uint64_t seed, Eigen::Index n = 4, Eigen::Index m = 2) {
  std::mt19937_64 rng(seed);
  return random_model(rng, n, m, 0.2);
}

// Steady multipoint QCF built by folding the last point into the previous one.
double qcf_recurrence(const CovarianceKernel& k, std::vector<double> t, std::vector<Vec> v) {
  double log_phi = 0;
  while (t.size() > 1) {
    const double dt = t.back() - t[t.size() - 2];
    const Vec vn = v.back();
    log_phi -= 0.5 * vn.dot(k.Sigma(dt) * vn);
    v[v.size() - 2] += expm(k.model().A, dt).transpose() * vn;
    t.pop_back();
    v.pop_back();
  }
  return std::exp(log_phi - 0.5 * v[0].dot(k.P() * v[0]));
}

}  // namespace

TEST_CASE("tiny steady state") {
  const CovarianceKernel k(testing::model_of(tiny_example()));
  CHECK((k.P() - 0.5 * Mat::Identity(2, 2)).norm() < 1e-15);
  // P + i Theta is exactly singular here: the vacuum
  CHECK_THAT(k.steady().min_eig, WithinAbs(0.0, 1e-14));
  CHECK((k.V(0.7) - 0.5 * std::exp(-0.7) * Mat::Identity(2, 2)).norm() < 1e-15);
  CHECK((k.Lambda(0.7) - 0.5 * std::exp(-0.7) * block_J(2)).norm() < 1e-15);
  CHECK((k.Sigma(1.3) - 0.5 * (1 - std::exp(-2.6)) * Mat::Identity(2, 2)).norm() < 1e-15);
}

TEST_CASE("finite-horizon Gramian equals its defining integral") {
  const OqhoModel m = stable_model(21);
  const Mat bb = m.B * m.B.transpose();
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-13;
  for (double t : {0.3, 2.0, 7.5}) {
    const Mat oracle = integrate_line(
        [&](double s) -> Mat {
          const Mat e = expm(m.A, s);
          return e * bb * e.transpose();
        },
        0.0, t, spec);
    CHECK((gramian_finite(m, t) - oracle).cwiseAbs().maxCoeff() < 1e-10 * oracle.norm());
  }
  CHECK(gramian_finite(m, 0.0).norm() == 0.0);
  CHECK(code_of([&] { gramian_finite(m, -1.0); }) == ErrorCode::NegativeTime);
}

TEST_CASE("steady covariance kernel symmetries") {
  const CovarianceKernel k(stable_model(22));
  const Mat theta = k.model().Theta;
  CHECK((k.S(0.0) - (k.P().cast<cplx>() + cplx(0, 1) * theta.cast<cplx>())).norm() < 1e-14);
  for (double tau : {0.1, 0.9, 3.0}) {
    // S(-tau) = S(tau)^*, i.e. V(-tau) = V(tau)^T and Lambda(-tau) = -Lambda(tau)^T
    CHECK((k.S(-tau) - k.S(tau).adjoint()).norm() < 1e-13);
    CHECK((k.C(tau, 0.4) - k.C(0.4, tau).transpose()).norm() == 0.0);
  }
  // C(s, s) = Sigma(s)
  CHECK((k.C(1.1, 1.1) - k.Sigma(1.1)).norm() < 1e-15);
}

TEST_CASE("spectral density integrates to the steady covariance") {
  const OqhoModel m = stable_model(23);
  const CovarianceKernel k(m);
  const SpectralDensity sd(m);
  // (1/2pi) int D(lambda) dlambda = P + i Theta
  QuadratureSpec spec;
  spec.abs_tol = 1e-11;
  spec.rel_tol = 1e-11;
  spec.tail = TailHint{TailHint::Kind::Algebraic, 10.0 * (m.B.norm() * m.B.norm()), 2.0, 10.0 * m.A.norm()};
  const CMat total = integrate_realline([&](double l) -> CMat { return sd.D(l); }, spec) / (2 * std::numbers::pi);
  CHECK((total - k.steady().quantum_cov).norm() < 1e-8);
  for (double l : {-2.0, 0.0, 0.5}) {
    const CMat d = sd.D(l);
    CHECK((d - d.adjoint()).norm() < 1e-13 * d.norm());
    CHECK(min_eigenvalue_hermitian(d) > -1e-12 * d.norm());
    CHECK((sd.D_flip(l) - sd.D(-l).transpose()).norm() < 1e-13 * d.norm());
    const auto [dp, df] = sd.D_pair(l);
    CHECK((dp - d).norm() == 0.0);
    CHECK((df - sd.D_flip(l)).norm() == 0.0);
  }
}

TEST_CASE("one-point QCF forgets its initial state") {
  const OqhoModel m = testing::model_of(tiny_example());
  Vec u(2);
  u << 0.6, -1.1;
  const Mat thermal = 2.0 * Mat::Identity(2, 2);
  // the propagation split point s does not matter
  const cplx a = qcf_onepoint(m, thermal, 0.0, 1.5, u);
  const cplx b = qcf_onepoint(m, thermal, 0.9, 1.5, u);
  CHECK_THAT(std::abs(a - b), WithinAbs(0.0, 1e-15));
  // closed form for A = -I: covariance P + e^{-2t}(P0 - P)
  const double var = 0.5 + std::exp(-3.0) * 1.5;
  CHECK_THAT(a.real(), WithinRel(std::exp(-0.5 * var * u.squaredNorm()), 1e-14));
  CHECK_THAT(qcf_onepoint(m, thermal, 0.0, 0.0, u).real(), WithinRel(std::exp(-u.squaredNorm()), 1e-14));
  CHECK_THAT(qcf_onepoint(m, thermal, 0.0, 60.0, u).real(), WithinRel(std::exp(-0.25 * u.squaredNorm()), 1e-14));
}

TEST_CASE("one-point QCF validates the initial state") {
  const OqhoModel m = testing::model_of(tiny_example());
  const Vec u = Vec::Ones(2);
  CHECK(code_of([&] { qcf_onepoint(m, 0.1 * Mat::Identity(2, 2), 0, 1, u); }) == ErrorCode::InvalidInitialState);
  Mat asym = Mat::Identity(2, 2);
  asym(0, 1) = 0.3;
  CHECK(code_of([&] { qcf_onepoint(m, asym, 0, 1, u); }) == ErrorCode::InvalidInitialState);
  CHECK(code_of([&] { qcf_onepoint(m, Mat::Identity(2, 2), 1, 0.5, u); }) == ErrorCode::NegativeTime);
}

TEST_CASE("multipoint QCF matches the fold recurrence") {
  const CovarianceKernel k(stable_model(24));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const std::vector<double> t{0.0, 0.25, 0.25, 1.0, 3.5};
  std::vector<Vec> v;
  for (std::size_t j = 0; j < t.size(); ++j) v.push_back(Vec::NullaryExpr(4, [&] { return 0.4 * g(rng); }));
  const cplx phi = qcf_multipoint_steady(k, t, v);
  CHECK(phi.imag() == 0.0);
  CHECK(phi.real() <= 1.0);
  CHECK_THAT(phi.real(), WithinRel(qcf_recurrence(k, t, v), 1e-12));
}

TEST_CASE("coincident times merge their vectors") {
  const CovarianceKernel k(stable_model(25));
  Vec a(4), b(4);
  a << 0.3, -0.2, 0.5, 0.1;
  b << -0.4, 0.6, 0.0, 0.2;
  const cplx two = qcf_multipoint_steady(k, {1.0, 1.0}, {a, b});
  const cplx one = qcf_multipoint_steady(k, {1.0}, {Vec(a + b)});
  CHECK_THAT(two.real(), WithinRel(one.real(), 1e-14));
  CHECK(code_of([&] { qcf_multipoint_steady(k, {1.0, 0.5}, {a, b}); }) == ErrorCode::UnsortedTimes);
  CHECK(code_of([&] { qcf_multipoint_steady(k, {1.0}, {a, b}); }) == ErrorCode::DimensionMismatch);
}
