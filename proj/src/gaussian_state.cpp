#include "oqho/gaussian_state.hpp"

#include <cmath>

namespace oqho {

namespace {

void require_nonnegative(double t, const char* what) {
  if (!(t >= 0)) throw Error(ErrorCode::NegativeTime, what);
}

}  // namespace

Mat steady_gramian(const Mat& A, const Mat& B) {
  if (B.rows() != A.rows()) throw Error(ErrorCode::DimensionMismatch, "B must have n rows");
  Mat P = lyap_solve(A, (B * B.transpose()).eval());
  return 0.5 * (P + P.transpose());
}

SteadyState gramian_steady(const OqhoModel& model) {
  require_hurwitz(model);
  SteadyState st;
  const Mat Q = model.B * model.B.transpose();
  st.P = steady_gramian(model.A, model.B);
  st.residual = lyap_residual(model.A, st.P, Q);
  st.quantum_cov = st.P.cast<cplx>() + cplx(0, 1) * model.Theta.cast<cplx>();
  st.min_eig = min_eigenvalue_hermitian(st.quantum_cov);
  if (st.residual > 1e-10) throw Error(ErrorCode::IllConditioned, "steady Gramian residual above 1e-10");
  if (st.min_eig < -1e-8 * std::max(1.0, opnorm2(st.P)))
    throw Error(ErrorCode::NotPsd, "P + i Theta is not positive semidefinite");
  return st;
}

CovarianceKernel::CovarianceKernel(const OqhoModel& model) : model_(model), steady_(gramian_steady(model)) {}

CovarianceKernel::CovarianceKernel(const OqhoModel& model, SteadyState steady)
    : model_(model), steady_(std::move(steady)) {}

Mat CovarianceKernel::V(double tau) const {
  if (tau >= 0) return expm(model_.A, tau) * steady_.P;
  return steady_.P * expm(model_.A, -tau).transpose();
}

Mat CovarianceKernel::Lambda(double tau) const {
  if (tau >= 0) return expm(model_.A, tau) * model_.Theta;
  return model_.Theta * expm(model_.A, -tau).transpose();
}

KernelValue CovarianceKernel::at(double tau) const {
  const Mat E = expm(model_.A, std::abs(tau));
  KernelValue k;
  if (tau >= 0) {
    k.V = E * steady_.P;
    k.Lambda = E * model_.Theta;
  } else {
    k.V = steady_.P * E.transpose();
    k.Lambda = model_.Theta * E.transpose();
  }
  k.S = k.V.cast<cplx>() + cplx(0, 1) * k.Lambda.cast<cplx>();
  return k;
}

CMat CovarianceKernel::S(double tau) const { return at(tau).S; }

Mat CovarianceKernel::Sigma(double t) const {
  require_nonnegative(t, "Sigma(t) needs t >= 0");
  if (t == 0) return Mat::Zero(model_.n(), model_.n());
  const Mat E = expm(model_.A, t);
  Mat s = steady_.P - E * steady_.P * E.transpose();
  return 0.5 * (s + s.transpose());
}

Mat CovarianceKernel::C(double s, double tau) const {
  require_nonnegative(s, "C(s, tau) needs s >= 0");
  require_nonnegative(tau, "C(s, tau) needs tau >= 0");
  if (s < tau) return C(tau, s).transpose();
  return expm(model_.A, s - tau) * Sigma(tau);
}

KernelValue kernel_at(const OqhoModel& model, double tau) { return CovarianceKernel(model).at(tau); }

Mat gramian_finite(const OqhoModel& model, double t) {
  require_nonnegative(t, "gramian_finite needs t >= 0");
  return CovarianceKernel(model).Sigma(t);
}

Mat two_point_C(const OqhoModel& model, double s, double tau) { return CovarianceKernel(model).C(s, tau); }

SpectralDensity::SpectralDensity(const OqhoModel& model)
    : A_(model.A), B_(model.B.cast<cplx>()), omega_(model.Omega), omega_conj_(model.Omega.conjugate()) {
  require_hurwitz(model);
}

CMat SpectralDensity::G(cplx s) const {
  const Eigen::Index n = A_.rows();
  CMat lhs = s * CMat::Identity(n, n) - A_.cast<cplx>();
  CMat g = lhs.partialPivLu().solve(B_);
  if (!g.allFinite()) throw Error(ErrorCode::LinearSolveFailure, "resolvent solve produced non-finite values");
  return g;
}

CMat SpectralDensity::D(double lambda) const {
  const CMat g = G(cplx(0, lambda));
  return g * omega_ * g.adjoint();
}

// D(-lambda) = conj(G) Omega G^T, so its transpose is G conj(Omega) G^*.
CMat SpectralDensity::D_flip(double lambda) const {
  const CMat g = G(cplx(0, lambda));
  return g * omega_conj_ * g.adjoint();
}

std::pair<CMat, CMat> SpectralDensity::D_pair(double lambda) const {
  const CMat g = G(cplx(0, lambda));
  return {g * omega_ * g.adjoint(), g * omega_conj_ * g.adjoint()};
}

CMat transfer_G(const OqhoModel& model, cplx s) { return SpectralDensity(model).G(s); }
CMat spectral_D(const OqhoModel& model, double lambda) { return SpectralDensity(model).D(lambda); }

cplx qcf_onepoint(const OqhoModel& model, const Mat& P0, double s, double t, const Vec& u) {
  require_nonnegative(s, "qcf_onepoint needs s >= 0");
  if (!(t >= s)) throw Error(ErrorCode::NegativeTime, "qcf_onepoint needs t >= s");
  const Eigen::Index n = model.n();
  if (P0.rows() != n || P0.cols() != n || u.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "qcf_onepoint: P0 must be n x n and u of length n");
  if ((P0 - P0.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, P0.cwiseAbs().maxCoeff()))
    throw Error(ErrorCode::InvalidInitialState, "P0 is not symmetric");
  const CMat q0 = P0.cast<cplx>() + cplx(0, 1) * model.Theta.cast<cplx>();
  if (min_eigenvalue_hermitian(q0) < -1e-8 * std::max(1.0, opnorm2(P0)))
    throw Error(ErrorCode::InvalidInitialState, "P0 + i Theta violates the uncertainty relation");

  const CovarianceKernel k(model);
  // covariance at time s: P + e^{sA}(P0 - P)e^{sA^T}
  const Mat Es = expm(model.A, s);
  const Mat Ps = k.P() + Es * (P0 - k.P()) * Es.transpose();
  const Vec w = expm(model.A, t - s).transpose() * u;
  const double expo = w.dot(Ps * w) + u.dot(k.Sigma(t - s) * u);
  return cplx(std::exp(-0.5 * expo), 0.0);
}

cplx qcf_multipoint_steady(const CovarianceKernel& kernel, const std::vector<double>& times,
                           const std::vector<Vec>& vectors) {
  const std::size_t N = times.size();
  if (N == 0 || vectors.size() != N) throw Error(ErrorCode::DimensionMismatch, "one vector per time point");
  const Eigen::Index n = kernel.model().n();
  for (std::size_t j = 0; j < N; ++j) {
    if (vectors[j].size() != n) throw Error(ErrorCode::DimensionMismatch, "vectors must have length n");
    if (j > 0 && times[j] < times[j - 1]) throw Error(ErrorCode::UnsortedTimes, "times must be nondecreasing");
  }
  // The commutator part cancels between the (j, k) and (k, j) terms; both are
  // evaluated independently and the imaginary residue is checked.
  cplx expo = 0;
  double mass = 0;
  for (std::size_t j = 0; j < N; ++j) {
    mass += vectors[j].norm();
    const CVec vj = vectors[j].cast<cplx>();
    for (std::size_t k = 0; k < N; ++k)
      expo += vj.dot(kernel.S(times[j] - times[k]) * vectors[k].cast<cplx>());
  }
  const double scale = 1.0 + mass * mass * std::max(opnorm2(kernel.P()), opnorm2(kernel.model().Theta));
  if (std::abs(expo.imag()) > 1e-12 * scale)
    throw Error(ErrorCode::NumericalFailure, "multi-point QCF exponent is not real");
  return cplx(std::exp(-0.5 * expo.real()), 0.0);
}

cplx qcf_multipoint_steady(const OqhoModel& model, const std::vector<double>& times, const std::vector<Vec>& vectors) {
  return qcf_multipoint_steady(CovarianceKernel(model), times, vectors);
}

}  // namespace oqho
