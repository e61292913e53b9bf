#pragma once

#include <utility>
#include <vector>

#include "oqho/model.hpp"

namespace oqho {

struct SteadyState {
  Mat P;               // A P + P A^T + B B^T = 0
  CMat quantum_cov;    // P + i Theta
  double min_eig = 0;  // smallest eigenvalue of P + i Theta
  double residual = 0; // normalised Lyapunov residual
};

// Steady Gramian from raw (A, B); A must be Hurwitz.
Mat steady_gramian(const Mat& A, const Mat& B);

SteadyState gramian_steady(const OqhoModel& model);

struct KernelValue {
  Mat V;
  Mat Lambda;
  CMat S;
};

// Steady two-point covariance functions with P computed once.
class CovarianceKernel {
 public:
  explicit CovarianceKernel(const OqhoModel& model);
  CovarianceKernel(const OqhoModel& model, SteadyState steady);

  const OqhoModel& model() const { return model_; }
  const SteadyState& steady() const { return steady_; }
  const Mat& P() const { return steady_.P; }

  Mat V(double tau) const;
  Mat Lambda(double tau) const;
  CMat S(double tau) const;
  KernelValue at(double tau) const;
  // Sigma(t) = P - e^{tA} P e^{tA^T}
  Mat Sigma(double t) const;
  // C(s, tau) = e^{(s - tau)A} Sigma(tau) for s >= tau; C(tau, s)^T otherwise.
  Mat C(double s, double tau) const;

 private:
  OqhoModel model_;
  SteadyState steady_;
};

KernelValue kernel_at(const OqhoModel& model, double tau);
Mat gramian_finite(const OqhoModel& model, double t);
Mat two_point_C(const OqhoModel& model, double s, double tau);

// G(s) = (sI - A)^{-1} B and D(lambda) = G(i lambda) Omega G(i lambda)^*.
class SpectralDensity {
 public:
  explicit SpectralDensity(const OqhoModel& model);

  CMat G(cplx s) const;
  CMat D(double lambda) const;
  // D^{[1]}(lambda) = D(-lambda)^T
  CMat D_flip(double lambda) const;
  // (D, D^{[1]}) from a single resolvent solve.
  std::pair<CMat, CMat> D_pair(double lambda) const;
  // Omega with the sign of J flipped
  const CMat& Omega_conj() const { return omega_conj_; }

 private:
  Mat A_;
  CMat B_;
  CMat omega_;
  CMat omega_conj_;
};

CMat transfer_G(const OqhoModel& model, cplx s);
CMat spectral_D(const OqhoModel& model, double lambda);

// Quasi-characteristic function at time t of a zero-mean Gaussian state with
// real covariance P0 at time 0, propagated through time s <= t.
cplx qcf_onepoint(const OqhoModel& model, const Mat& P0, double s, double t, const Vec& u);

// Steady N-point QCF exp(-1/2 sum_{j,k} v_j^T V(t_j - t_k) v_k) for
// nondecreasing times.
cplx qcf_multipoint_steady(const OqhoModel& model, const std::vector<double>& times, const std::vector<Vec>& vectors);
cplx qcf_multipoint_steady(const CovarianceKernel& kernel, const std::vector<double>& times,
                           const std::vector<Vec>& vectors);

}  // namespace oqho
