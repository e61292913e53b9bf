#pragma once

#include <cstdint>
#include <vector>

#include "oqho/gaussian_state.hpp"
#include "oqho/quadrature.hpp"

namespace oqho {

// Invariant covariance 1/2 [[P, -Theta], [Theta, P]] of theta = (xi, eta),
// so that E(zeta zeta^*) = P + i Theta for zeta = xi + i eta.
Mat invariant_classical_cov(const OqhoModel& model);
Mat invariant_classical_cov(const CovarianceKernel& kernel);

// Exact one-step map theta_{k+1} = Phi theta_k + w_k, w_k ~ N(0, P_aug - Phi P_aug Phi^T).
class AugmentedStepper {
 public:
  AugmentedStepper(const Mat& A, const Mat& P_aug, double h);

  double h() const { return h_; }
  Eigen::Index dim() const { return Phi_.rows(); }
  const Mat& Phi() const { return Phi_; }
  const Mat& noise_cov() const { return noise_cov_; }
  const Mat& noise_chol() const { return noise_chol_; }
  const Mat& P_aug() const { return P_aug_; }
  const Mat& init_chol() const { return init_chol_; }

 private:
  double h_;
  Mat Phi_, P_aug_, noise_cov_, noise_chol_, init_chol_;
};

AugmentedStepper make_stepper(const OqhoModel& model, double h);

// Deterministic per-path generator seeds.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

struct TrajectoryBatch {
  double h = 0;
  long steps = 0;
  long paths = 0;
  std::uint64_t seed = 0;
  std::vector<long> recorded;  // step indices kept, ascending
  std::vector<Mat> states;     // per recorded step: 2n x paths

  Eigen::Index n() const { return states.empty() ? 0 : states.front().rows() / 2; }
  // zeta = xi + i eta for every path at a recorded step
  CMat zeta(long step) const;
  const Mat& at(long step) const;
};

// Stationary start; records `record` (defaults to {0, steps}).
TrajectoryBatch simulate(const OqhoModel& model, double h, long steps, long paths, std::uint64_t seed,
                         std::vector<long> record = {});
// Explicit initial states (2n x paths) or, when `initial` is empty, draws from P_aug.
TrajectoryBatch simulate(const AugmentedStepper& stepper, const Mat& initial, long steps, long paths,
                         std::uint64_t seed, std::vector<long> record = {});

struct McEstimate {
  double value = 0;
  double std_error = 0;
  long paths = 0;
  std::uint64_t seed = 0;
};

struct McMatrixEstimate {
  CMat value;
  Mat std_error_re;
  Mat std_error_im;
  long paths = 0;
  std::uint64_t seed = 0;
};

struct StationaryStats {
  McMatrixEstimate cov0;    // E(zeta(s) zeta(s)^*)
  McMatrixEstimate covlag;  // E(zeta(s + lag h) zeta(s)^*)
  long base_step = 0;
  long lag_steps = 0;
};

// Uses the recorded steps `steps - lag` and `steps`.
StationaryStats mc_stationary_stats(const TrajectoryBatch& batch, long lag_steps);

// <Pi, P Pi P - Theta Pi Theta>: stationary variance of zeta^* Pi zeta.
double classical_quadform_variance(const OqhoModel& model, const Mat& Pi);
// 2 <Pi, P Pi P + Theta Pi Theta>: one-point variance of X^T Pi X in the quantum state.
double quantum_quadform_variance(const OqhoModel& model, const Mat& Pi);
// Sample variance of zeta^* Pi zeta at a recorded step, with delta-method stderr.
McEstimate mc_quadform_variance(const TrajectoryBatch& batch, const Mat& Pi, long step);

// sup over lambda of the largest eigenvalue of sqrt(Pi) D(lambda) sqrt(Pi),
// scanned over both signs of lambda since D(-lambda) != conj(D(lambda)).
double classical_spectral_sup(const OqhoModel& model, const Mat& Pi);

// -int_R ln det(I - theta Pi D(lambda)) dlambda for theta sup < 1.
double classical_logdet_integral(const OqhoModel& model, const Mat& Pi, double theta, const QuadratureSpec& spec = {});

// 1/(4 pi) times the log-det integral: half the rate of the diffusion as simulated.
double classical_rs_rate_half(const OqhoModel& model, const Mat& Pi, double theta, const QuadratureSpec& spec = {});
// Normalisation of the diffusion as simulated: 1/(2 pi) times the log-det integral.
double classical_rs_rate_sde(const OqhoModel& model, const Mat& Pi, double theta, const QuadratureSpec& spec = {});
// (1/(4 pi)) sum_{r <= order} (theta^r / r) int Tr((Pi D)^r)
double classical_rs_rate_series(const OqhoModel& model, const Mat& Pi, double theta, int order,
                                const QuadratureSpec& spec = {});

struct RsRateEstimate {
  McEstimate rate;
  double ess = 0;          // effective sample size of exp(theta S(t)) weights
  double full_horizon = 0; // ln mean exp(theta S(t)) / t, kept for comparison
};

// (L(t) - L(t/2)) / (t/2) with L(s) = ln mean exp(theta int_0^s zeta^* Pi zeta),
// trapezoid sums with step h, jackknife stderr.
RsRateEstimate mc_rs_rate(const OqhoModel& model, const Mat& Pi, double theta, double horizon, long paths,
                          std::uint64_t seed, double h = 0.05);

}  // namespace oqho
