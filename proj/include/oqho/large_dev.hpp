#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "oqho/gaussian_state.hpp"
#include "oqho/quadrature.hpp"

namespace oqho {

// N(tau) <= alpha e^{-mu |tau|}, certified by A Gamma + Gamma A^T + 2 mu Gamma <= 0.
struct EnvelopeParams {
  double mu = 0;
  Mat Gamma;
  double alpha = 0;
  bool fallback = false;     // shifted Lyapunov construction used
  double eigvec_cond = 0;    // condition number of the eigenvector matrix
  double ali_residual = 0;   // max eigenvalue of A Gamma + Gamma A^T + 2 mu Gamma
};

EnvelopeParams envelope_params(const CovarianceKernel& kernel, const Mat& Pi);
EnvelopeParams envelope_params(const OqhoModel& model, const Mat& Pi);

// ||sqrt(Pi) S(tau) sqrt(Pi)||
double n_kernel(const CovarianceKernel& kernel, const Mat& Pi, double tau);
double n_kernel(const OqhoModel& model, const Mat& Pi, double tau);

// F(lambda) = 2 int_0^inf N(tau) cos(lambda tau) dtau and the integrals over
// lambda built from it. N is tabulated once on composite 16-point
// Gauss-Legendre panels over [0, tau*], where the envelope makes the
// remainder negligible; beyond lambda_c the two-term expansion
// F ~ -2N'(0+)/lambda^2 + 2N'''(0+)/lambda^4 takes over.
class FTransform {
 public:
  FTransform(const CovarianceKernel& kernel, const Mat& Pi, double tol = 1e-13);

  Eigen::Index n() const { return n_; }
  double N0() const { return n0_; }
  // ||F||_inf: N >= 0 gives |F(lambda)| <= 2 int N = F(0).
  double F0() const { return f0_; }
  double lambda_cut() const { return lambda_c_; }
  const EnvelopeParams& envelope() const { return env_; }

  double operator()(double lambda) const;

  // -int_R ln(1 - 2 theta F(lambda)) dlambda, theta in [0, 1/(2 F(0)))
  double log_integral(double theta) const;
  // int_R F / (1 - 2 theta F) dlambda
  double slope_integral(double theta) const;

 private:
  double direct(double lambda) const;
  template <typename G>
  double half_line(const G& g) const;

  Eigen::Index n_ = 0;
  bool zero_ = false;
  double n0_ = 0, f0_ = 0;
  EnvelopeParams env_;
  Eigen::ArrayXd tau_, wn_;  // nodes and quadrature weight times N
  double lambda_c_ = 0, a2_ = 0, a4_ = 0;
  mutable std::map<double, double> memo_;
  mutable std::mutex mutex_;
};

double f_transform(const OqhoModel& model, const Mat& Pi, double lambda);
double f_infnorm(const OqhoModel& model, const Mat& Pi);

// -(n / 4 pi) int_R ln(1 - 2 theta F) dlambda
double qef_upper_rate(const FTransform& F, double theta);
double qef_upper_rate(const OqhoModel& model, const Mat& Pi, double theta);

struct CramerResult {
  double bound = 0;
  double theta_star = 0;
};

CramerResult cramer_bound_numeric(const FTransform& F, double epsilon);
CramerResult cramer_bound_numeric(const OqhoModel& model, const Mat& Pi, double epsilon);

// (n mu / 4)(2 - n alpha / eps - eps / (n alpha)) and its minimiser.
double cramer_bound_closed(double mu, double alpha, Eigen::Index n, double epsilon);
double cramer_theta_closed(double mu, double alpha, Eigen::Index n, double epsilon);

// Exponential envelope hat N = alpha e^{-mu |tau|}, hat F = 2 alpha mu / (lambda^2 + mu^2).
double envelope_log_integral_numeric(double alpha, double mu, double theta, const QuadratureSpec& spec = {});
double envelope_log_integral_closed(double alpha, double mu, double theta);

struct TailBoundCurve {
  std::vector<double> epsilon;
  std::vector<double> closed;      // NaN below eps = n alpha
  std::vector<double> numeric;     // NaN where not computed
  std::vector<double> theta_star;  // numeric minimiser, NaN where not computed
  double mu = 0, alpha = 0;
  Eigen::Index n = 0;
};

TailBoundCurve bound_curve(const CovarianceKernel& kernel, const Mat& Pi, const std::vector<double>& eps_grid,
                           bool numeric = true);
TailBoundCurve bound_curve(const OqhoModel& model, const Mat& Pi, const std::vector<double>& eps_grid,
                           bool numeric = true);

}  // namespace oqho
