#include "oqho/quartic.hpp"

#include <cmath>

namespace oqho {

Mat quartic_source(const CovarianceKernel& kernel, const Mat& Pi) {
  const Mat& P = kernel.P();
  const Mat& Th = kernel.model().Theta;
  Mat s = P * Pi * P + Th * Pi * Th;
  return 0.5 * (s + s.transpose());
}

double mean_rate(const CovarianceKernel& kernel, const Mat& Pi) {
  validate_weight(kernel.model(), Pi);
  return frobenius_inner(Pi, kernel.P());
}

double mean_rate(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi);
  return mean_rate(CovarianceKernel(model), Pi);
}

double variance_finite(const CovarianceKernel& kernel, const Mat& Pi, double t, const QuadratureSpec& spec) {
  validate_weight(kernel.model(), Pi);
  if (!(t >= 0)) throw Error(ErrorCode::NegativeTime, "variance_finite needs t >= 0");
  if (t == 0) return 0.0;
  const Mat src = quartic_source(kernel, Pi);
  const Mat& A = kernel.model().A;
  auto g = [&](double tau) {
    const Mat E = expm(A, tau);
    return (t - tau) * frobenius_inner(Pi, (E * src * E.transpose()).eval());
  };
  return 4.0 * integrate_line(g, 0.0, t, spec);
}

double variance_finite(const OqhoModel& model, const Mat& Pi, double t, const QuadratureSpec& spec) {
  validate_weight(model, Pi);
  return variance_finite(CovarianceKernel(model), Pi, t, spec);
}

VarianceRate variance_rate(const CovarianceKernel& kernel, const Mat& Pi) {
  validate_weight(kernel.model(), Pi);
  const Mat& A = kernel.model().A;
  const Mat src = quartic_source(kernel, Pi);
  VarianceRate vr;
  vr.T = lyap_solve(A, src);
  vr.T = 0.5 * (vr.T + vr.T.transpose());
  const Mat At = A.transpose();
  vr.Q = lyap_solve(At, Pi);
  vr.Q = 0.5 * (vr.Q + vr.Q.transpose());
  vr.T_residual = lyap_residual(A, vr.T, src);
  vr.Q_residual = lyap_residual(At, vr.Q, Pi);
  vr.rate = 4.0 * frobenius_inner(Pi, vr.T);
  vr.dual = 4.0 * frobenius_inner(vr.Q, src);
  return vr;
}

VarianceRate variance_rate(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi);
  return variance_rate(CovarianceKernel(model), Pi);
}

double theta_threshold(const CovarianceKernel& kernel, const Mat& Pi, const VarianceRate& vr) {
  const double den = frobenius_inner(Pi, vr.T);
  const double pn = opnorm2(kernel.P());
  if (den <= 1e-12 * opnorm2(Pi) * pn * pn) return std::numeric_limits<double>::infinity();
  return 0.5 * frobenius_inner(Pi, kernel.P()) / den;
}

double theta_threshold(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi);
  const CovarianceKernel k(model);
  return theta_threshold(k, Pi, variance_rate(k, Pi));
}

double quartic_rate(double mean, const VarianceRate& vr, const Mat& Pi, double theta) {
  if (!(theta >= 0)) throw Error(ErrorCode::NegativeTheta, "quartic_rate needs theta >= 0");
  return theta * (mean + 2.0 * theta * frobenius_inner(Pi, vr.T));
}

double quartic_rate(const OqhoModel& model, const Mat& Pi, double theta) {
  if (!(theta >= 0)) throw Error(ErrorCode::NegativeTheta, "quartic_rate needs theta >= 0");
  validate_weight(model, Pi);
  const CovarianceKernel k(model);
  return quartic_rate(mean_rate(k, Pi), variance_rate(k, Pi), Pi, theta);
}

QuarticReport quartic_report(const OqhoModel& model, const Mat& Pi, const std::vector<double>& thetas) {
  validate_weight(model, Pi);
  const CovarianceKernel k(model);
  QuarticReport rep;
  rep.mean_rate = mean_rate(k, Pi);
  rep.variance = variance_rate(k, Pi);
  rep.theta0 = theta_threshold(k, Pi, rep.variance);
  for (double th : thetas) {
    rep.thetas.push_back(th);
    rep.quartic_rates.push_back(quartic_rate(rep.mean_rate, rep.variance, Pi, th));
  }
  return rep;
}

}  // namespace oqho
