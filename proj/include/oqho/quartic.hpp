#pragma once

#include <limits>
#include <vector>

#include "oqho/gaussian_state.hpp"
#include "oqho/quadrature.hpp"

namespace oqho {

// All rates below assume the oscillator starts in its invariant Gaussian state.

struct VarianceRate {
  double rate = 0;   // 4 <Pi, T>
  Mat T;             // A T + T A^T + P Pi P + Theta Pi Theta = 0
  Mat Q;             // A^T Q + Q A + Pi = 0
  double dual = 0;   // 4 <Q, P Pi P + Theta Pi Theta>
  double T_residual = 0;
  double Q_residual = 0;
};

struct QuarticReport {
  double mean_rate = 0;
  VarianceRate variance;
  double theta0 = std::numeric_limits<double>::infinity();
  std::vector<double> thetas;
  std::vector<double> quartic_rates;
};

// P Pi P + Theta Pi Theta
Mat quartic_source(const CovarianceKernel& kernel, const Mat& Pi);

double mean_rate(const CovarianceKernel& kernel, const Mat& Pi);
double mean_rate(const OqhoModel& model, const Mat& Pi);

// 4 int_0^t (t - tau) <Pi, e^{tau A}(P Pi P + Theta Pi Theta)e^{tau A^T}> dtau
double variance_finite(const CovarianceKernel& kernel, const Mat& Pi, double t, const QuadratureSpec& spec = {});
double variance_finite(const OqhoModel& model, const Mat& Pi, double t, const QuadratureSpec& spec = {});

VarianceRate variance_rate(const CovarianceKernel& kernel, const Mat& Pi);
VarianceRate variance_rate(const OqhoModel& model, const Mat& Pi);

// 1/2 <Pi, P> / <Pi, T>, or +inf when the denominator is negligible.
double theta_threshold(const CovarianceKernel& kernel, const Mat& Pi, const VarianceRate& vr);
double theta_threshold(const OqhoModel& model, const Mat& Pi);

// theta <Pi, P + 2 theta T>
double quartic_rate(const OqhoModel& model, const Mat& Pi, double theta);
double quartic_rate(double mean, const VarianceRate& vr, const Mat& Pi, double theta);

QuarticReport quartic_report(const OqhoModel& model, const Mat& Pi, const std::vector<double>& thetas);

}  // namespace oqho
