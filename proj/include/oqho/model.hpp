#pragma once

#include "oqho/matfun.hpp"

namespace oqho {

// Energy and coupling matrices of the oscillator.
struct PhysicalParams {
  Mat R;  // n x n symmetric
  Mat M;  // m x n
};

struct OqhoModel {
  Mat Theta;  // CCR matrix, antisymmetric and nonsingular
  PhysicalParams params;
  Mat A;
  Mat B;
  Mat J;
  CMat Omega;
  double abscissa = 0.0;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }
};

struct StabilityMargin {
  bool is_hurwitz;
  double abscissa;
};

// [[0, 1], [-1, 0]] kron I_{m/2}.
Mat block_J(Eigen::Index m);

// Omega = I + iJ.
CMat ito_matrix(const Mat& J);

// A = 2 Theta (R + M^T J M), B = 2 Theta M^T.
OqhoModel build_model(const Mat& theta, const PhysicalParams& params);
inline OqhoModel build_model(const Mat& theta, const Mat& R, const Mat& M) {
  return build_model(theta, PhysicalParams{R, M});
}

// ||A Theta + Theta A^T + B J B^T||_F.
double pr_residual(const OqhoModel& model);
// Same, divided by max(1, 2||A Theta|| + ||B J B^T||).
double pr_residual_normalized(const OqhoModel& model);

StabilityMargin stability_margin(const OqhoModel& model);

inline constexpr double kHurwitzThreshold = -1e-10;

// Throws NotHurwitz unless the abscissa is below the threshold.
void require_hurwitz(const OqhoModel& model);

// Checks that Pi is a real symmetric n x n matrix; optional PSD check.
void validate_weight(const OqhoModel& model, const Mat& Pi, bool require_psd = false);

}  // namespace oqho
