#include "oqho/model.hpp"

#include <algorithm>
#include <string>

namespace oqho {

Mat block_J(Eigen::Index m) {
  if (m <= 0 || m % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "J needs a positive even dimension");
  const Eigen::Index h = m / 2;
  Mat j = Mat::Zero(m, m);
  j.topRightCorner(h, h).setIdentity();
  j.bottomLeftCorner(h, h) = -Mat::Identity(h, h);
  return j;
}

CMat ito_matrix(const Mat& J) {
  return CMat::Identity(J.rows(), J.cols()) + cplx(0, 1) * J.cast<cplx>();
}

OqhoModel build_model(const Mat& theta, const PhysicalParams& params) {
  const Eigen::Index n = theta.rows();
  if (n == 0 || theta.cols() != n) throw Error(ErrorCode::DimensionMismatch, "Theta must be square and nonempty");
  if (n % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "n must be even");
  if (params.R.rows() != n || params.R.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "R must be " + std::to_string(n) + " x " + std::to_string(n));
  const Eigen::Index m = params.M.rows();
  if (m == 0 || m % 2 != 0) throw Error(ErrorCode::DimensionMismatch, "m must be even and positive");
  if (params.M.cols() != n) throw Error(ErrorCode::DimensionMismatch, "M must have n columns");
  if (!theta.allFinite() || !params.R.allFinite() || !params.M.allFinite())
    throw Error(ErrorCode::InvalidArgument, "model matrices must be finite");

  // exact checks: inputs are validated, never projected
  if ((theta + theta.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorCode::NotAntisymmetric, "Theta is not antisymmetric");
  if ((params.R - params.R.transpose()).cwiseAbs().maxCoeff() != 0.0)
    throw Error(ErrorCode::NotSymmetric, "R is not symmetric");
  Eigen::JacobiSVD<Mat> svd(theta);
  const Vec sv = svd.singularValues();
  if (!(sv(n - 1) > 1e-12 * sv(0))) throw Error(ErrorCode::SingularCcr, "Theta is singular");

  OqhoModel model;
  model.Theta = theta;
  model.params = params;
  model.J = block_J(m);
  model.Omega = ito_matrix(model.J);
  model.A = 2.0 * theta * (params.R + params.M.transpose() * model.J * params.M);
  model.B = 2.0 * theta * params.M.transpose();
  model.abscissa = spectral_abscissa(model.A);
  return model;
}

double pr_residual(const OqhoModel& model) {
  return (model.A * model.Theta + model.Theta * model.A.transpose() + model.B * model.J * model.B.transpose()).norm();
}

double pr_residual_normalized(const OqhoModel& model) {
  const Mat at = model.A * model.Theta;
  const double scale = 2.0 * at.norm() + (model.B * model.J * model.B.transpose()).norm();
  return pr_residual(model) / std::max(1.0, scale);
}

StabilityMargin stability_margin(const OqhoModel& model) {
  const double a = spectral_abscissa(model.A);
  return {a < kHurwitzThreshold, a};
}

void require_hurwitz(const OqhoModel& model) {
  if (!(model.abscissa < kHurwitzThreshold))
    throw Error(ErrorCode::NotHurwitz, "A has spectral abscissa " + std::to_string(model.abscissa));
}

void validate_weight(const OqhoModel& model, const Mat& Pi, bool require_psd) {
  if (Pi.rows() != model.n() || Pi.cols() != model.n())
    throw Error(ErrorCode::DimensionMismatch, "Pi must be n x n");
  if (!Pi.allFinite()) throw Error(ErrorCode::InvalidArgument, "Pi must be finite");
  if ((Pi - Pi.transpose()).cwiseAbs().maxCoeff() != 0.0) throw Error(ErrorCode::NotSymmetric, "Pi is not symmetric");
  if (require_psd && Pi.size() > 0) {
    const double scale = opnorm2(Pi);
    if (min_eigenvalue_hermitian(Pi) < -1e-10 * scale) throw Error(ErrorCode::NotPsd, "Pi is not positive semidefinite");
  }
}

}  // namespace oqho
