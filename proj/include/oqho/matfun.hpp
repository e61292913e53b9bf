#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "oqho/error.hpp"

namespace oqho {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Frobenius inner product <A, B> = Tr(A^* B).
template <typename DA, typename DB>
auto frobenius_inner(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  return (a.conjugate().cwiseProduct(b)).sum();
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

// Largest real part of the spectrum. Throws EigenFailure if the QR iteration stalls.
template <typename Derived>
double spectral_abscissa(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() == 0) return -std::numeric_limits<double>::infinity();
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    Eigen::ComplexEigenSolver<MatrixX<Scalar>> es(a.eval(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "complex eigensolver did not converge");
    return es.eigenvalues().real().maxCoeff();
  } else {
    Eigen::EigenSolver<MatrixX<Scalar>> es(a.eval(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
    return es.eigenvalues().real().maxCoeff();
  }
}

// e^{tA}. Scaling and squaring with a degree-13 Pade approximant (Eigen's
// MatrixExponential), which is backward stable in double precision.
template <typename Derived>
MatrixX<typename Derived::Scalar> expm(const Eigen::MatrixBase<Derived>& a, double t = 1.0) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols()) throw Error(ErrorCode::DimensionMismatch, "expm needs a square matrix");
  if (!a.allFinite()) throw Error(ErrorCode::InvalidArgument, "expm argument has non-finite entries");
  if (t == 0.0 || a.rows() == 0) return MatrixX<Scalar>::Identity(a.rows(), a.cols());
  const MatrixX<Scalar> ta = (Scalar(t) * a).eval();
  // 2^1023 is the largest power of two; squaring count beyond that cannot be represented.
  const double norm1 = ta.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm1) || norm1 > 1e300) throw Error(ErrorCode::Overflow, "||tA|| beyond representable scaling");
  MatrixX<Scalar> e = ta.exp();
  if (!e.allFinite()) throw Error(ErrorCode::Overflow, "matrix exponential overflowed");
  return e;
}

// Solves A X + X A^T + Q = 0 (A^T, not A^*, also for complex scalars).
//
// Kronecker vectorisation: (I kron A + A kron I) vec(X) = -vec(Q), a dense
// n^2 x n^2 system solved by LU. O(n^6) work, intended for n up to ~20.
template <typename DA, typename DQ>
MatrixX<typename DA::Scalar> lyap_solve(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DQ>& q) {
  using Scalar = typename DA::Scalar;
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "lyap_solve: A and Q must be n x n");
  if (n == 0) return MatrixX<Scalar>(0, 0);

  Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1> ev;
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    Eigen::ComplexEigenSolver<MatrixX<Scalar>> es(a.eval(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "lyap_solve: eigensolver failed");
    ev = es.eigenvalues();
  } else {
    Eigen::EigenSolver<MatrixX<Scalar>> es(a.eval(), false);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "lyap_solve: eigensolver failed");
    ev = es.eigenvalues();
  }
  if (ev.real().maxCoeff() >= -1e-10) throw Error(ErrorCode::NotHurwitz, "lyap_solve: A is not Hurwitz");
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) gap = std::min(gap, std::abs(ev(i) + ev(j)));
  if (gap < 1e-12) throw Error(ErrorCode::IllConditioned, "lyap_solve: spectral gap below 1e-12");

  const MatrixX<Scalar> id = MatrixX<Scalar>::Identity(n, n);
  const MatrixX<Scalar> ae = a.eval();
  const MatrixX<Scalar> kron = Eigen::kroneckerProduct(id, ae).eval() + Eigen::kroneckerProduct(ae, id).eval();
  const MatrixX<Scalar> qe = q.eval();
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rhs = -Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>(qe.data(), n * n);
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = kron.partialPivLu().solve(rhs);
  MatrixX<Scalar> out = Eigen::Map<const MatrixX<Scalar>>(x.data(), n, n);
  if (!out.allFinite()) throw Error(ErrorCode::IllConditioned, "lyap_solve: non-finite solution");
  return out;
}

// Normalised residual ||AX + XA^T + Q||_F / (||A||_F ||X||_F + ||Q||_F).
template <typename DA, typename DX, typename DQ>
double lyap_residual(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DQ>& q) {
  const double r = (a * x + x * a.transpose() + q).norm();
  const double scale = a.norm() * x.norm() + q.norm();
  return scale > 0 ? r / scale : r;
}

// Largest singular value.
template <typename Derived>
double opnorm2(const Eigen::MatrixBase<Derived>& k) {
  if (k.size() == 0) return 0.0;
  Eigen::JacobiSVD<MatrixX<typename Derived::Scalar>> svd(k.eval());
  return svd.singularValues()(0);
}

// Smallest eigenvalue of the Hermitian part of k.
template <typename Derived>
double min_eigenvalue_hermitian(const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> h = (0.5 * (k + k.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Hermitian eigensolver failed");
  return es.eigenvalues()(0);
}

// Principal square root of a symmetric/Hermitian PSD matrix. Eigenvalues in
// [-1e-10 ||K||, 0) are clipped to zero; anything lower is rejected.
template <typename Derived>
MatrixX<typename Derived::Scalar> sqrt_psd(const Eigen::MatrixBase<Derived>& k) {
  using Scalar = typename Derived::Scalar;
  if (k.rows() != k.cols()) throw Error(ErrorCode::DimensionMismatch, "sqrt_psd needs a square matrix");
  if (k.rows() == 0) return MatrixX<Scalar>(0, 0);
  const MatrixX<Scalar> h = (0.5 * (k + k.adjoint())).eval();
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(h);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "sqrt_psd: eigensolver failed");
  const double band = 1e-10 * std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0);
  Eigen::VectorXd root(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < root.size(); ++i) {
    const double lam = es.eigenvalues()(i);
    if (lam < -band) throw Error(ErrorCode::NotPsd, "sqrt_psd: eigenvalue below tolerance band");
    root(i) = lam > 0 ? std::sqrt(lam) : 0.0;
  }
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().adjoint();
}

// Lower-triangular L with L L^T = K for a real PSD K, allowing rank deficiency:
// pivots inside the clipping band zero their column.
inline Mat cholesky_psd(const Mat& k, double rel_band = 1e-10) {
  const Eigen::Index n = k.rows();
  if (k.cols() != n) throw Error(ErrorCode::DimensionMismatch, "cholesky_psd needs a square matrix");
  const double band = rel_band * std::max(k.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  Mat l = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = k(j, j) - l.row(j).head(j).squaredNorm();
    if (d < -band) throw Error(ErrorCode::NotPsd, "cholesky_psd: negative pivot");
    if (d <= band) continue;
    l(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      l(i, j) = (k(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
  }
  return l;
}

}  // namespace oqho
