#include "oqho/random_model.hpp"

#include <algorithm>
#include <cmath>

namespace oqho {

Mat random_gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> nd;
  Mat x(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = nd(rng);
  return x;
}

Mat random_symmetric(std::mt19937_64& rng, Eigen::Index n) {
  const Mat x = random_gaussian(rng, n, n);
  Mat s = (x + x.transpose()) / std::sqrt(2.0);
  // make exact symmetry independent of summation order
  s.triangularView<Eigen::StrictlyLower>() = s.transpose().triangularView<Eigen::StrictlyLower>();
  return s;
}

Mat random_psd(std::mt19937_64& rng, Eigen::Index n) {
  const Mat x = random_gaussian(rng, n, n);
  Mat s = x * x.transpose() / static_cast<double>(n);
  s.triangularView<Eigen::StrictlyLower>() = s.transpose().triangularView<Eigen::StrictlyLower>();
  return s;
}

Mat random_antisymmetric(std::mt19937_64& rng, Eigen::Index n) {
  for (;;) {
    const Mat x = random_gaussian(rng, n, n);
    Mat a = Mat::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < j; ++i) {
        a(i, j) = 0.5 * (x(i, j) - x(j, i));
        a(j, i) = -a(i, j);
      }
    Eigen::JacobiSVD<Mat> svd(a);
    if (svd.singularValues()(n - 1) > 1e-3 * svd.singularValues()(0)) return a;
  }
}

Mat canonical_theta(Eigen::Index n) { return 0.5 * block_J(n); }

OqhoModel random_model(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m, double min_decay, bool canonical,
                       int max_tries) {
  const Mat theta = canonical ? canonical_theta(n) : random_antisymmetric(rng, n);
  for (int k = 0; k < max_tries; ++k) {
    const Mat R = random_symmetric(rng, n);
    const Mat M = random_gaussian(rng, m, n);
    OqhoModel model = build_model(theta, R, M);
    if (min_decay < 0 || model.abscissa < std::min(kHurwitzThreshold, -min_decay)) return model;
  }
  throw Error(ErrorCode::NoConvergence, "random_model: no Hurwitz sample within the try budget");
}

}  // namespace oqho
