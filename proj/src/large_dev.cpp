#include "oqho/large_dev.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace oqho {

namespace {

constexpr double kPi = std::numbers::pi;

// 16-point Gauss-Legendre on [-1, 1], positive half.
constexpr std::array<double, 8> kGlX = {0.0950125098376374401853193, 0.2816035507792589132304605,
                                        0.4580167776572273863424194, 0.6178762444026437484466718,
                                        0.7554044083550030338951012, 0.8656312023878317438804679,
                                        0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr std::array<double, 8> kGlW = {0.1894506104550684962853967, 0.1826034150449235888667637,
                                        0.1691565193950025381893121, 0.1495959888165767320815017,
                                        0.1246289712555338720524763, 0.0951585116824927848099251,
                                        0.0622535239386478928628438, 0.0271524594117540948517806};

}  // namespace

double n_kernel(const CovarianceKernel& kernel, const Mat& Pi, double tau) {
  validate_weight(kernel.model(), Pi, true);
  const CMat root = sqrt_psd(Pi).cast<cplx>();
  // N is even: S(-tau) = S(tau)^*
  return opnorm2((root * kernel.S(std::abs(tau)) * root).eval());
}

double n_kernel(const OqhoModel& model, const Mat& Pi, double tau) {
  validate_weight(model, Pi, true);
  return n_kernel(CovarianceKernel(model), Pi, tau);
}

EnvelopeParams envelope_params(const CovarianceKernel& kernel, const Mat& Pi) {
  const OqhoModel& model = kernel.model();
  validate_weight(model, Pi, true);
  require_hurwitz(model);
  const Eigen::Index n = model.n();
  EnvelopeParams env;
  env.mu = -model.abscissa;

  Eigen::EigenSolver<Mat> es(model.A);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "envelope: eigensolver failed");
  const CMat U = es.eigenvectors();  // unit Euclidean norm columns
  Eigen::JacobiSVD<CMat> svd(U);
  const Vec sv = svd.singularValues();
  env.eigvec_cond = sv(n - 1) > 0 ? sv(0) / sv(n - 1) : std::numeric_limits<double>::infinity();

  if (env.eigvec_cond < 1e8) {
    const CMat G = U * U.adjoint();
    // conjugate eigenvalue pairs carry conjugate eigenvectors, so U U^* is real
    if (G.imag().cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, G.real().cwiseAbs().maxCoeff()))
      throw Error(ErrorCode::NumericalFailure, "envelope: U U^* is not real");
    env.Gamma = G.real();
  } else {
    env.fallback = true;
    env.mu = 0.9 * env.mu;
    const Mat shifted = model.A + env.mu * Mat::Identity(n, n);
    if (!(spectral_abscissa(shifted) < kHurwitzThreshold))
      throw Error(ErrorCode::DefectiveAndUnstableShift, "envelope: shifted matrix is not Hurwitz");
    env.Gamma = lyap_solve(shifted, Mat::Identity(n, n).eval());
  }
  env.Gamma = 0.5 * (env.Gamma + env.Gamma.transpose());

  const Mat ali = model.A * env.Gamma + env.Gamma * model.A.transpose() + 2.0 * env.mu * env.Gamma;
  Eigen::SelfAdjointEigenSolver<Mat> ae(0.5 * (ali + ali.transpose()), Eigen::EigenvaluesOnly);
  env.ali_residual = ae.eigenvalues()(n - 1);

  const Mat rootPi = sqrt_psd(Pi);
  const Mat rootG = sqrt_psd(env.Gamma);
  const Mat rootGinv = rootG.inverse();
  const CMat qc = kernel.steady().quantum_cov;
  env.alpha = opnorm2((rootPi * rootG).eval()) * opnorm2((rootGinv.cast<cplx>() * qc * rootPi.cast<cplx>()).eval());
  return env;
}

EnvelopeParams envelope_params(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi, true);
  return envelope_params(CovarianceKernel(model), Pi);
}

FTransform::FTransform(const CovarianceKernel& kernel, const Mat& Pi, double tol) {
  const OqhoModel& model = kernel.model();
  validate_weight(model, Pi, true);
  require_hurwitz(model);
  n_ = model.n();
  if (opnorm2(Pi) == 0.0) {
    zero_ = true;
    return;
  }
  env_ = envelope_params(kernel, Pi);
  const CMat root = sqrt_psd(Pi).cast<cplx>();
  const CMat left = root;
  const CMat right = kernel.steady().quantum_cov * root;
  const Mat& A = model.A;
  auto N = [&](const Mat& E) { return opnorm2((left * E.cast<cplx>() * right).eval()); };
  n0_ = N(Mat::Identity(n_, n_));

  const double an = std::max(opnorm2(A), env_.mu);
  const double w = 0.125 / an;
  const double tstar = std::log(1.0 / tol) / env_.mu;
  const long panels = static_cast<long>(std::ceil(tstar / w));
  if (panels > 200000) throw Error(ErrorCode::NoConvergence, "F transform: tau grid too large for the decay rate");
  lambda_c_ = 8.0 / w;

  std::array<Mat, 16> offset;
  std::array<double, 16> x, wt;
  for (int k = 0; k < 8; ++k) {
    x[k] = 0.5 * w * (1.0 - kGlX[k]);
    x[15 - k] = 0.5 * w * (1.0 + kGlX[k]);
    wt[k] = wt[15 - k] = 0.5 * w * kGlW[k];
  }
  for (int k = 0; k < 16; ++k) offset[k] = expm(A, x[k]);
  tau_.resize(panels * 16);
  wn_.resize(panels * 16);
  for (long p = 0; p < panels; ++p) {
    const Mat start = expm(A, p * w);
    for (int k = 0; k < 16; ++k) {
      tau_(p * 16 + k) = p * w + x[k];
      wn_(p * 16 + k) = wt[k] * N((start * offset[k]).eval());
    }
  }
  f0_ = 2.0 * wn_.sum();

  // one-sided stencils for N'(0+) and N'''(0+)
  auto Nt = [&](double t) { return N(expm(A, t)); };
  const double h1 = 1e-3 / an, h3 = 1e-2 / an;
  std::array<double, 5> v1, v3;
  for (int k = 0; k < 5; ++k) {
    v1[k] = Nt(k * h1);
    v3[k] = Nt(k * h3);
  }
  const double d1 = (-25 * v1[0] + 48 * v1[1] - 36 * v1[2] + 16 * v1[3] - 3 * v1[4]) / (12 * h1);
  const double d3 = (-5 * v3[0] + 18 * v3[1] - 24 * v3[2] + 14 * v3[3] - 3 * v3[4]) / (2 * h3 * h3 * h3);
  a2_ = -2.0 * d1;
  a4_ = 2.0 * d3;
}

double FTransform::direct(double lambda) const {
  return 2.0 * ((lambda * tau_).cos() * wn_).sum();
}

double FTransform::operator()(double lambda) const {
  if (zero_) return 0.0;
  const double l = std::abs(lambda);
  if (l > lambda_c_) {
    const double l2 = l * l;
    return a2_ / l2 + a4_ / (l2 * l2);
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memo_.find(l);
    if (it != memo_.end()) return it->second;
  }
  const double v = direct(l);
  std::lock_guard<std::mutex> lock(mutex_);
  memo_.emplace(l, v);
  return v;
}

template <typename G>
double FTransform::half_line(const G& g) const {
  QuadratureSpec spec;
  spec.abs_tol = 1e-14;
  spec.rel_tol = 1e-11;
  spec.max_subdivisions = 20000;
  auto inner = [&](double l) { return g((*this)(l)); };
  const double body = integrate_line(inner, 0.0, lambda_c_, spec);
  QuadratureSpec tail = spec;
  tail.scale = lambda_c_;
  const double rest = integrate_line(inner, lambda_c_, std::numeric_limits<double>::infinity(), tail);
  return 2.0 * (body + rest);
}

double FTransform::log_integral(double theta) const {
  if (!(theta >= 0)) throw Error(ErrorCode::ThetaOutOfRange, "theta must be nonnegative");
  if (zero_ || theta == 0.0) return 0.0;
  if (!(2.0 * theta * f0_ < 1.0)) throw Error(ErrorCode::ThetaOutOfRange, "theta must stay below 1 / (2 F(0))");
  return half_line([theta](double f) { return -std::log1p(-2.0 * theta * f); });
}

double FTransform::slope_integral(double theta) const {
  if (zero_) return 0.0;
  if (!(theta >= 0) || !(2.0 * theta * f0_ < 1.0))
    throw Error(ErrorCode::ThetaOutOfRange, "theta must lie in [0, 1 / (2 F(0)))");
  return half_line([theta](double f) { return f / (1.0 - 2.0 * theta * f); });
}

double f_transform(const OqhoModel& model, const Mat& Pi, double lambda) {
  return FTransform(CovarianceKernel(model), Pi)(lambda);
}

double f_infnorm(const OqhoModel& model, const Mat& Pi) { return FTransform(CovarianceKernel(model), Pi).F0(); }

double qef_upper_rate(const FTransform& F, double theta) {
  return static_cast<double>(F.n()) / (4.0 * kPi) * F.log_integral(theta);
}

double qef_upper_rate(const OqhoModel& model, const Mat& Pi, double theta) {
  if (!(theta >= 0)) throw Error(ErrorCode::ThetaOutOfRange, "theta must be nonnegative");
  return qef_upper_rate(FTransform(CovarianceKernel(model), Pi), theta);
}

CramerResult cramer_bound_numeric(const FTransform& F, double epsilon) {
  const double n = static_cast<double>(F.n());
  const double threshold = n * F.N0();
  if (!(epsilon >= threshold * (1.0 - 1e-12)))
    throw Error(ErrorCode::EpsilonTooSmall, "epsilon below n N(0)");
  if (F.F0() == 0.0) {
    // N vanishes: -theta epsilon is unbounded below on [0, inf)
    if (epsilon > 0) return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    return {0.0, 0.0};
  }
  if (epsilon <= threshold) return {0.0, 0.0};

  // derivative of the objective: (n / 2 pi) int F / (1 - 2 theta F) - epsilon, increasing in theta
  auto slope = [&](double th) { return n / (2.0 * kPi) * F.slope_integral(th) - epsilon; };
  double lo = 0.0, hi = 0.5 / F.F0();
  // the slope blows up at hi; step inwards until it is positive
  double probe = hi;
  for (int k = 1;; ++k) {
    probe = hi * (1.0 - std::ldexp(1.0, -k));
    if (slope(probe) > 0) break;
    lo = probe;
    if (k > 60) throw Error(ErrorCode::NoConvergence, "Cramer bound: slope stays below epsilon");
  }
  hi = probe;
  for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (slope(mid) > 0) hi = mid;
    else lo = mid;
  }
  const double th = 0.5 * (lo + hi);
  return {qef_upper_rate(F, th) - th * epsilon, th};
}

CramerResult cramer_bound_numeric(const OqhoModel& model, const Mat& Pi, double epsilon) {
  return cramer_bound_numeric(FTransform(CovarianceKernel(model), Pi), epsilon);
}

double cramer_bound_closed(double mu, double alpha, Eigen::Index n, double epsilon) {
  const double na = static_cast<double>(n) * alpha;
  if (!(epsilon >= na)) throw Error(ErrorCode::EpsilonTooSmall, "epsilon below n alpha");
  return static_cast<double>(n) * mu / 4.0 * (2.0 - na / epsilon - epsilon / na);
}

double cramer_theta_closed(double mu, double alpha, Eigen::Index n, double epsilon) {
  const double na = static_cast<double>(n) * alpha;
  if (!(epsilon >= na)) throw Error(ErrorCode::EpsilonTooSmall, "epsilon below n alpha");
  const double r = na / epsilon;
  return mu / (4.0 * alpha) * (1.0 - r * r);
}

double envelope_log_integral_numeric(double alpha, double mu, double theta, const QuadratureSpec& spec) {
  if (!(alpha > 0 && mu > 0)) throw Error(ErrorCode::InvalidArgument, "envelope needs alpha, mu > 0");
  if (!(theta >= 0) || !(4.0 * theta * alpha < mu)) throw Error(ErrorCode::ThetaOutOfRange, "theta out of range");
  if (theta == 0.0) return 0.0;
  const double k = 4.0 * theta * alpha * mu;
  auto f = [&](double l) { return -std::log1p(-k / (l * l + mu * mu)); };
  QuadratureSpec s = spec;
  s.scale = mu;
  // -ln(1 - x) <= x / (1 - x) with x <= 4 theta alpha / mu
  s.tail = TailHint{TailHint::Kind::Algebraic, k / (1.0 - 4.0 * theta * alpha / mu), 2.0, 0.0};
  return integrate_realline(f, s);
}

double envelope_log_integral_closed(double alpha, double mu, double theta) {
  return 2.0 * kPi * (mu - std::sqrt(mu * mu - 4.0 * theta * alpha * mu));
}

TailBoundCurve bound_curve(const CovarianceKernel& kernel, const Mat& Pi, const std::vector<double>& eps_grid,
                           bool numeric) {
  TailBoundCurve c;
  c.n = kernel.model().n();
  if (eps_grid.empty()) return c;
  const EnvelopeParams env = envelope_params(kernel, Pi);
  c.mu = env.mu;
  c.alpha = env.alpha;
  std::optional<FTransform> F;
  if (numeric) F.emplace(kernel, Pi);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double eps : eps_grid) {
    c.epsilon.push_back(eps);
    const bool in_domain = eps >= static_cast<double>(c.n) * env.alpha;
    c.closed.push_back(in_domain ? cramer_bound_closed(env.mu, env.alpha, c.n, eps) : nan);
    if (F && eps >= static_cast<double>(c.n) * F->N0()) {
      const CramerResult r = cramer_bound_numeric(*F, eps);
      c.numeric.push_back(r.bound);
      c.theta_star.push_back(r.theta_star);
    } else {
      c.numeric.push_back(nan);
      c.theta_star.push_back(nan);
    }
  }
  return c;
}

TailBoundCurve bound_curve(const OqhoModel& model, const Mat& Pi, const std::vector<double>& eps_grid, bool numeric) {
  validate_weight(model, Pi, true);
  return bound_curve(CovarianceKernel(model), Pi, eps_grid, numeric);
}

}  // namespace oqho
