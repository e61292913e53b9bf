#include "oqho/classical_twin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace oqho {

namespace {

constexpr double kPi = std::numbers::pi;

void require_recorded(const TrajectoryBatch& b, long step, std::size_t& slot) {
  auto it = std::lower_bound(b.recorded.begin(), b.recorded.end(), step);
  if (it == b.recorded.end() || *it != step)
    throw Error(ErrorCode::InvalidArgument, "step " + std::to_string(step) + " was not recorded");
  slot = static_cast<std::size_t>(it - b.recorded.begin());
}

std::vector<long> normalise_record(std::vector<long> record, long steps) {
  if (record.empty()) record = {0, steps};
  for (long s : record)
    if (s < 0 || s > steps) throw Error(ErrorCode::InvalidArgument, "recorded step outside [0, steps]");
  std::sort(record.begin(), record.end());
  record.erase(std::unique(record.begin(), record.end()), record.end());
  return record;
}

}  // namespace

Mat invariant_classical_cov(const CovarianceKernel& kernel) {
  const Mat& P = kernel.P();
  const Mat& Th = kernel.model().Theta;
  const Eigen::Index n = P.rows();
  Mat out(2 * n, 2 * n);
  out << P, -Th, Th, P;
  return 0.5 * out;
}

Mat invariant_classical_cov(const OqhoModel& model) { return invariant_classical_cov(CovarianceKernel(model)); }

AugmentedStepper::AugmentedStepper(const Mat& A, const Mat& P_aug, double h) : h_(h) {
  const Eigen::Index n = A.rows();
  if (!(h > 0) || !std::isfinite(h)) throw Error(ErrorCode::StepperConstructionFailure, "step size must be positive");
  if (A.cols() != n || P_aug.rows() != 2 * n || P_aug.cols() != 2 * n)
    throw Error(ErrorCode::StepperConstructionFailure, "P_aug must be 2n x 2n");
  try {
    const Mat E = expm(A, h);
    Phi_ = Mat::Zero(2 * n, 2 * n);
    Phi_.topLeftCorner(n, n) = E;
    Phi_.bottomRightCorner(n, n) = E;
    P_aug_ = 0.5 * (P_aug + P_aug.transpose());
    noise_cov_ = P_aug_ - Phi_ * P_aug_ * Phi_.transpose();
    noise_cov_ = 0.5 * (noise_cov_ + noise_cov_.transpose());
    noise_chol_ = cholesky_psd(noise_cov_);
    init_chol_ = cholesky_psd(P_aug_);
  } catch (const Error& e) {
    throw Error(ErrorCode::StepperConstructionFailure, e.what());
  }
}

AugmentedStepper make_stepper(const OqhoModel& model, double h) {
  require_hurwitz(model);
  return AugmentedStepper(model.A, invariant_classical_cov(model), h);
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
  // splitmix64 finaliser over a Weyl sequence
  std::uint64_t z = seed + (path + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

const Mat& TrajectoryBatch::at(long step) const {
  std::size_t slot = 0;
  require_recorded(*this, step, slot);
  return states[slot];
}

CMat TrajectoryBatch::zeta(long step) const {
  const Mat& s = at(step);
  const Eigen::Index n = s.rows() / 2;
  return s.topRows(n).cast<cplx>() + cplx(0, 1) * s.bottomRows(n).cast<cplx>();
}

TrajectoryBatch simulate(const AugmentedStepper& stepper, const Mat& initial, long steps, long paths,
                         std::uint64_t seed, std::vector<long> record) {
  if (steps < 0) throw Error(ErrorCode::InvalidArgument, "steps must be nonnegative");
  if (paths <= 0) throw Error(ErrorCode::InvalidArgument, "paths must be positive");
  const Eigen::Index d = stepper.dim();
  if (initial.size() != 0 && (initial.rows() != d || initial.cols() != paths))
    throw Error(ErrorCode::DimensionMismatch, "initial states must be 2n x paths");
  TrajectoryBatch b;
  b.h = stepper.h();
  b.steps = steps;
  b.paths = paths;
  b.seed = seed;
  b.recorded = normalise_record(std::move(record), steps);
  b.states.assign(b.recorded.size(), Mat(d, paths));

  // row-major copies for the inner loop
  std::vector<double> phi(d * d), chol(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      phi[i * d + j] = stepper.Phi()(i, j);
      chol[i * d + j] = stepper.noise_chol()(i, j);
    }
  std::vector<double> x(d), y(d), z(d);
  for (long p = 0; p < paths; ++p) {
    std::mt19937_64 rng(path_seed(seed, static_cast<std::uint64_t>(p)));
    std::normal_distribution<double> nd;
    if (initial.size() != 0) {
      for (Eigen::Index i = 0; i < d; ++i) x[i] = initial(i, p);
    } else {
      for (Eigen::Index i = 0; i < d; ++i) z[i] = nd(rng);
      for (Eigen::Index i = 0; i < d; ++i) {
        double s = 0;
        for (Eigen::Index j = 0; j <= i; ++j) s += stepper.init_chol()(i, j) * z[j];
        x[i] = s;
      }
    }
    std::size_t slot = 0;
    for (long k = 0;; ++k) {
      if (slot < b.recorded.size() && b.recorded[slot] == k) {
        for (Eigen::Index i = 0; i < d; ++i) b.states[slot](i, p) = x[i];
        ++slot;
      }
      if (k == steps) break;
      for (Eigen::Index i = 0; i < d; ++i) z[i] = nd(rng);
      for (Eigen::Index i = 0; i < d; ++i) {
        double s = 0;
        const double* pr = &phi[i * d];
        for (Eigen::Index j = 0; j < d; ++j) s += pr[j] * x[j];
        const double* cr = &chol[i * d];
        for (Eigen::Index j = 0; j <= i; ++j) s += cr[j] * z[j];
        y[i] = s;
      }
      std::swap(x, y);
    }
  }
  return b;
}

TrajectoryBatch simulate(const OqhoModel& model, double h, long steps, long paths, std::uint64_t seed,
                         std::vector<long> record) {
  return simulate(make_stepper(model, h), Mat(), steps, paths, seed, std::move(record));
}

namespace {

// entrywise mean of zeta_a zeta_b^* over paths with standard errors
McMatrixEstimate outer_mean(const CMat& a, const CMat& b, long paths, std::uint64_t seed) {
  const Eigen::Index n = a.rows();
  const double N = static_cast<double>(paths);
  McMatrixEstimate e;
  e.paths = paths;
  e.seed = seed;
  e.value = CMat::Zero(n, n);
  e.std_error_re = Mat::Zero(n, n);
  e.std_error_im = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::ArrayXcd prod = a.row(i).transpose().array() * b.row(j).transpose().array().conjugate();
      const cplx mean = prod.mean();
      const double vr = (prod.real() - mean.real()).square().sum() / (N - 1.0);
      const double vi = (prod.imag() - mean.imag()).square().sum() / (N - 1.0);
      e.value(i, j) = mean;
      e.std_error_re(i, j) = std::sqrt(vr / N);
      e.std_error_im(i, j) = std::sqrt(vi / N);
    }
  return e;
}

}  // namespace

StationaryStats mc_stationary_stats(const TrajectoryBatch& batch, long lag_steps) {
  if (batch.paths < 100) throw Error(ErrorCode::InsufficientPaths, "at least 100 paths are required");
  if (lag_steps < 0 || lag_steps > batch.steps) throw Error(ErrorCode::InvalidArgument, "lag outside the horizon");
  StationaryStats st;
  st.lag_steps = lag_steps;
  st.base_step = batch.steps - lag_steps;
  const CMat z0 = batch.zeta(st.base_step);
  const CMat z1 = batch.zeta(batch.steps);
  st.cov0 = outer_mean(z0, z0, batch.paths, batch.seed);
  st.covlag = outer_mean(z1, z0, batch.paths, batch.seed);
  return st;
}

double classical_quadform_variance(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi);
  const CovarianceKernel k(model);
  const Mat& P = k.P();
  const Mat& Th = model.Theta;
  return frobenius_inner(Pi, (P * Pi * P - Th * Pi * Th).eval());
}

double quantum_quadform_variance(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi);
  const CovarianceKernel k(model);
  const Mat& P = k.P();
  const Mat& Th = model.Theta;
  return 2.0 * frobenius_inner(Pi, (P * Pi * P + Th * Pi * Th).eval());
}

McEstimate mc_quadform_variance(const TrajectoryBatch& batch, const Mat& Pi, long step) {
  if (batch.paths < 100) throw Error(ErrorCode::InsufficientPaths, "at least 100 paths are required");
  const Mat& s = batch.at(step);
  const Eigen::Index n = s.rows() / 2;
  if (Pi.rows() != n || Pi.cols() != n) throw Error(ErrorCode::DimensionMismatch, "Pi must be n x n");
  // zeta^* Pi zeta = xi^T Pi xi + eta^T Pi eta
  const Mat xi = s.topRows(n), eta = s.bottomRows(n);
  const Eigen::ArrayXd psi =
      ((Pi * xi).cwiseProduct(xi).colwise().sum() + (Pi * eta).cwiseProduct(eta).colwise().sum()).transpose().array();
  const double N = static_cast<double>(batch.paths);
  const double mean = psi.mean();
  const Eigen::ArrayXd dev2 = (psi - mean).square();
  const double var = dev2.sum() / (N - 1.0);
  const double v2 = (dev2 - dev2.mean()).square().sum() / (N - 1.0);
  return {var, std::sqrt(v2 / N), batch.paths, batch.seed};
}

namespace {

struct WeightedSpectrum {
  SpectralDensity sd;
  CMat root;

  WeightedSpectrum(const OqhoModel& model, const Mat& Pi) : sd(model), root(sqrt_psd(Pi).cast<cplx>()) {}

  Vec eigenvalues(double lambda) const {
    const CMat k = root * sd.D(lambda) * root;
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (k + k.adjoint()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "spectral eigenvalues failed");
    return es.eigenvalues();
  }
};

double spectral_scale(const OqhoModel& model) { return std::max(opnorm2(model.A), 1e-6); }

}  // namespace

double classical_spectral_sup(const OqhoModel& model, const Mat& Pi) {
  validate_weight(model, Pi, true);
  const WeightedSpectrum ws(model, Pi);
  const double s = spectral_scale(model);
  auto top = [&](double u) { return ws.eigenvalues(s * std::tan(u)).maxCoeff(); };
  const int grid = 4001;
  const double half = 0.5 * kPi;
  double best = top(0.0), bu = 0.0;
  const double du = 2.0 * half / (grid + 1);
  for (int k = 1; k <= grid; ++k) {
    const double u = -half + k * du;
    const double v = top(u);
    if (v > best) {
      best = v;
      bu = u;
    }
  }
  // golden-section refinement around the best grid point
  double a = std::max(-half + 1e-12, bu - du), b = std::min(half - 1e-12, bu + du);
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = top(c), fd = top(d);
  for (int it = 0; it < 80; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = top(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = top(d);
    }
  }
  return std::max({best, fc, fd});
}

double classical_logdet_integral(const OqhoModel& model, const Mat& Pi, double theta, const QuadratureSpec& spec) {
  validate_weight(model, Pi, true);
  require_hurwitz(model);
  if (!(theta >= 0)) throw Error(ErrorCode::ThetaOutOfRange, "theta must be nonnegative");
  if (theta == 0.0 || opnorm2(Pi) == 0.0) return 0.0;
  const double sup = classical_spectral_sup(model, Pi);
  if (!(theta * sup < 1.0)) throw Error(ErrorCode::ThetaOutOfRange, "theta sup lambda_max(Pi D) must stay below 1");
  const WeightedSpectrum ws(model, Pi);
  auto f = [&](double lambda) {
    const Vec e = ws.eigenvalues(lambda);
    double v = 0;
    for (Eigen::Index k = 0; k < e.size(); ++k) v -= std::log1p(-theta * e(k));
    return v;
  };
  QuadratureSpec s = spec;
  const double an = opnorm2(model.A), bn = opnorm2(model.B);
  s.scale = spectral_scale(model);
  s.tail = TailHint{TailHint::Kind::Algebraic,
                    static_cast<double>(model.n()) * theta * opnorm2(Pi) * 8.0 * bn * bn / (1.0 - theta * sup), 2.0,
                    2.0 * an};
  return integrate_realline(f, s);
}

double classical_rs_rate_half(const OqhoModel& model, const Mat& Pi, double theta, const QuadratureSpec& spec) {
  return classical_logdet_integral(model, Pi, theta, spec) / (4.0 * kPi);
}

double classical_rs_rate_sde(const OqhoModel& model, const Mat& Pi, double theta, const QuadratureSpec& spec) {
  return classical_logdet_integral(model, Pi, theta, spec) / (2.0 * kPi);
}

double classical_rs_rate_series(const OqhoModel& model, const Mat& Pi, double theta, int order,
                                const QuadratureSpec& spec) {
  validate_weight(model, Pi, true);
  require_hurwitz(model);
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "series order must be >= 1");
  if (theta == 0.0 || opnorm2(Pi) == 0.0) return 0.0;
  const WeightedSpectrum ws(model, Pi);
  auto f = [&](double lambda) {
    const Vec e = ws.eigenvalues(lambda);
    double v = 0;
    for (Eigen::Index k = 0; k < e.size(); ++k) {
      double p = 1.0;
      for (int r = 1; r <= order; ++r) {
        p *= theta * e(k);
        v += p / r;
      }
    }
    return v;
  };
  QuadratureSpec s = spec;
  const double an = opnorm2(model.A), bn = opnorm2(model.B);
  s.scale = spectral_scale(model);
  const double x = theta * opnorm2(Pi) * 8.0 * bn * bn;
  s.tail = TailHint{TailHint::Kind::Algebraic, static_cast<double>(model.n()) * order * std::max(x, std::pow(x, order)),
                    2.0, std::max(2.0 * an, std::sqrt(x))};
  return integrate_realline(f, s) / (4.0 * kPi);
}

RsRateEstimate mc_rs_rate(const OqhoModel& model, const Mat& Pi, double theta, double horizon, long paths,
                          std::uint64_t seed, double h) {
  validate_weight(model, Pi, true);
  if (!(theta >= 0)) throw Error(ErrorCode::NegativeTheta, "theta must be nonnegative");
  if (!(horizon > 0)) throw Error(ErrorCode::NegativeTime, "horizon must be positive");
  if (paths < 100) throw Error(ErrorCode::InsufficientPaths, "at least 100 paths are required");
  RsRateEstimate out;
  out.rate.paths = paths;
  out.rate.seed = seed;
  out.ess = static_cast<double>(paths);
  if (theta == 0.0 || opnorm2(Pi) == 0.0) return out;

  long steps = static_cast<long>(std::llround(horizon / h));
  if (steps < 2) steps = 2;
  if (steps % 2) ++steps;
  const double dt = horizon / steps;
  const AugmentedStepper stepper = make_stepper(model, dt);
  const Eigen::Index n = model.n();
  const Eigen::Index d = 2 * n;
  std::vector<double> phi(d * d), chol(d * d), init(d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      phi[i * d + j] = stepper.Phi()(i, j);
      chol[i * d + j] = stepper.noise_chol()(i, j);
      init[i * d + j] = stepper.init_chol()(i, j);
    }
  auto psi = [&](const std::vector<double>& x) {
    double v = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) v += Pi(i, j) * (x[i] * x[j] + x[n + i] * x[n + j]);
    return v;
  };

  // trapezoid sums of psi up to t/2 and t
  Eigen::ArrayXd s_half(paths), s_full(paths);
  std::vector<double> x(d), y(d), z(d);
  for (long p = 0; p < paths; ++p) {
    std::mt19937_64 rng(path_seed(seed, static_cast<std::uint64_t>(p)));
    std::normal_distribution<double> nd;
    for (Eigen::Index i = 0; i < d; ++i) z[i] = nd(rng);
    for (Eigen::Index i = 0; i < d; ++i) {
      double s = 0;
      for (Eigen::Index j = 0; j <= i; ++j) s += init[i * d + j] * z[j];
      x[i] = s;
    }
    double prev = psi(x), acc = 0;
    for (long k = 1; k <= steps; ++k) {
      for (Eigen::Index i = 0; i < d; ++i) z[i] = nd(rng);
      for (Eigen::Index i = 0; i < d; ++i) {
        double s = 0;
        for (Eigen::Index j = 0; j < d; ++j) s += phi[i * d + j] * x[j];
        for (Eigen::Index j = 0; j <= i; ++j) s += chol[i * d + j] * z[j];
        y[i] = s;
      }
      std::swap(x, y);
      const double cur = psi(x);
      acc += 0.5 * dt * (prev + cur);
      prev = cur;
      if (k == steps / 2) s_half(p) = acc;
    }
    s_full(p) = acc;
  }

  const double N = static_cast<double>(paths);
  const Eigen::ArrayXd a1 = theta * s_full, a2 = theta * s_half;
  const double m1 = a1.maxCoeff(), m2 = a2.maxCoeff();
  const Eigen::ArrayXd e1 = (a1 - m1).exp(), e2 = (a2 - m2).exp();
  const double sum1 = e1.sum(), sum2 = e2.sum();
  out.ess = sum1 * sum1 / e1.square().sum();
  if (out.ess < 50) throw Error(ErrorCode::VarianceBlowup, "effective sample size below 50");
  const double half = 0.5 * horizon;
  const double L1 = m1 + std::log(sum1 / N);
  const double L2 = m2 + std::log(sum2 / N);
  out.rate.value = (L1 - L2) / half;
  out.full_horizon = L1 / horizon;

  // delete-one jackknife
  Eigen::ArrayXd loo(paths);
  for (long i = 0; i < paths; ++i) {
    const double l1 = m1 + std::log((sum1 - e1(i)) / (N - 1.0));
    const double l2 = m2 + std::log((sum2 - e2(i)) / (N - 1.0));
    loo(i) = (l1 - l2) / half;
  }
  const double mean = loo.mean();
  out.rate.std_error = std::sqrt((N - 1.0) / N * (loo - mean).square().sum());
  return out;
}

}  // namespace oqho
