#include "oqho/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace oqho {

std::uint64_t DescentTable::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

std::string DescentTable::bits(std::size_t index) const {
  std::string s(static_cast<std::size_t>(r - 2), '0');
  for (int k = 0; k < r - 2; ++k)
    if (index >> (r - 3 - k) & 1u) s[k] = '1';
  return s;
}

DescentTable delta_table(int r) {
  if (r < 2) throw Error(ErrorCode::InvalidArgument, "delta_table needs r >= 2");
  if (r > 12) throw Error(ErrorCode::OrderTooLarge, "delta_table enumerates permutations only up to r = 12");
  DescentTable t;
  t.r = r;
  t.counts.assign(std::size_t{1} << (r - 2), 0);
  std::vector<int> c(r - 1);
  std::iota(c.begin(), c.end(), 1);
  do {
    std::size_t idx = 0;
    for (int j = 1; j < r - 1; ++j) idx = idx << 1 | (c[j - 1] > c[j] ? 1u : 0u);
    ++t.counts[idx];
  } while (std::next_permutation(c.begin(), c.end()));
  return t;
}

WeightedKernel::WeightedKernel(const CovarianceKernel& kernel, const Mat& Pi)
    : kernel_(&kernel), root_(sqrt_psd(Pi).cast<cplx>()) {}

CMat WeightedKernel::operator()(double tau) const { return root_ * kernel_->S(tau) * root_; }

namespace {

int check_order(int r, int hi) {
  if (r < 2) throw Error(ErrorCode::InvalidArgument, "cumulant order must be >= 2");
  if (r > hi) throw Error(ErrorCode::OrderTooLarge, "cumulant order above " + std::to_string(hi));
  return r;
}

// Tr(X Y) without forming the product.
cplx trace_product(const CMat& x, const CMat& y) { return (x.transpose().cwiseProduct(y)).sum(); }

void descend(const CMat& prefix, int j, std::size_t idx, const DescentTable& table, const CMat& f0, const CMat& f1,
             cplx& acc) {
  if (j == table.r) {
    acc += static_cast<double>(table.counts[idx]) * trace_product(prefix, f1);
    return;
  }
  descend(prefix * f0, j + 1, idx << 1, table, f0, f1, acc);
  descend(prefix * f1, j + 1, idx << 1 | 1u, table, f0, f1, acc);
}

}  // namespace

cplx cumulant_rate_integrand(const SpectralDensity& sd, const Mat& Pi, const DescentTable& table, double lambda) {
  const auto [d0, d1] = sd.D_pair(lambda);
  const CMat pi = Pi.cast<cplx>();
  const CMat f0 = pi * d0;
  const CMat f1 = pi * d1;
  cplx acc = 0;
  descend(f0, 2, 0, table, f0, f1, acc);
  return acc;
}

double cumulant_rate(const OqhoModel& model, const Mat& Pi, int r, const QuadratureSpec& spec) {
  check_order(r, 10);
  validate_weight(model, Pi);
  require_hurwitz(model);
  const SpectralDensity sd(model);
  const DescentTable table = delta_table(r);
  const double pn = opnorm2(Pi);
  const double bn = opnorm2(model.B);
  const double an = opnorm2(model.A);
  if (pn == 0.0 || bn == 0.0) return 0.0;

  // For |lambda| >= 2||A||: ||G(i lambda)|| <= 2||B||/|lambda| and ||Omega|| = 2,
  // so each Pi D factor is below 8 ||Pi|| ||B||^2 / lambda^2.
  double c = static_cast<double>(table.total()) * static_cast<double>(model.n());
  for (int k = 0; k < r; ++k) c *= 8.0 * pn * bn * bn;
  QuadratureSpec s = spec;
  s.scale = std::max(an, 1e-6);
  s.tail = TailHint{TailHint::Kind::Algebraic, c, 2.0 * r, 2.0 * an};
  auto f = [&](double lambda) { return cumulant_rate_integrand(sd, Pi, table, lambda); };
  const cplx integral = integrate_realline(f, s);
  const double pref = std::ldexp(1.0, r - 2) / std::numbers::pi;
  const cplx value = pref * integral;
  if (std::abs(value.imag()) > 1e-8 * std::max(std::abs(value.real()), s.abs_tol))
    throw Error(ErrorCode::NumericalFailure, "cumulant rate has a non-negligible imaginary part");
  return value.real();
}

namespace {

// sum_i w_{i+a} w_i w_{i-b} for trapezoid weights (h inside, h/2 at the ends)
// over all admissible i; only the extreme i can touch a grid end.
double trapezoid_weight(const std::vector<int>& shifts, int g, double h) {
  int lo = 0, hi = g - 1;
  for (int s : shifts) {
    lo = std::max(lo, -s);
    hi = std::min(hi, g - 1 - s);
  }
  if (lo > hi) return 0.0;
  auto factor = [&](int i) {
    double f = 1.0;
    for (int s : shifts) {
      const int k = i + s;
      if (k == 0 || k == g - 1) f *= 0.5;
    }
    return f;
  };
  const double hr = std::pow(h, static_cast<double>(shifts.size()));
  const int count = hi - lo + 1;
  if (count == 1) return hr * factor(lo);
  return hr * (count - 2 + factor(lo) + factor(hi));
}

}  // namespace

double cumulant_finite_td(const CovarianceKernel& kernel, const Mat& Pi, int r, double t, int grid) {
  check_order(r, 3);
  validate_weight(kernel.model(), Pi);
  if (!(t > 0)) throw Error(ErrorCode::NegativeTime, "cumulant_finite_td needs t > 0");
  if (grid < 5) throw Error(ErrorCode::InvalidArgument, "cumulant_finite_td needs grid >= 5");
  const int g = grid;
  const double h = t / (g - 1);
  const CMat pi = Pi.cast<cplx>();
  // PiS[d + g - 1] = Pi S(d h), PiSt[...] = Pi S(d h)^T
  std::vector<CMat> piS(2 * g - 1), piSt(2 * g - 1);
  for (int d = -(g - 1); d <= g - 1; ++d) {
    const CMat s = kernel.S(d * h);
    piS[d + g - 1] = pi * s;
    piSt[d + g - 1] = pi * s.transpose();
  }
  auto at = [&](const std::vector<CMat>& v, int d) -> const CMat& { return v[d + g - 1]; };

  cplx acc = 0;
  double mag = 0;
  if (r == 2) {
    // t1 - t2 = a h
    for (int a = -(g - 1); a <= g - 1; ++a) {
      const double w = trapezoid_weight({a, 0}, g, h);
      const cplx v = trace_product(at(piS, a), at(piSt, a));
      acc += w * v;
      mag += w * std::abs(v);
    }
    acc *= 2.0;
    mag *= 2.0;
  } else {
    // t1 - t2 = a h, t2 - t3 = b h, t1 - t3 = (a + b) h; gamma_2 in {0, 1}
    // gives Pi S(b h) + Pi S(-b h)^T in the middle.
    for (int a = -(g - 1); a <= g - 1; ++a) {
      for (int b = -(g - 1); b <= g - 1; ++b) {
        const int c = a + b;
        if (c < -(g - 1) || c > g - 1) continue;
        const double w = trapezoid_weight({a, 0, -b}, g, h);
        if (w == 0.0) continue;
        const CMat mid = at(piS, b) + at(piSt, -b);
        const cplx v = trace_product((at(piS, a) * mid).eval(), at(piSt, c));
        acc += w * v;
        mag += w * std::abs(v);
      }
    }
    acc *= 4.0;
    mag *= 4.0;
  }
  if (std::abs(acc.imag()) > 1e-8 * std::max(mag, 1e-300))
    throw Error(ErrorCode::NumericalFailure, "time-domain cumulant has a non-negligible imaginary part");
  return acc.real();
}

double cumulant_finite_td(const OqhoModel& model, const Mat& Pi, int r, double t, int grid) {
  validate_weight(model, Pi);
  return cumulant_finite_td(CovarianceKernel(model), Pi, r, t, grid);
}

double cumulant_td_weighted(const OqhoModel& model, const Mat& Pi, int r, const std::vector<double>& times,
                            const std::vector<double>& weights) {
  check_order(r, 4);
  validate_weight(model, Pi);
  const std::size_t g = times.size();
  if (g == 0 || weights.size() != g) throw Error(ErrorCode::DimensionMismatch, "one weight per time point");
  const CovarianceKernel kernel(model);
  const DescentTable table = delta_table(r);
  const CMat pi = Pi.cast<cplx>();
  // S^{[0]}(t_i - t_k) and S^{[1]}(t_i - t_k) = S(t_k - t_i)^T, premultiplied by Pi
  std::vector<CMat> f0(g * g), f1(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t k = 0; k < g; ++k) {
      f0[i * g + k] = pi * kernel.S(times[i] - times[k]);
      f1[i * g + k] = pi * kernel.S(times[k] - times[i]).transpose();
    }
  std::vector<std::size_t> idx(r, 0);
  cplx acc = 0;
  double mag = 0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < r; ++j) w *= weights[idx[j]];
    if (w != 0.0) {
      cplx term = 0;
      for (std::size_t gam = 0; gam < table.size(); ++gam) {
        CMat x = f0[idx[0] * g + idx[1]];
        for (int j = 2; j <= r - 1; ++j) {
          const bool bit = gam >> (r - 1 - j) & 1u;
          const std::size_t e = idx[j - 1] * g + idx[j];
          x = x * (bit ? f1[e] : f0[e]);
        }
        // Pi S(t_1 - t_r)^T
        term += static_cast<double>(table.counts[gam]) *
                trace_product(x, (pi * kernel.S(times[idx[0]] - times[idx[r - 1]]).transpose()).eval());
      }
      acc += w * term;
      mag += std::abs(w * term);
    }
    int j = 0;
    while (j < r && ++idx[j] == g) idx[j++] = 0;
    if (j == r) break;
  }
  acc *= std::ldexp(1.0, r - 1);
  mag *= std::ldexp(1.0, r - 1);
  if (std::abs(acc.imag()) > 1e-8 * std::max(mag, 1e-300))
    throw Error(ErrorCode::NumericalFailure, "weighted cumulant has a non-negligible imaginary part");
  return acc.real();
}

std::vector<std::vector<std::pair<int, int>>> pairings(int r) {
  std::vector<std::vector<std::pair<int, int>>> out;
  std::vector<std::pair<int, int>> cur;
  std::vector<bool> used(2 * r, false);
  auto rec = [&](auto&& self) -> void {
    int first = -1;
    for (int k = 0; k < 2 * r; ++k)
      if (!used[k]) {
        first = k;
        break;
      }
    if (first < 0) {
      out.push_back(cur);
      return;
    }
    used[first] = true;
    for (int k = first + 1; k < 2 * r; ++k) {
      if (used[k]) continue;
      used[k] = true;
      cur.emplace_back(first, k);
      self(self);
      cur.pop_back();
      used[k] = false;
    }
    used[first] = false;
  };
  rec(rec);
  return out;
}

double wick_moment_oracle(const OqhoModel& model, const Mat& Pi, int r, const std::vector<double>& times,
                          const std::vector<double>& weights) {
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "moment order must be >= 1");
  if (r > 3) throw Error(ErrorCode::OrderTooLarge, "Wick oracle supports r <= 3");
  const std::size_t g = times.size();
  if (g == 0 || weights.size() != g) throw Error(ErrorCode::DimensionMismatch, "one weight per time point");
  if (g > 20) throw Error(ErrorCode::GridTooLarge, "Wick oracle supports at most 20 time points");
  validate_weight(model, Pi, true);
  const CovarianceKernel kernel(model);
  const WeightedKernel K(kernel, Pi);
  std::vector<CMat> kk(g * g);
  for (std::size_t i = 0; i < g; ++i)
    for (std::size_t k = 0; k < g; ++k) kk[i * g + k] = K(times[i] - times[k]);

  const auto pp = pairings(r);
  const int n = static_cast<int>(model.n());
  std::vector<std::size_t> ti(r, 0);
  std::vector<int> ell(r, 0);
  cplx acc = 0;
  double mag = 0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < r; ++j) w *= weights[ti[j]];
    if (w != 0.0) {
      cplx sum = 0;
      // positions 2q and 2q+1 both carry factor q: Z_{l_q}(s_q) Z_{l_q}(s_q)
      std::fill(ell.begin(), ell.end(), 0);
      while (true) {
        for (const auto& p : pp) {
          cplx prod = 1;
          for (const auto& [j, k] : p) {
            const int dj = j / 2, dk = k / 2;
            prod *= kk[ti[dj] * g + ti[dk]](ell[dj], ell[dk]);
          }
          sum += prod;
        }
        int q = 0;
        while (q < r && ++ell[q] == n) ell[q++] = 0;
        if (q == r) break;
      }
      acc += w * sum;
      mag += std::abs(w * sum);
    }
    int j = 0;
    while (j < r && ++ti[j] == g) ti[j++] = 0;
    if (j == r) break;
  }
  if (std::abs(acc.imag()) > 1e-8 * std::max(mag, 1e-300))
    throw Error(ErrorCode::NumericalFailure, "Wick moment has a non-negligible imaginary part");
  return acc.real();
}

std::vector<double> cumulants_from_moments(const std::vector<double>& moments) {
  // kappa_k = mu_k - sum_{j=1}^{k-1} C(k-1, j-1) kappa_j mu_{k-j}
  const std::size_t r = moments.size();
  std::vector<double> kappa(r);
  for (std::size_t k = 1; k <= r; ++k) {
    double v = moments[k - 1];
    double binom = 1.0;  // C(k-1, j-1)
    for (std::size_t j = 1; j < k; ++j) {
      v -= binom * kappa[j - 1] * moments[k - j - 1];
      binom = binom * static_cast<double>(k - j) / static_cast<double>(j);
    }
    kappa[k - 1] = v;
  }
  return kappa;
}

}  // namespace oqho
