#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

#include "oqho/error.hpp"

namespace oqho {

// Tail envelope |f(x)| <= c |x|^{-rate} (Algebraic) or c e^{-rate |x|} (Exponential).
struct TailHint {
  enum class Kind { Algebraic, Exponential };
  Kind kind = Kind::Algebraic;
  double c = 1.0;
  double rate = 2.0;
  // the envelope is only claimed for |x| >= from
  double from = 0.0;
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 4000;
  std::optional<TailHint> tail;
  // characteristic abscissa scale used by the real-line map
  double scale = 1.0;

  void validate() const {
    if (!(abs_tol > 0 && abs_tol < 1) || !(rel_tol > 0 && rel_tol < 1))
      throw Error(ErrorCode::InvalidArgument, "quadrature tolerances must lie in (0, 1)");
    if (max_subdivisions < 16) throw Error(ErrorCode::InvalidArgument, "max_subdivisions must be >= 16");
    if (!(scale > 0) || !std::isfinite(scale)) throw Error(ErrorCode::InvalidArgument, "quadrature scale must be positive");
  }
};

namespace detail {

inline double qnorm(double x) { return std::abs(x); }
inline double qnorm(const std::complex<double>& x) { return std::abs(x); }
template <typename Derived>
double qnorm(const Eigen::MatrixBase<Derived>& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename T>
struct Panel {
  double a, b;
  T value;
  double err;
};

struct ByError {
  template <typename P>
  bool operator()(const P& x, const P& y) const {
    return x.err < y.err;
  }
};

// Gauss-Kronrod 7/15 on [a, b]; error estimate |K15 - G7|.
template <typename F>
auto gk15(const F& f, double a, double b) {
  using T = std::decay_t<decltype(f(a))>;
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T fc = f(c);
  T kron = fc * kWgk[7];
  T gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    T f1 = f(c - dx);
    T f2 = f(c + dx);
    T s = f1 + f2;
    kron = kron + s * kWgk[j];
    if (j % 2 == 1) gauss = gauss + s * kWg[j / 2];
  }
  T k = kron * h;
  T g = gauss * h;
  T diff = k - g;
  return Panel<T>{a, b, k, qnorm(diff)};
}

// Globally adaptive bisection driven by the largest local error.
template <typename F>
auto adapt(const F& f, double a, double b, const QuadratureSpec& spec) {
  using P = decltype(gk15(f, a, b));
  std::priority_queue<P, std::vector<P>, ByError> heap;
  P first = gk15(f, a, b);
  auto total = first.value;
  double err = first.err;
  heap.push(first);
  int pieces = 1;
  while (err > std::max(spec.abs_tol, spec.rel_tol * qnorm(total))) {
    if (pieces >= spec.max_subdivisions)
      throw Error(ErrorCode::NoConvergence, "adaptive quadrature exhausted its subdivision budget");
    P worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b))
      throw Error(ErrorCode::NoConvergence, "adaptive quadrature reached floating-point resolution");
    P left = gk15(f, worst.a, mid);
    P right = gk15(f, mid, worst.b);
    total = total - worst.value + left.value + right.value;
    err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++pieces;
    // resum periodically so cancellation in the running totals stays bounded
    if (pieces % 64 == 0) {
      auto copy = heap;
      P p = copy.top();
      copy.pop();
      total = p.value;
      err = p.err;
      while (!copy.empty()) {
        total = total + copy.top().value;
        err += copy.top().err;
        copy.pop();
      }
    }
  }
  return total;
}

}  // namespace detail

// Adaptive G7/K15. Infinite endpoints are handled by a rational change of
// variables whose Gauss nodes never touch the singular end.
template <typename F>
auto integrate_line(const F& f, double a, double b, const QuadratureSpec& spec = {}) -> std::decay_t<decltype(f(a))> {
  spec.validate();
  using T = std::decay_t<decltype(f(a))>;
  if (std::isnan(a) || std::isnan(b)) throw Error(ErrorCode::InvalidArgument, "NaN integration limit");
  if (a > b) {
    T v = integrate_line(f, b, a, spec);
    return T(v * -1.0);
  }
  const bool ia = std::isinf(a), ib = std::isinf(b);
  if (!ia && !ib) {
    if (a == b) return T(f(a) * 0.0);
    return detail::adapt(f, a, b, spec);
  }
  const double s = spec.scale;
  if (ia && ib) {
    auto g = [&](double u) {
      const double c = std::cos(u);
      return T(f(s * std::tan(u)) * (s / (c * c)));
    };
    const double half = 0.5 * std::numbers::pi;
    return detail::adapt(g, -half, half, spec);
  }
  if (ib) {
    auto g = [&](double u) {
      const double one = 1.0 - u;
      return T(f(a + s * u / one) * (s / (one * one)));
    };
    return detail::adapt(g, 0.0, 1.0, spec);
  }
  auto g = [&](double u) {
    const double one = 1.0 - u;
    return T(f(b - s * u / one) * (s / (one * one)));
  };
  return detail::adapt(g, 0.0, 1.0, spec);
}

// Cut-off Lambda so that both tails of the envelope contribute < abs_tol / 10.
inline double realline_cutoff(const TailHint& hint, double abs_tol) {
  if (!(hint.c >= 0) || !(hint.rate > 0)) throw Error(ErrorCode::InvalidArgument, "invalid tail hint");
  if (hint.c == 0) return 0.0;
  const double budget = abs_tol / 10.0;
  if (hint.kind == TailHint::Kind::Algebraic) {
    const double p = hint.rate;
    if (p <= 1.0) throw Error(ErrorCode::MissingTailBound, "algebraic tail must decay faster than 1/x");
    return std::max(hint.from, std::pow(2.0 * hint.c / ((p - 1.0) * budget), 1.0 / (p - 1.0)));
  }
  return std::max(hint.from, std::log(2.0 * hint.c / (hint.rate * budget)) / hint.rate);
}

// Integral over the real line by symmetric truncation [-L, L] followed by
// adaptive quadrature in the variable u = atan(x / scale).
template <typename F>
auto integrate_realline(const F& f, const QuadratureSpec& spec = {}) {
  spec.validate();
  using T = std::decay_t<decltype(f(0.0))>;
  const double s = spec.scale;
  TailHint hint;
  if (spec.tail) {
    hint = *spec.tail;
  } else {
    // Fit |f| ~ c |x|^{-p} from two far samples on each side.
    const double x1 = 1e3 * s, x2 = 1e4 * s;
    const double n1 = std::max(detail::qnorm(f(x1)), detail::qnorm(f(-x1)));
    const double n2 = std::max(detail::qnorm(f(x2)), detail::qnorm(f(-x2)));
    if (n1 == 0.0 && n2 == 0.0) {
      hint = TailHint{TailHint::Kind::Algebraic, 0.0, 2.0};
    } else {
      const double p = (n2 > 0.0 && n1 > 0.0) ? std::log10(n1 / n2) : 2.0;
      if (!(p >= 2.0 - 0.05)) throw Error(ErrorCode::MissingTailBound, "integrand decays slower than 1/x^2");
      const double pp = std::min(p, 8.0);
      hint = TailHint{TailHint::Kind::Algebraic, std::max(n1 * std::pow(x1, pp), n2 * std::pow(x2, pp)), pp, x1};
    }
  }
  const double cut = realline_cutoff(hint, spec.abs_tol);
  if (cut == 0.0) return T(f(0.0) * 0.0);
  auto g = [&](double u) {
    const double c = std::cos(u);
    return T(f(s * std::tan(u)) * (s / (c * c)));
  };
  const double umax = std::atan(cut / s);
  return detail::adapt(g, -umax, umax, spec);
}

// Composite trapezoid rule on the cube [0, t]^r with `grid` points per axis.
// f receives a pointer to r coordinates.
template <typename F>
auto integrate_cube(const F& f, double t, int r, int grid) {
  using T = std::decay_t<decltype(f(static_cast<const double*>(nullptr)))>;
  if (r < 1) throw Error(ErrorCode::InvalidArgument, "integrate_cube: r must be >= 1");
  if (r > 4) throw Error(ErrorCode::DimensionTooLarge, "integrate_cube supports r <= 4");
  if (grid < 3) throw Error(ErrorCode::InvalidArgument, "integrate_cube: grid must be >= 3");
  if (!(t >= 0)) throw Error(ErrorCode::NegativeTime, "integrate_cube: negative horizon");
  const double h = t / (grid - 1);
  std::array<int, 4> idx{};
  std::array<double, 4> x{};
  std::optional<T> acc;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < r; ++k) {
      x[k] = idx[k] * h;
      w *= (idx[k] == 0 || idx[k] == grid - 1) ? 0.5 * h : h;
    }
    T v = f(x.data());
    if (acc) *acc = *acc + v * w;
    else acc = T(v * w);
    int k = 0;
    while (k < r && ++idx[k] == grid) idx[k++] = 0;
    if (k == r) break;
  }
  return *acc;
}

}  // namespace oqho
