#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oqho/gaussian_state.hpp"
#include "oqho/quadrature.hpp"

namespace oqho {

// Counts of permutations of {1, ..., r-1} by their vector of consecutive
// inversion indicators (gamma_2, ..., gamma_{r-1}); gamma_2 is the most
// significant bit of the index.
struct DescentTable {
  int r = 2;
  std::vector<std::uint64_t> counts;

  std::size_t size() const { return counts.size(); }
  std::uint64_t total() const;
  // e.g. "01" for r = 4; empty for r = 2
  std::string bits(std::size_t index) const;
};

DescentTable delta_table(int r);

// sqrt(Pi) S(tau) sqrt(Pi)
class WeightedKernel {
 public:
  WeightedKernel(const CovarianceKernel& kernel, const Mat& Pi);
  CMat operator()(double tau) const;

 private:
  const CovarianceKernel* kernel_;
  CMat root_;
};

// Gamma-summed integrand of the asymptotic cumulant rate at one frequency,
// without the 2^{r-2}/pi prefactor. The value is complex so that its
// imaginary residue can be inspected.
cplx cumulant_rate_integrand(const SpectralDensity& sd, const Mat& Pi, const DescentTable& table, double lambda);

double cumulant_rate(const OqhoModel& model, const Mat& Pi, int r, const QuadratureSpec& spec = {});

// Tensor-trapezoid evaluation of the time-domain cumulant formula on [0, t]^r
// with `grid` points per axis. Exploits that the integrand depends on time
// differences only.
double cumulant_finite_td(const OqhoModel& model, const Mat& Pi, int r, double t, int grid);
double cumulant_finite_td(const CovarianceKernel& kernel, const Mat& Pi, int r, double t, int grid);

// Same formula with the integral replaced by sum_i w_{i_1} ... w_{i_r} over
// an arbitrary time grid (brute force, r <= 4).
double cumulant_td_weighted(const OqhoModel& model, const Mat& Pi, int r, const std::vector<double>& times,
                            const std::vector<double>& weights);

// E(phi^r) for phi = sum_i w_i X(t_i)^T Pi X(t_i) in the invariant state, by
// enumerating all pairings of the 2r Gaussian factors (Wick).
double wick_moment_oracle(const OqhoModel& model, const Mat& Pi, int r, const std::vector<double>& times,
                          const std::vector<double>& weights);

// Pairings of {0, ..., 2r-1}, (2r-1)!! of them.
std::vector<std::vector<std::pair<int, int>>> pairings(int r);

std::vector<double> cumulants_from_moments(const std::vector<double>& moments);

}  // namespace oqho
