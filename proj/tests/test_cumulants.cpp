#include "catch_amalgamated.hpp"

#include <random>

#include "oqho/cumulants.hpp"
#include "oqho/quartic.hpp"
#include "oqho/random_model.hpp"
#include "test_support.hpp"

using namespace oqho;
using testing::code_of;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("descent tables") {
  CHECK(delta_table(2).counts == std::vector<std::uint64_t>{1});
  CHECK(delta_table(3).counts == std::vector<std::uint64_t>{1, 1});
  CHECK(delta_table(4).counts == std::vector<std::uint64_t>{1, 2, 2, 1});
  CHECK(delta_table(5).counts == std::vector<std::uint64_t>{1, 3, 5, 3, 3, 5, 3, 1});
  CHECK(delta_table(4).bits(1) == "01");
  CHECK(delta_table(5).bits(4) == "100");
  CHECK(delta_table(2).bits(0).empty());
  std::uint64_t fact = 1;
  for (int r = 2; r <= 9; ++r) {
    const DescentTable t = delta_table(r);
    CHECK(t.total() == fact);
    fact *= static_cast<std::uint64_t>(r);
    // complementing every indicator maps ascents to descents
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.counts[i] == t.counts[t.size() - 1 - i]);
  }
  CHECK(code_of([] { delta_table(1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { delta_table(13); }) == ErrorCode::OrderTooLarge);
}

TEST_CASE("pairings count is the double factorial") {
  CHECK(pairings(1).size() == 1);
  CHECK(pairings(2).size() == 3);
  CHECK(pairings(3).size() == 15);
  CHECK(pairings(4).size() == 105);
}

TEST_CASE("cumulants of Gaussian moments vanish beyond the second") {
  const double mu = 0.7, s2 = 1.9;
  const std::vector<double> m{mu, mu * mu + s2, mu * mu * mu + 3 * mu * s2,
                              std::pow(mu, 4) + 6 * mu * mu * s2 + 3 * s2 * s2};
  const auto k = cumulants_from_moments(m);
  CHECK_THAT(k[0], WithinRel(mu, 1e-15));
  CHECK_THAT(k[1], WithinRel(s2, 1e-14));
  CHECK_THAT(k[2], WithinAbs(0.0, 1e-13));
  CHECK_THAT(k[3], WithinAbs(0.0, 1e-12));
}

TEST_CASE("lattice cumulants agree with Wick moments") {
  std::mt19937_64 rng(41);
  const OqhoModel m = random_model(rng, 2, 2, 0.2);
  const Mat Pi = random_psd(rng, 2);
  const std::vector<double> t{0.0, 0.3, 0.7, 1.6};
  const std::vector<double> w{0.4, 1.0, 0.8, 0.5};
  std::vector<double> moments;
  for (int r = 1; r <= 3; ++r) moments.push_back(wick_moment_oracle(m, Pi, r, t, w));
  const auto kappa = cumulants_from_moments(moments);
  const double mean = mean_rate(m, Pi) * (0.4 + 1.0 + 0.8 + 0.5);
  CHECK_THAT(kappa[0], WithinRel(mean, 1e-13));
  CHECK_THAT(cumulant_td_weighted(m, Pi, 2, t, w), WithinRel(kappa[1], 1e-11));
  CHECK_THAT(cumulant_td_weighted(m, Pi, 3, t, w), WithinRel(kappa[2], 1e-10));
}

TEST_CASE("tensor lattice and brute-force weighted sum coincide") {
  std::mt19937_64 rng(42);
  const OqhoModel m = random_model(rng, 4, 2, 0.2);
  const Mat Pi = random_psd(rng, 4);
  const double t = 2.0;
  const int g = 9;
  std::vector<double> times, w;
  for (int i = 0; i < g; ++i) {
    times.push_back(t * i / (g - 1));
    w.push_back((i == 0 || i == g - 1) ? 0.5 * t / (g - 1) : t / (g - 1));
  }
  for (int r : {2, 3})
    CHECK_THAT(cumulant_finite_td(m, Pi, r, t, g), WithinRel(cumulant_td_weighted(m, Pi, r, times, w), 1e-11));
}

TEST_CASE("second-order frequency rate equals the Lyapunov variance rate") {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 5; ++k) {
    const OqhoModel m = random_model(rng, 4, 4, 0.1);
    const Mat Pi = random_psd(rng, 4);
    CHECK_THAT(cumulant_rate(m, Pi, 2), WithinRel(variance_rate(m, Pi).rate, 1e-8));
  }
}

TEST_CASE("vacuum cumulants vanish") {
  const Fixture f = tiny_example();
  const OqhoModel m = testing::model_of(f);
  for (int r : {2, 3, 4}) CHECK_THAT(cumulant_rate(m, f.Pi, r), WithinAbs(0.0, 1e-12));
}

TEST_CASE("order limits") {
  const Fixture f = tiny_example();
  const OqhoModel m = testing::model_of(f);
  CHECK(code_of([&] { cumulant_rate(m, f.Pi, 1); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { cumulant_rate(m, f.Pi, 11); }) == ErrorCode::OrderTooLarge);
  CHECK(code_of([&] { cumulant_finite_td(m, f.Pi, 4, 1.0, 11); }) == ErrorCode::OrderTooLarge);
  CHECK(code_of([&] { wick_moment_oracle(m, f.Pi, 4, {0.0}, {1.0}); }) == ErrorCode::OrderTooLarge);
  CHECK(code_of([&] { cumulant_finite_td(m, f.Pi, 2, 0.0, 11); }) == ErrorCode::NegativeTime);
}
