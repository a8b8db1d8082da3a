#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "covert/divergence.hpp"
#include "covert/rng.hpp"
#include "oracles.hpp"

using namespace covert;
using Catch::Approx;

namespace {

FiniteDistribution bsc_row0(double q) { return FiniteDistribution::bernoulli(q); }
FiniteDistribution bsc_row1(double q) { return FiniteDistribution::bernoulli(1.0 - q); }

}  // namespace

TEST_CASE("kl matches direct summation on reference points") {
  const auto b75 = FiniteDistribution::bernoulli(0.75);
  const auto b25 = FiniteDistribution::bernoulli(0.25);
  const double expect = oracle::kl_direct(b75.masses(), b25.masses());
  CHECK(expect == Approx(0.5 * std::log(3.0)).epsilon(1e-12));
  CHECK(kl(b75, b25) == Approx(expect).margin(1e-13));
  CHECK(kl(b75, b25) == Approx(0.549306).margin(1e-6));

  CHECK(kl(b25, b25) == 0.0);
  CHECK(kl(FiniteDistribution::bernoulli(1.0), FiniteDistribution::bernoulli(0.5)) ==
        Approx(std::log(2.0)).margin(1e-14));
}

TEST_CASE("kl sentinel and dimension errors") {
  CHECK(kl(FiniteDistribution::bernoulli(0.5), FiniteDistribution::bernoulli(0.0)) == kInf);
  CHECK(kl(FiniteDistribution::bernoulli(0.0), FiniteDistribution::bernoulli(0.0)) == 0.0);
  CHECK_THROWS_AS(kl(FiniteDistribution{0.5, 0.5}, FiniteDistribution{0.2, 0.3, 0.5}),
                  ConfigError);
}

TEST_CASE("tv reference points and Pinsker") {
  const auto b75 = FiniteDistribution::bernoulli(0.75);
  const auto b25 = FiniteDistribution::bernoulli(0.25);
  CHECK(tv(b75, b25) == Approx(0.5).margin(1e-15));
  CHECK(tv(b25, b25) == 0.0);

  CounterRng rng(41, {7});
  for (int i = 0; i < 100; ++i) {
    const size_t size = 2 + rng.next_below(5);
    const auto p = oracle::random_distribution(rng, size);
    const auto q = oracle::random_distribution(rng, size);
    const double v = tv(p, q);
    CHECK(v * v <= kl(p, q) + 1e-15);  // loosened Pinsker form
    CHECK(v == Approx(oracle::tv_direct(p.masses(), q.masses())).margin(1e-14));
  }
}

TEST_CASE("chi_k closed forms on symmetric channels") {
  // warden BSC(q): chi_2 = (1-2q)^2 / (q(1-q))
  for (double q : {0.25, 0.4}) {
    const auto q0 = bsc_row0(q), q1 = bsc_row1(q);
    const double closed = (1.0 - 2.0 * q) * (1.0 - 2.0 * q) / (q * (1.0 - q));
    CHECK(chi_k(q1, q0, 2) == Approx(closed).margin(1e-12));
    CHECK(chi_k(q1, q0, 2) ==
          Approx(oracle::chi_k_direct(q1.masses(), q0.masses(), 2)).margin(1e-13));
  }
  CHECK(chi_k(bsc_row1(0.25), bsc_row0(0.25), 2) == Approx(4.0 / 3.0).margin(1e-6));
  CHECK(chi_k(bsc_row1(0.4), bsc_row0(0.4), 2) == Approx(1.0 / 6.0).margin(1e-6));
  const auto q0 = bsc_row0(0.3);
  for (int k = 2; k <= 8; ++k) CHECK(chi_k(q0, q0, k) == 0.0);
}

TEST_CASE("eta_k restricted sums") {
  const auto q0 = bsc_row0(0.25), q1 = bsc_row1(0.25);
  CHECK(eta_k(q1, q0, 3) == Approx(-0.222222).margin(1e-6));
  CHECK(eta_k(q1, q0, 3) ==
        Approx(oracle::chi_k_direct(q1.masses(), q0.masses(), 3, true)).margin(1e-13));

  // Q1 >= Q0 pointwise: the restricted sum is empty
  const FiniteDistribution a{0.5, 0.5}, b{0.5, 0.5};
  CHECK(eta_k(a, b, 3) == 0.0);

  CounterRng rng(42, {11});
  for (int i = 0; i < 50; ++i) {
    const size_t size = 2 + rng.next_below(5);
    const auto p = oracle::random_distribution(rng, size);
    const auto q = oracle::random_distribution(rng, size);
    CHECK(eta_k(p, q, 4) >= 0.0);  // even power
  }
  CHECK_THROWS_AS(chi_k(FiniteDistribution{0.5, 0.5}, FiniteDistribution{1.0, 0.0}, 2),
                  InfeasibleError);
}

TEST_CASE("exact mixture divergence") {
  const auto q0 = bsc_row0(0.25), q1 = bsc_row1(0.25);
  const double expect = oracle::mixture_kl_direct(0.1, q1.masses(), q0.masses());
  CHECK(expect == Approx(0.0064014).margin(1e-7));
  CHECK(mixture_divergence_exact(0.1, q1, q0) == Approx(expect).margin(1e-13));
  CHECK(mixture_divergence_exact(0.0, q1, q0) == 0.0);
  CHECK(mixture_divergence_exact(1.0, q1, q0) == Approx(kl(q1, q0)).margin(1e-13));
}

TEST_CASE("mixture divergence bounds sandwich the exact value") {
  const auto q0 = bsc_row0(0.25), q1 = bsc_row1(0.25);
  const auto b = mixture_divergence_bounds(0.01, q1, q0);
  const double exact = mixture_divergence_exact(0.01, q1, q0);
  REQUIRE(b.lower_valid);
  CHECK(b.lower - 1e-12 <= exact);
  CHECK(exact <= b.upper + 1e-12);
  CHECK(exact == Approx(0.0000666).epsilon(0.01));

  // leading term: upper/alpha^2 -> chi2/2 as alpha -> 0
  const double chi2 = chi_k(q1, q0, 2);
  const auto tiny = mixture_divergence_bounds(1e-7, q1, q0);
  CHECK(tiny.upper / (1e-7 * 1e-7) == Approx(chi2 / 2.0).epsilon(1e-5));

  const auto q0b = bsc_row0(0.4), q1b = bsc_row1(0.4);
  const auto loose = mixture_divergence_bounds(0.001, q1b, q0b);
  const double exact_b = mixture_divergence_exact(0.001, q1b, q0b);
  CHECK(loose.loose_lower <= exact_b);
  CHECK(exact_b <= loose.loose_upper);
}

TEST_CASE("sandwich holds over a random corpus") {
  // 200 random warden pairs, alphabet 2..6, three mixture weights
  CounterRng rng(7, {2024});
  int lower_checked = 0;
  for (int i = 0; i < 200; ++i) {
    const size_t size = 2 + rng.next_below(5);
    const auto q0 = oracle::random_distribution(rng, size);
    const auto q1 = oracle::random_distribution(rng, size);
    for (double alpha : {1e-4, 1e-3, 1e-2}) {
      const auto b = mixture_divergence_bounds(alpha, q1, q0);
      const double exact = mixture_divergence_exact(alpha, q1, q0);
      CHECK(exact <= b.upper + 1e-12);
      CHECK(exact <= b.loose_upper + 1e-12);
      if (b.lower_valid) {
        ++lower_checked;
        CHECK(b.lower - 1e-12 <= exact);
        CHECK(b.loose_lower - 1e-12 <= exact);
      }
      // identity between the two mutual-information routes
      const double direct = mutual_info_binary(alpha, q1, q0);
      const double algebraic = alpha * kl(q1, q0) - exact;
      CHECK(std::abs(direct - algebraic) <= 1e-12);
    }
  }
  CHECK(lower_checked > 100);  // the footnote condition holds on most draws
}

TEST_CASE("mutual information reference point") {
  const auto q0 = bsc_row0(0.25), q1 = bsc_row1(0.25);
  CHECK(mutual_info_binary(0.1, q1, q0) == Approx(0.0485292).margin(1e-7));
  CHECK(mutual_info_binary(0.0, q1, q0) == 0.0);
  CHECK(mutual_info_binary(1.0, q1, q0) == 0.0);
}

TEST_CASE("product additivity at tiny blocklengths") {
  const auto q0 = bsc_row0(0.3), q1 = bsc_row1(0.3);
  const double alpha = 0.07;
  const double single = mixture_divergence_exact(alpha, q1, q0);
  const std::vector<double> qa = mix(alpha, q1, q0).masses();
  for (uint32_t n = 1; n <= 4; ++n) {
    // enumerate Z^n directly
    long double div = 0.0L;
    const uint64_t total = uint64_t(1) << n;
    for (uint64_t idx = 0; idx < total; ++idx) {
      long double pa = 1.0L, p0 = 1.0L;
      for (uint32_t i = 0; i < n; ++i) {
        const int z = int((idx >> i) & 1);
        pa *= qa[size_t(z)];
        p0 *= q0[size_t(z)];
      }
      div += pa * std::log(pa / p0);
    }
    CHECK(double(div) == Approx(double(n) * single).margin(1e-13));
  }
}

TEST_CASE("Jensen-Shannon divergence of a binary test") {
  CHECK(jensen_shannon_binary(0.3, 0.3) == 0.0);                      // blind test
  CHECK(jensen_shannon_binary(0.0, 1.0) == Approx(std::log(2.0)));    // perfect test
  const double v = jensen_shannon_binary(0.1, 0.9);
  CHECK(v > 0.0);
  CHECK(v < std::log(2.0));
  CHECK(2.0 * v <= kl_bernoulli(0.9, 0.1) + 1e-12);

  // bound chain on a grid of (alpha, beta)
  for (double a : {0.05, 0.2, 0.5, 0.8}) {
    for (double beta : {0.05, 0.3, 0.6, 0.9}) {
      const double j = jensen_shannon_binary(a, 1.0 - beta);
      CHECK(j >= -1e-15);
      CHECK(j <= std::log(2.0) + 1e-15);
      CHECK(2.0 * j <= kl_bernoulli(1.0 - beta, a) + 1e-12);
    }
  }
}
