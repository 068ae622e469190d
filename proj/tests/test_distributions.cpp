#include <doctest.h>

#include <cmath>

#include "ningarch/distributions.hpp"

using namespace ningarch;

namespace {

FamilySpec poisson() { return {Family::Poisson}; }
FamilySpec gp(double alpha) { return {Family::GeneralizedPoisson, 0, alpha}; }
FamilySpec binom(int n) { return {Family::Binomial, n}; }
FamilySpec zib(int n, double omega) { return {Family::ZeroInflatedBinomial, n, 0.0, omega}; }

// central finite difference of log_pmf in the mean parameter
double fd_score_mean(const FamilySpec& s, int k, double m, double h) {
    return (log_pmf(s, k, m + h) - log_pmf(s, k, m - h)) / (2.0 * h);
}

double fd_score_aux(const FamilySpec& s, int k, double m, double h) {
    return (log_pmf(s.with_aux(s.aux() + h), k, m) -
            log_pmf(s.with_aux(s.aux() - h), k, m)) /
           (2.0 * h);
}

}  // namespace

TEST_CASE("log_pmf anchor values") {
    CHECK(log_pmf(poisson(), 0, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));
    // GP at k=0 reduces to -lambda/(1+alpha lambda)
    for (double lambda : {0.3, 1.0, 4.2})
        for (double alpha : {0.1, 0.5, 2.0})
            CHECK(log_pmf(gp(alpha), 0, lambda) ==
                  doctest::Approx(-lambda / (1.0 + alpha * lambda)).epsilon(1e-13));
    // ZIB at k=0: ln(omega + (1-omega)(1-p)^n)
    CHECK(log_pmf(zib(10, 0.43), 0, 0.3) ==
          doctest::Approx(std::log(0.43 + 0.57 * std::pow(0.7, 10))).epsilon(1e-12));
    // a conditional mean with exp(-lambda) = 0.5 puts mass ln 0.5 at zero
    CHECK(log_pmf(poisson(), 0, std::log(2.0)) ==
          doctest::Approx(std::log(0.5)).epsilon(1e-13));
}

TEST_CASE("domain and support errors") {
    CHECK_THROWS_AS(log_pmf(poisson(), -1, 1.0), std::out_of_range);
    CHECK_THROWS_AS(log_pmf(binom(5), 6, 0.5), std::out_of_range);
    CHECK_THROWS_AS(log_pmf(poisson(), 0, -1.0), std::domain_error);
    CHECK_THROWS_AS(log_pmf(binom(5), 1, 1.5), std::domain_error);
    CHECK_THROWS_AS(log_pmf(gp(-0.2), 1, 1.0), std::domain_error);
    CHECK_THROWS_AS(log_pmf(zib(5, 1.0), 1, 0.5), std::domain_error);
    CHECK_THROWS_AS(score_wrt_aux(poisson(), 1, 1.0), UnsupportedFamilyError);
    CHECK_THROWS_AS(score_wrt_aux(binom(5), 1, 0.5), UnsupportedFamilyError);
}

TEST_CASE("moments anchor values") {
    auto [m1, v1] = moments(gp(0.25), 1.0);
    CHECK(m1 == doctest::Approx(1.0));
    CHECK(v1 == doctest::Approx(1.5625).epsilon(1e-14));

    auto [mb, vb] = moments(binom(10), 0.3);
    auto [mz, vz] = moments(zib(10, 0.0), 0.3);
    CHECK(mz == doctest::Approx(mb).epsilon(1e-15));
    CHECK(vz == doctest::Approx(vb).epsilon(1e-15));
}

TEST_CASE("moments match brute force over the support") {
    struct Case { FamilySpec spec; double m; };
    const Case cases[] = {
        {zib(10, 0.43), 0.5}, {zib(7, 0.2), 0.15}, {binom(12), 0.7},
        {poisson(), 3.1},     {gp(0.3), 2.4},
    };
    for (const auto& c : cases) {
        const auto [mean, var] = moments(c.spec, c.m);
        const int kmax = c.spec.bounded()
                             ? c.spec.bound
                             : int(mean + 25.0 * std::sqrt(var)) + 50;
        double bf_mean = 0.0, bf_m2 = 0.0, mass = 0.0;
        for (int k = 0; k <= kmax; ++k) {
            const double p = std::exp(log_pmf(c.spec, k, c.m));
            mass += p;
            bf_mean += k * p;
            bf_m2 += double(k) * k * p;
        }
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(bf_mean == doctest::Approx(mean).epsilon(1e-9));
        CHECK(bf_m2 - bf_mean * bf_mean == doctest::Approx(var).epsilon(1e-9));
    }
}

TEST_CASE("normalization over a (n,p,omega) grid") {
    for (int n : {3, 10, 25})
        for (double p : {0.05, 0.5, 0.95})
            for (double w : {0.0, 0.43, 0.9}) {
                double mass = 0.0;
                for (int k = 0; k <= n; ++k) mass += std::exp(log_pmf(zib(n, w), k, p));
                CHECK(std::fabs(mass - 1.0) < 1e-12);
                double bmass = 0.0;
                for (int k = 0; k <= n; ++k) bmass += std::exp(log_pmf(binom(n), k, p));
                CHECK(std::fabs(bmass - 1.0) < 1e-12);
            }
    for (double lambda : {0.5, 5.0, 20.0})
        for (const auto& spec : {poisson(), gp(0.2)}) {
            const auto [mean, var] = moments(spec, lambda);
            // the GP tail is heavy near alpha*lambda ~ 1, so grow K until the
            // cumulative mass clears the threshold
            int kmax = int(mean + 20.0 * std::sqrt(var));
            double mass = 0.0;
            int k = 0;
            while (true) {
                for (; k <= kmax; ++k) mass += std::exp(log_pmf(spec, k, lambda));
                if (mass >= 1.0 - 1e-9 || kmax > 1000000) break;
                kmax *= 2;
            }
            CHECK(mass >= 1.0 - 1e-9);
        }
}

TEST_CASE("GP collapses to Poisson as alpha -> 0") {
    // restricted to the part of the support carrying mass; far in the tail
    // the exact difference alpha*((k-lambda)^2 - k) exceeds the tolerance
    for (double lambda : {0.5, 3.0, 20.0})
        for (int k = 0; k <= std::min(50, int(lambda + 15.0 * std::sqrt(lambda))); ++k)
            CHECK(std::fabs(log_pmf(gp(1e-8), k, lambda) - log_pmf(poisson(), k, lambda)) <
                  1e-5);
}

TEST_CASE("ZIB with omega = 0 takes the exact binomial path") {
    for (int k = 0; k <= 10; ++k)
        CHECK(log_pmf(zib(10, 0.0), k, 0.37) == log_pmf(binom(10), k, 0.37));
}

TEST_CASE("score anchor values") {
    CHECK(score_wrt_mean(poisson(), 3, 3.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(score_wrt_mean(binom(10), 3, 0.3) == doctest::Approx(0.0).epsilon(1e-12));
    // ZIB, k > 0: d/domega log pmf = -1/(1-omega)
    CHECK(score_wrt_aux(zib(10, 0.43), 4, 0.3) ==
          doctest::Approx(-1.0 / 0.57).epsilon(1e-14));
}

TEST_CASE("scores match finite differences of log_pmf") {
    // GP score in lambda, alpha near the fitted value of the overdispersed case
    CHECK(score_wrt_mean(gp(0.13), 3, 2.0) ==
          doctest::Approx(fd_score_mean(gp(0.13), 3, 2.0, 1e-6)).epsilon(1e-7));
    // GP score in alpha stays finite as alpha -> 0+
    CHECK(score_wrt_aux(gp(1e-6), 4, 2.5) ==
          doctest::Approx(fd_score_aux(gp(1e-6), 4, 2.5, 1e-7)).epsilon(1e-6));
    // ZIB score in omega at the zero state
    CHECK(score_wrt_aux(zib(10, 0.43), 0, 0.3) ==
          doctest::Approx(fd_score_aux(zib(10, 0.43), 0, 0.3, 1e-7)).epsilon(1e-7));

    struct Case { FamilySpec spec; int k; double m; };
    const Case cases[] = {
        {poisson(), 0, 0.7},   {poisson(), 7, 2.2},  {gp(0.25), 0, 1.3},
        {gp(0.8), 6, 4.0},     {binom(10), 0, 0.4},  {binom(10), 10, 0.6},
        {zib(10, 0.43), 0, 0.3}, {zib(10, 0.43), 5, 0.55}, {zib(6, 0.1), 2, 0.2},
    };
    for (const auto& c : cases) {
        const double h = 1e-6 * (1.0 + std::fabs(c.m));
        CHECK(score_wrt_mean(c.spec, c.k, c.m) ==
              doctest::Approx(fd_score_mean(c.spec, c.k, c.m, h)).epsilon(1e-6));
        if (c.spec.has_aux()) {
            const double ha = 1e-6 * (1.0 + std::fabs(c.spec.aux()));
            CHECK(score_wrt_aux(c.spec, c.k, c.m) ==
                  doctest::Approx(fd_score_aux(c.spec, c.k, c.m, ha)).epsilon(1e-6));
        }
    }
}

TEST_CASE("sampler moments agree with the pmf") {
    const int n_draws = 1000000;

    std::mt19937_64 rng(42);
    double sum = 0.0;
    for (int i = 0; i < n_draws; ++i) sum += sample(poisson(), 4.0, rng);
    // mean of n_draws Poisson(4) draws: sd of the mean = 2/sqrt(n)
    CHECK(std::fabs(sum / n_draws - 4.0) < 3.0 * 2.0 / std::sqrt(double(n_draws)));

    rng.seed(43);
    double s1 = 0.0, s2 = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        const double d = sample(gp(0.25), 2.0, rng);
        s1 += d;
        s2 += d * d;
    }
    const double var = s2 / n_draws - (s1 / n_draws) * (s1 / n_draws);
    // Var = 2 * 1.5^2 = 4.5; MC sd of the sample variance ~ sqrt((m4-var^2)/n)
    CHECK(std::fabs(var - 4.5) < 0.1);

    rng.seed(44);
    const double eps = 1e-3;
    int zeros = 0;
    for (int i = 0; i < 100000; ++i)
        zeros += sample(zib(10, 1.0 - eps), 0.5, rng) == 0;
    CHECK(double(zeros) / 100000.0 >= 1.0 - 2.0 * eps);

    rng.seed(45);
    for (int i = 0; i < 1000; ++i) {
        const int d = sample(binom(10), 0.5, rng);
        CHECK(d >= 0);
        CHECK(d <= 10);
    }
}

TEST_CASE("log_factorial table and tail agree") {
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(5) == doctest::Approx(std::log(120.0)).epsilon(1e-14));
    CHECK(log_factorial(20000) ==
          doctest::Approx(std::lgamma(20001.0)).epsilon(1e-12));
}
