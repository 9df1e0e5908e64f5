#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "p300snr/accuracy.hpp"
#include "p300snr/errors.hpp"
#include "p300snr/rng.hpp"

using namespace p300snr;

namespace {

// Golden value for H_6(1.5), pinned by the Monte Carlo oracle below with
// seed 20240501 and 1e7 draws: max of 5 standard normals vs N(1.5, 1).
constexpr double kGoldenH6at15 = 0.6133256;
constexpr double kGoldenH6at15Tol = 4.62e-4;  // 3 standard errors

// Same oracle at x = sqrt(15) (seed 20240502): effective SNR of 15 cycles at
// gamma = 1.
constexpr double kGoldenH6atSqrt15 = 0.9866534;
constexpr double kGoldenH6atSqrt15Tol = 1.089e-4;

double mc_selection_probability(double x, int n_alternatives, int draws, std::uint64_t seed) {
    Rng rng(seed);
    long hits = 0;
    for (int i = 0; i < draws; ++i) {
        const double target = x + rng.normal();
        double best = rng.normal();
        for (int k = 2; k < n_alternatives; ++k) best = std::max(best, rng.normal());
        if (target > best) ++hits;
    }
    return static_cast<double>(hits) / draws;
}

}  // namespace

TEST_CASE("accuracy function: chance at x = 0") {
    for (int n : {2, 3, 6, 12, 36}) {
        CHECK(accuracy_function(n, 0.0) == doctest::Approx(1.0 / n).epsilon(1e-10));
    }
}

TEST_CASE("accuracy function: N = 2 closed form") {
    // P(S1 > S2) for independent N(x,1), N(0,1) is Phi(x/sqrt(2)).
    for (double x : {-3.0, -1.0, 0.25, 1.0, 2.5}) {
        const double want = 0.5 * std::erfc(-x / (std::sqrt(2.0) * std::sqrt(2.0)));
        CHECK(accuracy_function(2, x) == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK(accuracy_function(2, 1.0) == doctest::Approx(0.7602499389065233).epsilon(1e-8));
}

TEST_CASE("accuracy function: saturation") {
    CHECK(accuracy_function(6, 8.0) >= 0.9999);
    CHECK(accuracy_function(6, 8.0) <= 1.0);
}

TEST_CASE("accuracy function: Monte Carlo golden value at (6, 1.5)") {
    const double h = accuracy_function(6, 1.5);
    CHECK(std::fabs(h - kGoldenH6at15) <= kGoldenH6at15Tol);
    // The oracle itself is deterministic; re-derive the frozen value.
    const double oracle = mc_selection_probability(1.5, 6, 10000000, 20240501);
    CHECK(oracle == doctest::Approx(kGoldenH6at15).epsilon(1e-9));
}

TEST_CASE("accuracy function: domain errors") {
    CHECK_THROWS_AS(accuracy_function(1, 0.0), std::domain_error);
    CHECK_THROWS_AS(accuracy_function(6, std::numeric_limits<double>::quiet_NaN()), std::domain_error);
    CHECK_THROWS_AS(accuracy_function(6, std::numeric_limits<double>::infinity()), std::domain_error);
    QuadratureConfig bad;
    bad.panel_count = 8;
    CHECK_THROWS_AS(accuracy_function(6, 0.0, bad), std::domain_error);
    bad = {};
    bad.half_width = 4.0;
    CHECK_THROWS_AS(accuracy_function(6, 0.0, bad), std::domain_error);
}

TEST_CASE("derivative: N = 2 closed form") {
    // d/dx Phi(x/sqrt(2)) = phi(x/sqrt(2))/sqrt(2); at 0 that is phi(0)/sqrt(2).
    const double want = std::exp(0.0) / std::sqrt(4.0 * M_PI);
    CHECK(accuracy_function_derivative(2, 0.0) == doctest::Approx(want).epsilon(1e-10));
    CHECK(want == doctest::Approx(0.2820948).epsilon(1e-6));
}

TEST_CASE("derivative: matches central finite differences") {
    const double h = 1e-4;
    for (int n : {2, 6, 12}) {
        for (double x : {-2.0, 0.0, 0.7, 3.0}) {
            const double fd = (accuracy_function(n, x + h) - accuracy_function(n, x - h)) / (2 * h);
            CHECK(std::fabs(accuracy_function_derivative(n, x) - fd) <= 1e-6);
        }
    }
}

TEST_CASE("derivative: vanishes but stays positive far left") {
    const double d = accuracy_function_derivative(6, -20.0);
    CHECK(d >= 0.0);
    CHECK(d < 1e-12);
}

TEST_CASE("monotonicity: strict increase over random pairs") {
    Rng rng(1234);
    for (int rep = 0; rep < 200; ++rep) {
        const int n = 2 + static_cast<int>(rng.integer_below(11));
        double x1 = -5.0 + 10.0 * rng.uniform01();
        double x2 = -5.0 + 10.0 * rng.uniform01();
        if (x1 > x2) std::swap(x1, x2);
        if (x2 - x1 < 1e-6) continue;
        CHECK(accuracy_function(n, x2) > accuracy_function(n, x1));
    }
}

TEST_CASE("bounds: chance floor and unit ceiling") {
    for (int n : {2, 6, 36}) {
        for (double x : {0.0, 0.5, 2.0, 9.0}) {
            const double h = accuracy_function(n, x);
            CHECK(h >= 1.0 / n - 1e-12);
            CHECK(h <= 1.0);
        }
        for (double x : {-0.3, -2.0, -7.0}) {
            CHECK(accuracy_function(n, x) < 1.0 / n);
        }
    }
}

TEST_CASE("N-ordering: more alternatives, lower accuracy") {
    for (double x : {-1.0, 0.5, 2.0}) {
        double prev = accuracy_function(2, x);
        for (int n = 3; n <= 36; ++n) {
            const double h = accuracy_function(n, x);
            CHECK(h < prev);
            prev = h;
        }
    }
}

TEST_CASE("quadrature stability: doubling panels changes nothing") {
    QuadratureConfig coarse;
    QuadratureConfig fine;
    fine.panel_count = coarse.panel_count * 2;
    for (int n : {2, 6, 36}) {
        for (double x : {-4.0, 0.0, 1.5, 6.0}) {
            CHECK(std::fabs(accuracy_function(n, x, coarse) - accuracy_function(n, x, fine)) < 1e-9);
        }
    }
}

TEST_CASE("quadrature: converged over the full N <= 100, |x| <= 10 envelope") {
    // Doubling the panel count and widening the window together move the
    // result by far less than the 1e-8 accuracy target.
    QuadratureConfig heavy;
    heavy.panel_count = 160;
    heavy.half_width = 16.0;
    for (int n : {2, 20, 100}) {
        for (double x : {-10.0, -3.0, 0.0, 2.5, 10.0}) {
            CHECK(std::fabs(accuracy_function(n, x) - accuracy_function(n, x, heavy)) < 1e-10);
        }
    }
    // Deep saturation both ways stays clamped to [0, 1].
    CHECK(accuracy_function(100, 10.0) <= 1.0);
    CHECK(accuracy_function(100, -10.0) >= 0.0);
}

TEST_CASE("symbol accuracy: chance and SNR/cycle trade-off") {
    const SpellerGeometry g{6, 6};
    CHECK(symbol_accuracy(g, 1, 0.0) == doctest::Approx(1.0 / 36).epsilon(1e-9));
    CHECK(symbol_accuracy(g, 15, 0.0) == doctest::Approx(1.0 / 36).epsilon(1e-9));
    // n cycles at gamma behave like one cycle at sqrt(n)*gamma.
    CHECK(symbol_accuracy(g, 4, 0.7) == doctest::Approx(symbol_accuracy(g, 1, 1.4)).epsilon(1e-12));
    CHECK_THROWS_AS(symbol_accuracy(g, 1, -0.1), std::domain_error);
    CHECK_THROWS_AS(symbol_accuracy(SpellerGeometry{1, 6}, 1, 0.5), std::domain_error);
}

TEST_CASE("symbol accuracy: Monte Carlo golden value at (6x6, 15, 1)") {
    const double want = kGoldenH6atSqrt15 * kGoldenH6atSqrt15;
    const double tol = 2.5 * kGoldenH6atSqrt15Tol;  // first-order error propagation through the square
    CHECK(std::fabs(symbol_accuracy(SpellerGeometry{6, 6}, 15, 1.0) - want) <= tol);
    const double oracle = mc_selection_probability(std::sqrt(15.0), 6, 10000000, 20240502);
    CHECK(oracle == doctest::Approx(kGoldenH6atSqrt15).epsilon(1e-9));
}

TEST_CASE("score moments: identity algebra") {
    const Vector mu0 = {0.0, 0.0};
    const Vector mu1 = {1.0, 0.0};
    const Matrix eye = Matrix::identity(2);
    ScoreMoments m = score_moments(mu0, mu1, eye, 1);
    CHECK(m.m0 == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(m.m1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m.sigma_n == doctest::Approx(1.0).epsilon(1e-14));

    m = score_moments(mu0, mu1, eye, 4);
    CHECK(m.sigma_n == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("score moments: diagonal case against an explicit-inverse oracle") {
    // mu0 = e1, mu1 = 2 e1, Sigma = 4 I: hand algebra gives (0.25, 0.5, 0.5).
    const Vector mu0 = {1.0, 0.0};
    const Vector mu1 = {2.0, 0.0};
    Matrix sigma = Matrix::identity(2);
    sigma(0, 0) = sigma(1, 1) = 4.0;
    const ScoreMoments m = score_moments(mu0, mu1, sigma, 1);
    CHECK(m.m0 == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(m.m1 == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m.sigma_n == doctest::Approx(0.5).epsilon(1e-14));

    // Independent route: explicit 2x2 inverse.
    const double inv00 = 0.25;
    const Vector diff = {mu1[0] - mu0[0], 0.0};
    const double m0_explicit = diff[0] * inv00 * mu0[0];
    const double m1_explicit = diff[0] * inv00 * mu1[0];
    CHECK(m.m0 == doctest::Approx(m0_explicit).epsilon(1e-14));
    CHECK(m.m1 == doctest::Approx(m1_explicit).epsilon(1e-14));
}

TEST_CASE("score moments: (m1-m0)/sigma_n = sqrt(n)*gamma") {
    Rng rng(55);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t d = 3 + rng.integer_below(4);
        Matrix sigma = Matrix::identity(d);
        // random SPD: A A^T + I
        Matrix a(d, d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) a(i, j) = rng.normal() * 0.4;
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < d; ++k) s += a(i, k) * a(j, k);
                sigma(i, j) = s + (i == j ? 1.0 : 0.0);
            }
        Vector mu0(d);
        Vector mu1(d);
        for (std::size_t i = 0; i < d; ++i) {
            mu0[i] = rng.normal();
            mu1[i] = rng.normal();
        }
        const int n = 1 + static_cast<int>(rng.integer_below(15));
        const ScoreMoments m = score_moments(mu0, mu1, sigma, n);
        const double gamma = score_moments(mu0, mu1, sigma, 1).sigma_n;
        CHECK((m.m1 - m.m0) / m.sigma_n ==
              doctest::Approx(std::sqrt(static_cast<double>(n)) * gamma).epsilon(1e-10));
    }
}

TEST_CASE("score moments: non-PD sigma is a factorization error") {
    Matrix sigma = Matrix::identity(2);
    sigma(1, 1) = -1.0;
    CHECK_THROWS_AS(score_moments({0.0, 0.0}, {1.0, 0.0}, sigma, 1), numerical_error);
}

TEST_CASE("invert accuracy: round trip") {
    const SpellerGeometry g{6, 6};
    const double acc = symbol_accuracy(g, 1, 0.8);
    CHECK(invert_accuracy(g, 1, acc) == doctest::Approx(0.8).epsilon(1e-5));
    // Inverting the Monte Carlo-pinned value at n = 15 recovers gamma = 1.
    const double golden_acc = kGoldenH6atSqrt15 * kGoldenH6atSqrt15;
    CHECK(std::fabs(invert_accuracy(g, 15, golden_acc) - 1.0) <= 1e-4);
    // And inverting the analytic value recovers gamma = 1 tightly.
    CHECK(invert_accuracy(g, 15, symbol_accuracy(g, 15, 1.0)) == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("invert accuracy: domain errors at and below chance") {
    const SpellerGeometry g{6, 6};
    CHECK_THROWS_AS(invert_accuracy(g, 1, 1.0 / 36), std::domain_error);
    CHECK_THROWS_AS(invert_accuracy(g, 1, 0.01), std::domain_error);
    CHECK_THROWS_AS(invert_accuracy(g, 1, 1.0), std::domain_error);
}

TEST_CASE("invert accuracy: targets near the endpoints stay bracketed") {
    const SpellerGeometry g{6, 6};
    const double near_one = invert_accuracy(g, 1, 1.0 - 1e-9);
    CHECK(near_one > 5.0);
    CHECK(near_one <= 20.0);
    const double near_chance = invert_accuracy(g, 1, 1.0 / 36 + 1e-6);
    CHECK(near_chance >= 0.0);
    CHECK(near_chance < 0.01);
    CHECK(symbol_accuracy(g, 1, near_chance) == doctest::Approx(1.0 / 36 + 1e-6).epsilon(1e-4));
}
