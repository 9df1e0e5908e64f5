#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "p300snr/errors.hpp"
#include "p300snr/model.hpp"

using namespace p300snr;

namespace {

// Test-only oracle: plain Gauss-Jordan inverse, independent of the Cholesky
// path used by the library.
Matrix invert_naive(Matrix a) {
    const std::size_t n = a.rows();
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(pivot, col))) pivot = r;
        REQUIRE(std::fabs(a(pivot, col)) > 1e-12);
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const double d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a(r, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

GaussianP300Model identity_model(std::size_t dim) {
    Vector mu1(dim, 0.0);
    mu1[0] = 1.0;
    return build_model(Vector(dim, 0.0), std::move(mu1), Matrix::identity(dim));
}

}  // namespace

TEST_CASE("build_model: identity covariance") {
    const GaussianP300Model m = identity_model(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(m.chol.lower()(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-15));
}

TEST_CASE("build_model: rejects bad covariance") {
    Matrix zero_diag = Matrix::identity(2);
    zero_diag(1, 1) = 0.0;
    CHECK_THROWS_AS(build_model({0, 0}, {1, 0}, zero_diag), numerical_error);

    Matrix asym = Matrix::identity(2);
    asym(0, 1) = 0.5;
    CHECK_THROWS_AS(build_model({0, 0}, {1, 0}, asym), std::invalid_argument);

    CHECK_THROWS_AS(build_model({0, 0}, {1, 0, 0}, Matrix::identity(2)), std::invalid_argument);
}

TEST_CASE("build_model: hand Cholesky of [[4,2],[2,3]]") {
    Matrix sigma(2, 2);
    sigma(0, 0) = 4;
    sigma(0, 1) = 2;
    sigma(1, 0) = 2;
    sigma(1, 1) = 3;
    const GaussianP300Model m = build_model({0, 0}, {1, 0}, sigma);
    CHECK(m.chol.lower()(0, 0) == doctest::Approx(2.0));
    CHECK(m.chol.lower()(1, 0) == doctest::Approx(1.0));
    CHECK(m.chol.lower()(1, 1) == doctest::Approx(std::sqrt(2.0)));
    // sigma = L L^T within 1e-8 relative
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 2; ++k) s += m.chol.lower()(i, k) * m.chol.lower()(j, k);
            CHECK(s == doctest::Approx(sigma(i, j)).epsilon(1e-8));
        }
}

TEST_CASE("theoretical_snr: unit and scaled cases") {
    CHECK(theoretical_snr(identity_model(4)) == doctest::Approx(1.0).epsilon(1e-14));

    Vector mu1(4, 0.0);
    mu1[0] = 3.0;
    Matrix nine = Matrix::identity(4);
    for (std::size_t i = 0; i < 4; ++i) nine(i, i) = 9.0;
    CHECK(theoretical_snr(build_model(Vector(4, 0.0), mu1, nine)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("theoretical_snr: diag(1,4) case against explicit inverse") {
    Matrix sigma = Matrix::identity(2);
    sigma(1, 1) = 4.0;
    const GaussianP300Model m = build_model({0, 0}, {1, 1}, sigma);
    CHECK(theoretical_snr(m) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-12));

    const Matrix inv = invert_naive(sigma);
    const Vector diff = {1.0, 1.0};
    double gamma_sq = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) gamma_sq += diff[i] * inv(i, j) * diff[j];
    CHECK(theoretical_snr(m) == doctest::Approx(std::sqrt(gamma_sq)).epsilon(1e-12));
}

TEST_CASE("theoretical_snr: invariant under scaling and mean shifts") {
    Rng rng(77);
    GaussianP300Model m = make_synthetic_model(6, 0.9, CovarianceStructure::ar1, 0.3, rng);
    const double base = theoretical_snr(m);

    const double c = 3.7;
    Vector mu0 = m.mu0;
    Vector mu1 = m.mu1;
    Matrix sigma = m.sigma;
    for (std::size_t i = 0; i < 6; ++i) {
        mu0[i] = c * mu0[i] + 11.0;
        mu1[i] = c * mu1[i] + 11.0;
        for (std::size_t j = 0; j < 6; ++j) sigma(i, j) *= c * c;
    }
    CHECK(theoretical_snr(build_model(mu0, mu1, sigma)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("sample_trial: near-zero covariance pins the mean") {
    Matrix tiny = Matrix::identity(3);
    for (std::size_t i = 0; i < 3; ++i) tiny(i, i) = 1e-12;
    const GaussianP300Model m = build_model({0, 0, 0}, {1, 2, 3}, tiny);
    Rng rng(5);
    const Vector target = sample_trial(m, true, rng);
    const Vector baseline = sample_trial(m, false, rng);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::fabs(target[i] - m.mu1[i]) < 1e-5);
        CHECK(std::fabs(baseline[i] - m.mu0[i]) < 1e-5);
    }
}

TEST_CASE("sample_trial: empirical mean over 1e5 draws") {
    const GaussianP300Model m = identity_model(3);
    Rng rng(31);
    Vector mean(3, 0.0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const Vector x = sample_trial(m, true, rng);
        for (std::size_t k = 0; k < 3; ++k) mean[k] += x[k];
    }
    for (std::size_t k = 0; k < 3; ++k) {
        mean[k] /= n;
        CHECK(std::fabs(mean[k] - m.mu1[k]) < 0.01);  // 3/sqrt(1e5)
    }
}

TEST_CASE("sample_trial: deterministic under a fixed seed") {
    const GaussianP300Model m = identity_model(4);
    Rng a(123);
    Rng b(123);
    const Vector x = sample_trial(m, true, a);
    const Vector y = sample_trial(m, true, b);
    CHECK(x == y);
}

TEST_CASE("simulate_session: Appendix C counts") {
    const GaussianP300Model m = identity_model(2);
    SessionConfig config;
    config.geometry = {6, 6};
    config.cycles_per_symbol = 15;
    config.symbols = {{2, 4}};
    config.rng_seed = 99;
    const SessionData session = simulate_session(m, config);
    CHECK(session.trials.size() == 180);  // 12 stimuli x 15 cycles
}

TEST_CASE("simulate_session: per-cycle structure") {
    const GaussianP300Model m = identity_model(2);
    SessionConfig config;
    config.geometry = {6, 6};
    config.cycles_per_symbol = 15;
    config.symbols = {{2, 4}, {0, 0}, {5, 5}};
    config.rng_seed = 7;
    const SessionData session = simulate_session(m, config);
    REQUIRE(session.trials.size() == 3 * 15 * 12);

    for (std::size_t s = 0; s < 3; ++s) {
        for (int cycle = 0; cycle < 15; ++cycle) {
            std::set<int> stimuli;
            int labels = 0;
            for (const Trial& t : session.trials) {
                if (t.symbol_index != static_cast<int>(s) || t.cycle_index != cycle) continue;
                stimuli.insert(t.stimulus_id);
                labels += t.label;
                const auto [row, col] = config.symbols[s];
                const bool expect_label = t.stimulus_id == row || t.stimulus_id == 6 + col;
                CHECK(t.label == (expect_label ? 1 : 0));
            }
            CHECK(stimuli.size() == 12);  // every stimulus exactly once
            CHECK(*stimuli.begin() == 0);
            CHECK(*stimuli.rbegin() == 11);
            CHECK(labels == 2);  // target row + target column
        }
    }
}

TEST_CASE("simulate_session: rejects out-of-bounds targets") {
    const GaussianP300Model m = identity_model(2);
    SessionConfig config;
    config.geometry = {6, 6};
    config.symbols = {{6, 0}};
    CHECK_THROWS_AS(simulate_session(m, config), std::invalid_argument);
}

TEST_CASE("simulate_session: bit-identical under the same seed") {
    Rng rng(11);
    const GaussianP300Model m = make_synthetic_model(5, 0.8, CovarianceStructure::identity, 0.0, rng);
    SessionConfig config;
    config.geometry = {3, 4};
    config.cycles_per_symbol = 4;
    config.symbols = {{0, 1}, {2, 3}};
    config.rng_seed = 2024;
    const SessionData a = simulate_session(m, config);
    const SessionData b = simulate_session(m, config);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        CHECK(a.trials[i].features == b.trials[i].features);
        CHECK(a.trials[i].stimulus_id == b.trials[i].stimulus_id);
    }
}

TEST_CASE("make_synthetic_model: exact SNR by construction") {
    Rng rng(3);
    const GaussianP300Model m = make_synthetic_model(312, 0.7, CovarianceStructure::identity, 0.0, rng);
    CHECK(theoretical_snr(m) == doctest::Approx(0.7).epsilon(1e-10));

    Rng rng2(4);
    const GaussianP300Model z = make_synthetic_model(4, 0.0, CovarianceStructure::identity, 0.0, rng2);
    CHECK(z.mu1 == z.mu0);
}

TEST_CASE("make_synthetic_model: ar1 against the explicit-inverse oracle") {
    Rng rng(8);
    const GaussianP300Model m = make_synthetic_model(8, 1.2, CovarianceStructure::ar1, 0.5, rng);
    CHECK(theoretical_snr(m) == doctest::Approx(1.2).epsilon(1e-10));

    const Matrix inv = invert_naive(m.sigma);
    const Vector diff = subtract(m.mu1, m.mu0);
    double gamma_sq = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) gamma_sq += diff[i] * inv(i, j) * diff[j];
    CHECK(std::sqrt(gamma_sq) == doctest::Approx(1.2).epsilon(1e-9));

    CHECK_THROWS_AS(make_synthetic_model(8, 1.0, CovarianceStructure::ar1, 1.0, rng), std::domain_error);
    CHECK_THROWS_AS(make_synthetic_model(8, -1.0, CovarianceStructure::identity, 0.0, rng), std::domain_error);
}

TEST_CASE("slice_electrode_blocks: keeps the requested blocks") {
    SessionData session;
    session.config.geometry = {2, 2};
    session.config.cycles_per_symbol = 1;
    session.config.symbols = {{0, 0}};
    Trial t;
    t.features = {1, 2, 3, 4, 5, 6};  // 3 electrodes x 2 samples
    session.trials.push_back(t);
    const SessionData sliced = slice_electrode_blocks(session, 3, {0, 2});
    CHECK(sliced.trials.front().features == Vector{1, 2, 5, 6});
    CHECK_THROWS_AS(slice_electrode_blocks(session, 4, {0}), data_error);
    CHECK_THROWS_AS(slice_electrode_blocks(session, 3, {3}), std::invalid_argument);
}
