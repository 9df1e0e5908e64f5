#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "p300snr/model.hpp"
#include "p300snr/snr.hpp"

using namespace p300snr;

namespace {

LdaEstimates manual_estimates(Vector mu0, Vector mu1, Matrix sigma, double lambda) {
    LdaEstimates est;
    est.mu0_hat = std::move(mu0);
    est.mu1_hat = std::move(mu1);
    est.sigma_hat = std::move(sigma);
    est.shrinkage = lambda;
    Matrix ridged = est.sigma_hat;
    for (std::size_t i = 0; i < ridged.rows(); ++i) ridged(i, i) += lambda;
    est.weights = CholeskyFactor::decompose(ridged).solve(subtract(est.mu1_hat, est.mu0_hat));
    return est;
}

Trial make_trial(Vector features, int label) {
    Trial t;
    t.features = std::move(features);
    t.label = label;
    return t;
}

}  // namespace

TEST_CASE("empirical_snr: identity covariance and degenerate difference") {
    const LdaEstimates unit = manual_estimates({0, 0}, {1, 0}, Matrix::identity(2), 0.0);
    CHECK(empirical_snr(unit) == doctest::Approx(1.0).epsilon(1e-14));

    const LdaEstimates flat = manual_estimates({0.5, -1}, {0.5, -1}, Matrix::identity(2), 0.0);
    CHECK(empirical_snr(flat) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("empirical_snr: equals theoretical gamma on true parameters") {
    Rng rng(12);
    const GaussianP300Model model = make_synthetic_model(6, 1.3, CovarianceStructure::ar1, 0.4, rng);
    const LdaEstimates oracle = oracle_weights(model);
    CHECK(empirical_snr(oracle) == doctest::Approx(theoretical_snr(model)).epsilon(1e-12));
    CHECK(empirical_snr(oracle) == doctest::Approx(1.3).epsilon(1e-10));
}

TEST_CASE("empirical_snr: consistent on 1e5 simulated trials") {
    Rng mrng(13);
    const GaussianP300Model model = make_synthetic_model(8, 1.0, CovarianceStructure::identity, 0.0, mrng);
    Rng rng(14);
    std::vector<Trial> trials;
    trials.reserve(100000);
    for (int i = 0; i < 100000; ++i) {
        const bool target = (i % 2) == 0;
        trials.push_back(make_trial(sample_trial(model, target, rng), target ? 1 : 0));
    }
    const double snr = empirical_snr(fit_lda(trials, ShrinkagePolicy::fixed(0.0)));
    CHECK(snr > 0.95);
    CHECK(snr < 1.05);
}

TEST_CASE("proxies: stated examples") {
    const LdaEstimates est = manual_estimates({0.0, 0.0, 0.0}, {0.2, -0.1, 0.5}, Matrix::identity(3), 0.0);
    CHECK(peak_to_peak_v1(est) == doctest::Approx(0.5));
    CHECK(area_under_curve(est) == doctest::Approx(0.6));

    const LdaEstimates est2 = manual_estimates({0.0, 3.0}, {1.0, 2.0}, Matrix::identity(2), 0.0);
    CHECK(peak_to_peak_v2(est2) == doctest::Approx(-1.0));  // max(mu1) - max(mu0) = 2 - 3

    const LdaEstimates flat = manual_estimates({1.0, 1.0}, {1.0, 1.0}, Matrix::identity(2), 0.0);
    CHECK(peak_to_peak_v1(flat) == doctest::Approx(0.0));
    CHECK(peak_to_peak_v2(flat) == doctest::Approx(0.0));
    CHECK(area_under_curve(flat) == doctest::Approx(0.0));

    // All-negative difference: v1 is its (negative) maximum.
    const LdaEstimates neg = manual_estimates({1.0, 1.0}, {0.5, 0.2}, Matrix::identity(2), 0.0);
    CHECK(peak_to_peak_v1(neg) == doctest::Approx(-0.5));

    // Shifting both means leaves v2 unchanged.
    const LdaEstimates shifted = manual_estimates({0.0 + 5, 3.0 + 5}, {1.0 + 5, 2.0 + 5}, Matrix::identity(2), 0.0);
    CHECK(peak_to_peak_v2(shifted) == doctest::Approx(peak_to_peak_v2(est2)).epsilon(1e-12));
}

TEST_CASE("gamma-hat is invariant under invertible linear maps; proxies are not") {
    // Fit on raw trials, then on linearly transformed trials (lambda = 0).
    Rng mrng(15);
    const GaussianP300Model model = make_synthetic_model(4, 1.1, CovarianceStructure::identity, 0.0, mrng);
    Rng rng(16);
    std::vector<Trial> raw;
    for (int i = 0; i < 4000; ++i) {
        const bool target = (i % 2) == 0;
        raw.push_back(make_trial(sample_trial(model, target, rng), target ? 1 : 0));
    }
    // A fixed invertible map: scale + shear + permutation-ish mixing.
    const double a[4][4] = {
        {2.0, 0.3, 0.0, 0.0}, {0.0, 1.0, -0.5, 0.0}, {0.7, 0.0, 1.5, 0.2}, {0.0, 0.0, 0.0, 0.6}};
    std::vector<Trial> mapped;
    for (const Trial& t : raw) {
        Vector y(4, 0.0);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) y[static_cast<std::size_t>(i)] += a[i][j] * t.features[static_cast<std::size_t>(j)];
        mapped.push_back(make_trial(std::move(y), t.label));
    }
    const LdaEstimates est_raw = fit_lda(raw, ShrinkagePolicy::fixed(0.0));
    const LdaEstimates est_map = fit_lda(mapped, ShrinkagePolicy::fixed(0.0));
    CHECK(empirical_snr(est_map) == doctest::Approx(empirical_snr(est_raw)).epsilon(1e-8));

    // The discriminating half of the property: each proxy moves.
    CHECK(std::fabs(peak_to_peak_v1(est_map) - peak_to_peak_v1(est_raw)) > 1e-3);
    CHECK(std::fabs(peak_to_peak_v2(est_map) - peak_to_peak_v2(est_raw)) > 1e-3);
    CHECK(std::fabs(area_under_curve(est_map) - area_under_curve(est_raw)) > 1e-3);
}

TEST_CASE("gamma-hat is biased upward in small samples") {
    // 200 trials, D = 50, true gamma = 0.5: the mean estimate overshoots.
    Rng mrng(17);
    const GaussianP300Model model = make_synthetic_model(50, 0.5, CovarianceStructure::identity, 0.0, mrng);
    Rng rng(18);
    double mean_snr = 0.0;
    const int fits = 20;
    for (int rep = 0; rep < fits; ++rep) {
        std::vector<Trial> trials;
        for (int i = 0; i < 200; ++i) {
            const bool target = (i % 2) == 0;
            trials.push_back(make_trial(sample_trial(model, target, rng), target ? 1 : 0));
        }
        mean_snr += empirical_snr(fit_lda(trials, ShrinkagePolicy::fixed(0.0)));
    }
    mean_snr /= fits;
    CHECK(mean_snr > 0.5);
}

TEST_CASE("snr report bundles the four measures") {
    const LdaEstimates est = manual_estimates({0, 0}, {1, 0}, Matrix::identity(2), 0.25);
    const SnrReport report = make_snr_report(est);
    CHECK(report.empirical_snr == doctest::Approx(std::sqrt(1.0 / 1.25)).epsilon(1e-12));
    CHECK(report.peak_to_peak_v1 == doctest::Approx(1.0));
    CHECK(report.peak_to_peak_v2 == doctest::Approx(1.0));
    CHECK(report.area_under_curve == doctest::Approx(1.0));
    CHECK(report.shrinkage_used == 0.25);
    CHECK(std::isfinite(report.empirical_snr));
}
