#include "p300snr/snr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "p300snr/errors.hpp"

namespace p300snr {

double empirical_snr(const LdaEstimates& est) {
    const std::size_t d = est.mu0_hat.size();
    if (d == 0 || est.mu1_hat.size() != d || est.sigma_hat.rows() != d || est.sigma_hat.cols() != d)
        throw std::invalid_argument("empirical_snr: inconsistent estimates");
    Matrix ridged = est.sigma_hat;
    for (std::size_t i = 0; i < d; ++i) ridged(i, i) += est.shrinkage;
    const CholeskyFactor chol = CholeskyFactor::decompose(ridged);
    const Vector diff = subtract(est.mu1_hat, est.mu0_hat);
    const Vector y = chol.solve_lower(diff);
    return std::sqrt(dot(y, y));
}

double peak_to_peak_v1(const LdaEstimates& est) {
    const Vector diff = subtract(est.mu1_hat, est.mu0_hat);
    return *std::max_element(diff.begin(), diff.end());
}

double peak_to_peak_v2(const LdaEstimates& est) {
    if (est.mu0_hat.empty() || est.mu1_hat.empty())
        throw std::invalid_argument("peak_to_peak_v2: empty estimates");
    return *std::max_element(est.mu1_hat.begin(), est.mu1_hat.end()) -
           *std::max_element(est.mu0_hat.begin(), est.mu0_hat.end());
}

double area_under_curve(const LdaEstimates& est) {
    const Vector diff = subtract(est.mu1_hat, est.mu0_hat);
    double s = 0.0;
    for (double v : diff) s += v;
    return s;
}

SnrReport make_snr_report(const LdaEstimates& est) {
    SnrReport report;
    report.empirical_snr = empirical_snr(est);
    report.peak_to_peak_v1 = peak_to_peak_v1(est);
    report.peak_to_peak_v2 = peak_to_peak_v2(est);
    report.area_under_curve = area_under_curve(est);
    report.shrinkage_used = est.shrinkage;
    return report;
}

}  // namespace p300snr
