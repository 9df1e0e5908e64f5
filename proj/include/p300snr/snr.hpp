#ifndef P300SNR_SNR_HPP
#define P300SNR_SNR_HPP

#include "p300snr/lda.hpp"

namespace p300snr {

// The empirical SNR and the three competing accuracy proxies, all computed
// from the same fitted estimates.
struct SnrReport {
    double empirical_snr = 0.0;
    double peak_to_peak_v1 = 0.0;
    double peak_to_peak_v2 = 0.0;
    double area_under_curve = 0.0;
    double shrinkage_used = 0.0;
};

// gamma_hat = sqrt((mu1-mu0)^T (Sigma + lambda I)^-1 (mu1-mu0)) with the
// lambda recorded in the estimates, so the reported SNR and the deployed
// weight vector are mutually consistent.
double empirical_snr(const LdaEstimates& est);

// max(mu1_hat - mu0_hat): the coordinate-wise peak of the difference wave.
double peak_to_peak_v1(const LdaEstimates& est);

// max(mu1_hat) - max(mu0_hat).
double peak_to_peak_v2(const LdaEstimates& est);

// sum(mu1_hat - mu0_hat): area under the difference wave.
double area_under_curve(const LdaEstimates& est);

SnrReport make_snr_report(const LdaEstimates& est);

}  // namespace p300snr

#endif
