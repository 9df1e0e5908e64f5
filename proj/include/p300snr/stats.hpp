#ifndef P300SNR_STATS_HPP
#define P300SNR_STATS_HPP

namespace p300snr {

// Standard normal density and distribution. normal_cdf goes through erfc so
// the relative error stays below 1e-14 far into the tails.
double normal_pdf(double x);
double normal_cdf(double x);

// Inverse of normal_cdf (Wichura's AS 241, double-precision branch).
// p must lie strictly inside (0, 1).
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b) for a, b > 0 and x in [0, 1],
// evaluated by the symmetric continued fraction. Used for t-test p-values.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace p300snr

#endif
