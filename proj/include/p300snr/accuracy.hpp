#ifndef P300SNR_ACCURACY_HPP
#define P300SNR_ACCURACY_HPP

#include "p300snr/linalg.hpp"

namespace p300snr {

// Fixed composite Gauss-Legendre scheme: panel_count panels with a 16-point
// rule each, over a window of half_width z-units around the integrand's
// support. Deterministic and accurate to well below 1e-8 at the defaults.
struct QuadratureConfig {
    int panel_count = 64;
    double half_width = 12.0;

    void validate() const;  // panel_count >= 16, half_width >= 8
};

struct SpellerGeometry {
    int n_rows = 6;
    int n_cols = 6;

    void validate() const;  // both >= 2; a 1-row axis is degenerate
    int n_symbols() const { return n_rows * n_cols; }
};

// First and second moments of the classifier score after n averaging cycles:
// score of class y ~ N(m_y, sigma_n^2), with (m1 - m0)/sigma_n = sqrt(n)*gamma.
struct ScoreMoments {
    double m0 = 0.0;
    double m1 = 0.0;
    double sigma_n = 1.0;
};

// H_N(x): probability that a N(x,1) score exceeds the maximum of N-1
// independent N(0,1) scores, i.e. the selection accuracy of one out of N
// alternatives at effective SNR x.
double accuracy_function(int n_alternatives, double effective_snr, const QuadratureConfig& quad = {});

// dH_N/dx, evaluated as the folded half-line integral
//   int_0^hw  y*phi(y) * (Phi^{N-1}(x+y) - Phi^{N-1}(x-y)) dy
// which is strictly positive: H_N is monotonically increasing.
double accuracy_function_derivative(int n_alternatives, double effective_snr, const QuadratureConfig& quad = {});

// Symbol selection accuracy after `cycles` averaging cycles at single-trial
// SNR gamma: H_rows(sqrt(n)*gamma) * H_cols(sqrt(n)*gamma).
double symbol_accuracy(const SpellerGeometry& geometry, int cycles, double gamma,
                       const QuadratureConfig& quad = {});

// Score moments from model parameters:
//   m_y     = (mu1-mu0)^T Sigma^-1 mu_y
//   sigma_n = sqrt((1/n) (mu1-mu0)^T Sigma^-1 (mu1-mu0))
// Solved through the Cholesky factor, never an explicit inverse.
ScoreMoments score_moments(const Vector& mu0, const Vector& mu1, const Matrix& sigma, int cycles);

// Inverse of symbol_accuracy in gamma, by bisection on [0, 20]. The target
// must lie strictly between chance (1/(rows*cols)) and 1.
double invert_accuracy(const SpellerGeometry& geometry, int cycles, double target_accuracy,
                       const QuadratureConfig& quad = {});

}  // namespace p300snr

#endif
