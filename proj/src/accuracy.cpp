#include "p300snr/accuracy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "p300snr/errors.hpp"
#include "p300snr/stats.hpp"

namespace p300snr {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1] (positive half; symmetric).
constexpr int kGaussHalf = 8;
constexpr double kGaussNode[kGaussHalf] = {
    9.50125098376374544e-02, 2.81603550779258915e-01, 4.58016777657227370e-01, 6.17876244402643771e-01,
    7.55404408355002999e-01, 8.65631202387831755e-01, 9.44575023073232600e-01, 9.89400934991649939e-01,
};
constexpr double kGaussWeight[kGaussHalf] = {
    1.89450610455068585e-01, 1.82603415044923612e-01, 1.69156519395002619e-01, 1.49595988816576764e-01,
    1.24628971255534030e-01, 9.51585116824925914e-02, 6.22535239386477063e-02, 2.71524594117540374e-02,
};

// Phi(z)^k via exp(k*log(Phi)) so large k does not underflow prematurely.
inline double cdf_power(double z, int k) {
    if (k == 0) return 1.0;
    const double p = normal_cdf(z);
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return std::exp(static_cast<double>(k) * std::log(p));
}

template <typename F>
double composite_gauss(F&& f, double lo, double hi, int panels) {
    const double width = (hi - lo) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = lo + (p + 0.5) * width;
        const double half = 0.5 * width;
        double panel_sum = 0.0;
        for (int i = 0; i < kGaussHalf; ++i) {
            const double d = half * kGaussNode[i];
            panel_sum += kGaussWeight[i] * (f(mid - d) + f(mid + d));
        }
        total += half * panel_sum;
    }
    return total;
}

void check_arguments(int n_alternatives, double x, const QuadratureConfig& quad) {
    quad.validate();
    if (n_alternatives < 2) {
        throw std::domain_error("accuracy_function: N must be at least 2 (got " +
                                std::to_string(n_alternatives) + ")");
    }
    if (!std::isfinite(x)) throw std::domain_error("accuracy_function: effective SNR must be finite");
}

}  // namespace

void QuadratureConfig::validate() const {
    if (panel_count < 16) throw std::domain_error("quadrature: panel_count must be at least 16");
    if (!(half_width >= 8.0)) throw std::domain_error("quadrature: half_width must be at least 8");
}

void SpellerGeometry::validate() const {
    if (n_rows < 2 || n_cols < 2)
        throw std::domain_error("geometry: rows and columns must both be at least 2");
}

double accuracy_function(int n_alternatives, double effective_snr, const QuadratureConfig& quad) {
    check_arguments(n_alternatives, effective_snr, quad);
    const double hw = quad.half_width;
    const double lo = std::min(-hw, effective_snr - hw);
    const double hi = std::max(hw, effective_snr + hw);
    const int k = n_alternatives - 1;
    const double x = effective_snr;
    const double value =
        composite_gauss([&](double z) { return normal_pdf(z - x) * cdf_power(z, k); }, lo, hi, quad.panel_count);
    return std::clamp(value, 0.0, 1.0);
}

double accuracy_function_derivative(int n_alternatives, double effective_snr, const QuadratureConfig& quad) {
    check_arguments(n_alternatives, effective_snr, quad);
    const int k = n_alternatives - 1;
    const double x = effective_snr;
    return composite_gauss(
        [&](double y) { return y * normal_pdf(y) * (cdf_power(x + y, k) - cdf_power(x - y, k)); }, 0.0,
        quad.half_width, quad.panel_count);
}

double symbol_accuracy(const SpellerGeometry& geometry, int cycles, double gamma, const QuadratureConfig& quad) {
    geometry.validate();
    if (cycles < 1) throw std::domain_error("symbol_accuracy: cycles must be at least 1");
    if (!(gamma >= 0.0)) throw std::domain_error("symbol_accuracy: gamma must be non-negative");
    const double effective = std::sqrt(static_cast<double>(cycles)) * gamma;
    const double h_row = accuracy_function(geometry.n_rows, effective, quad);
    const double h_col = geometry.n_cols == geometry.n_rows
                             ? h_row
                             : accuracy_function(geometry.n_cols, effective, quad);
    return std::clamp(h_row * h_col, 0.0, 1.0);
}

ScoreMoments score_moments(const Vector& mu0, const Vector& mu1, const Matrix& sigma, int cycles) {
    if (cycles < 1) throw std::domain_error("score_moments: cycles must be at least 1");
    if (mu0.size() != mu1.size() || sigma.rows() != mu0.size() || sigma.cols() != mu0.size())
        throw std::invalid_argument("score_moments: dimension mismatch");
    const CholeskyFactor chol = CholeskyFactor::decompose(sigma);
    const Vector diff = subtract(mu1, mu0);
    const Vector a = chol.solve(diff);  // Sigma^-1 (mu1 - mu0)
    ScoreMoments m;
    m.m0 = dot(a, mu0);
    m.m1 = dot(a, mu1);
    const double gamma_sq = dot(a, diff);
    m.sigma_n = std::sqrt(gamma_sq / static_cast<double>(cycles));
    return m;
}

double invert_accuracy(const SpellerGeometry& geometry, int cycles, double target_accuracy,
                       const QuadratureConfig& quad) {
    geometry.validate();
    if (cycles < 1) throw std::domain_error("invert_accuracy: cycles must be at least 1");
    const double chance = 1.0 / geometry.n_symbols();
    if (!(target_accuracy > chance && target_accuracy < 1.0)) {
        throw std::domain_error("invert_accuracy: target must lie strictly between chance (" +
                                std::to_string(chance) + ") and 1");
    }
    // symbol_accuracy is strictly increasing in gamma, so plain bisection
    // converges; Acc(20) exceeds any representable target below 1.
    double lo = 0.0;
    double hi = 20.0;
    for (int iter = 0; iter < 80 && hi - lo > 1e-12; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (symbol_accuracy(geometry, cycles, mid, quad) < target_accuracy)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace p300snr
