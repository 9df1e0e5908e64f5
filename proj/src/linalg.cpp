#include "p300snr/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "p300snr/errors.hpp"

namespace p300snr {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

Vector subtract(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("subtract: size mismatch");
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Vector matvec(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: size mismatch");
    Vector out(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        out[i] = s;
    }
    return out;
}

bool is_symmetric(const Matrix& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) scale = std::max(scale, std::fabs(a(i, j)));
    const double tol = rel_tol * std::max(scale, 1.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::fabs(a(i, j) - a(j, i)) > tol) return false;
    return true;
}

CholeskyFactor CholeskyFactor::decompose(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix must be square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) {
            throw numerical_error("cholesky: matrix is not positive definite (leading minor of order " +
                                  std::to_string(j + 1) + " is not positive)");
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    CholeskyFactor f;
    f.lower_ = std::move(l);
    return f;
}

Vector CholeskyFactor::solve_lower(const Vector& b) const {
    const std::size_t n = dim();
    if (b.size() != n) throw std::invalid_argument("cholesky solve: size mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= lower_(i, k) * y[k];
        y[i] = s / lower_(i, i);
    }
    return y;
}

Vector CholeskyFactor::solve(const Vector& b) const {
    const std::size_t n = dim();
    Vector y = solve_lower(b);
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= lower_(k, ii) * x[k];
        x[ii] = s / lower_(ii, ii);
    }
    return x;
}

}  // namespace p300snr
