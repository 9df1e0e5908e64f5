#ifndef P300SNR_LINALG_HPP
#define P300SNR_LINALG_HPP

#include <cstddef>
#include <vector>

namespace p300snr {

using Vector = std::vector<double>;

// Dense row-major matrix. The toolkit only handles symmetric matrices up to
// a few hundred rows.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double dot(const Vector& a, const Vector& b);
Vector subtract(const Vector& a, const Vector& b);
Vector matvec(const Matrix& a, const Vector& x);

// |a_ij - a_ji| <= tol * max|a| for all i, j.
bool is_symmetric(const Matrix& a, double rel_tol = 1e-10);

// Cached lower-triangular Cholesky factor of a symmetric positive-definite
// matrix. Throws numerical_error naming the failing leading minor when the
// input is not positive definite.
class CholeskyFactor {
public:
    CholeskyFactor() = default;

    static CholeskyFactor decompose(const Matrix& a);

    // Solves (L L^T) x = b.
    Vector solve(const Vector& b) const;
    // Solves L y = b (forward substitution only).
    Vector solve_lower(const Vector& b) const;

    const Matrix& lower() const { return lower_; }
    std::size_t dim() const { return lower_.rows(); }

private:
    Matrix lower_;
};

}  // namespace p300snr

#endif
