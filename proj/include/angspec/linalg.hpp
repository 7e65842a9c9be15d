#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "angspec/error.hpp"

namespace angspec::detail
{

// Dense column-major least squares via normal equations + Cholesky with a
// small ridge. Fine for the handful of columns used here.
class DesignMatrix
{
public:
    DesignMatrix(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}

    double& operator()(std::size_t i, std::size_t j) { return a_[j * r_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[j * r_ + i]; }
    std::size_t rows() const { return r_; }
    std::size_t cols() const { return c_; }

private:
    std::size_t r_, c_;
    std::vector<double> a_;
};

inline std::vector<double> solve_spd(std::vector<double> m, std::vector<double> b)
{
    // m is col-major n x n, overwritten by its Cholesky factor.
    const std::size_t n = b.size();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = m[j * n + j];
        for (std::size_t k = 0; k < j; ++k) diag -= m[k * n + j] * m[k * n + j];
        if (diag <= 0.0) throw NumericError("solve_spd: matrix not positive definite");
        diag = std::sqrt(diag);
        m[j * n + j] = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m[j * n + i];
            for (std::size_t k = 0; k < j; ++k) s -= m[k * n + i] * m[k * n + j];
            m[j * n + i] = s / diag;
        }
    }
    // forward then backward substitution (factor stored in the lower triangle
    // of the column-major buffer as written above: L(i,j) = m[j*n+i])
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= m[k * n + i] * b[k];
        b[i] = s / m[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= m[ii * n + k] * b[k];
        b[ii] = s / m[ii * n + ii];
    }
    return b;
}

// argmin_c ||A c - y||_2 with a relative ridge for near-singular designs.
inline std::vector<double> least_squares(const DesignMatrix& A, const std::vector<double>& y,
                                         double ridge_rel = 1e-12)
{
    const std::size_t n = A.cols(), m = A.rows();
    std::vector<double> ata(n * n, 0.0), aty(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t jj = j; jj < n; ++jj) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += A(i, j) * A(i, jj);
            ata[jj * n + j] = s;
            ata[j * n + jj] = s;
        }
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += A(i, j) * y[i];
        aty[j] = s;
    }
    double trace = 0.0;
    for (std::size_t j = 0; j < n; ++j) trace += ata[j * n + j];
    const double ridge = ridge_rel * (trace / static_cast<double>(n) + 1e-300);
    for (std::size_t j = 0; j < n; ++j) ata[j * n + j] += ridge;
    return solve_spd(std::move(ata), aty);
}

} // namespace angspec::detail
