#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "angspec/error.hpp"

namespace angspec
{

// Uniform origin-centered 1D grid. x_j = (j - n/2)*dx, j in [0, n).
// Conjugate axis q_m = (m - n/2)*dq with dq = 2*pi/(n*dx).
class Grid1D
{
public:
    Grid1D(std::size_t n, double dx) : n_(n), dx_(dx)
    {
        if (n < 16 || (n & (n - 1)) != 0)
            throw InvalidArgument("Grid1D: n must be a power of two >= 16");
        if (!(dx > 0.0))
            throw InvalidArgument("Grid1D: dx must be positive");
    }

    std::size_t n() const { return n_; }
    double dx() const { return dx_; }
    double dq() const { return 2.0 * std::numbers::pi / (static_cast<double>(n_) * dx_); }
    double span() const { return static_cast<double>(n_) * dx_; }

    double x(std::size_t j) const
    {
        return (static_cast<double>(j) - static_cast<double>(n_ / 2)) * dx_;
    }
    double q(std::size_t m) const
    {
        return (static_cast<double>(m) - static_cast<double>(n_ / 2)) * dq();
    }

    std::vector<double> x_axis() const
    {
        std::vector<double> ax(n_);
        for (std::size_t j = 0; j < n_; ++j) ax[j] = x(j);
        return ax;
    }
    std::vector<double> q_axis() const
    {
        std::vector<double> ax(n_);
        for (std::size_t m = 0; m < n_; ++m) ax[m] = q(m);
        return ax;
    }

    // Index of the sample nearest to position x (clamped to the grid).
    std::size_t index_near(double xpos) const
    {
        double j = xpos / dx_ + static_cast<double>(n_ / 2);
        if (j < 0.0) return 0;
        auto idx = static_cast<std::size_t>(j + 0.5);
        return idx >= n_ ? n_ - 1 : idx;
    }

    friend bool operator==(const Grid1D& a, const Grid1D& b)
    {
        return a.n_ == b.n_ && a.dx_ == b.dx_;
    }
    friend bool operator!=(const Grid1D& a, const Grid1D& b) { return !(a == b); }

private:
    std::size_t n_;
    double dx_;
};

inline Grid1D make_grid(std::size_t n, double dx) { return Grid1D(n, dx); }

} // namespace angspec
