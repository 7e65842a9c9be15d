#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "angspec/error.hpp"
#include "angspec/fft.hpp"
#include "angspec/grid.hpp"

namespace angspec
{

using cplx = std::complex<double>;

// Transform convention, used everywhere:
//   v(q)  =  sum_j W(x_j) exp(-i q x_j) * dx          (forward, exp(-iqx))
//   W(x)  =  (dq / 2*pi) * sum_m v(q_m) exp(+i q_m x)
// Under this pair, sum |v|^2 dq = 2*pi * sum |W|^2 dx and the round trip is
// exact up to FFT rounding.

// Complex transverse envelope on a grid at longitudinal plane z.
struct SampledField
{
    Grid1D grid;
    std::vector<cplx> amp;
    double k = 0.0;      // wavenumber, rad/m
    double z = 0.0;      // plane coordinate, m
    std::string label;

    SampledField(Grid1D g, std::vector<cplx> a, double k_, double z_ = 0.0,
                 std::string label_ = {})
        : grid(g), amp(std::move(a)), k(k_), z(z_), label(std::move(label_))
    {
        if (!(k > 0.0)) throw InvalidArgument("SampledField: k must be positive");
        if (amp.size() != grid.n())
            throw InvalidArgument("SampledField: amp length must equal grid.n");
    }
};

// Complex amplitude over the conjugate axis q.
struct AngularSpectrum
{
    Grid1D grid;                 // conjugate axis derived from the same grid
    std::vector<cplx> amp;
    double k = 0.0;
    double z = 0.0;

    AngularSpectrum(Grid1D g, std::vector<cplx> a, double k_, double z_ = 0.0)
        : grid(g), amp(std::move(a)), k(k_), z(z_)
    {
        if (amp.size() != grid.n())
            throw InvalidArgument("AngularSpectrum: amp length must equal grid.n");
    }
};

inline SampledField make_plane_wave(const Grid1D& g, double k)
{
    return SampledField(g, std::vector<cplx>(g.n(), cplx(1.0, 0.0)), k, 0.0, "source");
}

namespace detail
{
inline void require_finite(const std::vector<cplx>& a, const char* who)
{
    for (const cplx& v : a)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericError(std::string(who) + ": non-finite sample");
}
} // namespace detail

inline AngularSpectrum to_spectrum(const SampledField& field)
{
    detail::require_finite(field.amp, "to_spectrum");
    std::vector<cplx> a = field.amp;
    detail::rotate_half(a);
    detail::fft_pow2(a, -1);
    detail::rotate_half(a);
    for (cplx& v : a) v *= field.grid.dx();
    return AngularSpectrum(field.grid, std::move(a), field.k, field.z);
}

inline SampledField to_field(const AngularSpectrum& spec, std::string label = {})
{
    detail::require_finite(spec.amp, "to_field");
    std::vector<cplx> a = spec.amp;
    detail::rotate_half(a);
    detail::fft_pow2(a, +1);
    detail::rotate_half(a);
    const double scale = 1.0 / (static_cast<double>(spec.grid.n()) * spec.grid.dx());
    for (cplx& v : a) v *= scale;
    return SampledField(spec.grid, std::move(a), spec.k, spec.z, std::move(label));
}

// sum |amp|^2 dx
inline double power(const SampledField& field)
{
    double s = 0.0;
    for (const cplx& v : field.amp) s += std::norm(v);
    return s * field.grid.dx();
}

inline double spectral_power(const AngularSpectrum& spec)
{
    double s = 0.0;
    for (const cplx& v : spec.amp) s += std::norm(v);
    return s * spec.grid.dq();
}

enum class Normalization
{
    None,
    Peak,   // divide by the maximum sample
    Power,  // divide by sum I dx
};

struct IntensityProfile
{
    std::vector<double> x;   // meters
    std::vector<double> intensity;
    Normalization normalization = Normalization::None;
};

inline IntensityProfile intensity(const SampledField& field,
                                  Normalization mode = Normalization::None)
{
    IntensityProfile p;
    p.normalization = mode;
    p.x = field.grid.x_axis();
    p.intensity.resize(field.amp.size());
    double peak = 0.0, total = 0.0;
    for (std::size_t j = 0; j < field.amp.size(); ++j) {
        const double I = std::norm(field.amp[j]);
        p.intensity[j] = I;
        peak = std::max(peak, I);
        total += I;
    }
    if (mode == Normalization::Peak) {
        if (peak <= 0.0)
            throw NumericError("intensity: peak normalization of an all-zero field");
        for (double& I : p.intensity) I /= peak;
    } else if (mode == Normalization::Power) {
        const double norm = total * field.grid.dx();
        if (norm <= 0.0)
            throw NumericError("intensity: power normalization of an all-zero field");
        for (double& I : p.intensity) I /= norm;
    }
    return p;
}

} // namespace angspec
