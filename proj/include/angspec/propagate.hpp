#pragma once

#include <cmath>
#include <complex>

#include "angspec/field.hpp"

namespace angspec
{

struct PropagateOptions
{
    // Fraction of spectral energy allowed in the outer 10% of q bins.
    // 1e-6 suits band-limited fields; hard-aperture fields carry ~dx/a-scale
    // outer-band energy and need a laxer bound (the scene runner uses 1e-2).
    double band_energy_tol = 1e-6;
    bool guard = true;
};

// Fraction of spectral energy in bins with |q| >= 0.9 * q_nyquist.
inline double outer_band_fraction(const AngularSpectrum& spec)
{
    const std::size_t n = spec.grid.n();
    const double edge = 0.9 * static_cast<double>(n / 2);
    double outer = 0.0, total = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double e = std::norm(spec.amp[m]);
        total += e;
        const double mm = std::abs(static_cast<double>(m) - static_cast<double>(n / 2));
        if (mm >= edge) outer += e;
    }
    return total > 0.0 ? outer / total : 0.0;
}

inline AngularSpectrum propagate_spectrum(const AngularSpectrum& spec, double z,
                                          const PropagateOptions& opt = {})
{
    if (!std::isfinite(z)) throw InvalidArgument("propagate_spectrum: non-finite z");
    if (opt.guard) {
        const double frac = outer_band_fraction(spec);
        if (frac > opt.band_energy_tol)
            throw AliasingError("propagate_spectrum: aliasing guard tripped, outer-band "
                                "energy fraction " + std::to_string(frac) +
                                " exceeds tolerance " + std::to_string(opt.band_energy_tol));
    }
    AngularSpectrum out = spec;
    const double c = z / (2.0 * spec.k);
    for (std::size_t m = 0; m < spec.grid.n(); ++m) {
        const double q = spec.grid.q(m);
        out.amp[m] *= std::polar(1.0, -c * q * q);
    }
    out.z += z;
    return out;
}

// Fast path: paraxial transfer function exp(-i q^2 z / (2k)) in q space.
inline SampledField propagate_spectrum(const SampledField& field, double z,
                                       const PropagateOptions& opt = {})
{
    SampledField out = to_field(propagate_spectrum(to_spectrum(field), z, opt), field.label);
    return out;
}

// Oracle path: direct trapezoid sum of the Fresnel integral,
//   W(x, z) = sqrt(k / (2 pi i z)) * sum_j W(x_j) exp(i k (x - x_j)^2 / (2 z)) dx.
// The prefactor matches propagate_spectrum exactly in the continuum limit.
// O(n^2); capped at n = 4096.
inline SampledField propagate_quadrature(const SampledField& field, double z)
{
    if (z == 0.0) throw InvalidArgument("propagate_quadrature: z must be nonzero");
    const Grid1D& g = field.grid;
    if (g.n() > 4096)
        throw InvalidArgument("propagate_quadrature: grid too large for the O(n^2) path (n <= 4096)");

    const double k = field.k;
    const cplx pref = std::sqrt(cplx(0.0, -k / (2.0 * std::numbers::pi * z))) * g.dx();
    const double c = k / (2.0 * z);

    SampledField out = field;
    const std::size_t n = g.n();
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = g.x(i);
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double dxj = xi - g.x(j);
            acc += field.amp[j] * std::polar(1.0, c * dxj * dxj);
        }
        out.amp[i] = pref * acc;
    }
    out.z += z;
    return out;
}

} // namespace angspec
