#pragma once

#include <algorithm>
#include <cmath>

#include "angspec/field.hpp"

namespace angspec
{

// How aperture edges are sampled onto the grid.
//   Hard:     binary mask, the boundary sample |x| = a/2 counts as inside.
//   Subpixel: edge samples carry the covered fraction of their pixel, so the
//             sampled aperture integrates to the exact width. Used where the
//             0.5%-level width bias of the binary mask matters.
enum class EdgePolicy
{
    Hard,
    Subpixel,
};

// Two slits of width a centered at +-d/2.
struct DoubleSlit
{
    double a = 0.0;   // slit width, m
    double d = 0.0;   // center-to-center separation, m
    EdgePolicy edges = EdgePolicy::Hard;

    DoubleSlit(double a_, double d_, EdgePolicy e = EdgePolicy::Hard)
        : a(a_), d(d_), edges(e)
    {
        if (!(a > 0.0)) throw InvalidArgument("DoubleSlit: a must be positive");
        if (d < 0.0) throw InvalidArgument("DoubleSlit: d must be non-negative");
        if (d < a) throw InvalidArgument("DoubleSlit: slits overlap: d < a");
    }
};

struct ThinLens
{
    double f = 0.0;   // focal length, m

    explicit ThinLens(double f_) : f(f_)
    {
        if (f == 0.0 || !std::isfinite(f))
            throw InvalidArgument("ThinLens: f must be nonzero and finite");
    }
};

enum class UpconvertMode
{
    Collinear,
    Noncollinear,
};

struct CrystalUpconvert
{
    UpconvertMode mode = UpconvertMode::Collinear;
};

namespace detail
{
// Coverage of pixel [x-dx/2, x+dx/2] by interval [lo, hi], in [0,1].
inline double pixel_coverage(double x, double dx, double lo, double hi)
{
    const double l = std::max(lo, x - dx / 2.0);
    const double h = std::min(hi, x + dx / 2.0);
    return h > l ? (h - l) / dx : 0.0;
}
} // namespace detail

inline double slit_mask_value(const DoubleSlit& slit, double x, double dx)
{
    if (slit.edges == EdgePolicy::Hard) {
        const bool in = std::abs(x + slit.d / 2.0) <= slit.a / 2.0 ||
                        std::abs(x - slit.d / 2.0) <= slit.a / 2.0;
        return in ? 1.0 : 0.0;
    }
    double v = detail::pixel_coverage(x, dx, -slit.d / 2 - slit.a / 2, -slit.d / 2 + slit.a / 2) +
               detail::pixel_coverage(x, dx, slit.d / 2 - slit.a / 2, slit.d / 2 + slit.a / 2);
    return std::min(v, 1.0);
}

inline SampledField apply_double_slit(const SampledField& field, const DoubleSlit& slit)
{
    const Grid1D& g = field.grid;
    if (!(g.span() > slit.d + slit.a))
        throw InvalidArgument("apply_double_slit: grid span must exceed d + a");
    if (slit.a / g.dx() < 8.0)
        throw InvalidArgument("apply_double_slit: under-resolved slit, fewer than 8 samples across a");

    SampledField out = field;
    for (std::size_t j = 0; j < g.n(); ++j)
        out.amp[j] *= slit_mask_value(slit, g.x(j), g.dx());
    return out;
}

// Converging lens multiplies by exp(-i k x^2 / (2 f)); pure phase, power preserving.
inline SampledField apply_lens(const SampledField& field, const ThinLens& lens)
{
    SampledField out = field;
    const double c = field.k / (2.0 * lens.f);
    for (std::size_t j = 0; j < field.grid.n(); ++j) {
        const double x = field.grid.x(j);
        out.amp[j] *= std::polar(1.0, -c * x * x);
    }
    return out;
}

// Paraxial sanity: half-span small against |f|.
inline bool lens_paraxial_ok(const Grid1D& g, const ThinLens& lens)
{
    return g.span() / std::abs(lens.f) <= 0.2;
}

// Thin-crystal up-conversion: pointwise product of the two pump envelopes,
// k_out = k1 + k2 (collinear degenerate case: 2k).
inline SampledField upconvert(const SampledField& field1, const SampledField& field2,
                              const CrystalUpconvert& crystal = {})
{
    if (field1.grid != field2.grid)
        throw InvalidArgument("upconvert: pump grids differ");
    if (field1.z != field2.z)
        throw InvalidArgument("upconvert: pump planes differ");
    if (crystal.mode == UpconvertMode::Collinear && &field1 != &field2 &&
        field1.amp != field2.amp)
        throw InvalidArgument("upconvert: collinear mode requires identical pumps");

    SampledField out = field1;
    out.k = field1.k + field2.k;
    out.label = "sh";
    for (std::size_t j = 0; j < out.amp.size(); ++j)
        out.amp[j] = field1.amp[j] * field2.amp[j];
    return out;
}

inline SampledField second_harmonic(const SampledField& fundamental)
{
    return upconvert(fundamental, fundamental, {UpconvertMode::Collinear});
}

} // namespace angspec
