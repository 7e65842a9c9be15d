#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "angspec/elements.hpp"
#include "angspec/field.hpp"

namespace angspec
{

// Double-slit / lens / crystal bench layout. Wavelength is the fundamental's.
struct BenchGeometry
{
    double z0 = 0.0;       // slit-to-lens distance, m
    double f = 0.0;        // focal length, m
    double zD = 0.0;       // crystal-to-detection distance, m
    double a = 0.0;        // slit width, m
    double d = 0.0;        // slit separation, m
    double lambda = 0.0;   // fundamental wavelength, m

    double k() const { return 2.0 * std::numbers::pi / lambda; }
    double magnification() const { return zD / f; }

    void validate() const
    {
        if (!(z0 > 0.0 && f > 0.0 && zD > 0.0 && a > 0.0 && d > 0.0 && lambda > 0.0))
            throw InvalidArgument("BenchGeometry: all lengths must be positive");
        if (z0 == f) throw InvalidArgument("BenchGeometry: z0 = f puts the image at infinity");
    }
};

inline double sinc(double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }

// Spectrum of the double slit, sinc(q a/2) cos(q d/2), unit peak.
inline double slit_spectrum(double q, const DoubleSlit& slit)
{
    return sinc(q * slit.a / 2.0) * std::cos(q * slit.d / 2.0);
}

// Field at the lens focal plane (the crystal):
//   sinc((k/f)(a/2) x) cos((k/f)(d/2) x) exp(-i k (z0 - f) x^2 / (2 f^2))
inline cplx crystal_plane_field(double x, const BenchGeometry& g)
{
    const double k = g.k();
    const double env = sinc((k / g.f) * (g.a / 2.0) * x) * std::cos((k / g.f) * (g.d / 2.0) * x);
    const double phase = -k * (g.z0 - g.f) * x * x / (2.0 * g.f * g.f);
    return env * std::polar(1.0, phase);
}

inline double crystal_chirp_coefficient(const BenchGeometry& g)
{
    return g.k() * (g.z0 - g.f) / (2.0 * g.f * g.f);
}

// Where the quadratic propagation phase cancels: zD = f^2 / (z0 - f).
// Equivalent to the thin-lens relation 1/f = 1/i + 1/o with o = z0, i = f + zD.
inline double image_distance(double z0, double f)
{
    if (z0 == f) throw InvalidArgument("image_distance: z0 = f, image at infinity");
    return f * f / (z0 - f);
}

// Mask of the magnified slit image: widths a*M, separation d*M, M = zD/f.
inline double slit_image(double x, const BenchGeometry& g)
{
    const double M = g.magnification();
    const DoubleSlit scaled(g.a * M, g.d * M);
    return (std::abs(x + scaled.d / 2.0) <= scaled.a / 2.0 ||
            std::abs(x - scaled.d / 2.0) <= scaled.a / 2.0)
               ? 1.0
               : 0.0;
}

struct ConvolutionProfile
{
    std::vector<double> x;     // meters, doubled support
    std::vector<double> amp;   // real amplitude
};

// Discrete self-convolution (p * p)(x) on the doubled support, trapezoid
// weight dx. Brute force by construction; it serves as the oracle for the
// FFT-based pipeline and must stay independent of it.
inline ConvolutionProfile self_convolution(const std::vector<double>& profile, double dx,
                                           double x_first)
{
    const std::size_t n = profile.size();
    ConvolutionProfile out;
    out.x.resize(2 * n - 1);
    out.amp.assign(2 * n - 1, 0.0);
    for (std::size_t m = 0; m < 2 * n - 1; ++m) out.x[m] = 2.0 * x_first + static_cast<double>(m) * dx;
    for (std::size_t i = 0; i < n; ++i) {
        if (profile[i] == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) out.amp[i + j] += profile[i] * profile[j];
    }
    for (double& v : out.amp) v *= dx;
    return out;
}

// SH image-plane amplitude predicted by the self-convolution route.
// The SH propagates with 2k, which halves the Fourier mapping q -> x, so the
// self-convolution of the M-magnified slit mask appears compressed by two:
// amplitude(x) = (mask * mask)(2x). Side triangles land at +-dM/2, on top of
// the fundamental's slit images.
inline std::vector<double> sh_image_oracle(const std::vector<double>& x_axis,
                                           const BenchGeometry& g)
{
    const double M = g.magnification();
    const double aM = g.a * M, dM = g.d * M;
    // closed-form triangles of the rect-pair self-convolution
    auto tri = [aM](double u, double center) {
        const double t = 1.0 - std::abs(u - center) / aM;
        return t > 0.0 ? t : 0.0;
    };
    std::vector<double> out(x_axis.size());
    for (std::size_t i = 0; i < x_axis.size(); ++i) {
        const double u = 2.0 * x_axis[i];
        out[i] = aM * (tri(u, -dM) + 2.0 * tri(u, 0.0) + tri(u, dM));
    }
    return out;
}

// Slit-image separation: distance between the two plateau centers, each the
// midpoint of the half-maximum crossings on its side of the axis.
inline double plateau_separation(const IntensityProfile& p, double x_min, double x_max)
{
    auto center = [&](int sign) {
        double pk = 0.0;
        for (std::size_t j = 0; j < p.x.size(); ++j) {
            const double xs = sign * p.x[j];
            if (xs >= x_min && xs <= x_max) pk = std::max(pk, p.intensity[j]);
        }
        if (pk <= 0.0) throw NumericError("plateau_separation: empty lobe");
        const double half = pk / 2.0;
        double first = 0.0, last = 0.0;
        bool got_first = false;
        for (std::size_t j = 1; j < p.x.size(); ++j) {
            const double xs0 = sign * p.x[j - 1], xs1 = sign * p.x[j];
            const double lo = std::min(xs0, xs1), hi = std::max(xs0, xs1);
            if (lo < x_min || hi > x_max) continue;
            const double y0 = p.intensity[j - 1], y1 = p.intensity[j];
            if ((y0 - half) * (y1 - half) < 0.0) {
                const double t = (half - y0) / (y1 - y0);
                const double xc = p.x[j - 1] + t * (p.x[j] - p.x[j - 1]);
                if (!got_first) { first = xc; got_first = true; }
                last = xc;
            }
        }
        if (!got_first) throw NumericError("plateau_separation: no half-max crossing");
        return 0.5 * (first + last);
    };
    return std::abs(center(+1) - center(-1));
}

} // namespace angspec
