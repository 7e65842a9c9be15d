#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "angspec/analytics.hpp"
#include "angspec/field.hpp"
#include "angspec/linalg.hpp"
#include "angspec/propagate.hpp"

namespace angspec
{

enum class FringeEnvelope
{
    Sinc2,   // fundamental: sinc^2(x/s)
    Sinc4,   // second harmonic: sinc^4(x/s)
};

struct FringeFitOptions
{
    FringeEnvelope envelope = FringeEnvelope::Sinc4;
    bool two_frequency = true;    // include the mu2 cos(K2 x) component
    bool lock_ratio = false;      // constrain K2 = 2 K1
    bool fit_baseline = false;
    double window = 0.0;          // half-window in meters; 0 = whole profile
    double k1_seed = 0.0;         // geometric seed for K1; 0 = locate by scan
    double convergence_gate = 0.10;
    bool clamp_visibilities = true;
};

// sinc^(2|4) envelope, two cosine fringe components with visibilities mu1, mu2.
struct FringeFit
{
    double s = 0.0;          // envelope scale, m
    double K1 = 0.0;         // rad/m
    double K2 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double amplitude = 0.0;
    double baseline = 0.0;
    double residual = 0.0;   // RMS over the window / data peak
    double mu1_sigma = 0.0;  // approximate 1-sigma from the linear solve
    double mu2_sigma = 0.0;
    bool converged = false;
};

namespace detail
{

struct FringeData
{
    std::vector<double> x, y;
    double peak = 0.0;
};

inline FringeData window_profile(const IntensityProfile& p, double half_window)
{
    FringeData d;
    for (std::size_t j = 0; j < p.x.size(); ++j) {
        if (half_window > 0.0 && std::abs(p.x[j]) > half_window) continue;
        d.x.push_back(p.x[j]);
        d.y.push_back(p.intensity[j]);
        d.peak = std::max(d.peak, p.intensity[j]);
    }
    return d;
}

// Radius containing the given fraction of the intensity mass.
inline double mass_radius(const IntensityProfile& p, double frac)
{
    double total = 0.0;
    for (double v : p.intensity) total += v;
    if (total <= 0.0) return 0.0;
    // grow symmetric radius until the captured mass reaches frac
    std::vector<std::size_t> order(p.x.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(p.x[a]) < std::abs(p.x[b]); });
    double acc = 0.0;
    for (std::size_t j : order) {
        acc += p.intensity[j];
        if (acc >= frac * total) return std::abs(p.x[j]);
    }
    return std::abs(p.x[order.back()]);
}

struct FringeModelEval
{
    double resid = 0.0;               // RMS over the window
    std::vector<double> coeff;        // [A, A*mu1, (A*mu2), (baseline)]
    std::vector<double> sigma;        // 1-sigma of the coefficients
};

inline FringeModelEval eval_fringe_model(const FringeData& d, double s, double K1, double K2,
                                         int env_pow, bool two, bool baseline,
                                         bool want_sigma = false,
                                         bool use_mu1 = true, bool use_mu2 = true)
{
    const std::size_t m = d.x.size();
    std::size_t cols = 1 + (use_mu1 ? 1 : 0) + ((two && use_mu2) ? 1 : 0) + (baseline ? 1 : 0);
    DesignMatrix A(m, cols);
    for (std::size_t i = 0; i < m; ++i) {
        const double e0 = sinc(d.x[i] / s);
        const double e2 = e0 * e0;
        const double env = env_pow == 2 ? e2 : e2 * e2;
        std::size_t c = 0;
        A(i, c++) = env;
        if (use_mu1) A(i, c++) = env * std::cos(K1 * d.x[i]);
        if (two && use_mu2) A(i, c++) = env * std::cos(K2 * d.x[i]);
        if (baseline) A(i, c) = 1.0;
    }
    FringeModelEval out;
    out.coeff = least_squares(A, d.y);
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        double mdl = 0.0;
        for (std::size_t c = 0; c < cols; ++c) mdl += A(i, c) * out.coeff[c];
        const double r = d.y[i] - mdl;
        rss += r * r;
    }
    out.resid = std::sqrt(rss / static_cast<double>(m));
    if (want_sigma) {
        // diag of (A^T A)^{-1} scaled by the residual variance
        const double var = rss / static_cast<double>(m > cols ? m - cols : 1);
        out.sigma.resize(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            std::vector<double> e(cols, 0.0);
            e[c] = 1.0;
            std::vector<double> ata(cols * cols, 0.0);
            for (std::size_t j = 0; j < cols; ++j)
                for (std::size_t jj = 0; jj < cols; ++jj) {
                    double sdot = 0.0;
                    for (std::size_t i = 0; i < m; ++i) sdot += A(i, j) * A(i, jj);
                    ata[jj * cols + j] = sdot;
                }
            double tr = 0.0;
            for (std::size_t j = 0; j < cols; ++j) tr += ata[j * cols + j];
            for (std::size_t j = 0; j < cols; ++j) ata[j * cols + j] += 1e-12 * tr / cols;
            std::vector<double> col = solve_spd(std::move(ata), e);
            out.sigma[c] = std::sqrt(std::max(col[c], 0.0) * var);
        }
    }
    return out;
}

// Dominant fringe wavenumber of the de-meaned, Hann-windowed profile, above
// min_cycles periods per window. Useful when the fringe and envelope scales
// separate spectrally; the fitter treats it as a seed, not an answer.
inline double dominant_wavenumber(const FringeData& d, double min_cycles = 5.0)
{
    const std::size_t m = d.x.size();
    if (m < 16) return 0.0;
    const double dx = d.x[1] - d.x[0];
    std::size_t nfft = 1;
    while (nfft < 4 * m) nfft <<= 1;
    std::vector<cplx> buf(nfft, cplx(0.0, 0.0));
    double mean = 0.0;
    for (double v : d.y) mean += v;
    mean /= static_cast<double>(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (m - 1));
        buf[i] = (d.y[i] - mean) * hann;
    }
    fft_pow2(buf, -1);
    const double kmin = min_cycles * 2.0 * std::numbers::pi / (d.x.back() - d.x.front());
    double best = 0.0, bestmag = -1.0;
    for (std::size_t j = 1; j < nfft / 2; ++j) {
        const double K = 2.0 * std::numbers::pi * static_cast<double>(j) /
                         (static_cast<double>(nfft) * dx);
        if (K < kmin) continue;
        const double mag = std::abs(buf[j]);
        if (mag > bestmag) { bestmag = mag; best = K; }
    }
    return best;
}

} // namespace detail

inline FringeFit fit_two_frequency_core(const IntensityProfile& profile,
                                        const FringeFitOptions& opt)
{
    // window = 0 fits the whole profile; callers with wide grids around a
    // compact pattern should pass a window (visibility_evolution derives one
    // from the intensity mass)
    detail::FringeData d = detail::window_profile(profile, opt.window);
    FringeFit fit;
    if (d.x.size() < 32 || d.peak <= 0.0) return fit;

    const int env_pow = opt.envelope == FringeEnvelope::Sinc2 ? 2 : 4;
    const bool two = opt.two_frequency;

    // Coarse deterministic scan over (s, K1) with K2 = 2 K1. The envelope and
    // fringe scales of these patterns overlap spectrally, so the frequency is
    // located by the scan itself rather than by a spectral peak; a geometric
    // seed narrows the K1 grid when the caller has one.
    const double span = d.x.back() - d.x.front();
    const double dxs = d.x[1] - d.x[0];
    std::vector<double> k_grid;
    auto dense_around = [&k_grid](double center) {
        if (center <= 0.0) return;
        for (int ik = 0; ik < 25; ++ik)
            k_grid.push_back(center * (0.9 + 0.2 * static_cast<double>(ik) / 24.0));
    };
    if (opt.k1_seed > 0.0) {
        dense_around(opt.k1_seed);
    } else {
        const double k_lo = 6.0 * 2.0 * std::numbers::pi / span;   // >= 6 cycles in window
        const double k_hi = std::numbers::pi / (3.0 * dxs);        // >= 6 samples per cycle
        const int nk = 160;
        for (int ik = 0; ik < nk; ++ik)
            k_grid.push_back(k_lo * std::pow(k_hi / k_lo,
                                             static_cast<double>(ik) / (nk - 1)));
        // densify around the spectral peak, read as K1 or as K2
        const double kdom = detail::dominant_wavenumber(d);
        dense_around(kdom);
        if (two) dense_around(kdom / 2.0);
    }

    double best_r = 1e300;
    double s = 0.0, K1 = 0.0, K2 = 0.0;
    for (int is = 0; is < 48; ++is) {
        const double sc = (span / 100.0) * std::pow(200.0, static_cast<double>(is) / 47.0);
        for (double K1c : k_grid) {
            const auto ev = detail::eval_fringe_model(d, sc, K1c, 2.0 * K1c, env_pow, two,
                                                      opt.fit_baseline);
            if (ev.resid < best_r) { best_r = ev.resid; s = sc; K1 = K1c; K2 = 2.0 * K1c; }
        }
    }
    if (K1 <= 0.0) return fit;

    // coordinate refinement with shrinking steps; K2 free unless locked
    double step_s = s * 0.02, step_k1 = K1 * 0.004;
    double step_k2 = (two && !opt.lock_ratio) ? K2 * 0.004 : 0.0;
    for (int round = 0; round < 400; ++round) {
        bool improved = false;
        const double params[3] = {s, K1, K2};
        const double steps[3] = {step_s, step_k1, step_k2};
        for (int ip = 0; ip < 3; ++ip) {
            if (steps[ip] == 0.0) continue;
            for (int sgn = -1; sgn <= 1; sgn += 2) {
                double cs = params[0], ck1 = params[1], ck2 = params[2];
                (ip == 0 ? cs : ip == 1 ? ck1 : ck2) += sgn * steps[ip];
                if (opt.lock_ratio || !two) ck2 = 2.0 * ck1;
                if (cs <= 0.0 || ck1 <= 0.0) continue;
                const auto ev = detail::eval_fringe_model(d, cs, ck1, ck2, env_pow, two,
                                                          opt.fit_baseline);
                if (ev.resid < best_r) {
                    best_r = ev.resid;
                    s = cs; K1 = ck1; K2 = ck2;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step_s /= 2.0; step_k1 /= 2.0; step_k2 /= 2.0;
            if (step_k1 < K1 * 1e-7) break;
        }
    }

    auto ev = detail::eval_fringe_model(d, s, K1, K2, env_pow, two, opt.fit_baseline, true);
    double A0 = ev.coeff[0];
    double m1 = ev.coeff[1] / A0;
    double m2 = two ? ev.coeff[2] / A0 : 0.0;

    if (opt.clamp_visibilities && (m1 < 0.0 || m2 < 0.0)) {
        // active set: drop negative visibility columns and re-solve
        const bool use1 = m1 >= 0.0, use2 = m2 >= 0.0;
        ev = detail::eval_fringe_model(d, s, K1, K2, env_pow, two, opt.fit_baseline, true,
                                       use1, use2);
        best_r = ev.resid;
        A0 = ev.coeff[0];
        std::size_t c = 1;
        m1 = use1 ? ev.coeff[c++] / A0 : 0.0;
        m2 = (two && use2) ? ev.coeff[c] / A0 : 0.0;
        if (m1 < 0.0 || m2 < 0.0) {
            ev = detail::eval_fringe_model(d, s, K1, K2, env_pow, two, opt.fit_baseline, true,
                                           false, false);
            best_r = ev.resid;
            A0 = ev.coeff[0];
            m1 = m2 = 0.0;
        }
    }

    fit.s = s;
    fit.K1 = K1;
    fit.K2 = (two ? K2 : 0.0);
    fit.mu1 = m1;
    fit.mu2 = m2;
    fit.amplitude = A0;
    fit.baseline = opt.fit_baseline ? ev.coeff.back() : 0.0;
    fit.residual = best_r / d.peak;
    if (A0 != 0.0 && ev.sigma.size() >= 2) {
        fit.mu1_sigma = ev.sigma[1] / std::abs(A0);
        if (two && ev.sigma.size() >= 3) fit.mu2_sigma = ev.sigma[2] / std::abs(A0);
    }
    fit.converged = fit.residual <= opt.convergence_gate && A0 > 0.0;
    return fit;
}

// Least-squares fit of sinc^4(x/s) [1 + mu1 cos(K1 x) + mu2 cos(K2 x)]
// (or the sinc^2 single-frequency variant). Throws on non-convergence.
inline FringeFit fit_two_frequency(const IntensityProfile& profile,
                                   const FringeFitOptions& opt = {})
{
    FringeFit fit = fit_two_frequency_core(profile, opt);
    if (!fit.converged)
        throw FitError("fit_two_frequency: residual " + std::to_string(fit.residual) +
                       " of peak exceeds the convergence gate");
    return fit;
}

struct PlaneVisibility
{
    double z = 0.0;
    FringeFit fit;
};

// Propagate the crystal-plane SH field to each detection distance and fit the
// two-frequency pattern there. Fit failures are recorded per plane, not fatal.
inline std::vector<PlaneVisibility> visibility_evolution(const SampledField& sh_at_crystal,
                                                         const std::vector<double>& z_list,
                                                         FringeFitOptions opt = {})
{
    std::vector<PlaneVisibility> out;
    PropagateOptions prop_opt;
    prop_opt.band_energy_tol = 1e-2;   // hard-aperture heritage fields
    const AngularSpectrum spec0 = to_spectrum(sh_at_crystal);
    for (double z : z_list) {
        if (z < 0.0) throw InvalidArgument("visibility_evolution: z must be >= 0");
        PlaneVisibility pv;
        pv.z = z;
        SampledField fz = z == 0.0 ? sh_at_crystal
                                   : to_field(propagate_spectrum(spec0, z, prop_opt));
        const IntensityProfile prof = intensity(fz, Normalization::Peak);
        FringeFitOptions o = opt;
        o.window = 1.5 * detail::mass_radius(prof, 0.95);   // track the spreading pattern
        pv.fit = fit_two_frequency_core(prof, o);
        out.push_back(pv);
    }
    return out;
}

} // namespace angspec
