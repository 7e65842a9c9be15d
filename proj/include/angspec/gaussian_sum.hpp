#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "angspec/field.hpp"
#include "angspec/linalg.hpp"

namespace angspec
{

// One real-weighted Gaussian of the envelope: c * exp(-((x - x0)/w)^2).
struct GaussianTerm
{
    double c = 0.0;
    double x0 = 0.0;   // center, m
    double w = 0.0;    // 1/e amplitude half-width, m
};

// Envelope as a sum of Gaussians plus one global quadratic phase
// exp(-i chirp x^2); the form Eq.-11-like crystal fields take.
struct GaussianSum
{
    std::vector<GaussianTerm> terms;
    double chirp = 0.0;        // rad/m^2
    double k = 0.0;
    double z = 0.0;
    double fit_residual = 0.0; // envelope-fit RMS over the fit window / peak

    void validate() const
    {
        if (terms.empty()) throw InvalidArgument("GaussianSum: needs at least one term");
        for (const GaussianTerm& t : terms)
            if (!(t.w > 0.0)) throw InvalidArgument("GaussianSum: widths must be positive");
        if (!(k > 0.0)) throw InvalidArgument("GaussianSum: k must be positive");
    }
};

inline cplx evaluate(const GaussianSum& gs, double x)
{
    double env = 0.0;
    for (const GaussianTerm& t : gs.terms) {
        const double u = (x - t.x0) / t.w;
        env += t.c * std::exp(-u * u);
    }
    return env * std::polar(1.0, -gs.chirp * x * x);
}

inline SampledField to_field(const GaussianSum& gs, const Grid1D& grid)
{
    gs.validate();
    std::vector<cplx> amp(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) amp[j] = evaluate(gs, grid.x(j));
    return SampledField(grid, std::move(amp), gs.k, gs.z, "gaussian-sum");
}

// Analytic Fresnel propagation of each term. A term with the global chirp is
// the complex Gaussian A exp(-p x^2 + s x); the Fresnel integral of that is
// again a complex Gaussian:
//   out(x) = A sqrt(k/(2 pi i z)) sqrt(pi/p') exp(i k x^2/(2z)) exp(s'^2/(4 p'))
// with p' = p - ik/(2z), s' = s - ikx/z.
inline SampledField propagate_gaussian_sum(const GaussianSum& gs, double z, const Grid1D& grid)
{
    gs.validate();
    if (z == 0.0) return to_field(gs, grid);

    const double k = gs.k;
    const cplx pref = std::sqrt(cplx(0.0, -k / (2.0 * std::numbers::pi * z)));
    std::vector<cplx> amp(grid.n(), cplx(0.0, 0.0));
    for (const GaussianTerm& t : gs.terms) {
        const cplx p(1.0 / (t.w * t.w), gs.chirp);
        const cplx pp = p - cplx(0.0, k / (2.0 * z));
        const double s = 2.0 * t.x0 / (t.w * t.w);
        const cplx amp0 = t.c * std::exp(-t.x0 * t.x0 / (t.w * t.w)) * pref *
                          std::sqrt(std::numbers::pi / pp);
        for (std::size_t j = 0; j < grid.n(); ++j) {
            const double x = grid.x(j);
            const cplx sp = cplx(s, 0.0) - cplx(0.0, k * x / z);
            amp[j] += amp0 * std::exp(cplx(0.0, k * x * x / (2.0 * z)) + sp * sp / (4.0 * pp));
        }
    }
    return SampledField(grid, std::move(amp), k, gs.z + z, "gaussian-sum");
}

// Textbook spreading of a single real Gaussian under this propagator.
inline double gaussian_width_at(double w0, double k, double z)
{
    const double t = 2.0 * z / (k * w0 * w0);
    return w0 * std::sqrt(1.0 + t * t);
}

// Pointwise square of the sum: products of Gaussians are Gaussians, so the
// second harmonic of a fitted envelope stays in closed form (n^2 terms).
inline GaussianSum square_gaussian_sum(const GaussianSum& gs)
{
    gs.validate();
    GaussianSum out;
    out.chirp = 2.0 * gs.chirp;
    out.k = 2.0 * gs.k;
    out.z = gs.z;
    out.fit_residual = gs.fit_residual;
    for (const GaussianTerm& ti : gs.terms)
        for (const GaussianTerm& tj : gs.terms) {
            const double inv_w2 = 1.0 / (ti.w * ti.w) + 1.0 / (tj.w * tj.w);
            const double w = std::sqrt(1.0 / inv_w2);
            const double x0 = (ti.x0 / (ti.w * ti.w) + tj.x0 / (tj.w * tj.w)) / inv_w2;
            const double logc = x0 * x0 * inv_w2 - ti.x0 * ti.x0 / (ti.w * ti.w) -
                                tj.x0 * tj.x0 / (tj.w * tj.w);
            out.terms.push_back({ti.c * tj.c * std::exp(logc), x0, w});
        }
    return out;
}

struct GaussianFitOptions
{
    double support_frac = 0.005;  // window where |envelope| >= frac * peak
    double window = 0.0;          // explicit half-window, m; 0 = support-derived
    double residual_gate = 0.05;  // divergence threshold, fraction of peak
    int max_iterations = 200;
};

// Least-squares fit of the field's real envelope by n_terms Gaussians.
// The field must be real up to the global quadratic phase exp(-i chirp x^2)
// and a global constant phase; both are divided out before fitting and the
// chirp is stored on the result.
inline GaussianSum fit_gaussian_sum(const SampledField& field, std::size_t n_terms,
                                    double chirp, const GaussianFitOptions& opt = {})
{
    if (n_terms < 1) throw InvalidArgument("fit_gaussian_sum: n_terms must be >= 1");
    const Grid1D& g = field.grid;
    const std::size_t n = g.n();

    // strip the quadratic phase, then the residual global phase
    std::vector<cplx> flat(n);
    std::size_t jpk = 0;
    double apk = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double x = g.x(j);
        flat[j] = field.amp[j] * std::polar(1.0, chirp * x * x);
        if (std::abs(flat[j]) > apk) { apk = std::abs(flat[j]); jpk = j; }
    }
    if (apk <= 0.0) throw FitError("fit_gaussian_sum: zero field");
    const cplx phase = flat[jpk] / std::abs(flat[jpk]);
    std::vector<double> env(n);
    double imag_rms = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const cplx v = flat[j] / phase;
        env[j] = v.real();
        imag_rms += v.imag() * v.imag();
    }
    imag_rms = std::sqrt(imag_rms / static_cast<double>(n));
    if (imag_rms > 0.05 * apk)
        throw FitError("fit_gaussian_sum: field is not real up to the supplied quadratic phase");

    // fit window: explicit half-width, or the region where the envelope matters
    std::size_t lo = n, hi = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (opt.window > 0.0 ? std::abs(g.x(j)) <= opt.window
                             : std::abs(env[j]) >= opt.support_frac * apk) {
            lo = std::min(lo, j);
            hi = std::max(hi, j);
        }
    }
    if (lo >= hi) throw FitError("fit_gaussian_sum: empty support");
    const std::size_t m = hi - lo + 1;
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) { xs[i] = g.x(lo + i); ys[i] = env[lo + i]; }

    // initialization: extrema of the envelope, strongest first
    struct Seed { double mag, x, val; };
    std::vector<Seed> seeds;
    for (std::size_t i = 1; i + 1 < m; ++i) {
        if ((ys[i] - ys[i - 1]) * (ys[i + 1] - ys[i]) < 0.0 &&
            std::abs(ys[i]) > 2.0 * opt.support_frac * apk)
            seeds.push_back({std::abs(ys[i]), xs[i], ys[i]});
    }
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.mag > b.mag; });

    std::vector<double> x0(n_terms), w(n_terms), c(n_terms);
    const double span = xs.back() - xs.front();
    double w_init = span / (2.2 * static_cast<double>(n_terms));
    if (seeds.size() >= 2) {
        std::vector<double> pos;
        for (std::size_t i = 0; i < std::min(seeds.size(), n_terms); ++i) pos.push_back(seeds[i].x);
        std::sort(pos.begin(), pos.end());
        double gap = span;
        for (std::size_t i = 1; i < pos.size(); ++i) gap = std::min(gap, pos[i] - pos[i - 1]);
        if (gap > 4.0 * g.dx()) w_init = gap / 2.2;
    }
    for (std::size_t i = 0; i < n_terms; ++i) {
        if (i < seeds.size()) { x0[i] = seeds[i].x; c[i] = seeds[i].val; }
        else {
            x0[i] = xs.front() + span * (static_cast<double>(i) + 0.5) / static_cast<double>(n_terms);
            c[i] = 0.0;
        }
        w[i] = w_init;
    }

    const double w_min = 2.0 * g.dx(), w_max = span;
    auto solve_weights = [&](const std::vector<double>& x0v, const std::vector<double>& wv,
                             std::vector<double>& cv) {
        detail::DesignMatrix A(m, n_terms);
        for (std::size_t t = 0; t < n_terms; ++t)
            for (std::size_t i = 0; i < m; ++i) {
                const double u = (xs[i] - x0v[t]) / wv[t];
                A(i, t) = std::exp(-u * u);
            }
        cv = detail::least_squares(A, ys);
        double rss = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double mdl = 0.0;
            for (std::size_t t = 0; t < n_terms; ++t) {
                const double u = (xs[i] - x0v[t]) / wv[t];
                mdl += cv[t] * std::exp(-u * u);
            }
            const double r = ys[i] - mdl;
            rss += r * r;
        }
        return std::sqrt(rss / static_cast<double>(m));
    };

    double resid = solve_weights(x0, w, c);
    double lambda = 1e-3;
    for (int it = 0; it < opt.max_iterations; ++it) {
        // Gauss-Newton step on centers and widths, weights held at the last solve
        const std::size_t p = 2 * n_terms;
        std::vector<double> jtj(p * p, 0.0), jtr(p, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double mdl = 0.0;
            std::vector<double> row(p);
            for (std::size_t t = 0; t < n_terms; ++t) {
                const double u = (xs[i] - x0[t]) / w[t];
                const double gsv = std::exp(-u * u);
                mdl += c[t] * gsv;
                row[t] = c[t] * gsv * 2.0 * u / w[t];                 // d model / d x0
                row[n_terms + t] = c[t] * gsv * 2.0 * u * u / w[t];   // d model / d w
            }
            const double r = ys[i] - mdl;
            for (std::size_t a = 0; a < p; ++a) {
                jtr[a] += row[a] * r;
                for (std::size_t b = a; b < p; ++b) jtj[b * p + a] += row[a] * row[b];
            }
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[b * p + a] = jtj[a * p + b];

        bool accepted = false;
        for (int tries = 0; tries < 8 && !accepted; ++tries) {
            std::vector<double> h = jtj;
            for (std::size_t a = 0; a < p; ++a) h[a * p + a] += lambda * (jtj[a * p + a] + 1e-30);
            std::vector<double> step;
            try { step = detail::solve_spd(std::move(h), jtr); }
            catch (const NumericError&) { lambda *= 10.0; continue; }

            std::vector<double> x0n = x0, wn = w, cn = c;
            for (std::size_t t = 0; t < n_terms; ++t) {
                x0n[t] += step[t];
                wn[t] = std::clamp(wn[t] + step[n_terms + t], w_min, w_max);
            }
            const double rn = solve_weights(x0n, wn, cn);
            if (rn < resid) {
                x0 = x0n; w = wn; c = cn;
                const double gain = (resid - rn) / (resid + 1e-300);
                resid = rn;
                lambda = std::max(lambda * 0.3, 1e-10);
                accepted = true;
                if (gain < 1e-10) it = opt.max_iterations;
            } else {
                lambda *= 10.0;
            }
        }
        if (!accepted) break;
    }

    if (resid > opt.residual_gate * apk)
        throw FitError("fit_gaussian_sum: residual " + std::to_string(resid / apk) +
                       " of peak exceeds the divergence gate");

    GaussianSum gs;
    gs.chirp = chirp;
    gs.k = field.k;
    gs.z = field.z;
    gs.fit_residual = resid / apk;
    for (std::size_t t = 0; t < n_terms; ++t) gs.terms.push_back({c[t], x0[t], w[t]});
    gs.validate();
    return gs;
}

} // namespace angspec
