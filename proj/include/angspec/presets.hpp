#pragma once

#include <optional>
#include <string>
#include <vector>

#include "angspec/analytics.hpp"
#include "angspec/csv.hpp"
#include "angspec/fringe_fit.hpp"
#include "angspec/gaussian_sum.hpp"
#include "angspec/scene.hpp"

namespace angspec
{

// Bench parameters behind the figure presets. First configuration: slits
// 12.3 cm before an f = 10 cm lens, crystal at the focal plane, detection at
// the image plane. Second configuration: slits 2 cm before the crystal,
// collimated illumination, detection 43.4 cm from the crystal. Slit width
// 0.2 mm throughout; the separation is 0.4 mm in the first configuration and
// 0.21 mm in the second (the experiment quotes d of about 0.2 mm there).
struct PaperBench
{
    double lambda = 845e-9;
    double a = 0.2e-3;
    double d1 = 0.4e-3;     // first configuration
    double d2 = 0.21e-3;    // second configuration
    double z0 = 0.123;
    double f = 0.10;
    double z_slit_crystal = 0.02;
    double z_far = 0.434;

    double k() const { return 2.0 * std::numbers::pi / lambda; }
    double zD() const { return image_distance(z0, f); }

    BenchGeometry geometry() const
    {
        BenchGeometry g;
        g.z0 = z0;
        g.f = f;
        g.zD = zD();
        g.a = a;
        g.d = d1;
        g.lambda = lambda;
        g.validate();
        return g;
    }
};

inline BenchScene image_plane_scene(const PaperBench& b = {}, EdgePolicy edges = EdgePolicy::Hard)
{
    BenchScene sc;
    sc.wavelength = b.lambda;
    sc.elements = {
        SlitElem{b.a, b.d1, edges, 0},
        PropagateElem{b.z0, 0},
        LensElem{b.f, 0},
        PropagateElem{b.f, 0},
        ShgElem{},
        PropagateElem{b.zD(), 0},
        DetectElem{"image_fund", 2.5e-3, 1024, Normalization::Peak, DetectField::Fundamental, 0},
        DetectElem{"image_sh", 2.5e-3, 1024, Normalization::Peak, DetectField::SecondHarmonic, 0},
    };
    return sc;
}

inline BenchScene crystal_plane_scene(const PaperBench& b = {}, EdgePolicy edges = EdgePolicy::Hard)
{
    BenchScene sc;
    sc.wavelength = b.lambda;
    sc.elements = {
        SlitElem{b.a, b.d1, edges, 0},
        PropagateElem{b.z0, 0},
        LensElem{b.f, 0},
        PropagateElem{b.f, 0},
        ShgElem{},
        DetectElem{"crystal_fund", 1.2e-3, 1024, Normalization::Peak, DetectField::Fundamental, 0},
        DetectElem{"crystal_sh", 1.2e-3, 1024, Normalization::Peak, DetectField::SecondHarmonic, 0},
    };
    return sc;
}

// Second configuration: no real image forms; the far field carries the
// two-frequency pattern.
inline BenchScene far_field_scene(const PaperBench& b = {})
{
    BenchScene sc;
    sc.wavelength = b.lambda;
    sc.elements = {
        SlitElem{b.a, b.d2, EdgePolicy::Hard, 0},
        PropagateElem{b.z_slit_crystal, 0},
        ShgElem{},
        PropagateElem{b.z_far, 0},
        DetectElem{"far_fund", 6e-3, 2048, Normalization::Peak, DetectField::Fundamental, 0},
        DetectElem{"far_sh", 6e-3, 2048, Normalization::Peak, DetectField::SecondHarmonic, 0},
    };
    return sc;
}

// Second configuration as measured inside the crystal: the lens focuses the
// illumination onto the crystal, the slits sit 2 cm upstream.
inline BenchScene crystal_plane_scene_config2(const PaperBench& b = {})
{
    BenchScene sc;
    sc.wavelength = b.lambda;
    sc.elements = {
        LensElem{b.f, 0},
        PropagateElem{b.f - b.z_slit_crystal, 0},
        SlitElem{b.a, b.d2, EdgePolicy::Hard, 0},
        PropagateElem{b.z_slit_crystal, 0},
        ShgElem{},
        DetectElem{"crystal2_fund", 0.5e-3, 1024, Normalization::Peak, DetectField::Fundamental, 0},
        DetectElem{"crystal2_sh", 0.5e-3, 1024, Normalization::Peak, DetectField::SecondHarmonic, 0},
    };
    return sc;
}

struct FigureOutput
{
    std::string name;
    IntensityProfile profile;
    std::string title;
    std::optional<std::string> fit_csv;
};

inline std::vector<std::string> figure_preset_names()
{
    return {"fig3", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a",
            "fig6b", "fig7a", "fig7b", "fig8a", "fig8b"};
}

namespace detail
{
inline IntensityProfile pick_detection(const RunResult& run, const std::string& label)
{
    for (const Detection& d : run.detections)
        if (d.label == label) return d.profile;
    throw NumericError("missing detection " + label);
}
} // namespace detail

// Each preset binds one paper figure to a concrete bench layout and
// post-processing step.
inline FigureOutput run_figure_preset(const std::string& name, const PaperBench& b = {})
{
    FigureOutput out;
    out.name = name;

    if (name == "fig3") {
        // analytic self-convolution of the magnified double slit
        const BenchGeometry g = b.geometry();
        const double M = g.magnification();
        const double dx = 2e-6;
        const double half = M * (g.d + g.a);
        const auto n = static_cast<std::size_t>(half / dx);
        std::vector<double> mask(2 * n + 1);
        std::vector<double> xs(2 * n + 1);
        for (std::size_t j = 0; j < mask.size(); ++j) {
            xs[j] = (static_cast<double>(j) - static_cast<double>(n)) * dx;
            mask[j] = slit_image(xs[j], g);
        }
        const ConvolutionProfile conv = self_convolution(mask, dx, xs.front());
        out.profile.x = conv.x;
        out.profile.intensity = conv.amp;
        out.title = "Self-convolution of the double-slit image (amplitude)";
        return out;
    }

    if (name == "fig4a" || name == "fig4b") {
        // the far-field route: the real crystal envelope fitted by Gaussians,
        // then propagated in closed form (fundamental at k, SH at 2k)
        const Grid1D grid(16384, 2e-6);
        const double k = b.k();
        std::vector<cplx> env(grid.n());
        for (std::size_t j = 0; j < grid.n(); ++j) {
            const double x = grid.x(j);
            env[j] = sinc((k / b.f) * (b.a / 2.0) * x) * std::cos((k / b.f) * (b.d2 / 2.0) * x);
        }
        const SampledField wr(grid, std::move(env), k, 0.0, "crystal envelope");
        GaussianFitOptions fopt;
        fopt.window = 3.0 * b.lambda * b.f / b.a;
        const GaussianSum gs = fit_gaussian_sum(wr, 12, 0.0, fopt);
        if (name == "fig4a") {
            const SampledField far = propagate_gaussian_sum(gs, b.z_far, grid);
            out.profile = intensity(far, Normalization::Peak);
            out.title = "Fundamental, far field (Gaussian-sum route)";
        } else {
            const SampledField far = propagate_gaussian_sum(square_gaussian_sum(gs), b.z_far, grid);
            out.profile = intensity(far, Normalization::Peak);
            out.title = "Second harmonic, far field (Gaussian-sum route)";
        }
        // central window for the emitted curve
        IntensityProfile cut;
        cut.normalization = out.profile.normalization;
        for (std::size_t j = 0; j < out.profile.x.size(); ++j)
            if (std::abs(out.profile.x[j]) <= 6e-3) {
                cut.x.push_back(out.profile.x[j]);
                cut.intensity.push_back(out.profile.intensity[j]);
            }
        out.profile = std::move(cut);
        return out;
    }

    if (name == "fig5a" || name == "fig5b") {
        const RunResult run = run_scene(image_plane_scene(b));
        out.profile = detail::pick_detection(run, name == "fig5a" ? "image_fund" : "image_sh");
        out.title = name == "fig5a" ? "Fundamental, image plane" : "Second harmonic, image plane";
        return out;
    }
    if (name == "fig6a" || name == "fig6b") {
        const RunResult run = run_scene(crystal_plane_scene(b));
        out.profile = detail::pick_detection(run, name == "fig6a" ? "crystal_fund" : "crystal_sh");
        out.title = name == "fig6a" ? "Fundamental, crystal plane" : "Second harmonic, crystal plane";
        return out;
    }
    if (name == "fig7a" || name == "fig7b") {
        const RunResult run = run_scene(far_field_scene(b));
        out.profile = detail::pick_detection(run, name == "fig7a" ? "far_fund" : "far_sh");
        if (name == "fig7a") {
            out.title = "Fundamental, far field";
            FringeFitOptions fo;
            fo.envelope = FringeEnvelope::Sinc2;
            fo.two_frequency = false;
            const FringeFit fit = fit_two_frequency(out.profile, fo);
            out.fit_csv = fringe_fit_csv(b.z_far, fit);
        } else {
            out.title = "Second harmonic, far field";
            FringeFitOptions fo;
            fo.envelope = FringeEnvelope::Sinc4;
            const FringeFit fit = fit_two_frequency(out.profile, fo);
            out.fit_csv = fringe_fit_csv(b.z_far, fit);
        }
        return out;
    }
    if (name == "fig8a" || name == "fig8b") {
        const RunResult run = run_scene(crystal_plane_scene_config2(b));
        out.profile = detail::pick_detection(run, name == "fig8a" ? "crystal2_fund" : "crystal2_sh");
        out.title = name == "fig8a" ? "Fundamental, crystal plane (second configuration)"
                                    : "Second harmonic, crystal plane (second configuration)";
        return out;
    }
    throw InvalidArgument("unknown figure preset '" + name + "'");
}

} // namespace angspec
