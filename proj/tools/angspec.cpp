// Command-line front end: run scene files, reproduce the bench figures,
// cross-check the fast propagator against the quadrature oracle, fit fringes.
//
// Exit codes: 0 ok, 1 parse/input error, 2 validation error, 3 runtime error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "angspec/csv.hpp"
#include "angspec/presets.hpp"
#include "angspec/propagate.hpp"
#include "angspec/scene.hpp"
#include "angspec/svg.hpp"

namespace
{

constexpr int kExitParse = 1;
constexpr int kExitValidate = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw angspec::InvalidArgument("cannot open scene file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ANGSPEC_GRID_PRESET, e.g. "n=8192,dx_um=1,pad=8": overrides the default
// grid for scenes that do not carry their own grid statement.
void apply_env_grid_preset(angspec::BenchScene& scene)
{
    const char* env = std::getenv("ANGSPEC_GRID_PRESET");
    if (!env || scene.grid_explicit) return;
    std::string s(env);
    std::istringstream parts(s);
    std::string item;
    while (std::getline(parts, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw angspec::InvalidArgument("ANGSPEC_GRID_PRESET: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const double val = std::strtod(item.c_str() + eq + 1, nullptr);
        if (key == "n") scene.grid.n = static_cast<std::size_t>(val);
        else if (key == "dx_um") scene.grid.dx = val * 1e-6;
        else if (key == "pad") scene.grid.pad = static_cast<std::size_t>(val);
        else throw angspec::InvalidArgument("ANGSPEC_GRID_PRESET: unknown key '" + key + "'");
    }
}

int load_scene(const std::string& path, angspec::BenchScene& scene)
{
    std::string text;
    try {
        text = read_file(path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitParse;
    }
    angspec::ParseResult parsed = angspec::parse_scene(text);
    for (const auto& d : parsed.diagnostics) std::cerr << format_diagnostic(path, d) << "\n";
    if (!parsed.ok()) return kExitParse;
    scene = *parsed.scene;
    try {
        apply_env_grid_preset(scene);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitValidate;
    }
    const auto diags = angspec::validate_scene(scene);
    for (const auto& d : diags) std::cerr << format_diagnostic(path, d) << "\n";
    if (angspec::has_errors(diags)) return kExitValidate;
    return 0;
}

int cmd_run(const std::string& scene_path, const std::string& out_dir, bool emit_svg)
{
    angspec::BenchScene scene;
    if (int rc = load_scene(scene_path, scene)) return rc;
    try {
        std::filesystem::create_directories(out_dir);
        const angspec::RunResult run = angspec::run_scene(scene);
        for (const angspec::Detection& det : run.detections) {
            const std::string csv_path = out_dir + "/" + det.label + ".csv";
            angspec::write_file(csv_path, angspec::profile_csv(det.profile));
            std::cout << csv_path << "\n";
            if (emit_svg) {
                const std::string svg_path = out_dir + "/" + det.label + ".svg";
                angspec::write_file(svg_path, angspec::profile_svg(det.profile, det.label));
                std::cout << svg_path << "\n";
            }
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_figure(const std::string& name, const std::string& out_dir)
{
    try {
        const angspec::FigureOutput fig = angspec::run_figure_preset(name);
        std::filesystem::create_directories(out_dir);
        const std::string csv_path = out_dir + "/" + fig.name + ".csv";
        angspec::write_file(csv_path, angspec::profile_csv(fig.profile));
        std::cout << csv_path << "\n";
        const std::string svg_path = out_dir + "/" + fig.name + ".svg";
        angspec::write_file(svg_path, angspec::profile_svg(fig.profile, fig.title));
        std::cout << svg_path << "\n";
        if (fig.fit_csv) {
            const std::string fit_path = out_dir + "/" + fig.name + "_fit.csv";
            angspec::write_file(fit_path, *fig.fit_csv);
            std::cout << fit_path << "\n";
        }
        return 0;
    } catch (const angspec::InvalidArgument& e) {
        std::cerr << e.what() << "\n";
        return kExitValidate;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

// Cross-validate the spectral fast path against the direct Fresnel quadrature
// on the end-of-train field, over the central quarter of the unpadded grid.
int cmd_oracle(const std::string& scene_path, double z)
{
    angspec::BenchScene scene;
    if (int rc = load_scene(scene_path, scene)) return rc;
    if (z == 0.0) {
        std::cerr << "oracle: the quadrature path requires z != 0\n";
        return kExitValidate;
    }
    if (scene.grid.n > 4096) {
        std::cerr << "oracle: grid n = " << scene.grid.n
                  << " exceeds the O(n^2) quadrature cap of 4096\n";
        return kExitValidate;
    }
    try {
        angspec::BenchScene bare = scene;
        bare.elements.erase(std::remove_if(bare.elements.begin(), bare.elements.end(),
                                           [](const angspec::SceneElement& el) {
                                               return std::holds_alternative<angspec::DetectElem>(el);
                                           }),
                            bare.elements.end());
        const angspec::RunResult run = angspec::run_scene(bare);
        const angspec::SampledField& full = run.second_harmonic ? *run.second_harmonic
                                                                : *run.fundamental;

        // Band-limit the end-of-train field to the decimated Nyquist band and
        // resample to the unpadded sample count, keeping the padded span. Both
        // propagators then see identical data and the comparison isolates the
        // method difference.
        const std::size_t stride = full.grid.n() / scene.grid.n;
        angspec::AngularSpectrum spec = angspec::to_spectrum(full);
        const double q_cut = std::numbers::pi / (full.grid.dx() * static_cast<double>(stride));
        for (std::size_t m = 0; m < spec.grid.n(); ++m)
            if (std::abs(spec.grid.q(m)) >= q_cut) spec.amp[m] = 0.0;
        const angspec::SampledField filtered = angspec::to_field(spec);

        const angspec::Grid1D coarse(scene.grid.n, scene.grid.dx * static_cast<double>(stride));
        std::vector<angspec::cplx> amp(coarse.n());
        for (std::size_t j = 0; j < coarse.n(); ++j) amp[j] = filtered.amp[j * stride];
        const angspec::SampledField resampled(coarse, std::move(amp), full.k, full.z);

        angspec::PropagateOptions opt;
        opt.band_energy_tol = 1e-2;
        const angspec::SampledField fast = angspec::propagate_spectrum(resampled, z, opt);
        const angspec::SampledField slow = angspec::propagate_quadrature(resampled, z);

        double peak = 0.0;
        for (const auto& v : fast.amp) peak = std::max(peak, std::abs(v));
        double rss = 0.0;
        std::size_t count = 0;
        for (std::size_t j = coarse.n() / 4; j < 3 * coarse.n() / 4; ++j) {
            const double err = std::abs(fast.amp[j] - slow.amp[j]);
            rss += err * err;
            ++count;
        }
        const double rms = std::sqrt(rss / static_cast<double>(count)) / peak;
        const bool pass = rms <= 1e-5;
        std::cout << "spectral-vs-quadrature RMS " << rms << " of peak at z = " << z << " m: "
                  << (pass ? "PASS" : "FAIL") << "\n";
        return pass ? 0 : kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_fit(const std::string& csv_path, bool lock_ratio, bool single_frequency,
            const std::string& envelope)
{
    try {
        const angspec::IntensityProfile profile = angspec::read_profile_csv(csv_path);
        angspec::FringeFitOptions opt;
        opt.lock_ratio = lock_ratio;
        opt.two_frequency = !single_frequency;
        if (envelope == "sinc2") opt.envelope = angspec::FringeEnvelope::Sinc2;
        else if (envelope == "sinc4") opt.envelope = angspec::FringeEnvelope::Sinc4;
        else {
            std::cerr << "fit: envelope must be sinc2 or sinc4\n";
            return kExitValidate;
        }
        const angspec::FringeFit fit = angspec::fit_two_frequency(profile, opt);
        std::cout << angspec::fringe_fit_csv(0.0, fit);
        return 0;
    } catch (const angspec::InvalidArgument& e) {
        std::cerr << e.what() << "\n";
        return kExitParse;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"angular-spectrum double-slit / SHG bench simulator"};
    app.require_subcommand(1);

    std::string scene_path, out_dir = ".", figure_name, fit_csv, envelope = "sinc4";
    bool emit_svg = false, lock_ratio = false, single_frequency = false;
    double oracle_z = 0.0;

    CLI::App* run = app.add_subcommand("run", "run a scene file, emit one CSV per detection");
    run->add_option("scene", scene_path, "scene file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--svg", emit_svg, "also emit an SVG per profile");

    CLI::App* figure = app.add_subcommand("figure", "reproduce a bench figure preset");
    figure->add_option("name", figure_name, "preset name (fig3..fig8b)")->required();
    figure->add_option("--out", out_dir, "output directory");

    CLI::App* oracle = app.add_subcommand("oracle", "cross-check spectral vs quadrature propagation");
    oracle->add_option("scene", scene_path, "scene file")->required();
    oracle->add_option("--z", oracle_z, "propagation distance in meters")->required();

    CLI::App* fit = app.add_subcommand("fit", "fit the two-frequency fringe model to a profile CSV");
    fit->add_option("csv", fit_csv, "profile CSV (x_m,intensity)")->required();
    fit->add_flag("--lock-ratio", lock_ratio, "constrain K2 = 2 K1");
    fit->add_flag("--single-frequency", single_frequency, "pin mu2 to zero");
    fit->add_option("--envelope", envelope, "sinc2 or sinc4");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitParse;
    }

    if (run->parsed()) return cmd_run(scene_path, out_dir, emit_svg);
    if (figure->parsed()) return cmd_figure(figure_name, out_dir);
    if (oracle->parsed()) return cmd_oracle(scene_path, oracle_z);
    if (fit->parsed()) return cmd_fit(fit_csv, lock_ratio, single_frequency, envelope);
    return kExitParse;
}
