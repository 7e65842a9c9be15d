// Drives the installed CLI binary end to end: exit codes, file outputs,
// determinism. argv[1] = path to the binary, argv[2] = scenes directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace
{
std::string g_cli;
std::string g_scenes;

int run_cmd(const std::string& args)
{
    const std::string cmd = g_cli + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
}
} // namespace

TEST_CASE("run writes one CSV per detection and exits zero")
{
    std::filesystem::remove_all("/tmp/angspec_cli_run");
    CHECK(run_cmd("run " + g_scenes + "/paper_image.scn --out /tmp/angspec_cli_run") == 0);
    CHECK(std::filesystem::exists("/tmp/angspec_cli_run/image_fund.csv"));
    CHECK(std::filesystem::exists("/tmp/angspec_cli_run/image_sh.csv"));
    CHECK(!std::filesystem::exists("/tmp/angspec_cli_run/image_fund.svg"));

    CHECK(run_cmd("run " + g_scenes + "/paper_image.scn --out /tmp/angspec_cli_run --svg") == 0);
    CHECK(std::filesystem::exists("/tmp/angspec_cli_run/image_fund.svg"));
    CHECK(std::filesystem::exists("/tmp/angspec_cli_run/image_sh.svg"));
}

TEST_CASE("the three error classes map to distinct exit codes")
{
    // 1: missing file
    CHECK(run_cmd("run /tmp/angspec_nonexistent.scn") == 1);

    // 1: parse error
    write_text("/tmp/angspec_parse_err.scn", "slit a_mm = 0.2\n");
    CHECK(run_cmd("run /tmp/angspec_parse_err.scn") == 1);

    // 2: validation error (z must increase)
    write_text("/tmp/angspec_validate_err.scn",
               "source { wavelength_nm = 845 }\npropagate { z_cm = -5 }\n");
    CHECK(run_cmd("run /tmp/angspec_validate_err.scn") == 2);

    // 3: runtime error (peak normalization over an all-dark window)
    write_text("/tmp/angspec_runtime_err.scn",
               "grid { n = 1024, dx_um = 2, pad = 2 }\n"
               "source { wavelength_nm = 845 }\n"
               "slit { a_mm = 0.05, d_mm = 0.08 }\n"
               "detect { label = dark, range_mm = 0.002, samples = 16, normalize = peak }\n");
    // the 2 um detection window sits between the slits where the mask is zero
    CHECK(run_cmd("run /tmp/angspec_runtime_err.scn --out /tmp/angspec_cli_rt") == 3);
}

TEST_CASE("run output is byte-identical across invocations")
{
    std::filesystem::remove_all("/tmp/angspec_cli_a");
    std::filesystem::remove_all("/tmp/angspec_cli_b");
    REQUIRE(run_cmd("run " + g_scenes + "/paper_image.scn --out /tmp/angspec_cli_a --svg") == 0);
    REQUIRE(run_cmd("run " + g_scenes + "/paper_image.scn --out /tmp/angspec_cli_b --svg") == 0);
    CHECK(slurp("/tmp/angspec_cli_a/image_fund.csv") == slurp("/tmp/angspec_cli_b/image_fund.csv"));
    CHECK(slurp("/tmp/angspec_cli_a/image_sh.csv") == slurp("/tmp/angspec_cli_b/image_sh.csv"));
    CHECK(slurp("/tmp/angspec_cli_a/image_fund.svg") == slurp("/tmp/angspec_cli_b/image_fund.svg"));
}

TEST_CASE("figure presets emit CSV and SVG; fig7b appends a fit")
{
    std::filesystem::remove_all("/tmp/angspec_cli_fig");
    CHECK(run_cmd("figure fig3 --out /tmp/angspec_cli_fig") == 0);
    CHECK(std::filesystem::exists("/tmp/angspec_cli_fig/fig3.csv"));
    CHECK(std::filesystem::exists("/tmp/angspec_cli_fig/fig3.svg"));

    CHECK(run_cmd("figure fig5a --out /tmp/angspec_cli_fig") == 0);
    CHECK(std::filesystem::exists("/tmp/angspec_cli_fig/fig5a.csv"));

    CHECK(run_cmd("figure fig7b --out /tmp/angspec_cli_fig") == 0);
    CHECK(std::filesystem::exists("/tmp/angspec_cli_fig/fig7b_fit.csv"));
    const std::string fit = slurp("/tmp/angspec_cli_fig/fig7b_fit.csv");
    CHECK(fit.rfind("z_m,mu1,mu2,K1,K2,residual", 0) == 0);

    CHECK(run_cmd("figure fig99 --out /tmp/angspec_cli_fig") == 2);
}

TEST_CASE("oracle passes on the paper scene and rejects bad requests")
{
    CHECK(run_cmd("oracle " + g_scenes + "/paper_image.scn --z 0.434") == 0);
    CHECK(run_cmd("oracle " + g_scenes + "/paper_image.scn --z 0") == 2);

    // deliberately aliased: no padding, long throw -> validation error
    write_text("/tmp/angspec_aliased.scn",
               "grid { n = 4096, dx_um = 2, pad = 1 }\n"
               "source { wavelength_nm = 845 }\n"
               "slit { a_mm = 0.2, d_mm = 0.4 }\n"
               "propagate { z_cm = 66 }\n");
    CHECK(run_cmd("oracle /tmp/angspec_aliased.scn --z 0.1") == 2);

    // oversized grid for the O(n^2) path
    write_text("/tmp/angspec_big.scn",
               "grid { n = 8192, dx_um = 2, pad = 2 }\n"
               "source { wavelength_nm = 845 }\n"
               "slit { a_mm = 0.2, d_mm = 0.4 }\n"
               "propagate { z_cm = 5 }\n");
    CHECK(run_cmd("oracle /tmp/angspec_big.scn --z 0.1") == 2);
}

TEST_CASE("fit command reads a profile CSV and prints the fit row")
{
    std::filesystem::remove_all("/tmp/angspec_cli_fit");
    REQUIRE(run_cmd("run " + g_scenes + "/paper_farfield.scn --out /tmp/angspec_cli_fit") == 0);
    const std::string cmd = g_cli + " fit /tmp/angspec_cli_fit/far_sh.csv > /tmp/angspec_fit_out.txt 2>/dev/null";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    const std::string out = slurp("/tmp/angspec_fit_out.txt");
    CHECK(out.rfind("z_m,mu1,mu2,K1,K2,residual", 0) == 0);

    CHECK(run_cmd("fit /tmp/angspec_missing.csv") == 1);
}

int main(int argc, char** argv)
{
    doctest::Context ctx;
    int shift = 0;
    if (argc >= 3 && argv[1][0] != '-') {
        g_cli = argv[1];
        g_scenes = argv[2];
        shift = 2;
    } else {
        g_cli = "./angspec";
        g_scenes = "scenes";
    }
    ctx.applyCommandLine(argc - shift, argv + shift);
    return ctx.run();
}
