// End-to-end checks of the command-line front end: exit codes, file
// outputs, config-file precedence, stage-vs-pipeline equivalence.

#include <doctest.h>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "smokeflow/imgio.hpp"
#include "synthetic.hpp"

#ifndef SMOKEFLOW_CLI
#error "SMOKEFLOW_CLI must point at the built binary"
#endif

namespace fs = std::filesystem;
using namespace smokeflow;

namespace {

struct CliDir {
    fs::path path;
    CliDir() {
        path = fs::temp_directory_path() /
               ("smokeflow_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~CliDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

int run_cli(const std::string& args) {
    std::string cmd = std::string(SMOKEFLOW_CLI) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::vector<char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// A quick 16x16 pair with real motion, small enough for fast CLI runs.
void write_frames(const CliDir& dir, std::string& f1, std::string& f2) {
    ImageFrame a = testutil::aniso_texture(16, 7);
    ImageFrame b = testutil::shift_right_wrapped(a);
    f1 = dir.file("frame1.png");
    f2 = dir.file("frame2.png");
    imgio::write_image(a, f1);
    imgio::write_image(b, f2);
}

const std::string kFast = " --iters 5 ";

}  // namespace

TEST_CASE("flow subcommand writes a valid .flo") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);
    std::string out = dir.file("z.flo");
    int rc = run_cli("flow --frame1 " + f1 + " --frame2 " + f2 + " --out " + out +
                     " --alpha 0.5 --lambda 225 --theta 0.001 --nu 1000" + kFast);
    CHECK(rc == 0);
    FlowField z = imgio::read_flo(out);
    CHECK(z.width() == 16);
    CHECK(z.height() == 16);
}

TEST_CASE("eval of a flow against itself reports zeros") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);
    std::string flo = dir.file("z.flo");
    REQUIRE(run_cli("flow --frame1 " + f1 + " --frame2 " + f2 + " --out " + flo + kFast) == 0);

    std::string record = dir.file("metrics.json");
    std::string cmd = std::string(SMOKEFLOW_CLI) + " eval --pred " + flo + " --gt " +
                      flo + " --image " + f1 + " > " + record + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    std::string text(slurp(record).data(), slurp(record).size());
    CHECK(text.find("\"aae\":0.0") != std::string::npos);
    CHECK(text.find("\"aepe\":0.0") != std::string::npos);
    CHECK(text.find("\"aeng\":0.0") != std::string::npos);
}

TEST_CASE("missing input maps to exit 1 without clobbering outputs") {
    CliDir dir;
    std::string out = dir.file("must_not_exist.png");
    int rc = run_cli("colorize --flow " + dir.file("missing.flo") + " --out " + out);
    CHECK(rc == 1);
    CHECK(!fs::exists(out));
}

TEST_CASE("bad flags map to exit 1") {
    CHECK(run_cli("flow --no-such-flag 1") == 1);
    CHECK(run_cli("") == 1);
}

TEST_CASE("invalid parameter values map to exit 1") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);
    int rc = run_cli("flow --frame1 " + f1 + " --frame2 " + f2 + " --out " +
                     dir.file("z.flo") + " --alpha 1.5" + kFast);
    CHECK(rc == 1);
}

TEST_CASE("noise subcommand is seeded and deterministic") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);
    std::string n1 = dir.file("n1.png"), n2 = dir.file("n2.png");
    std::string args = " --noise-kind gaussian --noise-sigma 0.05 --noise-seed 9";
    REQUIRE(run_cli("noise --in " + f1 + " --out " + n1 + args) == 0);
    REQUIRE(run_cli("noise --in " + f1 + " --out " + n2 + args) == 0);
    CHECK(slurp(n1) == slurp(n2));
    CHECK(slurp(n1) != slurp(f1));
}

TEST_CASE("ssim subcommand reports 1 for identical images") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);
    std::string record = dir.file("ssim.json");
    std::string cmd = std::string(SMOKEFLOW_CLI) + " ssim --a " + f1 + " --b " + f1 +
                      " > " + record + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    auto bytes = slurp(record);
    std::string text(bytes.data(), bytes.size());
    CHECK(text.find("\"ssim\":1.0") != std::string::npos);
}

TEST_CASE("pipeline equals the staged subcommands byte for byte") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);
    std::string shared = " --gmm-seed 5 --max-mag 2" + kFast;

    std::string gt = dir.file("gt.flo");
    imgio::write_flo(FlowField(16, 16), gt);

    // One-shot pipeline, metrics captured from stdout.
    std::string pipe_cmd = std::string(SMOKEFLOW_CLI) + " pipeline --frame1 " + f1 +
                           " --frame2 " + f2 + " --gt " + gt +
                           " --out-flow " + dir.file("p.flo") +
                           " --out-colormap " + dir.file("p_cm.png") +
                           " --out-mask " + dir.file("p_mask.png") +
                           " --out-fused " + dir.file("p_fused.png") + shared +
                           " > " + dir.file("p_metrics.json") + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(pipe_cmd.c_str())) == 0);

    // Stage by stage with the same configuration.
    REQUIRE(run_cli("flow --frame1 " + f1 + " --frame2 " + f2 + " --out " +
                    dir.file("s.flo") + shared) == 0);
    REQUIRE(run_cli("colorize --flow " + dir.file("s.flo") + " --out " +
                    dir.file("s_cm.png") + shared) == 0);
    REQUIRE(run_cli("segment --colormap " + dir.file("s_cm.png") + " --mask " +
                    dir.file("s_mask.png") + " --fused " + dir.file("s_fused.png") +
                    shared) == 0);
    std::string eval_cmd = std::string(SMOKEFLOW_CLI) + " eval --pred " +
                           dir.file("s.flo") + " --gt " + gt + " --image " + f1 +
                           " > " + dir.file("s_metrics.json") + " 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(eval_cmd.c_str())) == 0);

    CHECK(slurp(dir.file("p.flo")) == slurp(dir.file("s.flo")));
    CHECK(slurp(dir.file("p_cm.png")) == slurp(dir.file("s_cm.png")));
    CHECK(slurp(dir.file("p_mask.png")) == slurp(dir.file("s_mask.png")));
    CHECK(slurp(dir.file("p_fused.png")) == slurp(dir.file("s_fused.png")));
    CHECK(slurp(dir.file("p_metrics.json")) == slurp(dir.file("s_metrics.json")));
}

TEST_CASE("config file reproduces flag runs and flags win over config") {
    CliDir dir;
    std::string f1, f2;
    write_frames(dir, f1, f2);

    std::string cfg = dir.file("run.cfg");
    {
        std::ofstream out(cfg);
        out << "alpha=0.6\n"
            << "lambda=180\n"
            << "iters=4\n"
            << "window=2\n";
    }

    std::string by_flags = dir.file("flags.flo");
    REQUIRE(run_cli("flow --frame1 " + f1 + " --frame2 " + f2 + " --out " + by_flags +
                    " --alpha 0.6 --lambda 180 --iters 4 --window 2") == 0);

    std::string by_config = dir.file("config.flo");
    REQUIRE(run_cli("--config " + cfg + " flow --frame1 " + f1 + " --frame2 " + f2 +
                    " --out " + by_config) == 0);
    CHECK(slurp(by_flags) == slurp(by_config));

    // A flag overrides the config value.
    std::string override_out = dir.file("override.flo");
    REQUIRE(run_cli("--config " + cfg + " flow --frame1 " + f1 + " --frame2 " + f2 +
                    " --out " + override_out + " --alpha 0.4") == 0);
    std::string direct = dir.file("direct.flo");
    REQUIRE(run_cli("flow --frame1 " + f1 + " --frame2 " + f2 + " --out " + direct +
                    " --alpha 0.4 --lambda 180 --iters 4 --window 2") == 0);
    CHECK(slurp(override_out) == slurp(direct));
    CHECK(slurp(override_out) != slurp(by_config));
}
