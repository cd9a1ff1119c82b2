#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <voltlift/io.hpp>

// End-to-end runs of the installed CLI binary (path injected by CMake).

namespace {
namespace fs = std::filesystem;

std::string binary() { return VOLTLIFT_CLI_PATH; }
std::string config_dir() { return VOLTLIFT_CONFIG_DIR; }

int run(const std::string& cmdline) { return std::system((cmdline + " > /dev/null 2>&1").c_str()); }

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("voltlift_cli_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};
}  // namespace

TEST_CASE("simulate runs are byte-identical for a fixed seed") {
    TempDir a("sim_a"), b("sim_b");
    const std::string cfg = config_dir() + "/ou.ini";
    REQUIRE(run(binary() + " simulate --config " + cfg + " --out-dir " + a.path.string() +
                " --seed 9 --threads 2") == 0);
    REQUIRE(run(binary() + " simulate --config " + cfg + " --out-dir " + b.path.string() +
                " --seed 9 --threads 4") == 0);
    const auto pa = voltlift::io::read_file((a.path / "paths.csv").string());
    const auto pb = voltlift::io::read_file((b.path / "paths.csv").string());
    CHECK(pa == pb);
    CHECK(pa.size() > 1000);

    // different seed changes the body
    TempDir c("sim_c");
    REQUIRE(run(binary() + " simulate --config " + cfg + " --out-dir " + c.path.string() +
                " --seed 10") == 0);
    CHECK(voltlift::io::read_file((c.path / "paths.csv").string()) != pa);
}

TEST_CASE("check writes a full report on the golden config") {
    TempDir d("check");
    const std::string cfg = config_dir() + "/check-golden.ini";
    const int rc = run(binary() + " check --config " + cfg + " --out-dir " + d.path.string());
    CHECK((rc == 0 || rc == 2 * 256));  // pass or reported condition failure
    const auto j = voltlift::io::read_file((d.path / "check.json").string());
    for (const char* key : {"K0", "K1", "chi", "lln_rate", "clt_ok", "margin_contraction"})
        CHECK(j.find(key) != std::string::npos);

    // manifests carry the config hash
    const auto m = voltlift::io::read_file((d.path / "manifest-check.json").string());
    CHECK(m.find("config_hash") != std::string::npos);
}

TEST_CASE("resolvent subcommand round-trips a csv kernel") {
    TempDir d("resolvent");
    // rho = 0.5 e^{-t} provided as (t, rho) rows
    voltlift::io::CsvTable tab;
    tab.header = {"t", "rho"};
    const double dt = 5e-3;
    for (int k = 0; k < 4000; ++k) {
        const double t = (k + 0.5) * dt;
        tab.rows.push_back({t, 0.5 * std::exp(-t)});
    }
    const auto in_csv = (d.path / "rho.csv").string();
    voltlift::io::write_file_atomic(in_csv, voltlift::io::csv_encode(tab));

    const auto cfg = (d.path / "res.ini").string();
    voltlift::io::write_file_atomic(
        cfg, "[experiment]\nresolvent.dt = 0.005\nresolvent.input_csv = " + in_csv +
                 "\nrate.lambda = 1.0\nrate.p = 2.0\n");
    REQUIRE(run(binary() + " resolvent --config " + cfg + " --out-dir " + d.path.string()) == 0);
    const auto out = voltlift::io::csv_parse(
        voltlift::io::read_file((d.path / "resolvent.csv").string()));
    REQUIRE(out.rows.size() == 4000);
    // spot check r(t) = 0.5 e^{-0.5 t} midway
    const auto& row = out.rows[1000];
    CHECK(row[1] == doctest::Approx(0.5 * std::exp(-0.5 * row[0])).epsilon(2e-3));
}

TEST_CASE("kernels subcommand tabulates reconstruction error") {
    TempDir d("kernels");
    const std::string cfg = config_dir() + "/fractional.ini";
    REQUIRE(run(binary() + " kernels --config " + cfg + " --out-dir " + d.path.string()) == 0);
    const auto tab = voltlift::io::csv_parse(
        voltlift::io::read_file((d.path / "kernels.csv").string()));
    for (const auto& row : tab.rows) CHECK(std::abs(row[3]) <= 1e-4);
}

TEST_CASE("report bundles the summaries") {
    TempDir d("report");
    voltlift::io::write_file_atomic((d.path / "a-summary.json").string(), "{\"x\": 1}\n");
    voltlift::io::write_file_atomic((d.path / "b-summary.json").string(), "{\"y\": 2}\n");
    REQUIRE(run(binary() + " report --out-dir " + d.path.string()) == 0);
    const auto j = voltlift::io::read_file((d.path / "report.json").string());
    CHECK(j.find("a-summary.json") != std::string::npos);
    CHECK(j.find("b-summary.json") != std::string::npos);
}

TEST_CASE("lln subcommand round-trips its CSV schema") {
    TempDir d("lln");
    const auto cfg = (d.path / "lln.ini").string();
    voltlift::io::write_file_atomic(cfg, R"([model]
modes = 1
theta.kind = list
theta.values = 1.0
kernel.kind = resolvent_fractional
kernel.alpha = 1.0
kernel.beta = 1.0
diffusion.kind = additive
diffusion.sigma0 = 0.5

[lift]
family = laplace
lift.xmin = 0.99
lift.xmax = 1.01
lift.nodes = 2

[sim]
sim.dt = 0.01
sim.T = 1
sim.scheme = direct

[experiment]
exp.observable = identity
exp.M = 60
exp.T_grid = 2, 4, 8
exp.reference_mean = 0
)");
    REQUIRE(run(binary() + " lln --config " + cfg + " --out-dir " + d.path.string() +
                " --seed 5") == 0);
    const auto tab =
        voltlift::io::csv_parse(voltlift::io::read_file((d.path / "lln.csv").string()));
    REQUIRE(tab.header == std::vector<std::string>{"T", "mse", "mse_stderr"});
    REQUIRE(tab.rows.size() == 3);
    for (const auto& row : tab.rows) CHECK(row[1] > 0.0);
    const auto j = voltlift::io::read_file((d.path / "lln-summary.json").string());
    CHECK(j.find("slope") != std::string::npos);
}

TEST_CASE("bad config is a clean error, not a crash") {
    TempDir d("bad");
    const auto cfg = (d.path / "bad.ini").string();
    voltlift::io::write_file_atomic(cfg, "[model]\nmades = 1\n");
    const int rc = run(binary() + " simulate --config " + cfg + " --out-dir " + d.path.string());
    CHECK(rc == 1 * 256);
}
