#include <doctest.h>

#include <stdexcept>
#include <string>

#include <voltlift/config.hpp>
#include <voltlift/io.hpp>

using namespace voltlift;
using config::RunConfig;

namespace {
const char* kMinimalOU = R"(
# minimal OU run
[model]
modes = 1
theta.kind = list
theta.values = 1.0
kernel.kind = resolvent_fractional
kernel.alpha = 1.0
kernel.beta = 1.0
diffusion.kind = additive
diffusion.sigma0 = 0.5

[sim]
sim.dt = 0.01
sim.T = 1
sim.scheme = direct
)";
}

TEST_CASE("minimal OU config parses and builds") {
    const auto c = RunConfig::parse_text(kMinimalOU);
    const auto m = config::model_from_config(c);
    CHECK(m.modes() == 1);
    CHECK(m.diffusion.s0[0] == doctest::Approx(0.5));
    const auto sc = config::sim_config_from_config(c);
    CHECK(sc.scheme == sim::Scheme::direct);
    CHECK(sc.dt == doctest::Approx(0.01));
}

TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("[model]\nmades = 1\n"),
                         doctest::Contains("unknown key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("[nope]\n"), doctest::Contains("unknown section"),
                         std::invalid_argument);
}

TEST_CASE("duplicate keys name both lines") {
    try {
        RunConfig::parse_text("[sim]\nsim.dt = 0.1\nsim.dt = 0.2\n");
        FAIL("expected a duplicate-key error");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("duplicate") != std::string::npos);
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("line 2") != std::string::npos);
    }
}

TEST_CASE("type and precondition validation") {
    CHECK_THROWS_WITH_AS(RunConfig::parse_text("[sim]\nsim.dt = abc\n").require_double("sim", "sim.dt"),
                         doctest::Contains("not a number"), std::invalid_argument);

    // alpha = 1.5 is admissible for the shift lift but not for the Laplace
    // density representation: strict validation rejects it
    const auto c = RunConfig::parse_text(
        "[model]\nkernel.kind = resolvent_fractional\nkernel.alpha = 1.5\nkernel.beta = 1.0\n");
    CHECK_THROWS_WITH_AS(config::kernel_from_config(c, "kernel", true),
                         doctest::Contains("alpha in (0,1)"), std::invalid_argument);
    CHECK_NOTHROW(config::kernel_from_config(c, "kernel", false));
}

TEST_CASE("wrapped kernels from config") {
    const auto c = RunConfig::parse_text(
        "[model]\nkernel.kind = resolvent_fractional\nkernel.alpha = 0.7\nkernel.beta = 0.7\n"
        "kernel.lambda = 0.5\nkernel.epsilon = 0.1\n");
    const auto k = config::kernel_from_config(c, "kernel", true);
    CHECK(k.kind == kernels::KernelKind::damped);
    CHECK(k.inner->kind == kernels::KernelKind::time_shifted);
    CHECK(kernels::support_offset(k) == doctest::Approx(0.5));
}

TEST_CASE("spectral operators from config") {
    const auto c = RunConfig::parse_text(
        "[model]\nmodes = 3\ntheta.kind = weyl\ntheta.d = 1\ntheta.c = 1.0\nnoise.gamma = 0.5\n");
    const auto s = config::spectral_from_config(c);
    REQUIRE(s.modes() == 3);
    CHECK(s.thetas[2] == doctest::Approx(9.0));
    CHECK(s.noise_eigs[2] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("csv round trip") {
    io::CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{1.0, 2.5}, {-3.25, 1e-10}};
    const auto text = io::csv_encode(t);
    CHECK(text.find("a,b\n") == 0);
    const auto back = io::csv_parse(text);
    REQUIRE(back.rows.size() == 2);
    CHECK(back.rows[1][0] == doctest::Approx(-3.25));
    CHECK(back.rows[1][1] == doctest::Approx(1e-10));
    CHECK_THROWS_AS(io::csv_parse("a,b\n1\n"), std::invalid_argument);
}

TEST_CASE("atomic writes and hashing") {
    const std::string path = "/tmp/voltlift_test_io/file.txt";
    io::write_file_atomic(path, "hello\n");
    CHECK(io::read_file(path) == "hello\n");
    io::write_file_atomic(path, "replaced\n");
    CHECK(io::read_file(path) == "replaced\n");

    CHECK(io::fnv1a64("abc") == io::fnv1a64("abc"));
    CHECK(io::fnv1a64("abc") != io::fnv1a64("abd"));
    CHECK(io::hex64(0x1234abcdull) == "000000001234abcd");
}

TEST_CASE("manifest serialisation") {
    io::Manifest m;
    m.config_hash = "deadbeef";
    m.seed = 42;
    m.subcommand = "simulate";
    m.outputs = {"paths.csv"};
    const auto j = io::manifest_json(m);
    CHECK(j.find("deadbeef") != std::string::npos);
    CHECK(j.find("simulate") != std::string::npos);
    CHECK(j.find("paths.csv") != std::string::npos);
}
