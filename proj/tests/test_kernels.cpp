#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include <voltlift/kernels.hpp>
#include <voltlift/laplace_lift.hpp>

using namespace voltlift;
using kernels::KernelSpec;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kE_07_07_m1 = 0.21039334638902380764;  // E_{0.7,0.7}(-1)

special::WeightParams default_wp() {
    special::WeightParams wp;
    wp.family = special::WeightFamily::laplace;
    wp.delta = 0.5;
    wp.eta = 2.0;
    return wp;
}
}  // namespace

TEST_CASE("kernel_value closed forms") {
    CHECK(kernels::kernel_value(KernelSpec::fractional_rl(0.5), 1.0) ==
          doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-13));
    CHECK(kernels::kernel_value(KernelSpec::log_kernel(), 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(kernels::kernel_value(KernelSpec::resolvent_fractional(1.0, 1.0, 3.0), 0.5) ==
          doctest::Approx(std::exp(-1.5)).epsilon(1e-13));
    const auto damped = KernelSpec::damped(KernelSpec::log_kernel(), 0.7);
    CHECK(kernels::kernel_value(damped, 2.0) ==
          doctest::Approx(std::exp(-1.4) * std::log(1.5)).epsilon(1e-13));
    const auto shifted = KernelSpec::time_shifted(KernelSpec::log_kernel(), 0.25);
    CHECK(kernels::kernel_value(shifted, 0.75) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(kernels::kernel_value(KernelSpec::log_kernel(), 0.0), std::invalid_argument);
}

TEST_CASE("kernel validation regimes") {
    CHECK_THROWS_AS(KernelSpec::fractional_rl(1.2).validate(), std::invalid_argument);
    CHECK_THROWS_AS(KernelSpec::resolvent_fractional(1.2, 1.0, 1.0).validate(true),
                    std::invalid_argument);
    CHECK_NOTHROW(KernelSpec::resolvent_fractional(1.2, 1.0, 1.0).validate(false));
    // beta - alpha a negative integer is excluded in the wide regime
    CHECK_THROWS_AS(KernelSpec::resolvent_fractional(1.5, 0.5, 1.0).validate(false),
                    std::invalid_argument);
}

TEST_CASE("bernstein density examples") {
    CHECK(kernels::bernstein_density(KernelSpec::resolvent_fractional(0.5, 0.5, 1.0), 1.0) ==
          doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-13));
    CHECK(kernels::bernstein_density(KernelSpec::fractional_rl(0.5), 1.0) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-13));
    CHECK(kernels::bernstein_density(KernelSpec::log_kernel(), 1e-10) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // damped kind vanishes below the offset in absolute coordinates
    const auto d = KernelSpec::damped(KernelSpec::fractional_rl(0.5), 2.0);
    CHECK(kernels::bernstein_density_abs(d, 1.0) == 0.0);
    CHECK(kernels::bernstein_density_abs(d, 3.0) ==
          doctest::Approx(kernels::bernstein_density(KernelSpec::fractional_rl(0.5), 1.0)));
}

TEST_CASE("scaling property of the fractional resolvent density") {
    // xi_{a,b}(x; th) = th^{-b/a} xi_{a,b}(x th^{-1/a}; 1), checked against the
    // formula's own scale so near-cancelling numerators stay meaningful
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ua(0.1, 0.95), ub(0.05, 0.95), ux(-3.0, 3.0),
        uth(-1.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double a = ua(rng);
        const double b = ub(rng) * (a + 1.0);
        if (b <= 0.0) continue;
        const double x = std::pow(10.0, ux(rng));
        const double th = std::pow(10.0, uth(rng));
        const auto k = KernelSpec::resolvent_fractional(a, b, th);
        const double lhs = kernels::bernstein_density(k, x);
        const auto k1 = KernelSpec::resolvent_fractional(a, b, 1.0);
        const double rhs = std::pow(th, -b / a) *
                           kernels::bernstein_density(k1, x * std::pow(th, -1.0 / a));
        const double xa = std::pow(x, a);
        const double den = kPi * (th * th + 2.0 * th * std::cos(kPi * a) * xa + xa * xa);
        const double scale = (std::pow(x, 2 * a - b) * std::abs(std::sin(b * kPi)) +
                              th * std::pow(x, a - b) * std::abs(std::sin((a - b) * kPi))) /
                             den;
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(scale, 1e-300));
    }
}

TEST_CASE("alpha = beta kills the cross term") {
    for (double a : {0.3, 0.5, 0.75, 0.9}) {
        for (double x : {0.01, 0.5, 1.0, 7.0, 120.0}) {
            const double th = 2.5;
            const double xa = std::pow(x, a);
            const double simplified =
                xa * std::sin(a * kPi) / (kPi * (th * th + 2 * th * std::cos(kPi * a) * xa + xa * xa));
            CHECK(kernels::bernstein_density(KernelSpec::resolvent_fractional(a, a, th), x) ==
                  doctest::Approx(simplified).epsilon(1e-13));
        }
    }
}

TEST_CASE("density nonnegative in the completely monotone regime") {
    // classical regime alpha <= beta <= 1 (the spec sheet's "beta <= alpha"
    // has the inequality reversed; beta < alpha gives sign changes near 0)
    for (double a : {0.4, 0.6, 0.8}) {
        for (double b : {a, 0.5 * (a + 1.0) < 1.0 ? 0.5 * (a + 1.0) : 0.9, 1.0}) {
            const auto k = KernelSpec::resolvent_fractional(a, b, 1.7);
            for (int i = 0; i <= 400; ++i) {
                const double x = std::pow(10.0, -4.0 + 8.0 * i / 400.0);
                CHECK(kernels::bernstein_density(k, x) >= -1e-15);
            }
        }
    }
}

TEST_CASE("laplace reconstruction matches closed forms to 1e-4") {
    const auto q = laplace_lift::build_quadrature(default_wp(), 1e-4, 1e4, 200);
    const std::vector<KernelSpec> cases = {
        KernelSpec::fractional_rl(0.7),
        KernelSpec::log_kernel(),
        KernelSpec::resolvent_fractional(0.7, 0.7, 1.0),
        KernelSpec::resolvent_fractional(0.7, 0.7, 4.0),
    };
    for (const auto& k : cases) {
        for (int i = 0; i <= 24; ++i) {
            const double t = 0.05 * std::pow(20.0 / 0.05, i / 24.0);
            const double rec = laplace_lift::reconstruct_kernel(k, q, t);
            const double exact = kernels::kernel_value(k, t);
            CHECK(std::abs(rec - exact) <= 1e-4 * std::abs(exact));
        }
    }
}

TEST_CASE("log-kernel Laplace pair at t = 1") {
    const auto q = laplace_lift::build_quadrature(default_wp(), 1e-4, 1e4, 200);
    CHECK(laplace_lift::reconstruct_kernel(KernelSpec::log_kernel(), q, 1.0) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-4));
}

TEST_CASE("resolvent reconstruction hits E_{0.7,0.7}(-1)") {
    const auto q = laplace_lift::build_quadrature(default_wp(), 1e-4, 1e4, 200);
    CHECK(laplace_lift::reconstruct_kernel(KernelSpec::resolvent_fractional(0.7, 0.7, 1.0), q,
                                           1.0) == doctest::Approx(kE_07_07_m1).epsilon(1e-4));
}

TEST_CASE("damped kernel reconstructs as e^{-lambda t} x inner") {
    const auto q = laplace_lift::build_quadrature(default_wp(), 1e-4, 1e4, 200);
    const auto inner = KernelSpec::resolvent_fractional(0.7, 0.7, 1.0);
    const auto k = KernelSpec::damped(inner, 0.5);
    for (int i = 0; i <= 12; ++i) {
        const double t = 0.05 * std::pow(20.0 / 0.05, i / 12.0);
        const double target = std::exp(-0.5 * t) * kernels::kernel_value(inner, t);
        CHECK(laplace_lift::reconstruct_kernel(k, q, t) ==
              doctest::Approx(target).epsilon(1e-4));
    }
}

TEST_CASE("exponential kernel embeds as a single-node discrete measure") {
    special::WeightParams wp = default_wp();
    const double th = 3.0;
    const auto q = laplace_lift::discrete_quadrature({th}, {1.0}, wp);
    const auto k = KernelSpec::resolvent_fractional(1.0, 1.0, th);
    for (double t : {0.1, 0.5, 2.0})
        CHECK(laplace_lift::reconstruct_kernel(k, q, t) ==
              doctest::Approx(std::exp(-th * t)).epsilon(1e-13));
}

TEST_CASE("reconstruction error drops geometrically under grid doubling") {
    const auto k = KernelSpec::fractional_rl(0.7);
    double prev = 1e300;
    for (int K : {12, 24, 48, 96}) {
        const auto q = laplace_lift::build_quadrature(default_wp(), 1e-4, 1e4, K);
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double t = 0.1 * std::pow(100.0, i / 10.0);
            const double exact = kernels::kernel_value(k, t);
            worst = std::max(worst,
                             std::abs(laplace_lift::reconstruct_kernel(k, q, t) - exact) /
                                 exact);
        }
        if (prev < 1e299) CHECK(worst <= prev / 2.0);
        prev = std::max(worst, 1e-15);  // floor once the rule saturates
    }
}

TEST_CASE("shift derivative density") {
    const auto ou = KernelSpec::resolvent_fractional(1.0, 1.0, 1.0);
    CHECK(kernels::shift_derivative_density(ou, 1.0) ==
          doctest::Approx(-std::exp(-1.0)).epsilon(1e-12));
    CHECK_THROWS_AS(kernels::shift_derivative_density(KernelSpec::log_kernel(), 1.0),
                    std::invalid_argument);

    for (const auto& [a, b, th, x] :
         {std::tuple{0.7, 0.7, 1.0, 0.5}, std::tuple{1.2, 1.0, 2.0, 1.0}}) {
        const auto k = KernelSpec::resolvent_fractional(a, b, th);
        const double h = 1e-5 * x;
        const double fd = (special::ml_kernel_value({a, b}, th, x + h) -
                           special::ml_kernel_value({a, b}, th, x - h)) /
                          (2 * h);
        CHECK(kernels::shift_derivative_density(k, x) == doctest::Approx(fd).epsilon(1e-5));
    }
}

TEST_CASE("weyl eigenvalues") {
    const auto s1 = kernels::weyl_eigenvalues(1, 1.0, 3);
    CHECK(s1.thetas == std::vector<double>{1.0, 4.0, 9.0});
    const auto s2 = kernels::weyl_eigenvalues(2, 2.0, 2);
    CHECK(s2.thetas == std::vector<double>{2.0, 4.0});
    const auto s4 = kernels::weyl_eigenvalues(4, 1.0, 4);
    CHECK(s4.thetas[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(s4.thetas[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));
    CHECK(s4.thetas[3] == doctest::Approx(2.0).epsilon(1e-14));
    const auto sg = kernels::weyl_eigenvalues(1, 1.0, 3, 0.5);
    CHECK(sg.noise_eigs[1] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(kernels::weyl_eigenvalues(0, 1.0, 3), std::invalid_argument);
}
