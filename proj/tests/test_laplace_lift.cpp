#include <doctest.h>

#include <cmath>
#include <random>

#include <voltlift/laplace_lift.hpp>
#include <voltlift/stats.hpp>

using namespace voltlift;
using namespace voltlift::laplace_lift;

namespace {
special::WeightParams wp_lap(double delta, double eta, double atom = 0.0) {
    special::WeightParams w;
    w.family = special::WeightFamily::laplace;
    w.delta = delta;
    w.eta = eta;
    w.atom_mass = atom;
    return w;
}

LiftState random_state(const QuadratureRule& q, std::mt19937_64& rng, std::size_t modes = 1) {
    std::normal_distribution<double> g(0.0, 1.0);
    LiftState s(q.size(), modes);
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t m = 0; m < modes; ++m) s.at(i, m) = g(rng);
    if (q.atom_mass > 0.0)
        for (std::size_t m = 0; m < modes; ++m) s.atom[m] = g(rng);
    return s;
}
}  // namespace

TEST_CASE("build_quadrature geometry") {
    const auto q3 = build_quadrature(wp_lap(0.5, 2.0), 1.0, 4.0, 3);
    REQUIRE(q3.size() == 3);
    CHECK(q3.nodes[0] == doctest::Approx(1.0));
    CHECK(q3.nodes[1] == doctest::Approx(2.0));
    CHECK(q3.nodes[2] == doctest::Approx(4.0));

    const auto q = build_quadrature(wp_lap(0.5, 2.0), 1e-4, 1e4, 161);
    double sum = 0.0;
    for (double w : q.weights) sum += w;
    CHECK(std::abs(sum - (1e4 - 1e-4)) <= 0.02 * 1e4);

    const auto q2 = build_quadrature(wp_lap(0.5, 2.0), 0.5, 8.0, 2);
    CHECK(q2.size() == 2);
    CHECK(q2.weights[0] > 0.0);
    CHECK(q2.weights[1] > 0.0);

    CHECK_THROWS_AS(build_quadrature(wp_lap(0.5, 2.0), 2.0, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_quadrature(wp_lap(0.5, 2.0), 1.0, 2.0, 1), std::invalid_argument);
}

TEST_CASE("semigroup law and point decay") {
    const auto q = build_quadrature(wp_lap(0.5, 2.0, 1.0), 1e-3, 1e3, 60);
    std::mt19937_64 rng(7);
    const LiftState y = random_state(q, rng);

    const LiftState a = apply_semigroup(apply_semigroup(y, q, 0.35), q, 1.15);
    const LiftState b = apply_semigroup(y, q, 1.5);
    for (std::size_t i = 0; i < q.size(); ++i) {
        // exact up to rounding: the exponent x(t+s) is itself rounded, so the
        // admissible drift is (4 + x(t+s)) eps relative
        const double tol =
            std::abs(b.at(i, 0)) * (4.0 + q.nodes[i] * 1.5) * 2.220446049250313e-16;
        CHECK(std::abs(a.at(i, 0) - b.at(i, 0)) <= tol + 1e-300);
    }
    CHECK(a.atom[0] == y.atom[0]);

    // identity at t = 0
    const LiftState id = apply_semigroup(y, q, 0.0);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(id.at(i, 0) == y.at(i, 0));

    // single node x = 2, value 1, t = 0.5
    const auto q1 = discrete_quadrature({2.0}, {1.0}, wp_lap(0.5, 2.0));
    LiftState one(1, 1);
    one.at(0, 0) = 1.0;
    CHECK(apply_semigroup(one, q1, 0.5).at(0, 0) == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("projection examples") {
    const auto q = build_quadrature(wp_lap(0.5, 2.0, 1.0), 1e-4, 1e4, 200);
    LiftState zero(q.size(), 2);
    for (double v : project(zero, q)) CHECK(v == 0.0);

    // atom-only state projects to its forcing value
    LiftState atom_only(q.size(), 1);
    atom_only.atom[0] = 3.25;
    CHECK(project(atom_only, q)[0] == doctest::Approx(3.25));

    // log-kernel density embedded, evolved to t = 1: projection = log 2
    const auto k = kernels::KernelSpec::log_kernel();
    const auto e = embed_kernel(k, q);
    LiftState dens(q.size(), 1);
    for (std::size_t i = 0; i < q.size(); ++i) dens.at(i, 0) = e.xi[i];
    const double proj = project(apply_semigroup(dens, q, 1.0), q)[0];
    CHECK(proj == doctest::Approx(std::log(2.0)).epsilon(1e-4));
}

TEST_CASE("s_infinity branches and idempotence") {
    const auto q_atom = build_quadrature(wp_lap(0.5, 2.0, 1.0), 1e-2, 1e2, 16);
    const auto q_plain = build_quadrature(wp_lap(0.5, 2.0, 0.0), 1e-2, 1e2, 16);
    std::mt19937_64 rng(11);
    const LiftState y = random_state(q_atom, rng);

    const LiftState sa = s_infinity(y, q_atom);
    CHECK(sa.atom[0] == y.atom[0]);
    for (std::size_t i = 0; i < q_atom.size(); ++i) CHECK(sa.at(i, 0) == 0.0);

    const LiftState sp = s_infinity(y, q_plain);
    CHECK(sp.atom[0] == 0.0);

    const LiftState twice = s_infinity(sa, q_atom);
    CHECK(twice.atom[0] == sa.atom[0]);
}

TEST_CASE("lift norm") {
    const auto q1 = discrete_quadrature({0.5}, {0.1}, wp_lap(1.0, 0.0));
    LiftState s(1, 1);
    s.at(0, 0) = 1.0;
    // sqrt(w * |v|^2 * x^{-delta}) = sqrt(0.1 * 2)
    CHECK(lift_norm(s, q1, q1.wparams) == doctest::Approx(std::sqrt(0.2)).epsilon(1e-12));

    const auto q = build_quadrature(wp_lap(0.5, 2.0, 0.5), 1e-2, 1e2, 24);
    LiftState z(q.size(), 3);
    CHECK(lift_norm(z, q, q.wparams) == 0.0);

    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        LiftState a = random_state(q, rng), b = random_state(q, rng);
        LiftState sum = a;
        for (std::size_t i = 0; i < q.size(); ++i) sum.at(i, 0) += b.at(i, 0);
        sum.atom[0] += b.atom[0];
        CHECK(lift_norm(sum, q, q.wparams) <=
              lift_norm(a, q, q.wparams) + lift_norm(b, q, q.wparams) + 1e-12);
    }
}

TEST_CASE("projection bounded by the Cauchy-Schwarz margin") {
    const auto q = build_quadrature(wp_lap(0.5, 2.0, 0.7), 1e-3, 1e3, 40);
    double margin_sq = q.atom_mass;
    for (std::size_t i = 0; i < q.size(); ++i)
        margin_sq += q.weights[i] / special::weight_value(q.wparams, q.nodes[i]);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 200; ++trial) {
        const LiftState y = random_state(q, rng);
        CHECK(std::abs(project(y, q)[0]) <=
              lift_norm(y, q, q.wparams) * std::sqrt(margin_sq) * (1.0 + 1e-12));
    }
}

TEST_CASE("semigroup regularisation bound holds on random states") {
    const auto wfrom = wp_lap(0.5, 1.0, 0.5);
    const auto wto = wp_lap(0.5, 2.0, 0.5);
    const auto q = build_quadrature(wfrom, 1e-4, 1e4, 120);
    for (double t : {0.02, 0.2, 1.0, 4.0, 20.0}) {
        const auto rep = semigroup_bound_check(q, wfrom, wto, t, 100);
        CHECK(rep.ok);
        CHECK(rep.max_ratio <= rep.bound);
    }
}

TEST_CASE("ergodicity bound holds on random states") {
    const auto wfrom = wp_lap(1.5, 2.0, 0.5);
    const auto wto = wp_lap(0.5, 2.0, 0.5);
    const auto q = build_quadrature(wfrom, 1e-4, 1e4, 120);
    for (double t : {0.5, 1.0, 4.0, 16.0, 64.0}) {
        const auto rep = ergodicity_bound_check(q, wfrom, wto, t, 100);
        CHECK(rep.ok);
        // spec spot value: t = 4, gap = 1: bound = C(1)^{1/2} 4^{-1/2}
        if (t == 4.0)
            CHECK(rep.bound ==
                  doctest::Approx(std::sqrt(std::max(
                                      1.0, special::elementary_bound_constant(1.0))) *
                                  0.5));
    }
}

TEST_CASE("regularisation profile has the predicted log-log slope") {
    const auto wfrom = wp_lap(0.5, 0.0);
    const auto wto = wp_lap(0.5, 1.5);
    const auto q = build_quadrature(wfrom, 1e-6, 1e6, 400);
    std::vector<double> ts, rs;
    for (int i = 0; i <= 12; ++i) {
        const double t = 1e-4 * std::pow(1e3, i / 12.0);
        ts.push_back(t);
        rs.push_back(regularization_profile(q, wfrom, wto, t));
    }
    const auto fit = stats::fit_loglog(ts, rs);
    CHECK(fit.slope == doctest::Approx(-(wto.eta - wfrom.eta) / 2.0).epsilon(0.15));
    CHECK(std::abs(fit.slope + (wto.eta - wfrom.eta) / 2.0) < 0.1);
}

TEST_CASE("g_from_state reproduces the kernel and its growth bound") {
    const auto q = build_quadrature(wp_lap(0.5, 2.0), 1e-4, 1e4, 200);
    const auto k = kernels::KernelSpec::resolvent_fractional(0.7, 0.7, 1.0);
    const auto e = embed_kernel(k, q);
    LiftState dens(q.size(), 1);
    for (std::size_t i = 0; i < q.size(); ++i) dens.at(i, 0) = e.xi[i];

    const double got = g_from_state(dens, q, 1.0)[0];
    CHECK(got == doctest::Approx(special::ml_kernel_value({0.7, 0.7}, 1.0, 1.0)).epsilon(1e-4));

    // zero state, and the bound evaluator dominates the realised value
    LiftState zero(q.size(), 1);
    CHECK(g_from_state(zero, q, 2.0)[0] == 0.0);

    // atom-only state: G(t) is the constant forcing value at every t
    const auto qa = build_quadrature(wp_lap(0.5, 2.0, 2.0), 1e-2, 1e2, 16);
    LiftState atom_only(qa.size(), 1);
    atom_only.atom[0] = 1.25;
    for (double t : {0.1, 1.0, 10.0})
        CHECK(g_from_state(atom_only, qa, t)[0] == doctest::Approx(2.0 * 1.25));
    for (double t : {0.1, 1.0, 5.0})
        CHECK(std::abs(g_from_state(dens, q, t)[0]) <=
              g_growth_bound(dens, q, q.wparams, 2.0, t));
}

TEST_CASE("embedded kernels have no long-run component") {
    const auto q = build_quadrature(wp_lap(0.5, 2.0, 1.0), 1e-4, 1e4, 80);
    const auto e = embed_kernel(kernels::KernelSpec::resolvent_fractional(0.6, 0.6, 2.0), q);
    LiftState dens(q.size(), 1);
    for (std::size_t i = 0; i < q.size(); ++i) dens.at(i, 0) = e.xi[i];
    // S_inf S(t) xi_b = 0: the node part of s_infinity vanishes identically
    const LiftState lim = s_infinity(apply_semigroup(dens, q, 0.8), q);
    double node_mass = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) node_mass += std::abs(lim.at(i, 0));
    CHECK(node_mass == 0.0);
    CHECK(project(lim, q)[0] == 0.0);  // density carries no atom value
}
