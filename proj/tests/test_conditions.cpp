#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <voltlift/conditions.hpp>
#include <voltlift/special.hpp>

using namespace voltlift;
using namespace voltlift::conditions;
using voltlift::resolvent::RhoKind;

namespace {
// frozen extended-precision oracle values for the golden parameter sets
constexpr double kK1Laplace = 3.1485689983919591624;  // a=0.5, th1=1, e0=e1=0.25
constexpr double kK0Laplace = 2.0597146021777489026;  // a=b=0.75, e0=0.1, e1=0.2
constexpr double kK1Shift = 1.91485421551267622;      // b-a=0, e1=0.5
}  // namespace

TEST_CASE("smallness conditions, additive case") {
    SmallnessInputs in;
    in.p_exp = 3.0;
    in.b_lip = 0.5;
    in.b_lin = 0.5;
    in.xi_norm_V = 1.0;
    in.xi_norm_V0 = 1.0;
    in.s_xi_b_l1_V = 1.0;
    const auto r = check_smallness(RhoKind::add, in);
    CHECK(r.lhs_moment == doctest::Approx(0.5));
    CHECK(r.lhs_contraction == doctest::Approx(0.5));
    CHECK(r.pass_moment);
    CHECK(r.margin_contraction == doctest::Approx(0.5));
}

TEST_CASE("smallness conditions vanish with zero coefficients") {
    SmallnessInputs in;
    in.p_exp = 4.0;
    for (auto kind : {RhoKind::gen, RhoKind::b0, RhoKind::add}) {
        const auto r = check_smallness(kind, in);
        CHECK(r.lhs_moment == 0.0);
        CHECK(r.lhs_contraction == 0.0);
        CHECK(r.pass_moment);
        CHECK(r.pass_contraction);
    }
}

TEST_CASE("smallness conditions, general case constants") {
    SmallnessInputs in;
    in.p_exp = 3.0;
    in.b_lip = in.b_lin = 0.2;
    in.sigma_lip = in.sigma_lin = 0.1;
    in.xi_norm_V = in.xi_norm_V0 = 0.7;
    in.s_xi_b_l1_V = 0.4;
    in.s_xi_sigma_l2_V = in.s_xi_sigma_l2_V0 = 0.3;
    const auto r = check_smallness(RhoKind::gen, in);
    // independent long-double arithmetic oracle of the displays
    const long double cp = 167.40731460833782815L;
    const long double mom =
        std::pow(6.0L, 2.0L) * std::pow(0.7L, 3.0L) *
        (std::pow(0.2L, 3.0L) * std::pow(0.4L, 3.0L) + cp * std::pow(0.1L, 3.0L) * std::pow(0.3L, 3.0L));
    const long double con =
        std::pow(3.0L, 2.0L) * std::pow(0.7L, 3.0L) *
        (std::pow(0.2L, 3.0L) * std::pow(0.4L, 3.0L) + cp * std::pow(0.1L, 3.0L) * std::pow(0.3L, 3.0L));
    CHECK(r.lhs_moment == doctest::Approx(static_cast<double>(mom)).epsilon(1e-12));
    CHECK(r.lhs_contraction == doctest::Approx(static_cast<double>(con)).epsilon(1e-12));
}

TEST_CASE("contraction lhs is monotone in every input") {
    SmallnessInputs base;
    base.p_exp = 3.0;
    base.b_lip = 0.2;
    base.sigma_lip = 0.1;
    base.xi_norm_V0 = 0.7;
    base.s_xi_b_l1_V = 0.4;
    base.s_xi_sigma_l2_V = 0.3;
    const double ref = check_smallness(RhoKind::gen, base).lhs_contraction;
    for (auto bump : {&SmallnessInputs::b_lip, &SmallnessInputs::sigma_lip,
                      &SmallnessInputs::xi_norm_V0, &SmallnessInputs::s_xi_b_l1_V,
                      &SmallnessInputs::s_xi_sigma_l2_V}) {
        SmallnessInputs in = base;
        in.*bump *= 1.1;
        CHECK(check_smallness(RhoKind::gen, in).lhs_contraction >= ref);
    }
}

TEST_CASE("laplace-lift constants at the golden parameters") {
    const auto g1 = laplace_constants(0.5, 0.5, 0.25, 0.25, 1.0, 6.0, true);
    CHECK(g1.K1 == doctest::Approx(kK1Laplace).epsilon(1e-12));

    const auto g2 = laplace_constants(0.75, 0.75, 0.1, 0.2, 1.0, 25.0, false);
    CHECK(g2.K0 == doctest::Approx(kK0Laplace).epsilon(1e-12));
    CHECK(g2.in_range);

    // eps0 at the (2 beta - 1)/2 boundary: K0 diverges and is flagged
    const auto bad = laplace_constants(0.75, 0.75, 0.25, 0.2, 1.0, 25.0, false);
    CHECK(std::isinf(bad.K0));
    CHECK_FALSE(bad.in_range);
}

TEST_CASE("trace-class feasibility coupling is reported, not resolved") {
    // eps0 > 2/p with eps0 < (2 beta - 1)/3 can be jointly infeasible
    const auto r = laplace_constants(0.75, 0.75, 0.3, 0.2, 1.0, 3.0, false);
    CHECK_FALSE(r.in_range);
    CHECK(r.range_note.find("eps0") != std::string::npos);
}

TEST_CASE("shift-lift constants") {
    ShiftK0Window quick;       // one refinement step is enough for the
    quick.levels = 2;          // closed-form and scaling assertions below
    const auto k1 = shift_constants(0.8, 0.8, 0.3, 0.5, 0.0, {1.0}, quick);
    CHECK(k1.K1 == doctest::Approx(kK1Shift).epsilon(1e-12));

    const auto base = shift_constants(0.8, 0.8, 0.3, 0.2, 0.0, {1.0}, quick);
    CHECK(base.K0 > 0.0);  // single mode, gamma = 0: mode factor is one

    // quadrature stable to 1e-3 under grid doubling
    ShiftK0Window fine = quick;
    fine.levels = 3;
    const auto b = shift_constants(0.8, 0.8, 0.3, 0.2, 0.0, {1.0}, fine);
    CHECK(std::abs(base.K0 - b.K0) <= 1e-3 * b.K0);

    // the theorem-display weight makes the small-x part cutoff-dominated for
    // beta < 1 + eps0/2: reported in the range note
    CHECK(base.range_note.find("cutoff-dominated") != std::string::npos);

    // mode factor scales as the square root of the mode sum
    const auto two = shift_constants(0.8, 0.8, 0.3, 0.2, 0.0, {1.0, 4.0}, quick);
    const auto ms = mode_sum({1.0, 4.0}, -2.0 * 0.0 + 2.0 * (0.3 - 0.8) / 0.8);
    CHECK(two.K0 == doctest::Approx(base.K0 * std::sqrt(ms.value)).epsilon(1e-9));
}

TEST_CASE("mode sum divergence diagnostics") {
    const auto conv = mode_sum({1.0, 4.0, 9.0, 16.0, 25.0}, -2.0);
    CHECK_FALSE(conv.divergent);
    const auto div = mode_sum({1.0, 4.0, 9.0, 16.0, 25.0}, 1.0);
    CHECK(div.divergent);
}

TEST_CASE("rates per the case table") {
    // additive: lambda = 2, l1 = e^{-3}, gamma = 1
    const auto add = rates(RhoKind::add, 2.0, 1.0, 6.0, std::exp(-3.0));
    CHECK(add.chi == doctest::Approx(2.0));
    CHECK(add.lln_rate == doctest::Approx(1.0));
    CHECK(add.clt_ok);

    // chi gamma = 0.5 caps the LLN rate
    const auto half = rates(RhoKind::add, 1.0, 0.5, 6.0, std::exp(-3.0));
    CHECK(half.chi == doctest::Approx(1.0));
    CHECK(half.lln_rate == doctest::Approx(0.5));

    // general case divides by p and tests the sqrt(p) display
    const auto gen = rates(RhoKind::gen, 2.0, 1.0, 9.0, std::exp(-3.0));
    CHECK(gen.chi == doctest::Approx(2.0 / 9.0));
    CHECK(gen.clt_rate_lhs == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(gen.clt_ok);

    // b = 0 doubles lambda in both the chi table and the CLT display
    const auto b0 = rates(RhoKind::b0, 2.0, 1.0, 9.0, std::exp(-4.0));
    CHECK(b0.chi == doctest::Approx(std::min(4.0, 4.0) / 9.0));
    CHECK(b0.clt_rate_lhs == doctest::Approx(4.0 / 3.0));
    CHECK(b0.clt_ok == (b0.clt_rate_lhs > 1.0 && std::exp(-4.0) < b0.clt_l1_bound));

    // idempotence: recomputation gives identical results
    const auto again = rates(RhoKind::add, 2.0, 1.0, 6.0, std::exp(-3.0));
    CHECK(again.chi == add.chi);
    CHECK(again.lln_rate == add.lln_rate);
    CHECK(again.clt_ok == add.clt_ok);
}

TEST_CASE("specialised theorem rates") {
    // b = 0: theta < min{1, 1/2 + a - b 1_{a != b}}/2; at a = b the indicator
    // drops beta and the min saturates at 1
    CHECK(trace_class_lln_rate(0.75, 0.75, true, 0.0, 0.0, 0.0) == doctest::Approx(0.5));
    CHECK(trace_class_lln_rate(0.75, 0.6, true, 0.0, 0.0, 0.0) ==
          doctest::Approx(0.5 * (0.5 + 0.75 - 0.6)));
    // b != 0 at the golden constants: long-double arithmetic oracle
    const double K0 = kK0Laplace;
    const auto cr = laplace_constants(0.75, 0.75, 0.1, 0.2, 1.0, 25.0, false);
    const double got = trace_class_lln_rate(0.75, 0.75, false, 0.1, K0, cr.K1);
    const long double contraction =
        std::log(1.0L / (0.1L * static_cast<long double>(K0) * static_cast<long double>(cr.K1)));
    const long double expect = 0.5L * std::min({1.0L, 0.75L, contraction});
    CHECK(got == doctest::Approx(static_cast<double>(expect)).epsilon(1e-12));

    CHECK(frac_hjm_lln_rate(4.0, std::exp(-2.0), 0.0, 0.1) ==
          doctest::Approx(0.5 * std::min({1.0, 0.5, 0.1})));
}

TEST_CASE("density-integral bounds dominate the direct integrals") {
    const std::vector<double> thetas = {1.0, 2.0, 3.5, 5.0, 7.0};
    SUBCASE("operator norm, alpha = beta") {
        const auto r = cm_density_opnorm_bound(0.7, 0.7, 0.9, 0.2, thetas);
        CHECK(r.ok);
        CHECK(r.integral > 0.0);
    }
    SUBCASE("operator norm, alpha != beta") {
        const auto r = cm_density_opnorm_bound(0.7, 0.9, -0.4, 0.5, thetas);
        CHECK(r.ok);
    }
    SUBCASE("hilbert-schmidt") {
        const auto r = cm_density_hs_bound(0.7, 0.7, 0.9, 0.2, -0.5, thetas);
        CHECK(r.ok);
        const auto r2 = cm_density_hs_bound(0.75, 0.9, -0.2, 0.4, -1.0, thetas);
        CHECK(r2.ok);
    }
    SUBCASE("outside the finite regime") {
        CHECK_THROWS_AS(cm_density_opnorm_bound(0.7, 0.7, 3.0, 0.2, thetas), std::domain_error);
    }
}

TEST_CASE("condition report serialises every field") {
    ConditionReport rep;
    rep.p_exp = 6.0;
    rep.K0 = 2.0;
    rep.chi = 0.5;
    rep.pass_contraction = true;
    const std::string j = rep.to_json();
    for (const char* key : {"p_exp", "K0", "K1", "chi", "lln_rate", "clt_ok", "margin_moment",
                            "pass_contraction", "lambda", "q_exp"})
        CHECK(j.find(key) != std::string::npos);
}
