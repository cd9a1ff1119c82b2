#include "voltlift/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace voltlift::special {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr long double kPiL = 3.141592653589793238462643383279503L;

bool is_nonpositive_integer(double x, double tol = 1e-12) {
    return x <= 0.5 && std::abs(x - std::round(x)) < tol;
}

// Lanczos, g = 7, 9 terms.  Relative error below 1e-13 on (0, 170).
template <typename Real>
Real lanczos_gamma(Real x) {
    static const Real c[9] = {
        Real(0.99999999999980993L),    Real(676.5203681218851L),
        Real(-1259.1392167224028L),    Real(771.32342877765313L),
        Real(-176.61502916214059L),    Real(12.507343278686905L),
        Real(-0.13857109526572012L),   Real(9.9843695780195716e-6L),
        Real(1.5056327351493116e-7L)};
    if (x < Real(0.5)) {
        // reflection; poles at nonpositive integers surface as +-inf
        return Real(kPiL) / (std::sin(Real(kPiL) * x) * lanczos_gamma(Real(1) - x));
    }
    x -= Real(1);
    Real a = c[0];
    Real t = x + Real(7.5);
    for (int i = 1; i < 9; ++i) a += c[i] / (x + Real(i));
    return std::sqrt(Real(2) * Real(kPiL)) * std::pow(t, x + Real(0.5)) * std::exp(-t) * a;
}

template <typename Real>
Real inv_gamma_impl(Real x) {
    if (is_nonpositive_integer(static_cast<double>(x))) return Real(0);
    if (x > Real(0.5)) {
        if (x > Real(170)) return Real(0);  // underflows anyway
        return Real(1) / lanczos_gamma(x);
    }
    // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi, well-behaved near the poles
    return std::sin(Real(kPiL) * x) * lanczos_gamma(Real(1) - x) / Real(kPiL);
}

// Poincare expansion E_{a,b}(z) ~ -sum_{k>=1} z^{-k} / Gamma(b - a k), z -> -inf,
// truncated at the smallest term.  For alpha > 1 the two conjugate saddle
// contributions are exponentially damped but not negligible near alpha = 1+,
// so they are added explicitly.
long double ml_asymptotic(double alpha, double beta, long double z) {
    long double s = 0.0L;
    long double best = std::numeric_limits<long double>::max();
    long double zk = 1.0L;
    for (int k = 1; k <= 60; ++k) {
        zk /= z;
        const long double ig = inv_gamma_impl<long double>(
            static_cast<long double>(beta) - static_cast<long double>(alpha) * k);
        const long double term = -zk * ig;
        const long double mag = std::abs(term);
        if (mag > best && k > 2) break;  // divergent tail reached
        s += term;
        if (mag > 0) best = mag;
    }
    if (alpha > 1.0) {
        // (2/a) Re[ w^{1-b} e^w ] with w = |z|^{1/a} e^{i pi/a}
        const long double w = std::pow(-z, 1.0L / static_cast<long double>(alpha));
        const long double phi = kPiL / static_cast<long double>(alpha);
        const long double damp = std::exp(w * std::cos(phi));
        const long double arg = w * std::sin(phi) + (1.0L - static_cast<long double>(beta)) * phi;
        s += 2.0L / static_cast<long double>(alpha) *
             std::pow(w, 1.0L - static_cast<long double>(beta)) * damp * std::cos(arg);
    }
    return s;
}

// Real integral representation for z < 0, 0 < alpha < 1, beta < 1 + alpha:
//   E_{a,b}(z) = int_0^inf K(r) dr,
//   K(r) = (1/(pi a)) r^{(1-b)/a} e^{-r^{1/a}}
//          [ r sin(pi(1-b)) - z sin(pi(1-b+a)) ] / (r^2 - 2 r z cos(pi a) + z^2).
// Covers the mid-range where neither the series nor the Poincare expansion
// reaches full precision.  The denominator develops a Lorentzian dip of
// relative width sin(pi a) near r = |z cos(pi a)| as alpha -> 1, so cells
// are refined adaptively (GL-8 vs GL-16 comparison).
struct MLIntegrand {
    long double a, b, z, s1, s2, ca;
    long double operator()(long double r) const {
        const long double num = r * s1 - z * s2;
        const long double den = r * r - 2.0L * r * z * ca + z * z;
        return std::pow(r, (1.0L - b) / a) * std::exp(-std::pow(r, 1.0L / a)) * num /
               (kPiL * a * den);
    }
};

long double ml_gl8(const MLIntegrand& f, long double lo, long double hi) {
    static const long double gx[4] = {0.1834346424956498L, 0.5255324099163290L,
                                      0.7966664774136267L, 0.9602898564975363L};
    static const long double gw[4] = {0.3626837833783620L, 0.3137066458778873L,
                                      0.2223810344533745L, 0.1012285362903763L};
    const long double c = 0.5L * (hi + lo), h = 0.5L * (hi - lo);
    long double acc = 0.0L;
    for (int i = 0; i < 4; ++i) acc += gw[i] * (f(c + h * gx[i]) + f(c - h * gx[i]));
    return acc * h;
}

long double ml_gl16(const MLIntegrand& f, long double lo, long double hi) {
    static const long double gx[8] = {0.0950125098376374L, 0.2816035507792589L,
                                      0.4580167776572274L, 0.6178762444026438L,
                                      0.7554044083550030L, 0.8656312023878318L,
                                      0.9445750230732326L, 0.9894009349916499L};
    static const long double gw[8] = {0.1894506104550685L, 0.1826034150449236L,
                                      0.1691565193950025L, 0.1495959888165767L,
                                      0.1246289712555339L, 0.0951585116824928L,
                                      0.0622535239386479L, 0.0271524594117541L};
    const long double c = 0.5L * (hi + lo), h = 0.5L * (hi - lo);
    long double acc = 0.0L;
    for (int i = 0; i < 8; ++i) acc += gw[i] * (f(c + h * gx[i]) + f(c - h * gx[i]));
    return acc * h;
}

long double ml_adaptive_cell(const MLIntegrand& f, long double lo, long double hi,
                             long double tol_abs, int depth) {
    const long double coarse = ml_gl8(f, lo, hi);
    const long double fine = ml_gl16(f, lo, hi);
    // absolute tolerance against the integral's global scale: the integrand
    // crosses zero, so a relative test would split forever near the crossing
    if (std::abs(fine - coarse) <= tol_abs || depth >= 9) return fine;
    const long double mid = 0.5L * (lo + hi);
    return ml_adaptive_cell(f, lo, mid, tol_abs * 0.6L, depth + 1) +
           ml_adaptive_cell(f, mid, hi, tol_abs * 0.6L, depth + 1);
}

long double ml_negative_integral(double alpha, double beta, long double z) {
    MLIntegrand f;
    f.a = alpha;
    f.b = beta;
    f.z = z;
    f.s1 = std::sin(kPiL * (1.0L - f.b));
    f.s2 = std::sin(kPiL * (1.0L - f.b + f.a));
    f.ca = std::cos(kPiL * f.a);
    const long double r_max =
        std::max({1.0L, 2.0L * std::abs(z), std::pow(38.0L, static_cast<long double>(alpha))});
    // coarse pass fixes the scale for the absolute refinement tolerance
    long double scale = 0.0L;
    {
        long double hi = r_max;
        for (int cell = 0; cell < 70 && hi > r_max * 1e-13L; ++cell) {
            const long double lo = hi * 0.55L;
            scale += std::abs(ml_gl8(f, lo, hi));
            hi = lo;
        }
    }
    const long double tol = 1e-12L * (scale + 1e-30L);
    long double acc = 0.0L;
    long double hi = r_max;
    for (int cell = 0; cell < 70 && hi > r_max * 1e-13L; ++cell) {
        const long double lo = hi * 0.55L;
        acc += ml_adaptive_cell(f, lo, hi, tol, 0);
        hi = lo;
    }
    // remaining head [0, hi): K ~ C r^{(1-b)/a}
    const long double p = (1.0L - f.b) / f.a;
    acc += f(hi) * hi / (p + 1.0L);
    return acc;
}

// E_{a,b} via the integral representation, reducing beta below 1 + alpha
// first with E_{a,b}(z) = (E_{a,b-a}(z) - 1/Gamma(b-a)) / z.
long double ml_integral_with_reduction(double alpha, double beta, long double z) {
    if (beta < 1.0 + alpha) return ml_negative_integral(alpha, beta, z);
    const long double lower = ml_integral_with_reduction(alpha, beta - alpha, z);
    return (lower - inv_gamma_impl<long double>(static_cast<long double>(beta) -
                                                static_cast<long double>(alpha))) /
           z;
}

long double ml_series(double alpha, double beta, long double z) {
    long double s = 0.0L;
    long double zk = 1.0L;
    int small_in_a_row = 0;
    for (int k = 0; k < 600; ++k) {
        const long double term =
            zk * inv_gamma_impl<long double>(
                     static_cast<long double>(alpha) * k + static_cast<long double>(beta));
        s += term;
        zk *= z;
        // past the hump the magnitudes decay monotonically; two consecutive
        // negligible terms are a safe stop even with the alternating signs
        if (std::abs(term) < Tolerances::ml_series_eps * (std::abs(s) + 1.0L)) {
            if (++small_in_a_row >= 2 && k > 8) break;
        } else {
            small_in_a_row = 0;
        }
    }
    return s;
}

}  // namespace

void MLParams::validate() const {
    // alpha = 2 is admitted through its closed forms (cos / sinc)
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("MLParams: alpha must lie in (0,2], got " +
                                    std::to_string(alpha));
    if (!std::isfinite(beta)) throw std::invalid_argument("MLParams: beta not finite");
}

void WeightParams::validate() const {
    if (atom_mass < 0.0) throw std::invalid_argument("WeightParams: atom_mass < 0");
    if (family == WeightFamily::shift && (delta < 0.0 || eta < 0.0))
        throw std::invalid_argument("WeightParams: shift family needs delta, eta >= 0");
}

double gamma_fn(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("gamma_fn: non-finite argument");
    if (is_nonpositive_integer(x))
        throw std::invalid_argument("gamma_fn: pole at x = " + std::to_string(x));
    return static_cast<double>(lanczos_gamma<long double>(x));
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("log_gamma: needs x > 0");
    if (x < 170.0) return std::log(gamma_fn(x));
    // Stirling with the first correction terms; enough for the c_p range
    const double inv = 1.0 / x;
    return (x - 0.5) * std::log(x) - x + 0.91893853320467274178 +
           inv * (1.0 / 12.0 - inv * inv / 360.0);
}

double inv_gamma(double x) { return static_cast<double>(inv_gamma_impl<long double>(x)); }

double ml_crossover(double alpha) {
    // Series cancellation grows like exp(|z|^{1/alpha}).  Below alpha = 1 the
    // integral branch takes over early (the series window shrinks fast); above
    // 1 the switch is pitched so the algebraic expansion has bottomed out
    // (|z|^{1/alpha} ~ 21).  The branch-agreement test asserts the declared
    // match at each switch point.
    if (alpha < 1.0) return std::min(3.0 + 3.0 * alpha, 6.0);
    return std::pow(21.0, alpha);
}

namespace {
// beyond this the Poincare expansion alone is below the branch-match target
// for every alpha < 1 (its smallest term scales like e^{-|z|^{1/alpha}})
constexpr double kMLFarNegative = Tolerances::ml_far_switch;
}  // namespace

double mittag_leffler(const MLParams& p, double z) {
    p.validate();
    if (!std::isfinite(z)) throw std::invalid_argument("mittag_leffler: non-finite z");

    const double a = p.alpha, b = p.beta;
    // closed forms (exact reductions); also the only route that keeps
    // relative accuracy for deep-negative arguments at integer alpha
    if (a == 1.0 && b == 1.0) return std::exp(z);
    if (a == 1.0 && b == 2.0) return z == 0.0 ? 1.0 : std::expm1(z) / z;
    if (a == 2.0 && b == 1.0) return z >= 0.0 ? std::cosh(std::sqrt(z)) : std::cos(std::sqrt(-z));
    if (a == 2.0 && b == 2.0) {
        if (z == 0.0) return 1.0;
        const double r = std::sqrt(std::abs(z));
        return z > 0.0 ? std::sinh(r) / r : std::sin(r) / r;
    }
    if (a == 2.0)
        throw std::invalid_argument("mittag_leffler: alpha = 2 only with beta in {1,2}");

    if (z >= -ml_crossover(a)) return static_cast<double>(ml_series(a, b, z));
    if (a < 1.0 && z >= -kMLFarNegative)
        return static_cast<double>(ml_integral_with_reduction(a, b, z));
    return static_cast<double>(ml_asymptotic(a, b, z));
}

double ml_kernel_value(const MLParams& p, double theta, double t) {
    p.validate();
    if (!(theta > 0.0)) throw std::invalid_argument("ml_kernel_value: theta <= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("ml_kernel_value: t < 0");
    if (t == 0.0) {
        if (p.beta < 1.0) throw std::domain_error("ml_kernel_value: singular at t = 0 for beta < 1");
        return p.beta == 1.0 ? 1.0 : 0.0;
    }
    return std::pow(t, p.beta - 1.0) * mittag_leffler(p, -theta * std::pow(t, p.alpha));
}

double ml_step_integral(const MLParams& p, double theta, double t) {
    p.validate();
    if (!(theta > 0.0)) throw std::invalid_argument("ml_step_integral: theta <= 0");
    if (!(t >= 0.0)) throw std::invalid_argument("ml_step_integral: t < 0");
    if (t == 0.0) return 0.0;
    MLParams q{p.alpha, p.beta + 1.0};
    return std::pow(t, p.beta) * mittag_leffler(q, -theta * std::pow(t, p.alpha));
}

double bdg_constant(double p_exp) {
    if (!(p_exp >= 2.0)) throw std::invalid_argument("bdg_constant: needs p >= 2");
    if (p_exp == 2.0) return 1.0;
    const long double p = p_exp;
    return static_cast<double>(std::pow(p * (p - 1) / 2, p) * std::pow(p / (p - 1), p * p / 2));
}

double elementary_bound_constant(double rho_exp) {
    if (!(rho_exp > 0.0)) throw std::invalid_argument("elementary_bound_constant: needs rho > 0");
    return std::exp(rho_exp * (std::log(rho_exp) - std::log(2.0) - 1.0));
}

double weight_value(const WeightParams& w, double x) {
    if (!(x >= 0.0)) throw std::invalid_argument("weight_value: x < 0");
    if (w.family == WeightFamily::laplace) {
        if (x == 0.0) return 1.0;
        return x <= 1.0 ? std::pow(x, -w.delta) : std::pow(x, w.eta);
    }
    if (x == 0.0) throw std::invalid_argument("weight_value: shift family undefined at x = 0");
    return x <= 1.0 ? std::pow(x, w.eta) : std::pow(x, w.delta);
}

}  // namespace voltlift::special
