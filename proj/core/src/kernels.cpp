#include "voltlift/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace voltlift::kernels {

using special::MLParams;

namespace {
constexpr double kPi = 3.14159265358979323846;

const KernelSpec& inner_of(const KernelSpec& k) {
    if (!k.inner) throw std::invalid_argument("KernelSpec: wrapper kind without inner kernel");
    return *k.inner;
}
}  // namespace

KernelSpec KernelSpec::fractional_rl(double alpha) {
    KernelSpec k;
    k.kind = KernelKind::fractional_rl;
    k.alpha = alpha;
    return k;
}

KernelSpec KernelSpec::log_kernel() {
    KernelSpec k;
    k.kind = KernelKind::log_kernel;
    return k;
}

KernelSpec KernelSpec::resolvent_fractional(double alpha, double beta, double theta) {
    KernelSpec k;
    k.kind = KernelKind::resolvent_fractional;
    k.alpha = alpha;
    k.beta = beta;
    k.theta = theta;
    return k;
}

KernelSpec KernelSpec::damped(KernelSpec inner, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("damped: lambda must be positive");
    KernelSpec k;
    k.kind = KernelKind::damped;
    k.lambda = lambda;
    k.inner = std::make_shared<const KernelSpec>(std::move(inner));
    return k;
}

KernelSpec KernelSpec::time_shifted(KernelSpec inner, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("time_shifted: epsilon must be positive");
    KernelSpec k;
    k.kind = KernelKind::time_shifted;
    k.epsilon = epsilon;
    k.inner = std::make_shared<const KernelSpec>(std::move(inner));
    return k;
}

void KernelSpec::validate(bool strict) const {
    switch (kind) {
        case KernelKind::fractional_rl:
            if (!(alpha > 0.0 && alpha < 1.0))
                throw std::invalid_argument("fractional_rl: alpha must lie in (0,1), got " +
                                            std::to_string(alpha));
            return;
        case KernelKind::log_kernel:
            return;
        case KernelKind::resolvent_fractional: {
            if (!(theta > 0.0)) throw std::invalid_argument("resolvent_fractional: theta <= 0");
            if (strict) {
                if (!(alpha > 0.0 && alpha < 1.0) || !(beta > 0.0 && beta < alpha + 1.0))
                    throw std::invalid_argument(
                        "resolvent_fractional: density representation needs alpha in (0,1), "
                        "beta in (0, alpha+1)");
            } else {
                if (!(alpha > 0.0 && alpha < 2.0))
                    throw std::invalid_argument("resolvent_fractional: alpha must lie in (0,2)");
                const double d = beta - alpha;
                if (d < 0.0 && std::abs(d - std::round(d)) < 1e-12)
                    throw std::invalid_argument(
                        "resolvent_fractional: beta - alpha must not be a negative integer");
            }
            return;
        }
        case KernelKind::damped:
            if (!(lambda > 0.0)) throw std::invalid_argument("damped: lambda <= 0");
            inner_of(*this).validate(strict);
            return;
        case KernelKind::time_shifted:
            if (!(epsilon > 0.0)) throw std::invalid_argument("time_shifted: epsilon <= 0");
            inner_of(*this).validate(strict);
            return;
    }
    throw std::logic_error("KernelSpec: unknown kind");
}

double kernel_value(const KernelSpec& k, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_value: needs t > 0");
    switch (k.kind) {
        case KernelKind::fractional_rl:
            return std::pow(t, k.alpha - 1.0) / special::gamma_fn(k.alpha);
        case KernelKind::log_kernel:
            return std::log1p(1.0 / t);
        case KernelKind::resolvent_fractional:
            return special::ml_kernel_value(MLParams{k.alpha, k.beta}, k.theta, t);
        case KernelKind::damped:
            return std::exp(-k.lambda * t) * kernel_value(inner_of(k), t);
        case KernelKind::time_shifted:
            return kernel_value(inner_of(k), t + k.epsilon);
    }
    throw std::logic_error("kernel_value: unknown kind");
}

double support_offset(const KernelSpec& k) {
    double off = 0.0;
    const KernelSpec* cur = &k;
    while (cur->kind == KernelKind::damped || cur->kind == KernelKind::time_shifted) {
        if (cur->kind == KernelKind::damped) off += cur->lambda;
        cur = &inner_of(*cur);
    }
    return off;
}

double bernstein_density(const KernelSpec& k, double x) {
    if (!(x > 0.0)) throw std::invalid_argument("bernstein_density: needs x > 0");
    switch (k.kind) {
        case KernelKind::fractional_rl: {
            const double a = k.alpha;
            return std::pow(x, -a) / (special::gamma_fn(a) * special::gamma_fn(1.0 - a));
        }
        case KernelKind::log_kernel:
            return x < 1e-4 ? 1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0
                            : -std::expm1(-x) / x;
        case KernelKind::resolvent_fractional: {
            k.validate(true);
            const double a = k.alpha, b = k.beta, th = k.theta;
            const double xa = std::pow(x, a);
            const double num = std::pow(x, 2.0 * a - b) * std::sin(b * kPi) -
                               th * std::pow(x, a - b) * std::sin((a - b) * kPi);
            const double den = th * th + 2.0 * th * std::cos(kPi * a) * xa + xa * xa;
            return num / (kPi * den);
        }
        case KernelKind::damped:
            // xi^lambda(x) = 1_{x > lambda} xi(x - lambda); in offset coordinates
            // the wrapper disappears
            return bernstein_density(inner_of(k), x);
        case KernelKind::time_shifted:
            return std::exp(-k.epsilon * (x + support_offset(k))) *
                   bernstein_density(inner_of(k), x);
    }
    throw std::logic_error("bernstein_density: unknown kind");
}

double bernstein_density_abs(const KernelSpec& k, double x_absolute) {
    const double off = support_offset(k);
    if (x_absolute <= off) return 0.0;
    return bernstein_density(k, x_absolute - off);
}

std::vector<PowerTerm> density_small_x_expansion(const KernelSpec& k) {
    switch (k.kind) {
        case KernelKind::fractional_rl: {
            const double a = k.alpha;
            return {{1.0 / (special::gamma_fn(a) * special::gamma_fn(1.0 - a)), -a}};
        }
        case KernelKind::log_kernel:
            return {{1.0, 0.0}, {-0.5, 1.0}, {1.0 / 6.0, 2.0}};
        case KernelKind::resolvent_fractional: {
            // expand num/den around x = 0: den ~ theta^2 (1 + 2 cos(pi a) x^a / theta)
            const double a = k.alpha, b = k.beta, th = k.theta;
            const double c1 = -std::sin((a - b) * kPi) / (kPi * th);  // x^{a-b}
            const double c2 = std::sin(b * kPi) / (kPi * th * th);    // x^{2a-b}
            const double c3 = 2.0 * std::cos(kPi * a) / th;           // den correction
            std::vector<PowerTerm> out;
            if (c1 != 0.0) {
                out.push_back({c1, a - b});
                out.push_back({-c1 * c3, 2.0 * a - b});
            }
            out.push_back({c2, 2.0 * a - b});
            return out;
        }
        case KernelKind::damped:
            return density_small_x_expansion(inner_of(k));
        case KernelKind::time_shifted: {
            // e^{-eps(x+off)} ~ e^{-eps off}(1 - eps x): fold the constant, keep order 1
            const double damp = std::exp(-k.epsilon * support_offset(k));
            auto base = density_small_x_expansion(inner_of(k));
            std::vector<PowerTerm> out;
            for (const auto& t : base) {
                out.push_back({damp * t.coef, t.power});
                out.push_back({-damp * k.epsilon * t.coef, t.power + 1.0});
            }
            return out;
        }
    }
    throw std::logic_error("density_small_x_expansion: unknown kind");
}

double shift_derivative_density(const KernelSpec& k, double x) {
    if (k.kind != KernelKind::resolvent_fractional)
        throw std::invalid_argument("shift_derivative_density: resolvent_fractional only");
    if (!(x > 0.0)) throw std::invalid_argument("shift_derivative_density: needs x > 0");
    k.validate(false);
    MLParams p{k.alpha, k.beta - 1.0};
    return std::pow(x, k.beta - 2.0) *
           special::mittag_leffler(p, -k.theta * std::pow(x, k.alpha));
}

void SpectralOperator::validate() const {
    if (thetas.empty()) throw std::invalid_argument("SpectralOperator: no modes");
    if (noise_eigs.size() != thetas.size())
        throw std::invalid_argument("SpectralOperator: noise_eigs size mismatch");
    double prev = 0.0;
    for (double th : thetas) {
        if (!(th > prev)) throw std::invalid_argument("SpectralOperator: thetas must increase, > 0");
        prev = th;
    }
    for (double l : noise_eigs)
        if (!(l >= 0.0)) throw std::invalid_argument("SpectralOperator: negative noise eigenvalue");
}

SpectralOperator weyl_eigenvalues(int dim, double c, int n_modes, double gamma_exp) {
    if (dim < 1 || n_modes < 1 || !(c > 0.0))
        throw std::invalid_argument("weyl_eigenvalues: needs dim >= 1, N >= 1, c > 0");
    SpectralOperator s;
    s.gamma_exp = gamma_exp;
    s.thetas.reserve(n_modes);
    s.noise_eigs.reserve(n_modes);
    for (int n = 1; n <= n_modes; ++n) {
        const double th = c * std::pow(static_cast<double>(n), 2.0 / dim);
        s.thetas.push_back(th);
        s.noise_eigs.push_back(std::pow(th, -gamma_exp));
    }
    s.validate();
    return s;
}

}  // namespace voltlift::kernels
