#include "voltlift/resolvent.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "voltlift/special.hpp"

namespace voltlift::resolvent {

SampledKernel::SampledKernel(double step, std::vector<double> values)
    : dt(step), samples(std::move(values)) {
    validate();
}

SampledKernel SampledKernel::from_function(const std::function<double(double)>& f, double dt,
                                           std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = f((static_cast<double>(k) + 0.5) * dt);
    return SampledKernel(dt, std::move(v));
}

void SampledKernel::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SampledKernel: dt <= 0");
    for (double s : samples)
        if (!(s >= 0.0) || !std::isfinite(s))
            throw std::invalid_argument("SampledKernel: samples must be finite and >= 0");
}

double SampledKernel::l1() const {
    return dt * std::accumulate(samples.begin(), samples.end(), 0.0);
}

double SampledKernel::horizon() const { return dt * static_cast<double>(samples.size()); }

double SampledKernel::tail_integral(double T) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k)
        if ((static_cast<double>(k) + 0.5) * dt >= T) acc += samples[k];
    return dt * acc;
}

double default_horizon(double l1) {
    if (!(l1 < 1.0)) throw std::invalid_argument("default_horizon: needs ||rho||_1 < 1");
    return 50.0 / (1.0 - l1);
}

SampledKernel solve_resolvent(const SampledKernel& rho) {
    rho.validate();
    if (!(rho.l1() < 1.0))
        throw std::domain_error("solve_resolvent: Paley-Wiener condition ||rho||_1 < 1 violated");
    const std::size_t n = rho.samples.size();
    // forward midpoint solve; rho(t_k - s_j) falls on a grid edge, taken as
    // the mean of the two adjacent midpoint samples.  The half cell
    // [k dt, t_k] of the convolution carries (dt/2) rho(0+) r(t_k) and is
    // treated implicitly; dropping it leaks mass at rate dt rho(0)/2 per unit
    // time, which the Volterra iteration amplifies by 1/(1-l1)^2.
    std::vector<double> r(n, 0.0);
    const double half_cell = rho.samples.empty() ? 0.0 : 0.5 * rho.dt * rho.samples[0];
    const double implicit = half_cell < 0.5 ? 1.0 / (1.0 - half_cell) : 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        double conv = 0.0;
        for (std::size_t j = 0; j < k; ++j)
            conv += 0.5 * (rho.samples[k - 1 - j] + rho.samples[k - j]) * r[j];
        r[k] = (rho.samples[k] + rho.dt * conv) * implicit;
    }
    return SampledKernel(rho.dt, std::move(r));
}

double rate_function(const SampledKernel& r, double lambda, double p_exp, double t) {
    r.validate();
    if (!(t >= 0.0)) throw std::invalid_argument("rate_function: t < 0");
    if (t > r.horizon() + 0.5 * r.dt)
        throw std::invalid_argument("rate_function: t beyond the sampled horizon");
    const double lp = lambda * p_exp;
    double out = std::pow(std::max(1.0, t), -lp);
    const auto k_t = static_cast<std::size_t>(t / r.dt);
    for (std::size_t j = 0; j < k_t && j < r.samples.size(); ++j) {
        const double s = (static_cast<double>(j) + 0.5) * r.dt;
        const std::size_t lag = k_t - 1 - j;
        if (lag >= r.samples.size()) continue;
        out += r.dt * r.samples[lag] * std::pow(std::max(1.0, s), -lp);
    }
    return out;
}

SampledKernel build_rho(RhoKind kind, const RhoInputs& in) {
    const double p = in.p_exp;
    if (!(p >= 2.0)) throw std::invalid_argument("build_rho: needs p >= 2");
    switch (kind) {
        case RhoKind::add: {
            in.s_xi_b.validate();
            const double c = in.b_lip * in.xi_norm;
            std::vector<double> v(in.s_xi_b.samples);
            for (double& x : v) x *= c;
            return SampledKernel(in.s_xi_b.dt, std::move(v));
        }
        case RhoKind::b0: {
            in.s_xi_sigma.validate();
            const double cp = special::bdg_constant(p);
            const double l2 = std::sqrt(
                in.s_xi_sigma.dt *
                std::inner_product(in.s_xi_sigma.samples.begin(), in.s_xi_sigma.samples.end(),
                                   in.s_xi_sigma.samples.begin(), 0.0));
            const double c = std::pow(2.0, p - 1.0) * std::pow(in.xi_norm, p) * cp *
                             std::pow(in.sigma_lip, p) * std::pow(l2, p - 2.0);
            std::vector<double> v(in.s_xi_sigma.samples);
            for (double& x : v) x = c * x * x;
            return SampledKernel(in.s_xi_sigma.dt, std::move(v));
        }
        case RhoKind::gen: {
            in.s_xi_b.validate();
            in.s_xi_sigma.validate();
            if (in.s_xi_b.dt != in.s_xi_sigma.dt ||
                in.s_xi_b.samples.size() != in.s_xi_sigma.samples.size())
                throw std::invalid_argument("build_rho: gen kind needs matching sample grids");
            const double cp = special::bdg_constant(p);
            const double l1b = in.s_xi_b.l1();
            const double l2s = std::sqrt(
                in.s_xi_sigma.dt *
                std::inner_product(in.s_xi_sigma.samples.begin(), in.s_xi_sigma.samples.end(),
                                   in.s_xi_sigma.samples.begin(), 0.0));
            const double pref = std::pow(3.0, p - 1.0) * std::pow(in.xi_norm, p);
            const double cb = pref * std::pow(in.b_lip, p) * std::pow(l1b, p - 1.0);
            const double cs = pref * cp * std::pow(in.sigma_lip, p) * std::pow(l2s, p - 2.0);
            std::vector<double> v(in.s_xi_b.samples.size());
            for (std::size_t k = 0; k < v.size(); ++k)
                v[k] = cb * in.s_xi_b.samples[k] +
                       cs * in.s_xi_sigma.samples[k] * in.s_xi_sigma.samples[k];
            return SampledKernel(in.s_xi_b.dt, std::move(v));
        }
    }
    throw std::logic_error("build_rho: unknown kind");
}

namespace {
double conv_tail(const SampledKernel& f, const SampledKernel& g, double T) {
    // int_T^inf (f*g) on the common grid, discrete convolution
    const std::size_t n = f.samples.size();
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = (static_cast<double>(k) + 0.5) * f.dt;
        if (t < T) continue;
        double c = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            const std::size_t lag = k - j;
            if (lag < g.samples.size()) c += f.samples[j] * g.samples[lag];
        }
        acc += c * f.dt;
    }
    return acc * f.dt;
}
}  // namespace

TailCheckReport tail_convolution_check(const SampledKernel& f, const SampledKernel& g, double T,
                                       double lam) {
    f.validate();
    g.validate();
    if (!(lam > 0.0 && lam < 1.0)) throw std::invalid_argument("tail_convolution_check: lambda in (0,1)");
    if (f.dt != g.dt) throw std::invalid_argument("tail_convolution_check: grids must match");
    if (!(T > 0.0) || T > f.horizon())
        throw std::invalid_argument("tail_convolution_check: T outside the sampled horizon");
    TailCheckReport rep;
    rep.lhs = conv_tail(f, g, T);
    rep.rhs = 2.0 * f.l1() * g.tail_integral(lam * T) + g.l1() * f.tail_integral((1.0 - lam) * T);
    rep.slack = 5.0 * f.dt * (f.l1() + g.l1());
    rep.ok = rep.lhs <= rep.rhs + rep.slack;
    return rep;
}

TailCheckReport resolvent_tail_check(const SampledKernel& rho, double T, double kappa) {
    rho.validate();
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("resolvent_tail_check: kappa in (0,1)");
    const double l1rho = rho.l1();
    if (!(l1rho < 1.0)) throw std::domain_error("resolvent_tail_check: needs ||rho||_1 < 1");
    const SampledKernel r = solve_resolvent(rho);
    const double l1r = r.l1();
    TailCheckReport rep;
    rep.lhs = r.tail_integral(T);
    const double cutoff = kappa * std::pow(T, 1.0 + std::log(1.0 - kappa));
    const double power_term = l1rho > 0.0 ? l1r * std::pow(T, std::log(l1rho)) : 0.0;
    rep.rhs = power_term + (1.0 + 2.0 * l1r) / (1.0 - l1rho) * rho.tail_integral(cutoff);
    rep.slack = 5.0 * rho.dt * (l1rho + l1r);
    rep.ok = rep.lhs <= rep.rhs + rep.slack;
    return rep;
}

double rate_decay_slope(const SampledKernel& r, const SampledKernel& rho, double lambda,
                        double p_exp, double t_lo, double t_hi) {
    if (!(t_lo > 0.0 && t_hi > t_lo)) throw std::invalid_argument("rate_decay_slope: bad window");
    (void)rho;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = 0; i < 25; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, i / 24.0);
        const double v = rate_function(r, lambda, p_exp, t);
        if (!(v > 0.0)) continue;
        const double lx = std::log(t), ly = std::log(v);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 3) throw std::runtime_error("rate_decay_slope: not enough positive samples");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace voltlift::resolvent
