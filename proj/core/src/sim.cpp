#include "voltlift/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace voltlift::sim {

using kernels::KernelKind;
using kernels::KernelSpec;

namespace {

// 16-point Gauss-Legendre on [-1,1]
constexpr int kGL = 16;
constexpr double kGLx[kGL] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGLw[kGL] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

template <typename F>
double gl_segment(const F& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < kGL; ++i) acc += kGLw[i] * f(c + h * kGLx[i]);
    return acc * h;
}

// integral over [0, t1] with geometric grading towards the (integrable)
// singularity at 0
template <typename F>
double graded_integral(const F& f, double t1, int cells = 48) {
    double acc = 0.0;
    double hi = t1;
    for (int i = 0; i < cells; ++i) {
        const double lo = (i + 1 == cells) ? 0.0 : hi * 0.65;
        if (lo >= hi) break;
        acc += gl_segment(f, std::max(lo, 1e-300), hi);
        hi = lo;
        if (hi <= 0.0) break;
    }
    return acc;
}

bool exact_step_integral_available(const KernelSpec& k) {
    return k.kind == KernelKind::resolvent_fractional;
}

// int_{t0}^{t1} E(s) ds
double kernel_step_l1(const KernelSpec& k, double t0, double t1) {
    if (exact_step_integral_available(k)) {
        const special::MLParams p{k.alpha, k.beta};
        return special::ml_step_integral(p, k.theta, t1) -
               (t0 > 0.0 ? special::ml_step_integral(p, k.theta, t0) : 0.0);
    }
    const auto f = [&](double s) { return kernels::kernel_value(k, s); };
    return t0 == 0.0 ? graded_integral(f, t1) : gl_segment(f, t0, t1);
}

// int_{t0}^{t1} E(s)^2 ds
double kernel_step_l2sq(const KernelSpec& k, double t0, double t1) {
    const auto f = [&](double s) {
        const double v = kernels::kernel_value(k, s);
        return v * v;
    };
    return t0 == 0.0 ? graded_integral(f, t1) : gl_segment(f, t0, t1);
}

}  // namespace

kernels::KernelSpec with_theta(const KernelSpec& k, double theta) {
    KernelSpec out = k;
    if (k.kind == KernelKind::damped || k.kind == KernelKind::time_shifted) {
        out.inner = std::make_shared<const KernelSpec>(with_theta(*k.inner, theta));
    } else {
        out.theta = theta;
    }
    return out;
}

double DriftSpec::lipschitz(std::size_t n) const {
    switch (kind) {
        case DriftKind::zero: return 0.0;
        case DriftKind::tanh_scaled: {
            double m = 0.0;
            for (double v : c) m = std::max(m, std::abs(v));
            return m;
        }
        case DriftKind::affine: {
            // spectral norm by power iteration on B^T B
            if (B.size() != n * n) throw std::invalid_argument("DriftSpec: B size mismatch");
            std::vector<double> v(n, 1.0), tmp(n);
            double norm = 0.0;
            for (int it = 0; it < 200; ++it) {
                for (std::size_t i = 0; i < n; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) s += B[i * n + j] * v[j];
                    tmp[i] = s;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < n; ++i) s += B[i * n + j] * tmp[i];
                    v[j] = s;
                }
                double nv = 0.0;
                for (double x : v) nv += x * x;
                nv = std::sqrt(nv);
                if (nv == 0.0) return 0.0;
                for (double& x : v) x /= nv;
                norm = std::sqrt(nv);
            }
            return norm;
        }
    }
    return 0.0;
}

double DriftSpec::linear_growth(std::size_t n) const {
    switch (kind) {
        case DriftKind::zero: return 0.0;
        case DriftKind::tanh_scaled: {
            double m2 = 0.0, mi = 0.0;
            for (double v : c) { m2 += v * v; mi = std::max(mi, std::abs(v)); }
            return std::min(std::sqrt(m2), mi);
        }
        case DriftKind::affine: {
            double b0n = 0.0;
            for (double v : b0) b0n += v * v;
            return std::max(lipschitz(n), std::sqrt(b0n));
        }
    }
    return 0.0;
}

void DriftSpec::apply(const std::vector<double>& u, std::vector<double>& out) const {
    const std::size_t n = u.size();
    out.assign(n, 0.0);
    switch (kind) {
        case DriftKind::zero: return;
        case DriftKind::tanh_scaled:
            for (std::size_t i = 0; i < n; ++i) out[i] = c[i] * std::tanh(u[i]);
            return;
        case DriftKind::affine:
            for (std::size_t i = 0; i < n; ++i) {
                double s = b0.empty() ? 0.0 : b0[i];
                for (std::size_t j = 0; j < n; ++j) s += B[i * n + j] * u[j];
                out[i] = s;
            }
            return;
    }
}

double DiffusionSpec::lipschitz_hs() const {
    if (kind == DiffusionKind::additive) return 0.0;
    double m = 0.0;
    for (double v : s1) m = std::max(m, std::abs(v));
    return m;
}

double DiffusionSpec::lipschitz_tr() const {
    if (kind == DiffusionKind::additive) return 0.0;
    double s = 0.0;
    for (double v : s1) s += v * v;
    return std::sqrt(s);
}

double DiffusionSpec::linear_growth() const {
    double s0n = 0.0;
    for (double v : s0) s0n += v * v;
    return std::max(lipschitz_hs(), std::sqrt(s0n));
}

void DiffusionSpec::apply(const std::vector<double>& u, std::vector<double>& out) const {
    out = s0;
    if (kind == DiffusionKind::affine)
        for (std::size_t i = 0; i < u.size(); ++i) out[i] += s1[i] * u[i];
}

void ModelSpec::validate() const {
    spectral.validate();
    kernel_b.validate(false);
    kernel_sigma.validate(false);
    const std::size_t n = modes();
    if (diffusion.s0.size() != n) throw std::invalid_argument("ModelSpec: diffusion s0 size");
    if (diffusion.kind == DiffusionKind::affine && diffusion.s1.size() != n)
        throw std::invalid_argument("ModelSpec: diffusion s1 size");
    if (drift.kind == DriftKind::affine &&
        (drift.B.size() != n * n || (!drift.b0.empty() && drift.b0.size() != n)))
        throw std::invalid_argument("ModelSpec: affine drift sizes");
    if (drift.kind == DriftKind::tanh_scaled && drift.c.size() != n)
        throw std::invalid_argument("ModelSpec: tanh drift size");
    if (forcing.kind == ForcingKind::constant && forcing.value.size() != n)
        throw std::invalid_argument("ModelSpec: forcing value size");
}

std::size_t SimConfig::steps() const { return static_cast<std::size_t>(std::llround(T / dt)); }

void SimConfig::validate() const {
    if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("SimConfig: dt, T must be > 0");
    if (std::abs(T / dt - std::round(T / dt)) > 1e-9)
        throw std::invalid_argument("SimConfig: T/dt must be an integer");
    if (paths < 1) throw std::invalid_argument("SimConfig: paths < 1");
    if (burn_in < 0.0) throw std::invalid_argument("SimConfig: burn_in < 0");
}

// ---------------------------------------------------------------------------
// direct scheme

DirectSimulator::DirectSimulator(const ModelSpec& m, const SimConfig& c) : model_(m), cfg_(c) {
    m.validate();
    c.validate();
    if (m.forcing.kind == ForcingKind::lift_state)
        throw std::invalid_argument("DirectSimulator: lift_state forcing not supported");
    const std::size_t n = m.modes();
    const std::size_t steps = c.steps();
    wb_.resize(n);
    ws_.resize(n);
    const bool need_drift = !m.drift.is_zero();
    for (std::size_t mode = 0; mode < n; ++mode) {
        const KernelSpec kb = with_theta(m.kernel_b, m.spectral.thetas[mode]);
        const KernelSpec ks = with_theta(m.kernel_sigma, m.spectral.thetas[mode]);
        wb_[mode].assign(steps + 1, 0.0);
        ws_[mode].assign(steps + 1, 0.0);
        for (std::size_t k = 1; k <= steps; ++k) {
            const double t0 = (k - 1) * c.dt, t1 = k * c.dt;
            if (need_drift) wb_[mode][k] = kernel_step_l1(kb, t0, t1);
            ws_[mode][k] = std::sqrt(kernel_step_l2sq(ks, t0, t1) / c.dt);
        }
    }
    forcing_g_.assign(steps + 1, 0.0);
}

const std::vector<double>& DirectSimulator::drift_weights(std::size_t mode) const {
    return wb_[mode];
}
const std::vector<double>& DirectSimulator::noise_weights(std::size_t mode) const {
    return ws_[mode];
}

void DirectSimulator::run_path(std::uint64_t path_index, const PathObserver& obs) const {
    const std::size_t n = model_.modes();
    const std::size_t steps = cfg_.steps();
    rng::GaussianStream stream(cfg_.seed, path_index);

    // mode-major histories and reversed weight tables keep the O(steps^2)
    // convolution a contiguous dot product
    std::vector<std::vector<double>> bhist(n), shist(n), wbr(n), wsr(n);
    for (std::size_t m = 0; m < n; ++m) {
        bhist[m].assign(steps, 0.0);
        shist[m].assign(steps, 0.0);
        wbr[m].assign(steps, 0.0);
        wsr[m].assign(steps, 0.0);
    }
    std::vector<double> u(n, 0.0), bu(n), su(n);
    const bool need_drift = !model_.drift.is_zero();

    // u_0 = G(0) for constant forcing, 0 otherwise
    if (model_.forcing.kind == ForcingKind::constant) u = model_.forcing.value;

    for (std::size_t k = 0; k < steps; ++k) {
        // record coefficients at t_k; the reversed tables grow leftwards so
        // that weight lag (k+1-j) aligns with history index j
        for (std::size_t m = 0; m < n; ++m) {
            if (need_drift) wbr[m][steps - 1 - k] = wb_[m][k + 1];
            wsr[m][steps - 1 - k] = ws_[m][k + 1];
        }
        if (need_drift) {
            model_.drift.apply(u, bu);
            for (std::size_t m = 0; m < n; ++m) bhist[m][k] = bu[m];
        }
        model_.diffusion.apply(u, su);
        for (std::size_t m = 0; m < n; ++m) {
            const double dw = stream.normal(k, m) *
                              std::sqrt(cfg_.dt * model_.spectral.noise_eigs[m]);
            shist[m][k] = su[m] * dw;
        }

        // u_{k+1} = G + sum_{j<=k} w(k+1-j) x hist_j
        for (std::size_t m = 0; m < n; ++m) {
            double acc = model_.forcing.kind == ForcingKind::constant ? model_.forcing.value[m]
                                                                      : 0.0;
            const double* base_w = &wsr[m][steps - 1 - k];
            const double* base_h = shist[m].data();
            if (need_drift) {
                const double* bw = &wbr[m][steps - 1 - k];
                const double* bh = bhist[m].data();
                double d = 0.0;
                for (std::size_t j = 0; j <= k; ++j) d += bw[j] * bh[j];
                acc += d;
            }
            double sacc = 0.0;
            for (std::size_t j = 0; j <= k; ++j) sacc += base_w[j] * base_h[j];
            acc += sacc;
            u[m] = acc;
        }
        obs(k + 1, u);
    }
}

// ---------------------------------------------------------------------------
// Laplace lift

LaplaceLiftSimulator::LaplaceLiftSimulator(const ModelSpec& m,
                                           const laplace_lift::QuadratureRule& q,
                                           const SimConfig& c)
    : model_(m), rule_(q), cfg_(c) {
    m.validate();
    c.validate();
    q.validate();
    const std::size_t n = m.modes();
    const std::size_t K = q.size();
    has_drift_kernel_ = !m.drift.is_zero();

    const double off_b = kernels::support_offset(m.kernel_b);
    const double off_s = kernels::support_offset(m.kernel_sigma);
    if (has_drift_kernel_ && off_b != off_s)
        throw std::invalid_argument(
            "LaplaceLiftSimulator: kernel_b and kernel_sigma must share the support offset");
    const double off = off_s;

    x_.resize(K);
    w_ = q.weights;
    decay_.resize(K);
    phi1_.resize(K);
    gnoise_.resize(K);
    for (std::size_t i = 0; i < K; ++i) {
        x_[i] = q.nodes[i] + off;
        const double xdt = x_[i] * cfg_.dt;
        decay_[i] = std::exp(-xdt);
        phi1_[i] = xdt < 1e-12 ? cfg_.dt : (1.0 - decay_[i]) / x_[i];
        gnoise_[i] = xdt < 1e-8 ? 1.0 : std::sqrt((1.0 - std::exp(-2.0 * xdt)) / (2.0 * xdt));
    }

    xi_b_.assign(K * n, 0.0);
    xi_s_.assign(K * n, 0.0);
    for (std::size_t mode = 0; mode < n; ++mode) {
        const KernelSpec ks = with_theta(m.kernel_sigma, m.spectral.thetas[mode]);
        const auto es = laplace_lift::embed_kernel(ks, q);
        for (std::size_t i = 0; i < K; ++i) xi_s_[i * n + mode] = es.xi[i];
        if (has_drift_kernel_) {
            const KernelSpec kb = with_theta(m.kernel_b, m.spectral.thetas[mode]);
            const auto eb = laplace_lift::embed_kernel(kb, q);
            for (std::size_t i = 0; i < K; ++i) xi_b_[i * n + mode] = eb.xi[i];
        }
    }

    atom_.assign(n, 0.0);
    if (m.forcing.kind == ForcingKind::constant) {
        if (!(q.atom_mass > 0.0))
            throw std::invalid_argument(
                "LaplaceLiftSimulator: constant forcing needs a rule with atom_mass > 0");
        for (std::size_t mode = 0; mode < n; ++mode)
            atom_[mode] = m.forcing.value[mode] / q.atom_mass;
    }
}

laplace_lift::LiftState LaplaceLiftSimulator::run_path_state(std::uint64_t path_index,
                                                             const PathObserver& obs) const {
    const std::size_t n = model_.modes();
    const std::size_t K = rule_.size();
    const std::size_t steps = cfg_.steps();
    rng::GaussianStream stream(cfg_.seed, path_index);

    laplace_lift::LiftState X(K, n);
    X.atom = atom_;
    if (model_.forcing.kind == ForcingKind::lift_state) {
        if (model_.forcing.lift_state.n_nodes() != K ||
            model_.forcing.lift_state.n_modes != n)
            throw std::invalid_argument("LaplaceLiftSimulator: forcing state shape mismatch");
        X = model_.forcing.lift_state;
    }

    std::vector<double> u(n, 0.0), bu(n), su(n), dw(n);
    const auto project_u = [&]() {
        for (std::size_t m = 0; m < n; ++m) u[m] = rule_.atom_mass * X.atom[m];
        for (std::size_t i = 0; i < K; ++i) {
            const double wi = w_[i];
            for (std::size_t m = 0; m < n; ++m) u[m] += wi * X.at(i, m);
        }
    };

    project_u();
    for (std::size_t k = 0; k < steps; ++k) {
        if (has_drift_kernel_) model_.drift.apply(u, bu);
        model_.diffusion.apply(u, su);
        for (std::size_t m = 0; m < n; ++m)
            dw[m] = stream.normal(k, m) * std::sqrt(cfg_.dt * model_.spectral.noise_eigs[m]) *
                    su[m];
        for (std::size_t i = 0; i < K; ++i) {
            const double d = decay_[i], p1 = phi1_[i], gn = gnoise_[i];
            double* row = &X.node_values[i * n];
            const double* xib = &xi_b_[i * n];
            const double* xis = &xi_s_[i * n];
            if (has_drift_kernel_) {
                for (std::size_t m = 0; m < n; ++m)
                    row[m] = d * row[m] + p1 * xib[m] * bu[m] + gn * xis[m] * dw[m];
            } else {
                for (std::size_t m = 0; m < n; ++m)
                    row[m] = d * row[m] + gn * xis[m] * dw[m];
            }
        }
        project_u();
        obs(k + 1, u);
    }
    return X;
}

void LaplaceLiftSimulator::run_path(std::uint64_t path_index, const PathObserver& obs) const {
    (void)run_path_state(path_index, obs);
}

// ---------------------------------------------------------------------------
// shift lift

ShiftLiftSimulator::ShiftLiftSimulator(const ModelSpec& m, const shift_lift::ShiftGrid& g,
                                       const SimConfig& c)
    : model_(m), grid_(g), cfg_(c) {
    m.validate();
    c.validate();
    g.validate();
    const double ratio = c.dt / g.h;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1.0 - 1e-9)
        throw std::invalid_argument("ShiftLiftSimulator: dt must be an integer multiple of h");
    shift_per_step_ = static_cast<std::size_t>(std::llround(ratio));

    const std::size_t n = m.modes();
    const std::size_t J1 = g.points();
    const bool need_drift = !m.drift.is_zero();
    inc_b_.resize(n);
    inc_s_.resize(n);
    for (std::size_t mode = 0; mode < n; ++mode) {
        const KernelSpec kb = with_theta(m.kernel_b, m.spectral.thetas[mode]);
        const KernelSpec ks = with_theta(m.kernel_sigma, m.spectral.thetas[mode]);
        inc_b_[mode].assign(J1, 0.0);
        inc_s_[mode].assign(J1, 0.0);
        for (std::size_t j = 0; j < J1; ++j) {
            const double xj = static_cast<double>(j) * g.h;
            if (need_drift) inc_b_[mode][j] = kernel_step_l1(kb, xj, xj + c.dt);
            inc_s_[mode][j] = kernel_step_l1(ks, xj, xj + c.dt) / c.dt;
        }
    }
}

shift_lift::ShiftState ShiftLiftSimulator::run_path_state(std::uint64_t path_index,
                                                          const PathObserver& obs) const {
    const std::size_t n = model_.modes();
    const std::size_t J1 = grid_.points();
    const std::size_t steps = cfg_.steps();
    rng::GaussianStream stream(cfg_.seed, path_index);
    const bool need_drift = !model_.drift.is_zero();

    shift_lift::ShiftState X(J1, n);
    switch (model_.forcing.kind) {
        case ForcingKind::zero: break;
        case ForcingKind::constant:
            for (std::size_t j = 0; j < J1; ++j)
                for (std::size_t m = 0; m < n; ++m) X.at(j, m) = model_.forcing.value[m];
            X.tail = model_.forcing.value;
            break;
        case ForcingKind::lift_state:
            if (model_.forcing.shift_state.n_points() != J1 ||
                model_.forcing.shift_state.n_modes != n)
                throw std::invalid_argument("ShiftLiftSimulator: forcing state shape mismatch");
            X = model_.forcing.shift_state;
            break;
    }

    std::vector<double> u(n), bu(n), su(n), dw(n);
    for (std::size_t m = 0; m < n; ++m) u[m] = X.at(0, m);

    for (std::size_t k = 0; k < steps; ++k) {
        if (need_drift) model_.drift.apply(u, bu);
        model_.diffusion.apply(u, su);
        for (std::size_t m = 0; m < n; ++m)
            dw[m] = stream.normal(k, m) * std::sqrt(cfg_.dt * model_.spectral.noise_eigs[m]) *
                    su[m];
        // exact index shift, then kernel-embedded increments
        for (std::size_t j = 0; j < J1; ++j) {
            const std::size_t src = j + shift_per_step_;
            for (std::size_t m = 0; m < n; ++m) {
                double v = src < J1 ? X.at(src, m) : X.tail[m];
                if (need_drift) v += inc_b_[m][j] * bu[m];
                v += inc_s_[m][j] * dw[m];
                X.at(j, m) = v;
            }
        }
        for (std::size_t m = 0; m < n; ++m) u[m] = X.at(0, m);
        obs(k + 1, u);
    }
    return X;
}

void ShiftLiftSimulator::run_path(std::uint64_t path_index, const PathObserver& obs) const {
    (void)run_path_state(path_index, obs);
}

// ---------------------------------------------------------------------------

void run_paths(int n_paths, int threads, const std::function<void(int)>& fn) {
    int t = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    t = std::max(1, std::min(t, n_paths));
    if (t == 1) {
        for (int p = 0; p < n_paths; ++p) fn(p);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int i = 0; i < t; ++i)
        pool.emplace_back([&] {
            for (;;) {
                const int p = next.fetch_add(1);
                if (p >= n_paths) return;
                fn(p);
            }
        });
    for (auto& th : pool) th.join();
}

PathArray simulate(const ModelSpec& m, const SimConfig& c,
                   const laplace_lift::QuadratureRule* rule, const shift_lift::ShiftGrid* grid) {
    PathArray out;
    out.paths = static_cast<std::size_t>(c.paths);
    out.steps = c.steps();
    out.modes = m.modes();
    out.t.resize(out.steps);
    for (std::size_t k = 0; k < out.steps; ++k) out.t[k] = (k + 1) * c.dt;
    out.u.assign(out.paths * out.steps * out.modes, 0.0);

    const auto worker = [&](auto&& simulator) {
        run_paths(c.paths, c.threads, [&](int p) {
            simulator.run_path(static_cast<std::uint64_t>(p),
                               [&](std::size_t k, const std::vector<double>& u) {
                                   double* dst =
                                       &out.u[(static_cast<std::size_t>(p) * out.steps + (k - 1)) *
                                              out.modes];
                                   std::copy(u.begin(), u.end(), dst);
                               });
        });
    };

    switch (c.scheme) {
        case Scheme::direct:
            worker(DirectSimulator(m, c));
            break;
        case Scheme::laplace_lift: {
            if (!rule) throw std::invalid_argument("simulate: laplace_lift needs a quadrature rule");
            worker(LaplaceLiftSimulator(m, *rule, c));
            break;
        }
        case Scheme::shift_lift: {
            if (!grid) throw std::invalid_argument("simulate: shift_lift needs a grid");
            worker(ShiftLiftSimulator(m, *grid, c));
            break;
        }
    }
    return out;
}

}  // namespace voltlift::sim
