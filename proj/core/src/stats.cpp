#include "voltlift/stats.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace voltlift::stats {

double wasserstein_1d(std::vector<double> a, std::vector<double> b, double p_exp) {
    if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d: empty sample");
    if (!(p_exp >= 1.0)) throw std::invalid_argument("wasserstein_1d: needs p >= 1");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i)
            acc += std::pow(std::abs(a[i] - b[i]), p_exp);
        return std::pow(acc / a.size(), 1.0 / p_exp);
    }
    // quantile-function coupling on the merged break grid (exact optimal
    // coupling in one dimension)
    const std::size_t n = a.size(), m = b.size();
    std::size_t i = 0, j = 0;
    double q = 0.0, acc = 0.0;
    while (i < n && j < m) {
        const double qa = static_cast<double>(i + 1) / n;
        const double qb = static_cast<double>(j + 1) / m;
        const double qn = std::min(qa, qb);
        acc += (qn - q) * std::pow(std::abs(a[i] - b[j]), p_exp);
        q = qn;
        if (qa <= qn) ++i;
        if (qb <= qn) ++j;
    }
    return std::pow(acc, 1.0 / p_exp);
}

double apply_observable(Observable f, const std::vector<double>& u, std::size_t mode) {
    if (mode >= u.size()) throw std::invalid_argument("apply_observable: mode out of range");
    switch (f) {
        case Observable::identity_mode_k: return u[mode];
        case Observable::square_mode_k: return u[mode] * u[mode];
        case Observable::tanh_mode_k: return std::tanh(u[mode]);
    }
    return 0.0;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        pts.emplace_back(lx, ly);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_loglog: fewer than two positive points");
    SlopeFit f;
    const double den = n * sxx - sx * sx;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double rss = 0.0;
    for (auto& [lx, ly] : pts) {
        const double r = ly - (f.intercept + f.slope * lx);
        rss += r * r;
    }
    const double se = n > 2 ? std::sqrt(rss / (n - 2) / (sxx - sx * sx / n)) : 0.0;
    f.ci_lo = f.slope - 2.0 * se;
    f.ci_hi = f.slope + 2.0 * se;
    return f;
}

SampleMoments sample_moments(const std::vector<double>& v) {
    SampleMoments m;
    const std::size_t n = v.size();
    if (n < 2) throw std::invalid_argument("sample_moments: need at least two samples");
    m.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : v) {
        const double d = x - m.mean;
        m2 += d * d; m3 += d * d * d; m4 += d * d * d * d;
    }
    m2 /= n; m3 /= n; m4 /= n;
    m.stddev = std::sqrt(m2 * n / (n - 1.0));
    m.skewness = m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
    m.excess_kurtosis = m2 > 0 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return m;
}

double isotonic_decreasing_residual(const std::vector<double>& y) {
    // PAVA for a nonincreasing fit
    const std::size_t n = y.size();
    if (n == 0) return 0.0;
    std::vector<double> level, weight;
    for (double v : y) {
        level.push_back(v);
        weight.push_back(1.0);
        while (level.size() > 1 && level[level.size() - 2] < level.back()) {
            const double w = weight[weight.size() - 2] + weight.back();
            const double l = (level[level.size() - 2] * weight[weight.size() - 2] +
                              level.back() * weight.back()) / w;
            level.pop_back(); weight.pop_back();
            level.back() = l; weight.back() = w;
        }
    }
    std::vector<double> fit;
    for (std::size_t b = 0; b < level.size(); ++b)
        for (int r = 0; r < static_cast<int>(weight[b]); ++r) fit.push_back(level[b]);
    double rss = 0.0, tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        rss += (y[i] - fit[i]) * (y[i] - fit[i]);
        tot += y[i] * y[i];
    }
    return tot > 0 ? std::sqrt(rss / tot) : 0.0;
}

namespace {

// grand time average of f over a reference run, used when no analytic
// long-run mean is available
double reference_long_run_mean(const sim::ModelSpec& m, const sim::SimConfig& base,
                               const LiftChoice& lift, const LLNOptions& opt, double t_max) {
    sim::SimConfig rc = base;
    rc.T = 10.0 * t_max;
    rc.paths = 10 * opt.n_paths;
    rc.seed = opt.seed ^ 0xacc0fba5eull;
    rc.validate();
    std::vector<double> path_avg(rc.paths, 0.0);
    auto one = [&](const auto& s, int p) {
        double acc = 0.0;
        s.run_path(static_cast<std::uint64_t>(p),
                   [&](std::size_t, const std::vector<double>& u) {
                       acc += apply_observable(opt.f, u, opt.mode) * rc.dt;
                   });
        path_avg[p] = acc / rc.T;
    };
    switch (rc.scheme) {
        case sim::Scheme::direct: {
            sim::DirectSimulator s(m, rc);
            sim::run_paths(rc.paths, opt.threads, [&](int p) { one(s, p); });
            break;
        }
        case sim::Scheme::laplace_lift: {
            sim::LaplaceLiftSimulator s(m, *lift.rule, rc);
            sim::run_paths(rc.paths, opt.threads, [&](int p) { one(s, p); });
            break;
        }
        case sim::Scheme::shift_lift: {
            sim::ShiftLiftSimulator s(m, *lift.grid, rc);
            sim::run_paths(rc.paths, opt.threads, [&](int p) { one(s, p); });
            break;
        }
    }
    return std::accumulate(path_avg.begin(), path_avg.end(), 0.0) /
           static_cast<double>(path_avg.size());
}

}  // namespace

ExperimentResult lln_experiment(const sim::ModelSpec& m, const sim::SimConfig& base,
                                const LiftChoice& lift, const LLNOptions& opt) {
    if (opt.T_grid.empty()) throw std::invalid_argument("lln_experiment: empty T grid");
    const double t_max = *std::max_element(opt.T_grid.begin(), opt.T_grid.end());
    const double ref = opt.have_reference_mean
                           ? opt.reference_mean
                           : reference_long_run_mean(m, base, lift, opt, t_max);

    sim::SimConfig c = base;
    c.T = t_max;
    c.paths = opt.n_paths;
    c.seed = opt.seed;
    c.validate();

    // checkpoints at the T-grid values
    std::vector<std::size_t> marks;
    for (double T : opt.T_grid) {
        const double r = T / c.dt;
        if (std::abs(r - std::round(r)) > 1e-9)
            throw std::invalid_argument("lln_experiment: every T must be a multiple of dt");
        marks.push_back(static_cast<std::size_t>(std::llround(r)));
    }

    const std::size_t nT = marks.size();
    std::vector<double> sum_dev2(nT, 0.0), sum_dev4(nT, 0.0);
    std::mutex mx;

    auto one_path = [&](const auto& simulator, int p) {
        std::vector<double> avg_at(nT, 0.0);
        double acc = 0.0;
        std::size_t next_mark = 0;
        simulator.run_path(static_cast<std::uint64_t>(p),
                           [&](std::size_t k, const std::vector<double>& u) {
                               acc += apply_observable(opt.f, u, opt.mode) * c.dt;
                               while (next_mark < nT && k == marks[next_mark]) {
                                   avg_at[next_mark] = acc / (marks[next_mark] * c.dt);
                                   ++next_mark;
                               }
                           });
        std::lock_guard<std::mutex> lock(mx);
        for (std::size_t i = 0; i < nT; ++i) {
            const double d2 = (avg_at[i] - ref) * (avg_at[i] - ref);
            sum_dev2[i] += d2;
            sum_dev4[i] += d2 * d2;
        }
    };

    switch (c.scheme) {
        case sim::Scheme::direct: {
            sim::DirectSimulator s(m, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
        case sim::Scheme::laplace_lift: {
            if (!lift.rule) throw std::invalid_argument("lln_experiment: missing quadrature rule");
            sim::LaplaceLiftSimulator s(m, *lift.rule, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
        case sim::Scheme::shift_lift: {
            if (!lift.grid) throw std::invalid_argument("lln_experiment: missing shift grid");
            sim::ShiftLiftSimulator s(m, *lift.grid, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
    }

    ExperimentResult r;
    r.label = "lln";
    r.x = opt.T_grid;
    const double M = opt.n_paths;
    for (std::size_t i = 0; i < nT; ++i) {
        const double mse = sum_dev2[i] / M;
        const double var_d2 = std::max(0.0, sum_dev4[i] / M - mse * mse);
        r.y.push_back(mse);
        r.y_err.push_back(std::sqrt(var_d2 / M));
    }
    r.fit = fit_loglog(r.x, r.y);
    return r;
}

CLTResult clt_experiment(const sim::ModelSpec& m, const sim::SimConfig& base,
                         const LiftChoice& lift, const CLTOptions& opt) {
    if (opt.n_paths < 100)
        throw std::invalid_argument("clt_experiment: fewer than 100 paths is statistically meaningless");
    sim::SimConfig c = base;
    c.T = base.burn_in + opt.T;
    c.paths = opt.n_paths;
    c.seed = opt.seed;
    c.validate();

    const std::size_t burn_steps = static_cast<std::size_t>(std::llround(base.burn_in / c.dt));
    const std::size_t steps = c.steps();
    const double stride_r = opt.record_stride / c.dt;
    if (std::abs(stride_r - std::round(stride_r)) > 1e-9)
        throw std::invalid_argument("clt_experiment: record_stride must be a multiple of dt");
    const std::size_t stride = static_cast<std::size_t>(std::llround(stride_r));
    const std::size_t n_rec = (steps - burn_steps) / stride;
    const std::size_t max_lag =
        std::min<std::size_t>(n_rec / 2, static_cast<std::size_t>(opt.T / 5.0 / opt.record_stride));

    std::vector<double> averages(opt.n_paths, 0.0);
    std::vector<double> cov_acc(max_lag + 1, 0.0);
    std::vector<double> cov_cnt(max_lag + 1, 0.0);
    double f_sum = 0.0;
    std::size_t f_cnt = 0;
    std::mutex mx;

    auto one_path = [&](const auto& simulator, int p) {
        double acc = 0.0;
        std::vector<double> rec;
        rec.reserve(n_rec);
        simulator.run_path(static_cast<std::uint64_t>(p),
                           [&](std::size_t k, const std::vector<double>& u) {
                               if (k <= burn_steps) return;
                               const double v = apply_observable(opt.f, u, opt.mode);
                               acc += v * c.dt;
                               if ((k - burn_steps) % stride == 0 && rec.size() < n_rec)
                                   rec.push_back(v);
                           });
        averages[p] = acc / opt.T;
        // per-path raw autocovariance sums (centering happens at the end)
        std::vector<double> local(max_lag + 1, 0.0), localc(max_lag + 1, 0.0);
        for (std::size_t l = 0; l <= max_lag && l < rec.size(); ++l) {
            double s = 0.0;
            for (std::size_t k = 0; k + l < rec.size(); ++k) s += rec[k] * rec[k + l];
            local[l] = s;
            localc[l] = static_cast<double>(rec.size() - l);
        }
        double ls = std::accumulate(rec.begin(), rec.end(), 0.0);
        std::lock_guard<std::mutex> lock(mx);
        for (std::size_t l = 0; l <= max_lag; ++l) {
            cov_acc[l] += local[l];
            cov_cnt[l] += localc[l];
        }
        f_sum += ls;
        f_cnt += rec.size();
    };

    switch (c.scheme) {
        case sim::Scheme::direct: {
            sim::DirectSimulator s(m, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
        case sim::Scheme::laplace_lift: {
            if (!lift.rule) throw std::invalid_argument("clt_experiment: missing quadrature rule");
            sim::LaplaceLiftSimulator s(m, *lift.rule, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
        case sim::Scheme::shift_lift: {
            if (!lift.grid) throw std::invalid_argument("clt_experiment: missing shift grid");
            sim::ShiftLiftSimulator s(m, *lift.grid, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
    }

    CLTResult out;
    const double fbar = f_sum / static_cast<double>(f_cnt);
    std::vector<double> cov(max_lag + 1, 0.0);
    for (std::size_t l = 0; l <= max_lag; ++l)
        cov[l] = cov_acc[l] / cov_cnt[l] - fbar * fbar;

    // truncation: first lag where |cov| drops below twice its rough standard
    // error, capped at T/5 via max_lag
    std::size_t L = max_lag;
    for (std::size_t l = 1; l <= max_lag; ++l) {
        if (std::abs(cov[l]) < 2.0 * cov[0] / std::sqrt(cov_cnt[l])) {
            L = l;
            break;
        }
    }
    out.truncation_lag = static_cast<int>(L);
    // sigma^2 = 2 int_0^inf C(t) dt, trapezoid on the recorded stride
    double integral = 0.5 * cov[0];
    for (std::size_t l = 1; l <= L; ++l) integral += cov[l];
    integral *= opt.record_stride;
    out.sigma_plugin = std::sqrt(std::max(0.0, 2.0 * integral));

    std::vector<double> dev(averages.size());
    for (std::size_t p = 0; p < averages.size(); ++p)
        dev[p] = std::sqrt(opt.T) * (averages[p] - opt.reference_mean);
    const SampleMoments mom = sample_moments(dev);
    out.sigma_sample = mom.stddev;
    out.skewness = mom.skewness;
    out.excess_kurtosis = mom.excess_kurtosis;
    out.normalized.resize(dev.size());
    for (std::size_t p = 0; p < dev.size(); ++p)
        out.normalized[p] = mom.stddev > 0 ? dev[p] / mom.stddev : 0.0;
    return out;
}

MarginalResult limit_marginal_check(const sim::ModelSpec& m, const sim::SimConfig& base,
                                    const LiftChoice& lift, const MarginalOptions& opt) {
    if (opt.t_grid.empty()) throw std::invalid_argument("limit_marginal_check: empty grid");
    const double t_max = *std::max_element(opt.t_grid.begin(), opt.t_grid.end());
    sim::SimConfig c = base;
    c.T = 2.0 * t_max;
    c.paths = opt.n_paths;
    c.seed = opt.seed;
    c.validate();

    std::vector<std::size_t> marks;
    for (double t : opt.t_grid)
        marks.push_back(static_cast<std::size_t>(std::llround(t / c.dt)));
    const std::size_t proxy_mark = c.steps();

    const std::size_t nT = marks.size();
    std::vector<std::vector<double>> at_t(nT, std::vector<double>(opt.n_paths, 0.0));
    std::vector<double> proxy(opt.n_paths, 0.0);

    auto one_path = [&](const auto& simulator, int p) {
        simulator.run_path(static_cast<std::uint64_t>(p),
                           [&](std::size_t k, const std::vector<double>& u) {
                               for (std::size_t i = 0; i < nT; ++i)
                                   if (k == marks[i]) at_t[i][p] = u[opt.mode];
                               if (k == proxy_mark) proxy[p] = u[opt.mode];
                           });
    };

    switch (c.scheme) {
        case sim::Scheme::direct: {
            sim::DirectSimulator s(m, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
        case sim::Scheme::laplace_lift: {
            if (!lift.rule) throw std::invalid_argument("limit_marginal_check: missing rule");
            sim::LaplaceLiftSimulator s(m, *lift.rule, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
        case sim::Scheme::shift_lift: {
            if (!lift.grid) throw std::invalid_argument("limit_marginal_check: missing grid");
            sim::ShiftLiftSimulator s(m, *lift.grid, c);
            sim::run_paths(c.paths, opt.threads, [&](int p) { one_path(s, p); });
            break;
        }
    }

    MarginalResult res;
    res.curve.label = "limit_marginal_w1";
    res.curve.x = opt.t_grid;
    for (std::size_t i = 0; i < nT; ++i)
        res.curve.y.push_back(wasserstein_1d(at_t[i], proxy, 1.0));
    res.curve.y_err.assign(nT, 0.0);
    res.isotonic_residual = isotonic_decreasing_residual(res.curve.y);
    // noise floor: W1 between the two halves of the proxy sample
    const std::size_t half = proxy.size() / 2;
    res.noise_floor = wasserstein_1d(
        std::vector<double>(proxy.begin(), proxy.begin() + half),
        std::vector<double>(proxy.begin() + half, proxy.end()), 1.0);
    // exponential-decay fit (log-linear in t): reuse fit_loglog on (e^t, y)?
    // plain least squares of log y on t
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (std::size_t i = 0; i < nT; ++i) {
            if (!(res.curve.y[i] > 0.0)) continue;
            const double lx = res.curve.x[i], ly = std::log(res.curve.y[i]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
        if (n >= 2) {
            res.curve.fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            res.curve.fit.intercept = (sy - res.curve.fit.slope * sx) / n;
        }
    }
    return res;
}

}  // namespace voltlift::stats
