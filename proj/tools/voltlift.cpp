// voltlift: stochastic Volterra equations through their Markovian lifts.
//
// Subcommands: kernels, check, resolvent, simulate, lln, clt, report.
// Every run writes its artifacts atomically into --out-dir together with a
// manifest carrying the config hash, seed, wall time and tool version.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include <voltlift/conditions.hpp>
#include <voltlift/config.hpp>
#include <voltlift/io.hpp>
#include <voltlift/resolvent.hpp>
#include <voltlift/sim.hpp>
#include <voltlift/stats.hpp>
#include <voltlift/version.hpp>

namespace vl = voltlift;
using vl::config::RunConfig;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    std::string format = "csv";
};

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("VOLTLIFT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // simulator default: logical cores
}

class RunContext {
  public:
    RunContext(const CommonArgs& args, const std::string& subcommand)
        : args_(args), start_(std::chrono::steady_clock::now()) {
        manifest_.subcommand = subcommand;
        manifest_.version = VOLTLIFT_VERSION;
        cfg_ = RunConfig::parse_file(args.config_path);
        manifest_.config_hash = vl::io::hex64(vl::io::fnv1a64(cfg_.text()));
        threads_ = resolve_threads(args.threads);
    }

    const RunConfig& cfg() const { return cfg_; }
    int threads() const { return threads_; }

    std::uint64_t seed() {
        if (args_.seed) return *args_.seed;
        return static_cast<std::uint64_t>(cfg_.get_int("sim", "sim.seed", 1));
    }

    std::string path(const std::string& name) const {
        return (std::filesystem::path(args_.out_dir) / name).string();
    }

    void emit(const std::string& name, const std::string& contents) {
        vl::io::write_file_atomic(path(name), contents);
        manifest_.outputs.push_back(name);
        std::cout << "wrote " << path(name) << "\n";
    }

    void finish(std::uint64_t used_seed) {
        manifest_.seed = used_seed;
        manifest_.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        vl::io::write_file_atomic(path("manifest-" + manifest_.subcommand + ".json"),
                                  vl::io::manifest_json(manifest_));
    }

  private:
    CommonArgs args_;
    RunConfig cfg_;
    vl::io::Manifest manifest_;
    std::chrono::steady_clock::time_point start_;
    int threads_ = 0;
};

int cmd_kernels(const CommonArgs& args) {
    RunContext ctx(args, "kernels");
    const auto k = vl::config::kernel_from_config(ctx.cfg(), "kernel", true);
    const auto q = vl::config::quadrature_from_config(ctx.cfg());

    vl::io::CsvTable tab;
    tab.header = {"t", "kernel", "reconstruction", "rel_err", "tail_bound"};
    for (int i = 0; i <= 48; ++i) {
        const double t = 0.05 * std::pow(20.0 / 0.05, i / 48.0);
        const double exact = vl::kernels::kernel_value(k, t);
        const auto rec = vl::laplace_lift::reconstruct_kernel_full(k, q, t);
        tab.rows.push_back({t, exact, rec.value, (rec.value - exact) / exact, rec.tail_bound});
    }
    ctx.emit("kernels.csv", vl::io::csv_encode(tab));

    vl::io::CsvTable dens;
    dens.header = {"x", "density"};
    for (std::size_t i = 0; i < q.size(); ++i)
        dens.rows.push_back({q.nodes[i], vl::kernels::bernstein_density(k, q.nodes[i])});
    ctx.emit("density.csv", vl::io::csv_encode(dens));
    ctx.finish(0);
    return 0;
}

// condition checker: builds the norm curves of the configured model on the
// configured lift, evaluates the smallness displays, the K0/K1 constants and
// the chi/theta/CLT rates, and writes one JSON report.
int cmd_check(const CommonArgs& args) {
    RunContext ctx(args, "check");
    const auto& cfg = ctx.cfg();
    const auto model = vl::config::model_from_config(cfg);
    const auto q = vl::config::quadrature_from_config(cfg);

    const double p = cfg.get_double("experiment", "exp.p", 6.0);
    const double eps0 = cfg.get_double("experiment", "exp.eps0", 0.25);
    const double eps1 = cfg.get_double("experiment", "exp.eps1", 0.25);
    const double gamma_holder = cfg.get_double("experiment", "exp.gamma_holder", 1.0);

    vl::conditions::ConditionReport rep;
    rep.p_exp = p;
    rep.eps0 = eps0;
    rep.eps1 = eps1;
    rep.gamma_holder = gamma_holder;
    rep.delta = q.wparams.delta;
    rep.eta = q.wparams.eta;

    const bool b_zero = model.drift.is_zero();
    const std::string family = cfg.get_string("lift", "family", "laplace");
    const double alpha = model.kernel_sigma.alpha;
    const double beta = model.kernel_sigma.beta;

    // K0/K1 per the lift family's theorem
    if (family == "laplace") {
        const auto kk = vl::conditions::laplace_constants(
            alpha, beta, eps0, eps1, model.spectral.thetas.front(), p, b_zero);
        rep.K0 = kk.K0;
        rep.K1 = kk.K1;
        rep.notes += kk.range_note;
        rep.q_exp = std::numeric_limits<double>::infinity();
        rep.q_prime = 1.0;
        const double ind = alpha != beta ? 1.0 : 0.0;
        rep.delta_star_hi = 1.0 + 2.0 * alpha - 2.0 * beta * ind - eps1;
        rep.delta_star_lo = -1.0 + eps1;
        rep.rho_exp = std::max(0.0, 1.0 - eps0) / 2.0;
        rep.lambda = alpha - beta * ind + (b_zero ? 0.5 : 0.0) - 1.5 * eps1;
    } else {
        const auto kk = vl::conditions::shift_constants(
            alpha, beta, eps0, eps1, model.spectral.gamma_exp, model.spectral.thetas);
        rep.K0 = kk.K0;
        rep.K1 = kk.K1;
        rep.notes += kk.range_note;
        rep.q_exp = 2.0;
        rep.q_prime = 2.0;
        rep.rho_exp = (1.0 - eps0) / 2.0;
        rep.lambda = 0.25 - (beta - alpha) / 2.0 - eps1 / 2.0;
    }

    // sampled ||S(t) xi|| curves on the discrete lift
    const double dt = cfg.get_double("experiment", "resolvent.dt", 0.01);
    const auto horizon = static_cast<std::size_t>(
        cfg.get_double("experiment", "resolvent.horizon", 200.0) / dt);
    auto curve = [&](const vl::kernels::KernelSpec& spec) {
        return vl::resolvent::SampledKernel::from_function(
            [&](double t) {
                double sup = 0.0;
                for (double th : model.spectral.thetas) {
                    const auto kk = vl::sim::with_theta(spec, th);
                    double acc = 0.0;
                    for (std::size_t i = 0; i < q.size(); ++i) {
                        const double xi = vl::kernels::bernstein_density(kk, q.nodes[i]);
                        acc += q.weights[i] * std::exp(-2.0 * q.nodes[i] * t) * xi * xi *
                               vl::special::weight_value(q.wparams, q.nodes[i]);
                    }
                    sup = std::max(sup, std::sqrt(acc));
                }
                return sup;
            },
            dt, horizon);
    };

    const std::size_t n = model.modes();
    vl::conditions::SmallnessInputs in;
    in.p_exp = p;
    in.b_lip = model.drift.lipschitz(n);
    in.b_lin = model.drift.linear_growth(n);
    in.sigma_lip = model.diffusion.lipschitz_hs();
    in.sigma_lin = model.diffusion.linear_growth();
    double xi_sq = q.atom_mass;
    for (std::size_t i = 0; i < q.size(); ++i)
        xi_sq += q.weights[i] / vl::special::weight_value(q.wparams, q.nodes[i]);
    in.xi_norm_V = std::sqrt(xi_sq);
    in.xi_norm_V0 = in.xi_norm_V;

    vl::resolvent::SampledKernel sb, ss;
    if (!b_zero) {
        sb = curve(model.kernel_b);
        in.s_xi_b_l1_V = sb.l1();
    }
    ss = curve(model.kernel_sigma);
    double l2sq = 0.0;
    for (double v : ss.samples) l2sq += v * v;
    in.s_xi_sigma_l2_V = std::sqrt(ss.dt * l2sq);
    in.s_xi_sigma_l2_V0 = in.s_xi_sigma_l2_V;

    const auto kind = b_zero ? vl::resolvent::RhoKind::b0
                      : model.diffusion.is_additive() ? vl::resolvent::RhoKind::add
                                                      : vl::resolvent::RhoKind::gen;
    const auto small = vl::conditions::check_smallness(kind, in);
    rep.lhs_moment = small.lhs_moment;
    rep.lhs_contraction = small.lhs_contraction;
    rep.pass_moment = small.pass_moment;
    rep.pass_contraction = small.pass_contraction;

    vl::resolvent::RhoInputs ri;
    ri.p_exp = p;
    ri.xi_norm = in.xi_norm_V0;
    ri.b_lip = in.b_lip;
    ri.sigma_lip = in.sigma_lip;
    ri.s_xi_b = b_zero ? ss : sb;  // same grid either way
    ri.s_xi_sigma = ss;
    double l1_rho = 0.0;
    if (small.pass_contraction) {
        const auto rho = vl::resolvent::build_rho(kind, ri);
        l1_rho = rho.l1();
    }
    const auto rr = vl::conditions::rates(kind, rep.lambda, gamma_holder, p, l1_rho);
    rep.chi = rr.chi;
    rep.lln_rate = rr.lln_rate;
    rep.lln_log_factor = rr.lln_log_factor;
    rep.clt_ok = rr.clt_ok;

    ctx.emit("check.json", rep.to_json() + "\n");
    ctx.finish(0);
    return (rep.pass_moment && rep.pass_contraction) ? 0 : 2;
}

int cmd_resolvent(const CommonArgs& args) {
    RunContext ctx(args, "resolvent");
    const auto& cfg = ctx.cfg();
    const double dt = cfg.get_double("experiment", "resolvent.dt", 1e-3);
    const double lam = cfg.get_double("experiment", "rate.lambda", 1.0);
    const double p = cfg.get_double("experiment", "rate.p", 2.0);

    vl::resolvent::SampledKernel rho;
    if (cfg.has("experiment", "resolvent.input_csv")) {
        const auto tab = vl::io::csv_parse(
            vl::io::read_file(cfg.get_string("experiment", "resolvent.input_csv")));
        std::vector<double> samples;
        for (const auto& row : tab.rows) samples.push_back(row[1]);
        rho = vl::resolvent::SampledKernel(dt, samples);
    } else {
        const auto k = vl::config::kernel_from_config(cfg, "kernel", false);
        const double horizon = cfg.get_double("experiment", "resolvent.horizon", 50.0);
        rho = vl::resolvent::SampledKernel::from_function(
            [&](double t) { return vl::kernels::kernel_value(k, t); }, dt,
            static_cast<std::size_t>(horizon / dt));
    }
    if (!(rho.l1() < 1.0)) {
        std::cerr << "resolvent: ||rho||_1 = " << rho.l1()
                  << " >= 1, the Paley-Wiener condition fails\n";
        return 2;
    }
    const auto r = vl::resolvent::solve_resolvent(rho);

    vl::io::CsvTable tab;
    tab.header = {"t", "r", "R"};
    for (std::size_t k = 0; k < r.samples.size(); ++k) {
        const double t = (k + 0.5) * dt;
        tab.rows.push_back({t, r.samples[k], vl::resolvent::rate_function(r, lam, p, t)});
    }
    ctx.emit("resolvent.csv", vl::io::csv_encode(tab));
    ctx.finish(0);
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    RunContext ctx(args, "simulate");
    const auto& cfg = ctx.cfg();
    const auto model = vl::config::model_from_config(cfg);
    auto sc = vl::config::sim_config_from_config(cfg);
    if (args.seed) sc.seed = *args.seed;
    sc.threads = ctx.threads();

    std::optional<vl::laplace_lift::QuadratureRule> rule;
    std::optional<vl::shift_lift::ShiftGrid> grid;
    if (sc.scheme == vl::sim::Scheme::laplace_lift)
        rule = vl::config::quadrature_from_config(cfg);
    if (sc.scheme == vl::sim::Scheme::shift_lift) grid = vl::config::shift_grid_from_config(cfg);

    const auto paths =
        vl::sim::simulate(model, sc, rule ? &*rule : nullptr, grid ? &*grid : nullptr);

    vl::io::CsvTable tab;
    tab.header = {"path", "t", "mode", "u"};
    for (std::size_t pth = 0; pth < paths.paths; ++pth)
        for (std::size_t k = 0; k < paths.steps; ++k)
            for (std::size_t m = 0; m < paths.modes; ++m)
                tab.rows.push_back({static_cast<double>(pth), paths.t[k],
                                    static_cast<double>(m), paths.value(pth, k, m)});
    ctx.emit("paths.csv", vl::io::csv_encode(tab));
    ctx.finish(sc.seed);
    return 0;
}

vl::stats::Observable observable_from(const std::string& name) {
    if (name == "identity") return vl::stats::Observable::identity_mode_k;
    if (name == "square") return vl::stats::Observable::square_mode_k;
    if (name == "tanh") return vl::stats::Observable::tanh_mode_k;
    throw std::invalid_argument("unknown observable '" + name + "'");
}

int cmd_lln(const CommonArgs& args) {
    RunContext ctx(args, "lln");
    const auto& cfg = ctx.cfg();
    const auto model = vl::config::model_from_config(cfg);
    auto base = vl::config::sim_config_from_config(cfg);
    base.threads = ctx.threads();

    std::optional<vl::laplace_lift::QuadratureRule> rule;
    std::optional<vl::shift_lift::ShiftGrid> grid;
    if (base.scheme == vl::sim::Scheme::laplace_lift)
        rule = vl::config::quadrature_from_config(cfg);
    if (base.scheme == vl::sim::Scheme::shift_lift)
        grid = vl::config::shift_grid_from_config(cfg);
    vl::stats::LiftChoice lift{rule ? &*rule : nullptr, grid ? &*grid : nullptr};

    vl::stats::LLNOptions opt;
    opt.f = observable_from(cfg.get_string("experiment", "exp.observable", "identity"));
    opt.mode = static_cast<std::size_t>(cfg.get_int("experiment", "exp.mode", 0));
    if (cfg.has("experiment", "exp.T_grid")) opt.T_grid = cfg.get_list("experiment", "exp.T_grid");
    opt.n_paths = static_cast<int>(cfg.get_int("experiment", "exp.M", 400));
    opt.seed = args.seed ? *args.seed : ctx.seed();
    opt.threads = ctx.threads();
    if (cfg.has("experiment", "exp.reference_mean")) {
        opt.reference_mean = cfg.require_double("experiment", "exp.reference_mean");
        opt.have_reference_mean = true;
    } else {
        opt.have_reference_mean = false;
    }

    const auto r = vl::stats::lln_experiment(model, base, lift, opt);

    vl::io::CsvTable tab;
    tab.header = {"T", "mse", "mse_stderr"};
    for (std::size_t i = 0; i < r.x.size(); ++i)
        tab.rows.push_back({r.x[i], r.y[i], r.y_err[i]});
    ctx.emit("lln.csv", vl::io::csv_encode(tab));

    nlohmann::json j;
    j["label"] = r.label;
    j["slope"] = r.fit.slope;
    j["slope_ci"] = {r.fit.ci_lo, r.fit.ci_hi};
    j["pass_decreasing"] = std::is_sorted(r.y.rbegin(), r.y.rend());
    ctx.emit("lln-summary.json", j.dump(2) + "\n");
    ctx.finish(opt.seed);
    return 0;
}

int cmd_clt(const CommonArgs& args) {
    RunContext ctx(args, "clt");
    const auto& cfg = ctx.cfg();
    const auto model = vl::config::model_from_config(cfg);
    auto base = vl::config::sim_config_from_config(cfg);
    base.threads = ctx.threads();

    std::optional<vl::laplace_lift::QuadratureRule> rule;
    std::optional<vl::shift_lift::ShiftGrid> grid;
    if (base.scheme == vl::sim::Scheme::laplace_lift)
        rule = vl::config::quadrature_from_config(cfg);
    if (base.scheme == vl::sim::Scheme::shift_lift)
        grid = vl::config::shift_grid_from_config(cfg);
    vl::stats::LiftChoice lift{rule ? &*rule : nullptr, grid ? &*grid : nullptr};

    vl::stats::CLTOptions opt;
    opt.f = observable_from(cfg.get_string("experiment", "exp.observable", "identity"));
    opt.mode = static_cast<std::size_t>(cfg.get_int("experiment", "exp.mode", 0));
    opt.T = cfg.get_double("experiment", "exp.T", 500.0);
    opt.n_paths = static_cast<int>(cfg.get_int("experiment", "exp.M", 2000));
    opt.seed = args.seed ? *args.seed : ctx.seed();
    opt.record_stride = cfg.get_double("experiment", "exp.record_stride", 0.1);
    opt.reference_mean = cfg.get_double("experiment", "exp.reference_mean", 0.0);
    opt.threads = ctx.threads();

    const auto r = vl::stats::clt_experiment(model, base, lift, opt);

    vl::io::CsvTable tab;
    tab.header = {"sample_id", "normalized_deviation"};
    for (std::size_t i = 0; i < r.normalized.size(); ++i)
        tab.rows.push_back({static_cast<double>(i), r.normalized[i]});
    ctx.emit("clt.csv", vl::io::csv_encode(tab));

    nlohmann::json j;
    j["sigma_sample"] = r.sigma_sample;
    j["sigma_plugin"] = r.sigma_plugin;
    j["skewness"] = r.skewness;
    j["excess_kurtosis"] = r.excess_kurtosis;
    j["truncation_lag"] = r.truncation_lag;
    ctx.emit("clt-summary.json", j.dump(2) + "\n");
    ctx.finish(opt.seed);
    return 0;
}

int cmd_report(const CommonArgs& args) {
    nlohmann::json bundle = nlohmann::json::array();
    for (const auto& entry : std::filesystem::directory_iterator(args.out_dir)) {
        if (entry.path().extension() != ".json") continue;
        if (entry.path().filename().string().rfind("report", 0) == 0) continue;
        nlohmann::json j = nlohmann::json::parse(vl::io::read_file(entry.path().string()));
        nlohmann::json item;
        item["file"] = entry.path().filename().string();
        item["content"] = j;
        bundle.push_back(item);
    }
    nlohmann::json top;
    top["version"] = VOLTLIFT_VERSION;
    top["reports"] = bundle;
    const auto out = (std::filesystem::path(args.out_dir) / "report.json").string();
    vl::io::write_file_atomic(out, top.dump(2) + "\n");
    std::cout << "wrote " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic Volterra equations via Markovian lifts"};
    app.set_version_flag("--version", VOLTLIFT_VERSION);
    app.require_subcommand(1);

    CommonArgs args;
    int subcmd = -1;
    auto add_common = [&](CLI::App* c, int id, bool needs_config) {
        if (needs_config)
            c->add_option("--config", args.config_path, "run configuration file")->required();
        c->add_option("--out-dir", args.out_dir, "output directory");
        c->add_option(
            "--seed",
            [&](const CLI::results_t& r) {
                args.seed = std::stoull(r[0]);
                return true;
            },
            "seed override");
        c->add_option("--threads", args.threads, "worker threads (or VOLTLIFT_THREADS)");
        c->add_option("--format", args.format, "output format: csv (json summaries always on)");
        c->callback([&, id] { subcmd = id; });
    };
    add_common(app.add_subcommand("kernels", "tabulate kernel, density and reconstruction"), 0, true);
    add_common(app.add_subcommand("check", "evaluate theorem hypotheses into a report"), 1, true);
    add_common(app.add_subcommand("resolvent", "solve r = rho + rho * r and tabulate R"), 2, true);
    add_common(app.add_subcommand("simulate", "generate paths"), 3, true);
    add_common(app.add_subcommand("lln", "mean-square ergodic-average experiment"), 4, true);
    add_common(app.add_subcommand("clt", "normalized time-average experiment"), 5, true);
    add_common(app.add_subcommand("report", "bundle the JSON summaries in --out-dir"), 6, false);

    CLI11_PARSE(app, argc, argv);
    try {
        switch (subcmd) {
            case 0: return cmd_kernels(args);
            case 1: return cmd_check(args);
            case 2: return cmd_resolvent(args);
            case 3: return cmd_simulate(args);
            case 4: return cmd_lln(args);
            case 5: return cmd_clt(args);
            case 6: return cmd_report(args);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
