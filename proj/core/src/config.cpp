#include "voltlift/config.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace voltlift::config {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& key, int line, const std::string& reason) {
    std::ostringstream os;
    os << "config error";
    if (line > 0) os << " (line " << line << ")";
    if (!key.empty()) os << " [" << key << "]";
    os << ": " << reason;
    throw std::invalid_argument(os.str());
}

// every key the grammar accepts, per section
const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> k = {
        {"model",
         {"modes", "theta.kind", "theta.c", "theta.d", "theta.values", "noise.gamma",
          "noise.eigs",
          "kernel.kind", "kernel.alpha", "kernel.beta", "kernel.theta", "kernel.lambda",
          "kernel.epsilon",
          "kernel_b.kind", "kernel_b.alpha", "kernel_b.beta", "kernel_b.theta",
          "kernel_b.lambda", "kernel_b.epsilon",
          "kernel_sigma.kind", "kernel_sigma.alpha", "kernel_sigma.beta", "kernel_sigma.theta",
          "kernel_sigma.lambda", "kernel_sigma.epsilon",
          "drift.kind", "drift.B_diag", "drift.b0", "drift.c",
          "diffusion.kind", "diffusion.sigma0", "diffusion.s1",
          "forcing.kind", "forcing.value"}},
        {"lift",
         {"family", "lift.xmin", "lift.xmax", "lift.nodes", "lift.atom_mass", "lift.delta",
          "lift.eta", "shiftlift.h", "shiftlift.xmax", "shiftlift.delta", "shiftlift.eta"}},
        {"sim", {"sim.dt", "sim.T", "sim.paths", "sim.seed", "sim.scheme", "sim.burn_in"}},
        {"experiment",
         {"exp.observable", "exp.mode", "exp.T_grid", "exp.M", "exp.T", "exp.p", "exp.eps0",
          "exp.eps1", "exp.gamma_holder", "exp.lambda", "exp.kind", "exp.t_grid",
          "exp.record_stride", "exp.reference_mean", "rate.lambda", "rate.p",
          "resolvent.dt", "resolvent.horizon", "resolvent.input_csv"}},
        {"output", {"out.dir", "out.format"}},
    };
    return k;
}

}  // namespace

RunConfig RunConfig::parse_text(const std::string& text) {
    RunConfig c;
    c.text_ = text;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("", lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_keys().count(section)) fail(section, lineno, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("", lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (section.empty()) fail(key, lineno, "key outside any [section]");
        const auto& allowed = known_keys().at(section);
        if (!allowed.count(key)) fail(section + "." + key, lineno, "unknown key");
        auto& sec = c.sections_[section];
        if (sec.count(key)) {
            std::ostringstream os;
            os << "duplicate key (first at line " << c.key_lines_.at(section + "/" + key) << ")";
            fail(section + "." + key, lineno, os.str());
        }
        sec[key] = val;
        c.key_lines_[section + "/" + key] = lineno;
    }
    return c;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return parse_text(os.str());
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string RunConfig::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    const auto jt = it->second.find(key);
    return jt == it->second.end() ? fallback : jt->second;
}

double RunConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    return require_double(section, key);
}

double RunConfig::require_double(const std::string& section, const std::string& key) const {
    if (!has(section, key)) fail(section + "." + key, 0, "missing required key");
    const std::string v = get_string(section, key);
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        fail(section + "." + key, key_lines_.at(section + "/" + key), "not a number: " + v);
    }
    if (pos != v.size())
        fail(section + "." + key, key_lines_.at(section + "/" + key), "trailing junk: " + v);
    return out;
}

long RunConfig::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const double d = require_double(section, key);
    const long l = static_cast<long>(std::llround(d));
    if (std::abs(d - static_cast<double>(l)) > 1e-9)
        fail(section + "." + key, 0, "expected an integer");
    return l;
}

std::vector<double> RunConfig::get_list(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::string v = get_string(section, key);
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream in(v);
    double x;
    while (in >> x) out.push_back(x);
    return out;
}

std::vector<std::string> RunConfig::keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto it = sections_.find(section);
    if (it == sections_.end()) return out;
    for (const auto& [k, v] : it->second) out.push_back(k);
    return out;
}

kernels::KernelSpec kernel_from_config(const RunConfig& c, const std::string& prefix,
                                       bool strict) {
    const std::string kind = c.get_string("model", prefix + ".kind", "resolvent_fractional");
    kernels::KernelSpec k;
    if (kind == "fractional_rl") {
        k = kernels::KernelSpec::fractional_rl(c.require_double("model", prefix + ".alpha"));
    } else if (kind == "log_kernel") {
        k = kernels::KernelSpec::log_kernel();
    } else if (kind == "resolvent_fractional") {
        k = kernels::KernelSpec::resolvent_fractional(
            c.require_double("model", prefix + ".alpha"),
            c.require_double("model", prefix + ".beta"),
            c.get_double("model", prefix + ".theta", 1.0));
    } else {
        throw std::invalid_argument("config: unknown kernel kind '" + kind + "'");
    }
    if (c.has("model", prefix + ".epsilon"))
        k = kernels::KernelSpec::time_shifted(k, c.require_double("model", prefix + ".epsilon"));
    if (c.has("model", prefix + ".lambda"))
        k = kernels::KernelSpec::damped(k, c.require_double("model", prefix + ".lambda"));
    k.validate(strict);
    return k;
}

kernels::SpectralOperator spectral_from_config(const RunConfig& c) {
    const long n = c.get_int("model", "modes", 1);
    const double gamma = c.get_double("model", "noise.gamma", 0.0);
    const std::string kind = c.get_string("model", "theta.kind", "weyl");
    kernels::SpectralOperator s;
    if (kind == "weyl") {
        s = kernels::weyl_eigenvalues(static_cast<int>(c.get_int("model", "theta.d", 1)),
                                      c.get_double("model", "theta.c", 1.0),
                                      static_cast<int>(n), gamma);
    } else if (kind == "list") {
        s.thetas = c.get_list("model", "theta.values");
        s.gamma_exp = gamma;
        for (double th : s.thetas) s.noise_eigs.push_back(std::pow(th, -gamma));
    } else {
        throw std::invalid_argument("config: unknown theta.kind '" + kind + "'");
    }
    if (c.has("model", "noise.eigs")) s.noise_eigs = c.get_list("model", "noise.eigs");
    s.validate();
    return s;
}

sim::ModelSpec model_from_config(const RunConfig& c) {
    sim::ModelSpec m;
    m.spectral = spectral_from_config(c);
    const std::string base = c.has("model", "kernel.kind") || c.has("model", "kernel.alpha")
                                 ? "kernel"
                                 : "kernel_b";
    m.kernel_b = c.has("model", "kernel_b.kind") || c.has("model", "kernel_b.alpha")
                     ? kernel_from_config(c, "kernel_b", false)
                     : kernel_from_config(c, base, false);
    m.kernel_sigma = c.has("model", "kernel_sigma.kind") || c.has("model", "kernel_sigma.alpha")
                         ? kernel_from_config(c, "kernel_sigma", false)
                         : kernel_from_config(c, base, false);

    const std::size_t n = m.spectral.modes();
    const std::string drift = c.get_string("model", "drift.kind", "zero");
    if (drift == "zero") {
        m.drift.kind = sim::DriftKind::zero;
    } else if (drift == "affine") {
        m.drift.kind = sim::DriftKind::affine;
        const auto diag = c.get_list("model", "drift.B_diag");
        if (diag.size() != n) throw std::invalid_argument("config: drift.B_diag needs one entry per mode");
        m.drift.B.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) m.drift.B[i * n + i] = diag[i];
        m.drift.b0 = c.has("model", "drift.b0") ? c.get_list("model", "drift.b0")
                                                : std::vector<double>(n, 0.0);
    } else if (drift == "tanh") {
        m.drift.kind = sim::DriftKind::tanh_scaled;
        m.drift.c = c.get_list("model", "drift.c");
    } else {
        throw std::invalid_argument("config: unknown drift.kind '" + drift + "'");
    }

    const std::string diff = c.get_string("model", "diffusion.kind", "additive");
    if (diff == "additive") {
        m.diffusion.kind = sim::DiffusionKind::additive;
    } else if (diff == "affine") {
        m.diffusion.kind = sim::DiffusionKind::affine;
        m.diffusion.s1 = c.get_list("model", "diffusion.s1");
    } else {
        throw std::invalid_argument("config: unknown diffusion.kind '" + diff + "'");
    }
    m.diffusion.s0 = c.has("model", "diffusion.sigma0") ? c.get_list("model", "diffusion.sigma0")
                                                        : std::vector<double>(n, 0.0);

    const std::string forcing = c.get_string("model", "forcing.kind", "zero");
    if (forcing == "zero") {
        m.forcing.kind = sim::ForcingKind::zero;
    } else if (forcing == "constant") {
        m.forcing.kind = sim::ForcingKind::constant;
        m.forcing.value = c.get_list("model", "forcing.value");
    } else {
        throw std::invalid_argument("config: unknown forcing.kind '" + forcing + "'");
    }
    m.validate();
    return m;
}

laplace_lift::QuadratureRule quadrature_from_config(const RunConfig& c) {
    special::WeightParams wp;
    wp.family = special::WeightFamily::laplace;
    wp.delta = c.get_double("lift", "lift.delta", 0.5);
    wp.eta = c.get_double("lift", "lift.eta", 2.0);
    wp.atom_mass = c.get_double("lift", "lift.atom_mass", 0.0);
    return laplace_lift::build_quadrature(wp, c.get_double("lift", "lift.xmin", 1e-4),
                                          c.get_double("lift", "lift.xmax", 1e4),
                                          static_cast<int>(c.get_int("lift", "lift.nodes", 200)));
}

shift_lift::ShiftGrid shift_grid_from_config(const RunConfig& c) {
    shift_lift::ShiftGrid g;
    g.h = c.get_double("lift", "shiftlift.h", 1e-2);
    g.x_max = c.get_double("lift", "shiftlift.xmax", 20.0);
    g.wparams.family = special::WeightFamily::shift;
    g.wparams.delta = c.get_double("lift", "shiftlift.delta", 3.0);
    g.wparams.eta = c.get_double("lift", "shiftlift.eta", 0.5);
    g.validate();
    return g;
}

sim::SimConfig sim_config_from_config(const RunConfig& c) {
    sim::SimConfig s;
    s.dt = c.get_double("sim", "sim.dt", 1e-3);
    s.T = c.get_double("sim", "sim.T", 1.0);
    s.paths = static_cast<int>(c.get_int("sim", "sim.paths", 1));
    s.seed = static_cast<std::uint64_t>(c.get_int("sim", "sim.seed", 1));
    s.burn_in = c.get_double("sim", "sim.burn_in", 0.0);
    const std::string scheme = c.get_string("sim", "sim.scheme", "direct");
    if (scheme == "direct") s.scheme = sim::Scheme::direct;
    else if (scheme == "laplace_lift") s.scheme = sim::Scheme::laplace_lift;
    else if (scheme == "shift_lift") s.scheme = sim::Scheme::shift_lift;
    else throw std::invalid_argument("config: unknown sim.scheme '" + scheme + "'");
    s.validate();
    return s;
}

}  // namespace voltlift::config
