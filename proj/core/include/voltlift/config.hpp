#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voltlift/laplace_lift.hpp"
#include "voltlift/shift_lift.hpp"
#include "voltlift/sim.hpp"

// Flat INI-style run configuration: [section] headers with key = value
// lines, '#' or ';' comments.  Unknown keys and duplicates are rejected
// with the offending line; numeric values are validated against the owning
// module's preconditions when the typed objects are built.

namespace voltlift::config {

struct ConfigError {
    std::string key;
    int line = 0;
    std::string reason;
};

class RunConfig {
  public:
    static RunConfig parse_text(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback = "") const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    double require_double(const std::string& section, const std::string& key) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& section, const std::string& key) const;

    const std::string& text() const { return text_; }
    std::vector<std::string> keys(const std::string& section) const;

  private:
    std::string text_;
    std::map<std::string, std::map<std::string, std::string>> sections_;
    std::map<std::string, int> key_lines_;
};

// Typed builders; each validates against the owning module's preconditions.
kernels::KernelSpec kernel_from_config(const RunConfig& c, const std::string& prefix,
                                       bool strict = true);
kernels::SpectralOperator spectral_from_config(const RunConfig& c);
sim::ModelSpec model_from_config(const RunConfig& c);
laplace_lift::QuadratureRule quadrature_from_config(const RunConfig& c);
shift_lift::ShiftGrid shift_grid_from_config(const RunConfig& c);
sim::SimConfig sim_config_from_config(const RunConfig& c);

}  // namespace voltlift::config
