#pragma once

#include "kcq/params.hpp"
#include "kcq/radial.hpp"
#include "kcq/solver.hpp"

#include <string>
#include <vector>

namespace kcq {

/// Everything a CLI run needs. Loaded from a flat `key = value` file;
/// see README for the key list.
struct RunConfig {
    PhysicalParams params;
    GridSpec grid;
    SolverConfig solver;
    std::vector<double> bubble_eps{0.2, 0.1, 0.05, 0.025};
    std::vector<double> bubble_p; // empty: use q
    std::string out_dir = "out";
    std::string sweep_axis = "mu";
    std::vector<double> sweep_values;
    unsigned threads = 1;
    double gn_p = 0.0; // 0: use q
    std::string fiber_profile;
    double fiber_t_min = 1e-2;
    double fiber_t_max = 1e2;
    int fiber_samples = 401;
};

/// Apply one `key = value` setting; throws std::invalid_argument on unknown keys.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Parse a config file (comments start with '#').
void load_config_file(RunConfig& cfg, const std::string& path);

std::vector<double> parse_list(const std::string& text);

/// All keys with their current values, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& cfg);

} // namespace kcq
