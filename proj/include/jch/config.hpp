#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "jch/analysis.hpp"

namespace jch {

/// Fully-resolved run configuration. Defaults reproduce the two-ion
/// experiment: g = 11.754 kHz on both sites (the minimax fit of the dressed
/// energies to the reference eigenenergy/gap dataset, see docs/calibration.md),
/// k12 = 5.9 kHz, resonant drives, nbar = 0.03, intensity sigma = 0.02,
/// 1000 shots, window [0, 400] μs, Fock cutoff 2.
struct RunConfig {
    int n_sites = 2;
    int fock_cutoff = 2;
    std::vector<double> g_khz = {11.754, 11.754};
    std::vector<double> delta_khz = {0.0, 0.0};

    double k12_khz = 5.9;
    std::optional<Eigen::MatrixXd> k_khz;  // full-matrix override
    bool hopping_from_geometry = false;
    ChainGeometry geometry;

    InitialStateSpec init;

    double duration_us = 400.0;
    double dt_out_us = 1.0;
    std::pair<double, double> window_us{0.0, 400.0};

    NoiseModel noise;
    bool noiseless = false;
    int workers = 0;

    std::vector<double> sweep_deltas_khz = {-500, -100, -50, -30, -28, -26,
                                            -24,  -22,  -20, -15, -10};
    std::optional<Branch> reference_branch;  // unset = derive from init / sweep sign

    std::vector<double> spectrum_deltas_khz;  // empty = -50..50 step 1

    int leakage_site = 2;
    CountKind leakage_kind = CountKind::polariton;

    double min_from_khz = -50.0;
    double min_to_khz = -10.0;
    double min_grid_step_khz = 1.0;

    void validate() const;
};

/// Parse the JSON key-tree document. Unknown keys are rejected; every
/// physical quantity carries its unit in the key name. Throws ConfigError
/// with the offending key (or the parser's byte position on syntax errors).
RunConfig parse_config(const std::string& text);

/// Serialize the fully-resolved configuration (manifest payload; feeding it
/// back through parse_config reproduces the run).
nlohmann::json config_to_json(const RunConfig& cfg);

/// Resolve physical parameters: hopping from the explicit k12/k matrix or
/// from geometry when hopping_from_geometry is set.
JchParams make_params(const RunConfig& cfg);

CompositeSpace make_space(const RunConfig& cfg);

}  // namespace jch
