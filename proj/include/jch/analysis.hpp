#pragma once

#include <optional>

#include "jch/noise.hpp"

namespace jch {

struct LeakageResult {
    double mean_leakage = 0.0;
    std::optional<double> stderr_;  // ensemble runs only
    std::pair<double, double> window_us{0.0, 0.0};
    std::vector<double> times_us;
    std::vector<double> series;
};

/// Arithmetic mean of P(N >= 1) at `site` over the sampled points inside the
/// window. CountKind::polariton averages P(N_tot >= 1), phonon P(N_ph >= 1).
LeakageResult time_averaged_leakage(const TrajectoryRecord& traj, int site, CountKind kind,
                                    std::pair<double, double> window_us);

/// Ensemble version; the stderr comes from shot-level window averages.
LeakageResult time_averaged_leakage(const EnsembleResult& ens, int site, CountKind kind);

struct SweepRow {
    double delta2;
    double e_minus2;
    double e_plus2;
    double gap_low;
    double gap_high;
    double mean_leakage;
    double stderr_;  // 0 for noiseless rows
};

struct SweepSettings {
    std::pair<double, double> window_us{0.0, 400.0};
    double dt_out_us = 1.0;
    bool noiseless = false;
    int workers = 0;
    std::optional<Branch> reference_branch;  // default: from the init spec
};

/// One row per detuning of the blocked site (site 2): dressed eigenenergies,
/// gaps against the source site's resonant reference branch, and the
/// time-averaged leakage P(N_tot,2 >= 1). All rows share the noise seed.
std::vector<SweepRow> detuning_sweep(std::span<const double> delta2_khz,
                                     const InitialStateSpec& init, const JchParams& params,
                                     const CompositeSpace& space, const NoiseModel& noise,
                                     const SweepSettings& settings);

struct MinSearchResult {
    double delta_star_khz;
    double leakage_star;
};

/// Grid scan of the noiseless leakage over [lo, hi] followed by golden-section
/// refinement around the best grid point.
MinSearchResult find_min_detuning(double lo_khz, double hi_khz, const InitialStateSpec& init,
                                  const JchParams& params, const CompositeSpace& space,
                                  std::pair<double, double> window_us, double grid_step_khz,
                                  double dt_out_us = 1.0);

/// Side-by-side leakage of the polariton blockade (Δ₂ = -24 kHz, dressed
/// |1,-> at site 1) and the phonon-hopping blockade (Δ₂ = 0, bare |1,g> at
/// site 1, source beam off), each noiseless and noise-averaged. Leakage is
/// the quasiparticle presence P(N_tot,2 >= 1) in both configurations.
struct BlockadeReport {
    double polariton_noiseless;
    double phonon_noiseless;
    double ratio_noiseless;  // phonon / polariton
    double polariton_noisy;
    double polariton_noisy_stderr;
    double phonon_noisy;
    double phonon_noisy_stderr;
};

BlockadeReport blockade_comparison(const JchParams& params, const CompositeSpace& space,
                                   const NoiseModel& noise,
                                   std::pair<double, double> window_us, double dt_out_us = 1.0,
                                   int workers = 0);

/// Noiseless single-trajectory leakage for one detuning of site 2.
double noiseless_leakage(double delta2_khz, const InitialStateSpec& init,
                         const JchParams& params, const CompositeSpace& space,
                         std::pair<double, double> window_us, double dt_out_us = 1.0);

}  // namespace jch
