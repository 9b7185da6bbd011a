#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "jch/dynamics.hpp"

namespace jch {

/// Shot-to-shot decoherence model: thermal initial phonon occupation after
/// sideband cooling plus quasi-static relative intensity fluctuations of the
/// drive laser.
struct NoiseModel {
    enum class Correlation { common, independent };

    double nbar = 0.03;
    double intensity_sigma = 0.02;
    int shots = 1000;
    std::uint64_t seed = 20260811;
    Correlation correlation = Correlation::common;

    void validate() const;
};

/// Deterministic per-shot random stream: shot i draws from a substream derived
/// from (seed, i), so results do not depend on scheduling or worker count.
/// splitmix64 underneath; all mappings are implementation-independent.
class ShotRng {
  public:
    ShotRng(std::uint64_t seed, std::uint64_t shot);

    std::uint64_t next_u64();
    double uniform();                 // [0, 1)
    double normal();                  // standard normal (Box-Muller, no cache)

  private:
    std::uint64_t state_;
};

/// Bose-Einstein distributed phonon number p(n) = nbar^n / (1+nbar)^(n+1),
/// sampled by inverse CDF and clamped at the Fock cutoff (the truncated tail
/// mass lands on the cutoff state).
int sample_thermal_occupation(double nbar, ShotRng& rng, int cutoff);

/// Multiplicative coupling-scale factor ~ Normal(1, sigma), truncated to > 0.
double sample_intensity_factor(double sigma, ShotRng& rng);

/// Everything scaled by one laser-intensity draw: the JC couplings, the
/// sequence drive amplitudes, and the preparation-pulse amplitudes. Durations
/// stay nominal, so pulse-area errors propagate into the prepared state.
struct ScaledShotInputs {
    JchParams params;
    PulseSequence seq;
    InitialStateSpec init;
};
ScaledShotInputs apply_intensity(const JchParams& params, const PulseSequence& seq,
                                 const InitialStateSpec& init,
                                 std::span<const double> site_factors);

struct WindowStats {
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct EnsembleResult {
    TrajectoryRecord mean;     // shot-averaged observables
    TrajectoryRecord stderr_;  // standard error of each averaged point
    int shots = 0;
    std::pair<double, double> window_us{0.0, 0.0};
    // per-site window-averaged leakage statistics (shot-level averages)
    std::vector<WindowStats> polariton_leak;
    std::vector<WindowStats> phonon_leak;
};

/// Run one shot of the ensemble (exposed for the substream contract).
TrajectoryRecord run_single_shot(const PulseSequence& seq, const InitialStateSpec& init,
                                 const JchParams& params, const CompositeSpace& space,
                                 const NoiseModel& noise, std::uint64_t shot);

/// Monte Carlo ensemble: per shot draw thermal occupations and intensity
/// factor(s), prepare, propagate, and accumulate. Bit-reproducible for a fixed
/// seed independent of `workers` (fixed-size shot blocks merged in order).
EnsembleResult ensemble_run(const PulseSequence& seq, const InitialStateSpec& init,
                            const JchParams& params, const CompositeSpace& space,
                            const NoiseModel& noise, std::pair<double, double> window_us,
                            int workers = 0);

}  // namespace jch
