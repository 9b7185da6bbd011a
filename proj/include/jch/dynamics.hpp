#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jch/model.hpp"
#include "jch/spectrum.hpp"

namespace jch {

/// Phase in radians accumulated per (kHz × μs) of energy × time.
inline constexpr double kPhasePerKhzUs = 2.0 * 3.14159265358979323846 * 1e-3;

/// Duration of a resonant carrier π pulse at Rabi frequency Ω (kHz) in μs.
double carrier_pi_duration_us(double rabi_khz);

/// Duration of a resonant sideband pulse of the given area (1.0 = π) at
/// RSB Rabi frequency Ω (kHz), starting from the one-quantum manifold.
double rsb_pulse_duration_us(double rabi_khz, double area_fraction);

struct DriveSpec {
    enum class Kind { off, carrier, rsb };
    Kind kind = Kind::off;
    double rabi_khz = 0.0;
    double detuning_khz = 0.0;
    double phase_rad = 0.0;

    static DriveSpec off() { return {}; }
    static DriveSpec carrier(double rabi, double detuning = 0.0, double phase = 0.0) {
        return {Kind::carrier, rabi, detuning, phase};
    }
    static DriveSpec rsb(double rabi, double detuning = 0.0, double phase = 0.0) {
        return {Kind::rsb, rabi, detuning, phase};
    }
};

/// One piecewise-constant slice of the pulse program: a drive per site plus
/// the always-present Coulomb hopping (switchable off for idealized runs).
struct PulseSegment {
    double duration_us = 0.0;
    std::vector<DriveSpec> drives;  // one entry per site
    bool include_hopping = true;

    /// The quantum-simulation step: resonant-or-detuned RSB drive on every
    /// site with rabi 2 g_i and detuning Δ_i, hopping on. Its Hamiltonian
    /// equals build_jch_hamiltonian(params, space).
    static PulseSegment simulation(const JchParams& params, double duration_us);
};

struct PulseSequence {
    std::vector<PulseSegment> segments;
    double dt_out_us = 1.0;

    double total_duration_us() const;
};

/// Hamiltonian of one segment: sum of per-site drive terms plus hopping.
OperatorMatrix segment_hamiltonian(const PulseSegment& seg, const JchParams& params,
                                   const CompositeSpace& space);

struct InitialStateSpec {
    enum class Mode { ideal, pulsed };
    enum class Variant { ground, bare, dressed, superposition };

    Mode mode = Mode::ideal;
    Variant variant = Variant::superposition;
    int site = 1;  // target site for dressed / superposition / pulsed

    // dressed
    int p = 1;
    Branch branch = Branch::minus;

    // bare: (spin, n) per site
    std::vector<std::pair<int, int>> bare_locals;

    // pulsed preparation: carrier π then RSB π/2 on `site`
    double carrier_rabi_khz = 600.0;
    double rsb_rabi_khz = 0.0;  // 0 -> use 2 g_site from params
    bool hopping_during_prep = true;
};

/// Build the initial state for one run. `thermal_n` gives per-site initial
/// phonon numbers drawn by the noise model (empty = all zero). For the ideal
/// variants the requested excitation is created on top of the thermal phonon
/// ladder: dressed(p) on n extra quanta becomes the p+n dressed state, the
/// superposition becomes (|n,e> - i|n+1,g>)/sqrt(2), a bare |n0,s> becomes
/// |n0+n,s>. Phonon numbers clamp at the Fock cutoff.
StateVector prepare_initial_thermal(const InitialStateSpec& spec, const CompositeSpace& space,
                                    const JchParams& params, std::span<const int> thermal_n);

StateVector prepare_initial(const InitialStateSpec& spec, const CompositeSpace& space,
                            const JchParams& params);

/// Time series of the standard per-site observables on a common grid.
struct TrajectoryRecord {
    struct SiteSeries {
        std::vector<double> p_e;          // population of |e>
        std::vector<double> p_ntot_ge1;   // P(N_tot >= 1)
        std::vector<double> p_ntot_ge2;   // P(N_tot >= 2)
        std::vector<double> p_nph_ge1;    // P(N_ph >= 1)
        std::vector<double> n_tot_mean;   // <N_tot>
    };
    std::vector<double> times_us;
    std::vector<SiteSeries> sites;
    std::optional<StateVector> final_state;  // single-shot runs only

    std::size_t n_samples() const { return times_us.size(); }
};

/// Exact propagation under a constant hermitian H via spectral decomposition:
/// psi(t) = exp(-i 2π H t) psi(0), sampled every dt_out.
TrajectoryRecord propagate_segment(const StateVector& psi, const OperatorMatrix& h,
                                   double duration_us, double dt_out_us);

TrajectoryRecord run_sequence(const PulseSequence& seq, const InitialStateSpec& init,
                              const JchParams& params, const CompositeSpace& space);

TrajectoryRecord run_sequence_from_state(const PulseSequence& seq, StateVector psi0,
                                         const JchParams& params, const CompositeSpace& space);

}  // namespace jch
