#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jch/hilbert.hpp"

namespace jch {

// Unit convention: every stored frequency is an ordinary frequency in kHz
// (value = angular frequency / 2π); times are in μs. The propagator applies
// the 2π and the kHz·μs scale factor, see kPhasePerKhzUs in dynamics.

/// Linear-chain geometry: ion positions along the trap axis.
struct ChainGeometry {
    double ion_mass_amu = 40.0;
    double radial_freq_khz = 2740.0;
    std::vector<double> positions_um = {0.0, 18.0};

    int n_sites() const { return static_cast<int>(positions_um.size()); }
    void validate() const;
};

/// Coulomb-mediated phonon exchange rate k/2π in kHz between two ions a
/// distance d apart: k = e² / (4π ε₀ m d³ ω), ω = 2π ν.
double hopping_rate(double d_um, double nu_khz, double mass_amu);

/// Full symmetric k_ij matrix (kHz) from chain geometry; k_ii = 0.
Eigen::MatrixXd hopping_matrix(const ChainGeometry& geom);

/// ω_i/2π = ν − Σ_{j≠i} k_ij / 2, per site (kHz).
std::vector<double> corrected_site_frequencies(double nu_khz, const Eigen::MatrixXd& k_khz);

struct JchParams {
    int n_sites = 2;
    std::vector<double> g_khz;        // per-site JC coupling g_i/2π
    std::vector<double> delta_khz;    // per-site detuning Δ_JC,i/2π
    Eigen::MatrixXd k_khz;            // symmetric hopping matrix, zero diagonal
    std::vector<double> omega_khz;    // site-corrected vibrational frequencies

    void validate() const;

    static JchParams two_site(double g, double delta1, double delta2, double k12,
                              double nu_khz = 2740.0);
};

/// JCH Hamiltonian in the frame rotating at the common vibrational frequency:
///   H = Σ_i Δ_i σ⁺σ⁻ + Σ_i g_i (a_i σ_i⁺ + a_i† σ_i⁻)
///     + Σ_{i<j} (k_ij/2) (a_i a_j† + a_i† a_j)
/// Conserves the total excitation number Σ_i (a_i†a_i + σ_i⁺σ_i⁻).
OperatorMatrix build_jch_hamiltonian(const JchParams& params, const CompositeSpace& space);

enum class DriveKind { carrier, rsb };

/// Single-site drive term. Carrier: (Ω/2)(e^{iφ} σ⁺ + h.c.) + Δ σ⁺σ⁻.
/// RSB: (Ω/2)(e^{iφ} a σ⁺ + h.c.) + Δ σ⁺σ⁻, i.e. the JC coupling g = Ω/2.
/// A Rabi frequency Ω gives a resonant population-oscillation period 1/Ω.
OperatorMatrix build_drive_hamiltonian(int site, DriveKind kind, double rabi_khz,
                                       double detuning_khz, double phase_rad,
                                       const CompositeSpace& space);

}  // namespace jch
