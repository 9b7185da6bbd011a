#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jch/errors.hpp"

namespace jch {

enum class Branch { minus, plus };

/// Ω_p(Δ) = sqrt(Δ² + 4 g² p), all in kHz.
double generalized_rabi(double delta_khz, double g_khz, int p);

/// Eigen-decomposition of the p-excitation JC block [[0, g√p], [g√p, Δ]]
/// over {|p,g>, |p-1,e>}. Energies are relative to the reference at the
/// vibrational frequency per excitation, so E_± = Δ/2 ± Ω_p/2.
/// Phase convention: the |p,g> coefficient of each eigenvector is real and
/// non-negative.
struct JcEigen {
    double e_minus;
    double e_plus;
    Eigen::Vector2cd v_minus;  // over {|p,g>, |p-1,e>}
    Eigen::Vector2cd v_plus;
};

JcEigen jc_eigen(double delta_khz, double g_khz, int p);

struct GapRow {
    double delta2;
    double e_minus2;
    double e_plus2;
    double gap_low;   // E_ref - E_minus,2
    double gap_high;  // E_plus,2 - E_ref
};

/// Gap columns relative to the resonant reference branch at the source site:
/// E_ref = -g for Branch::minus, +g for Branch::plus (p = 1).
std::vector<GapRow> gap_table(std::span<const double> delta2_khz, double g_khz,
                              Branch reference_branch);

}  // namespace jch
