#include "jch/spectrum.hpp"

#include <cmath>

namespace jch {

double generalized_rabi(double delta_khz, double g_khz, int p) {
    if (p < 1) throw ConfigError("generalized_rabi: excitation number must be >= 1");
    return std::sqrt(delta_khz * delta_khz + 4.0 * g_khz * g_khz * p);
}

JcEigen jc_eigen(double delta_khz, double g_khz, int p) {
    if (p < 1) throw ConfigError("jc_eigen: excitation number must be >= 1");
    const double omega = generalized_rabi(delta_khz, g_khz, p);
    JcEigen out;
    out.e_minus = delta_khz / 2.0 - omega / 2.0;
    out.e_plus = delta_khz / 2.0 + omega / 2.0;

    // eigenvectors of [[0, c], [c, Δ]], c = g√p
    const double c = g_khz * std::sqrt(static_cast<double>(p));
    auto vec_for = [&](double e) {
        Eigen::Vector2cd v;
        // (H - e) v = 0  =>  -e v0 + c v1 = 0
        if (std::abs(c) < 1e-300) {
            // decoupled: eigenstates are the bare kets
            v = (std::abs(e) < std::abs(e - delta_khz)) ? Eigen::Vector2cd(1.0, 0.0)
                                                        : Eigen::Vector2cd(0.0, 1.0);
        } else {
            v << c, e;
            v.normalize();
        }
        if (v(0).real() < 0) v = -v;  // |p,g> coefficient real, non-negative
        return v;
    };
    out.v_minus = vec_for(out.e_minus);
    out.v_plus = vec_for(out.e_plus);
    return out;
}

std::vector<GapRow> gap_table(std::span<const double> delta2_khz, double g_khz,
                              Branch reference_branch) {
    if (delta2_khz.empty()) throw ConfigError("gap_table: empty detuning list");
    const double e_ref = (reference_branch == Branch::minus) ? -g_khz : g_khz;
    std::vector<GapRow> rows;
    rows.reserve(delta2_khz.size());
    for (double d2 : delta2_khz) {
        const JcEigen eig = jc_eigen(d2, g_khz, 1);
        rows.push_back({d2, eig.e_minus, eig.e_plus, e_ref - eig.e_minus, eig.e_plus - e_ref});
    }
    return rows;
}

}  // namespace jch
