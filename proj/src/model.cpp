#include "jch/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace jch {

namespace {
// CODATA 2018
constexpr double kElementaryCharge = 1.602176634e-19;   // C (exact)
constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
constexpr double kAtomicMassKg = 1.66053906660e-27;       // kg
}  // namespace

void ChainGeometry::validate() const {
    if (ion_mass_amu <= 0) throw ConfigError("ion mass must be positive");
    if (radial_freq_khz <= 0) throw ConfigError("radial frequency must be positive");
    if (positions_um.size() < 1) throw ConfigError("geometry needs at least one ion position");
    for (std::size_t i = 0; i < positions_um.size(); ++i)
        for (std::size_t j = i + 1; j < positions_um.size(); ++j)
            if (positions_um[i] == positions_um[j])
                throw ConfigError("ion positions must be distinct");
}

double hopping_rate(double d_um, double nu_khz, double mass_amu) {
    if (d_um <= 0) throw ConfigError("hopping_rate: distance must be positive");
    if (nu_khz <= 0) throw ConfigError("hopping_rate: frequency must be positive");
    if (mass_amu <= 0) throw ConfigError("hopping_rate: mass must be positive");
    const double d = d_um * 1e-6;
    const double m = mass_amu * kAtomicMassKg;
    const double omega = 2.0 * std::numbers::pi * nu_khz * 1e3;
    const double k_angular =
        kElementaryCharge * kElementaryCharge /
        (4.0 * std::numbers::pi * kVacuumPermittivity * m * d * d * d * omega);
    return k_angular / (2.0 * std::numbers::pi) / 1e3;
}

Eigen::MatrixXd hopping_matrix(const ChainGeometry& geom) {
    geom.validate();
    const int n = geom.n_sites();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(geom.positions_um[i] - geom.positions_um[j]);
            k(i, j) = k(j, i) = hopping_rate(d, geom.radial_freq_khz, geom.ion_mass_amu);
        }
    return k;
}

std::vector<double> corrected_site_frequencies(double nu_khz, const Eigen::MatrixXd& k_khz) {
    if (k_khz.rows() != k_khz.cols()) throw ConfigError("hopping matrix must be square");
    if (!k_khz.isApprox(k_khz.transpose(), 1e-12))
        throw ConfigError("hopping matrix must be symmetric");
    const int n = static_cast<int>(k_khz.rows());
    std::vector<double> omega(n);
    for (int i = 0; i < n; ++i) {
        double corr = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != i) corr += k_khz(i, j) / 2.0;
        omega[i] = nu_khz - corr;
    }
    return omega;
}

void JchParams::validate() const {
    if (n_sites < 1) throw ConfigError("n_sites must be >= 1");
    if (static_cast<int>(g_khz.size()) != n_sites ||
        static_cast<int>(delta_khz.size()) != n_sites)
        throw ConfigError("g and delta need one entry per site");
    if (k_khz.rows() != n_sites || k_khz.cols() != n_sites)
        throw ConfigError("hopping matrix must be n_sites x n_sites");
    if (!k_khz.isApprox(k_khz.transpose(), 1e-12))
        throw ConfigError("hopping matrix must be symmetric");
    for (int i = 0; i < n_sites; ++i)
        if (k_khz(i, i) != 0.0) throw ConfigError("hopping matrix diagonal must be zero");
    for (double v : g_khz)
        if (!std::isfinite(v)) throw ConfigError("non-finite coupling");
    for (double v : delta_khz)
        if (!std::isfinite(v)) throw ConfigError("non-finite detuning");
    if (!k_khz.allFinite()) throw ConfigError("non-finite hopping entry");
}

JchParams JchParams::two_site(double g, double delta1, double delta2, double k12,
                              double nu_khz) {
    JchParams p;
    p.n_sites = 2;
    p.g_khz = {g, g};
    p.delta_khz = {delta1, delta2};
    p.k_khz = Eigen::MatrixXd::Zero(2, 2);
    p.k_khz(0, 1) = p.k_khz(1, 0) = k12;
    p.omega_khz = corrected_site_frequencies(nu_khz, p.k_khz);
    return p;
}

OperatorMatrix build_jch_hamiltonian(const JchParams& params, const CompositeSpace& space) {
    params.validate();
    if (params.n_sites != space.n_sites)
        throw ConfigError("build_jch_hamiltonian: params/space site-count mismatch");

    const LocalOps ops = make_local_ops(space.fock_cutoff);
    const long d = space.dim();
    Matrix h = Matrix::Zero(d, d);

    std::vector<Matrix> a(space.n_sites), sm(space.n_sites);
    for (int i = 0; i < space.n_sites; ++i) {
        a[i] = embed_site_operator(ops.destroy, i + 1, space).entries;
        sm[i] = embed_site_operator(ops.spin_lower, i + 1, space).entries;
    }

    for (int i = 0; i < space.n_sites; ++i) {
        const Matrix sp = sm[i].adjoint();
        h += params.delta_khz[i] * (sp * sm[i]);
        h += params.g_khz[i] * (a[i] * sp + a[i].adjoint() * sm[i]);
    }
    for (int i = 0; i < space.n_sites; ++i)
        for (int j = i + 1; j < space.n_sites; ++j)
            h += (params.k_khz(i, j) / 2.0) *
                 (a[i] * a[j].adjoint() + a[i].adjoint() * a[j]);

    if (!is_hermitian(h)) throw NumericalError("assembled JCH Hamiltonian is not hermitian");
    return {space, std::move(h), true};
}

OperatorMatrix build_drive_hamiltonian(int site, DriveKind kind, double rabi_khz,
                                       double detuning_khz, double phase_rad,
                                       const CompositeSpace& space) {
    if (site < 1 || site > space.n_sites)
        throw ConfigError("build_drive_hamiltonian: site out of range");
    if (rabi_khz < 0) throw ConfigError("build_drive_hamiltonian: negative Rabi frequency");

    const LocalOps ops = make_local_ops(space.fock_cutoff);
    const Matrix sm = embed_site_operator(ops.spin_lower, site, space).entries;
    const Matrix sp = sm.adjoint();
    const Complex phase = std::exp(Complex(0.0, phase_rad));

    Matrix h = detuning_khz * (sp * sm);
    if (kind == DriveKind::carrier) {
        const Matrix term = (rabi_khz / 2.0) * phase * sp;
        h += term + term.adjoint();
    } else {
        const Matrix a = embed_site_operator(ops.destroy, site, space).entries;
        const Matrix term = (rabi_khz / 2.0) * phase * (a * sp);
        h += term + term.adjoint();
    }
    if (!is_hermitian(h)) throw NumericalError("drive Hamiltonian is not hermitian");
    return {space, std::move(h), true};
}

}  // namespace jch
