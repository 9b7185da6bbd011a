#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "jch/errors.hpp"

namespace jch {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianRelTol = 1e-12;
inline constexpr double kNormTol = 1e-9;

/// Truncated tensor-product space for an N-site chain: two internal levels
/// (g, e) times Fock levels 0..fock_cutoff per site.
///
/// Per-site local index: l = spin * (fock_cutoff + 1) + n, spin in {0 (g), 1 (e)}.
/// Global index: sum_i l_i * prod_{j > i} local_dim, site 1 outermost.
/// Sites are 1-based throughout the public interface.
struct CompositeSpace {
    int n_sites;
    int fock_cutoff;

    CompositeSpace(int n_sites_, int fock_cutoff_);

    int local_dim() const { return 2 * (fock_cutoff + 1); }
    long dim() const;

    int local_index(int spin, int n) const;
    long encode(std::span<const int> locals) const;
    std::vector<int> decode(long global) const;

    /// Spin (0/1) and phonon number of basis state `global` at `site` (1-based).
    int spin_at(long global, int site) const;
    int phonon_at(long global, int site) const;

    bool operator==(const CompositeSpace&) const = default;
};

struct StateVector {
    CompositeSpace space;
    Vector amps;

    double norm() const { return amps.norm(); }
    void check_normalized() const;

    static StateVector zero(const CompositeSpace& space);
    static StateVector ground(const CompositeSpace& space);
    static StateVector basis_state(const CompositeSpace& space, std::span<const int> locals);
};

struct OperatorMatrix {
    CompositeSpace space;
    Matrix entries;
    bool hermitian_hint = false;
};

bool is_hermitian(const Matrix& m, double rel_tol = kHermitianRelTol);

struct LocalOps {
    Matrix destroy;      // a on the phonon factor, identity on spin
    Matrix spin_lower;   // |g><e| on the spin factor, identity on phonons
};

/// Ladder and spin-lowering operators on one site's local space.
LocalOps make_local_ops(int cutoff);

/// Lift a local-space operator to the full chain: acts as `op` on `site`
/// (1-based) and as identity elsewhere.
OperatorMatrix embed_site_operator(const Matrix& op, int site, const CompositeSpace& space);

/// <psi|op|psi> for hermitian `op`; throws if the imaginary residue exceeds 1e-10.
double expectation(const OperatorMatrix& op, const StateVector& psi);

enum class CountKind { polariton, phonon };

/// Diagonal projector onto basis states whose site-local count
/// (spin + n for polariton, n for phonon) is >= threshold.
OperatorMatrix projector_ge(int site, CountKind kind, int threshold, const CompositeSpace& space);

/// Site-local number operator: N_tot,i = a†a + σ+σ- or N_ph,i = a†a.
OperatorMatrix site_number_operator(int site, CountKind kind, const CompositeSpace& space);

}  // namespace jch
