#include "jch/hilbert.hpp"

#include <cmath>
#include <string>

namespace jch {

CompositeSpace::CompositeSpace(int n_sites_, int fock_cutoff_)
    : n_sites(n_sites_), fock_cutoff(fock_cutoff_) {
    if (n_sites < 1) throw ConfigError("n_sites must be >= 1, got " + std::to_string(n_sites));
    if (fock_cutoff < 0)
        throw ConfigError("fock_cutoff must be >= 0, got " + std::to_string(fock_cutoff));
    // keep the dense-matrix regime sane
    if (dim() > 1 << 20) throw ConfigError("composite space dimension too large for dense algebra");
}

long CompositeSpace::dim() const {
    long d = 1;
    for (int i = 0; i < n_sites; ++i) d *= local_dim();
    return d;
}

int CompositeSpace::local_index(int spin, int n) const {
    if (spin < 0 || spin > 1) throw ConfigError("spin index must be 0 or 1");
    if (n < 0 || n > fock_cutoff) throw ConfigError("phonon number exceeds fock_cutoff");
    return spin * (fock_cutoff + 1) + n;
}

long CompositeSpace::encode(std::span<const int> locals) const {
    if (static_cast<int>(locals.size()) != n_sites)
        throw ConfigError("encode: expected one local index per site");
    long idx = 0;
    for (int i = 0; i < n_sites; ++i) {
        if (locals[i] < 0 || locals[i] >= local_dim())
            throw ConfigError("encode: local index out of range");
        idx = idx * local_dim() + locals[i];
    }
    return idx;
}

std::vector<int> CompositeSpace::decode(long global) const {
    if (global < 0 || global >= dim()) throw ConfigError("decode: global index out of range");
    std::vector<int> locals(n_sites);
    for (int i = n_sites - 1; i >= 0; --i) {
        locals[i] = static_cast<int>(global % local_dim());
        global /= local_dim();
    }
    return locals;
}

int CompositeSpace::spin_at(long global, int site) const {
    return decode(global)[site - 1] / (fock_cutoff + 1);
}

int CompositeSpace::phonon_at(long global, int site) const {
    return decode(global)[site - 1] % (fock_cutoff + 1);
}

void StateVector::check_normalized() const {
    const double n = norm();
    if (std::abs(n - 1.0) > kNormTol)
        throw NumericalError("state norm " + std::to_string(n) + " outside tolerance");
}

StateVector StateVector::zero(const CompositeSpace& space) {
    return {space, Vector::Zero(space.dim())};
}

StateVector StateVector::ground(const CompositeSpace& space) {
    StateVector psi = zero(space);
    psi.amps(0) = 1.0;
    return psi;
}

StateVector StateVector::basis_state(const CompositeSpace& space, std::span<const int> locals) {
    StateVector psi = zero(space);
    psi.amps(space.encode(locals)) = 1.0;
    return psi;
}

bool is_hermitian(const Matrix& m, double rel_tol) {
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale == 0.0) return true;
    return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

LocalOps make_local_ops(int cutoff) {
    if (cutoff < 0) throw ConfigError("make_local_ops: cutoff must be >= 0");
    const int nf = cutoff + 1;
    Matrix a = Matrix::Zero(nf, nf);
    for (int n = 1; n <= cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix sl = Matrix::Zero(2, 2);
    sl(0, 1) = 1.0;  // |g><e| in (g, e) ordering

    const Matrix i2 = Matrix::Identity(2, 2);
    const Matrix iph = Matrix::Identity(nf, nf);
    LocalOps ops;
    ops.destroy = Matrix::Zero(2 * nf, 2 * nf);
    ops.spin_lower = Matrix::Zero(2 * nf, 2 * nf);
    // spin-major local ordering: l = spin * (cutoff+1) + n
    for (int s = 0; s < 2; ++s)
        for (int sp = 0; sp < 2; ++sp)
            for (int n = 0; n < nf; ++n)
                for (int np = 0; np < nf; ++np) {
                    ops.destroy(s * nf + n, sp * nf + np) = i2(s, sp) * a(n, np);
                    ops.spin_lower(s * nf + n, sp * nf + np) = sl(s, sp) * iph(n, np);
                }
    return ops;
}

OperatorMatrix embed_site_operator(const Matrix& op, int site, const CompositeSpace& space) {
    if (site < 1 || site > space.n_sites)
        throw ConfigError("embed_site_operator: site " + std::to_string(site) + " out of range");
    if (op.rows() != space.local_dim() || op.cols() != space.local_dim())
        throw ConfigError("embed_site_operator: operator dimension does not match local space");

    const long d = space.dim();
    const int ld = space.local_dim();
    long inner = 1;  // product of dims of sites after `site`
    for (int j = site; j < space.n_sites; ++j) inner *= ld;
    const long outer = d / (inner * ld);

    Matrix out = Matrix::Zero(d, d);
    for (long o = 0; o < outer; ++o)
        for (int r = 0; r < ld; ++r)
            for (int c = 0; c < ld; ++c) {
                if (op(r, c) == 0.0) continue;
                const long row0 = (o * ld + r) * inner;
                const long col0 = (o * ld + c) * inner;
                for (long in = 0; in < inner; ++in) out(row0 + in, col0 + in) = op(r, c);
            }
    return {space, std::move(out), is_hermitian(op)};
}

double expectation(const OperatorMatrix& op, const StateVector& psi) {
    if (!(op.space == psi.space)) throw ConfigError("expectation: operator/state space mismatch");
    if (!op.hermitian_hint || !is_hermitian(op.entries))
        throw NumericalError("expectation requires a hermitian operator");
    const Complex val = psi.amps.dot(op.entries * psi.amps);
    if (std::abs(val.imag()) > 1e-10)
        throw NumericalError("expectation: imaginary residue " + std::to_string(val.imag()));
    return val.real();
}

OperatorMatrix projector_ge(int site, CountKind kind, int threshold, const CompositeSpace& space) {
    if (site < 1 || site > space.n_sites) throw ConfigError("projector_ge: site out of range");
    if (threshold < 1) throw ConfigError("projector_ge: threshold must be >= 1");
    const long d = space.dim();
    Matrix out = Matrix::Zero(d, d);
    for (long i = 0; i < d; ++i) {
        const int count = (kind == CountKind::polariton)
                              ? space.spin_at(i, site) + space.phonon_at(i, site)
                              : space.phonon_at(i, site);
        if (count >= threshold) out(i, i) = 1.0;
    }
    return {space, std::move(out), true};
}

OperatorMatrix site_number_operator(int site, CountKind kind, const CompositeSpace& space) {
    if (site < 1 || site > space.n_sites)
        throw ConfigError("site_number_operator: site out of range");
    const long d = space.dim();
    Matrix out = Matrix::Zero(d, d);
    for (long i = 0; i < d; ++i) {
        const int count = (kind == CountKind::polariton)
                              ? space.spin_at(i, site) + space.phonon_at(i, site)
                              : space.phonon_at(i, site);
        out(i, i) = static_cast<double>(count);
    }
    return {space, std::move(out), true};
}

}  // namespace jch
