#include "jch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace jch {

double carrier_pi_duration_us(double rabi_khz) {
    if (rabi_khz <= 0) throw ConfigError("carrier pulse needs a positive Rabi frequency");
    // P(e) = sin²(π Ω t), full transfer at t = 1/(2Ω); kHz -> μs gives the 500
    return 500.0 / rabi_khz;
}

double rsb_pulse_duration_us(double rabi_khz, double area_fraction) {
    if (rabi_khz <= 0) throw ConfigError("rsb pulse needs a positive Rabi frequency");
    if (area_fraction < 0) throw ConfigError("negative pulse area");
    return 500.0 * area_fraction / rabi_khz;
}

PulseSegment PulseSegment::simulation(const JchParams& params, double duration_us) {
    PulseSegment seg;
    seg.duration_us = duration_us;
    seg.include_hopping = true;
    seg.drives.reserve(params.n_sites);
    for (int i = 0; i < params.n_sites; ++i)
        seg.drives.push_back(DriveSpec::rsb(2.0 * params.g_khz[i], params.delta_khz[i]));
    return seg;
}

double PulseSequence::total_duration_us() const {
    double total = 0.0;
    for (const auto& s : segments) total += s.duration_us;
    return total;
}

OperatorMatrix segment_hamiltonian(const PulseSegment& seg, const JchParams& params,
                                   const CompositeSpace& space) {
    if (static_cast<int>(seg.drives.size()) != space.n_sites)
        throw ConfigError("segment needs one drive spec per site");
    if (seg.duration_us < 0) throw ConfigError("segment duration must be >= 0");

    const long d = space.dim();
    Matrix h = Matrix::Zero(d, d);
    for (int i = 0; i < space.n_sites; ++i) {
        const DriveSpec& dr = seg.drives[i];
        if (dr.kind == DriveSpec::Kind::off) continue;
        const DriveKind kind =
            (dr.kind == DriveSpec::Kind::carrier) ? DriveKind::carrier : DriveKind::rsb;
        h += build_drive_hamiltonian(i + 1, kind, dr.rabi_khz, dr.detuning_khz, dr.phase_rad,
                                     space)
                 .entries;
    }
    if (seg.include_hopping) {
        const LocalOps ops = make_local_ops(space.fock_cutoff);
        std::vector<Matrix> a(space.n_sites);
        for (int i = 0; i < space.n_sites; ++i)
            a[i] = embed_site_operator(ops.destroy, i + 1, space).entries;
        for (int i = 0; i < space.n_sites; ++i)
            for (int j = i + 1; j < space.n_sites; ++j)
                h += (params.k_khz(i, j) / 2.0) *
                     (a[i] * a[j].adjoint() + a[i].adjoint() * a[j]);
    }
    return {space, std::move(h), true};
}

namespace {

/// Spectral propagator for one constant segment.
class SegmentPropagator {
  public:
    explicit SegmentPropagator(const OperatorMatrix& h) {
        if (!h.hermitian_hint || !is_hermitian(h.entries))
            throw NumericalError("propagation requires a hermitian Hamiltonian");
        solver_.compute(h.entries);
        if (solver_.info() != Eigen::Success)
            throw NumericalError("eigendecomposition failed");
    }

    Vector evolve(const Vector& psi0, double t_us) const {
        const Eigen::ArrayXcd phases =
            (Complex(0.0, -kPhasePerKhzUs * t_us) * solver_.eigenvalues().array()).exp();
        return solver_.eigenvectors() *
               (phases * (solver_.eigenvectors().adjoint() * psi0).array()).matrix();
    }

  private:
    Eigen::SelfAdjointEigenSolver<Matrix> solver_;
};

/// Diagonal masks for the standard observables, one set per site.
struct ObservableMasks {
    struct Site {
        Eigen::ArrayXd e, ntot_ge1, ntot_ge2, nph_ge1, ntot;
    };
    std::vector<Site> sites;

    explicit ObservableMasks(const CompositeSpace& space) {
        const long d = space.dim();
        sites.resize(space.n_sites);
        for (int s = 0; s < space.n_sites; ++s) {
            auto& m = sites[s];
            m.e = m.ntot_ge1 = m.ntot_ge2 = m.nph_ge1 = m.ntot = Eigen::ArrayXd::Zero(d);
            for (long i = 0; i < d; ++i) {
                const int spin = space.spin_at(i, s + 1);
                const int nph = space.phonon_at(i, s + 1);
                const int ntot = spin + nph;
                m.e(i) = spin;
                m.ntot_ge1(i) = ntot >= 1;
                m.ntot_ge2(i) = ntot >= 2;
                m.nph_ge1(i) = nph >= 1;
                m.ntot(i) = ntot;
            }
        }
    }
};

void record_sample(TrajectoryRecord& rec, const ObservableMasks& masks, double t_us,
                   const Vector& psi) {
    const Eigen::ArrayXd p = psi.array().abs2();
    rec.times_us.push_back(t_us);
    for (std::size_t s = 0; s < masks.sites.size(); ++s) {
        const auto& m = masks.sites[s];
        auto& out = rec.sites[s];
        out.p_e.push_back((p * m.e).sum());
        out.p_ntot_ge1.push_back((p * m.ntot_ge1).sum());
        out.p_ntot_ge2.push_back((p * m.ntot_ge2).sum());
        out.p_nph_ge1.push_back((p * m.nph_ge1).sum());
        out.n_tot_mean.push_back((p * m.ntot).sum());
    }
}

int clamp_phonon(int n, int cutoff) { return std::min(n, cutoff); }

}  // namespace

StateVector prepare_initial_thermal(const InitialStateSpec& spec, const CompositeSpace& space,
                                    const JchParams& params, std::span<const int> thermal_n) {
    if (spec.site < 1 || spec.site > space.n_sites)
        throw ConfigError("initial state: target site out of range");
    std::vector<int> therm(space.n_sites, 0);
    if (!thermal_n.empty()) {
        if (static_cast<int>(thermal_n.size()) != space.n_sites)
            throw ConfigError("thermal occupation list needs one entry per site");
        for (int i = 0; i < space.n_sites; ++i)
            therm[i] = clamp_phonon(thermal_n[i], space.fock_cutoff);
    }
    const int cutoff = space.fock_cutoff;

    if (spec.mode == InitialStateSpec::Mode::pulsed) {
        // thermal bare start, carrier π then RSB π/2 on the target site
        if (cutoff < 1) throw ConfigError("pulsed preparation needs fock_cutoff >= 1");
        std::vector<int> locals(space.n_sites);
        for (int i = 0; i < space.n_sites; ++i) locals[i] = space.local_index(0, therm[i]);
        StateVector psi = StateVector::basis_state(space, locals);

        const double rsb_rabi = (spec.rsb_rabi_khz > 0)
                                    ? spec.rsb_rabi_khz
                                    : 2.0 * params.g_khz[spec.site - 1];
        PulseSegment carrier;
        carrier.duration_us = carrier_pi_duration_us(spec.carrier_rabi_khz);
        carrier.drives.assign(space.n_sites, DriveSpec::off());
        carrier.drives[spec.site - 1] = DriveSpec::carrier(spec.carrier_rabi_khz);
        carrier.include_hopping = spec.hopping_during_prep;

        PulseSegment rsb;
        rsb.duration_us = rsb_pulse_duration_us(rsb_rabi, 0.5);
        rsb.drives.assign(space.n_sites, DriveSpec::off());
        rsb.drives[spec.site - 1] = DriveSpec::rsb(rsb_rabi);
        rsb.include_hopping = spec.hopping_during_prep;

        for (const auto& seg : {carrier, rsb}) {
            SegmentPropagator prop(segment_hamiltonian(seg, params, space));
            psi.amps = prop.evolve(psi.amps, seg.duration_us);
        }
        return psi;
    }

    // ideal variants: place the requested excitation on top of the thermal ladder
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    std::vector<int> locals(space.n_sites);
    for (int i = 0; i < space.n_sites; ++i) locals[i] = space.local_index(0, therm[i]);

    StateVector psi = StateVector::zero(space);
    switch (spec.variant) {
        case InitialStateSpec::Variant::ground: {
            psi.amps(space.encode(locals)) = 1.0;
            break;
        }
        case InitialStateSpec::Variant::bare: {
            if (static_cast<int>(spec.bare_locals.size()) != space.n_sites)
                throw ConfigError("bare initial state needs (spin, n) for every site");
            for (int i = 0; i < space.n_sites; ++i) {
                const auto [s, n] = spec.bare_locals[i];
                locals[i] = space.local_index(s, clamp_phonon(n + therm[i], cutoff));
            }
            psi.amps(space.encode(locals)) = 1.0;
            break;
        }
        case InitialStateSpec::Variant::dressed: {
            if (spec.p < 1) throw ConfigError("dressed state needs p >= 1");
            if (spec.p > cutoff)
                throw ConfigError("dressed state p=" + std::to_string(spec.p) +
                                  " exceeds fock_cutoff");
            const int tgt = spec.site - 1;
            const int p_eff = std::min(spec.p + therm[tgt], cutoff);
            const JcEigen eig =
                jc_eigen(params.delta_khz[tgt], params.g_khz[tgt], p_eff);
            const Eigen::Vector2cd v =
                (spec.branch == Branch::minus) ? eig.v_minus : eig.v_plus;
            locals[tgt] = space.local_index(0, p_eff);
            const long idx_g = space.encode(locals);
            locals[tgt] = space.local_index(1, p_eff - 1);
            const long idx_e = space.encode(locals);
            psi.amps(idx_g) = v(0);
            psi.amps(idx_e) = v(1);
            break;
        }
        case InitialStateSpec::Variant::superposition: {
            if (cutoff < 1) throw ConfigError("superposition state needs fock_cutoff >= 1");
            const int tgt = spec.site - 1;
            const int n0 = std::min(therm[tgt], cutoff - 1);
            locals[tgt] = space.local_index(1, n0);
            const long idx_e = space.encode(locals);
            locals[tgt] = space.local_index(0, n0 + 1);
            const long idx_g = space.encode(locals);
            psi.amps(idx_e) = inv_sqrt2;                 // |n,e>
            psi.amps(idx_g) = Complex(0.0, -inv_sqrt2);  // -i |n+1,g>
            break;
        }
    }
    psi.check_normalized();
    return psi;
}

StateVector prepare_initial(const InitialStateSpec& spec, const CompositeSpace& space,
                            const JchParams& params) {
    return prepare_initial_thermal(spec, space, params, {});
}

TrajectoryRecord propagate_segment(const StateVector& psi, const OperatorMatrix& h,
                                   double duration_us, double dt_out_us) {
    if (duration_us < 0) throw ConfigError("segment duration must be >= 0");
    if (dt_out_us <= 0) throw ConfigError("dt_out must be positive");
    if (!(h.space == psi.space)) throw ConfigError("propagate: operator/state space mismatch");

    const ObservableMasks masks(psi.space);
    SegmentPropagator prop(h);
    TrajectoryRecord rec;
    rec.sites.resize(psi.space.n_sites);

    const double eps = 1e-9;
    for (long m = 0;; ++m) {
        const double t = m * dt_out_us;
        if (t > duration_us + eps) break;
        record_sample(rec, masks, t, prop.evolve(psi.amps, t));
    }
    StateVector fin{psi.space, prop.evolve(psi.amps, duration_us)};
    rec.final_state = std::move(fin);
    return rec;
}

TrajectoryRecord run_sequence_from_state(const PulseSequence& seq, StateVector psi0,
                                         const JchParams& params, const CompositeSpace& space) {
    if (seq.segments.empty()) throw ConfigError("pulse sequence is empty");
    if (seq.dt_out_us <= 0) throw ConfigError("dt_out must be positive");
    if (!(psi0.space == space)) throw ConfigError("run_sequence: state/space mismatch");

    const ObservableMasks masks(space);
    TrajectoryRecord rec;
    rec.sites.resize(space.n_sites);

    const double eps = 1e-9;
    record_sample(rec, masks, 0.0, psi0.amps);

    double seg_start = 0.0;
    long next_sample = 1;
    for (const auto& seg : seq.segments) {
        const SegmentPropagator prop(segment_hamiltonian(seg, params, space));
        const double seg_end = seg_start + seg.duration_us;
        while (next_sample * seq.dt_out_us <= seg_end + eps) {
            const double t = next_sample * seq.dt_out_us;
            record_sample(rec, masks, t, prop.evolve(psi0.amps, t - seg_start));
            ++next_sample;
        }
        psi0.amps = prop.evolve(psi0.amps, seg.duration_us);
        seg_start = seg_end;
    }
    rec.final_state = std::move(psi0);
    return rec;
}

TrajectoryRecord run_sequence(const PulseSequence& seq, const InitialStateSpec& init,
                              const JchParams& params, const CompositeSpace& space) {
    return run_sequence_from_state(seq, prepare_initial(init, space, params), params, space);
}

}  // namespace jch
