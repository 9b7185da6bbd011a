#include "jch/analysis.hpp"

#include <cmath>

namespace jch {

namespace {

const std::vector<double>& series_for(const TrajectoryRecord& traj, int site, CountKind kind) {
    if (site < 1 || site > static_cast<int>(traj.sites.size()))
        throw ConfigError("leakage: site out of range");
    const auto& s = traj.sites[site - 1];
    return kind == CountKind::polariton ? s.p_ntot_ge1 : s.p_nph_ge1;
}

JchParams with_delta2(const JchParams& params, double delta2) {
    JchParams p = params;
    if (p.n_sites < 2) throw ConfigError("detuning sweep needs at least two sites");
    p.delta_khz[1] = delta2;
    return p;
}

}  // namespace

LeakageResult time_averaged_leakage(const TrajectoryRecord& traj, int site, CountKind kind,
                                    std::pair<double, double> window_us) {
    if (window_us.second < window_us.first) throw ConfigError("window end before start");
    if (traj.times_us.empty()) throw ConfigError("empty trajectory");
    const double eps = 1e-9;
    if (window_us.first < traj.times_us.front() - eps ||
        window_us.second > traj.times_us.back() + eps)
        throw ConfigError("averaging window outside the trajectory");

    const auto& series = series_for(traj, site, kind);
    LeakageResult out;
    out.window_us = window_us;
    double sum = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < traj.times_us.size(); ++i) {
        const double t = traj.times_us[i];
        if (t >= window_us.first - eps && t <= window_us.second + eps) {
            sum += series[i];
            ++count;
            out.times_us.push_back(t);
            out.series.push_back(series[i]);
        }
    }
    if (count == 0) throw ConfigError("averaging window contains no samples");
    out.mean_leakage = sum / static_cast<double>(count);
    return out;
}

LeakageResult time_averaged_leakage(const EnsembleResult& ens, int site, CountKind kind) {
    if (site < 1 || site > static_cast<int>(ens.mean.sites.size()))
        throw ConfigError("leakage: site out of range");
    LeakageResult out = time_averaged_leakage(ens.mean, site, kind, ens.window_us);
    const auto& stats = (kind == CountKind::polariton ? ens.polariton_leak : ens.phonon_leak);
    out.stderr_ = stats[site - 1].stderr_;
    // shot-level mean must agree with the series mean (linearity); keep the
    // accumulator value, it is the documented one
    out.mean_leakage = stats[site - 1].mean;
    return out;
}

std::vector<SweepRow> detuning_sweep(std::span<const double> delta2_khz,
                                     const InitialStateSpec& init, const JchParams& params,
                                     const CompositeSpace& space, const NoiseModel& noise,
                                     const SweepSettings& settings) {
    if (delta2_khz.empty()) throw ConfigError("detuning sweep: empty detuning list");
    const Branch ref = settings.reference_branch.value_or(
        init.variant == InitialStateSpec::Variant::dressed
            ? init.branch
            : (delta2_khz.front() <= 0 ? Branch::minus : Branch::plus));
    const double g2 = params.g_khz.at(1);

    std::vector<SweepRow> rows;
    rows.reserve(delta2_khz.size());
    for (double d2 : delta2_khz) {
        const JchParams p = with_delta2(params, d2);
        const JcEigen eig = jc_eigen(d2, g2, 1);
        const double e_ref = (ref == Branch::minus) ? -params.g_khz.at(0) : params.g_khz.at(0);

        SweepRow row{d2, eig.e_minus, eig.e_plus, e_ref - eig.e_minus, eig.e_plus - e_ref,
                     0.0, 0.0};
        PulseSequence seq;
        seq.dt_out_us = settings.dt_out_us;
        seq.segments.push_back(PulseSegment::simulation(p, settings.window_us.second));
        if (settings.noiseless) {
            const TrajectoryRecord traj = run_sequence(seq, init, p, space);
            row.mean_leakage =
                time_averaged_leakage(traj, 2, CountKind::polariton, settings.window_us)
                    .mean_leakage;
        } else {
            const EnsembleResult ens = ensemble_run(seq, init, p, space, noise,
                                                    settings.window_us, settings.workers);
            const LeakageResult leak = time_averaged_leakage(ens, 2, CountKind::polariton);
            row.mean_leakage = leak.mean_leakage;
            row.stderr_ = leak.stderr_.value_or(0.0);
        }
        rows.push_back(row);
    }
    return rows;
}

double noiseless_leakage(double delta2_khz, const InitialStateSpec& init,
                         const JchParams& params, const CompositeSpace& space,
                         std::pair<double, double> window_us, double dt_out_us) {
    const JchParams p = with_delta2(params, delta2_khz);
    PulseSequence seq;
    seq.dt_out_us = dt_out_us;
    seq.segments.push_back(PulseSegment::simulation(p, window_us.second));
    const TrajectoryRecord traj = run_sequence(seq, init, p, space);
    return time_averaged_leakage(traj, 2, CountKind::polariton, window_us).mean_leakage;
}

MinSearchResult find_min_detuning(double lo_khz, double hi_khz, const InitialStateSpec& init,
                                  const JchParams& params, const CompositeSpace& space,
                                  std::pair<double, double> window_us, double grid_step_khz,
                                  double dt_out_us) {
    if (!(hi_khz > lo_khz)) throw ConfigError("find_min_detuning: degenerate range");
    if (grid_step_khz <= 0) throw ConfigError("find_min_detuning: grid step must be positive");

    auto objective = [&](double d2) {
        const double v = noiseless_leakage(d2, init, params, space, window_us, dt_out_us);
        if (!std::isfinite(v)) throw NumericalError("non-finite leakage objective");
        return v;
    };

    double best_d = lo_khz;
    double best_v = objective(lo_khz);
    for (double d = lo_khz + grid_step_khz; d <= hi_khz + 1e-12; d += grid_step_khz) {
        const double v = objective(d);
        if (v < best_v) {
            best_v = v;
            best_d = d;
        }
    }

    // golden-section refinement inside the bracketing grid cell pair
    double a = std::max(lo_khz, best_d - grid_step_khz);
    double b = std::min(hi_khz, best_d + grid_step_khz);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (b - a > 1e-3) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = objective(x2);
        }
    }
    const double d_star = (a + b) / 2.0;
    return {d_star, objective(d_star)};
}

BlockadeReport blockade_comparison(const JchParams& params, const CompositeSpace& space,
                                   const NoiseModel& noise,
                                   std::pair<double, double> window_us, double dt_out_us,
                                   int workers) {
    if (params.n_sites < 2) throw ConfigError("blockade comparison needs two sites");

    // polariton blockade: dressed |1,-> at site 1, blocked site detuned to -24 kHz
    JchParams pol = params;
    pol.delta_khz[0] = 0.0;
    pol.delta_khz[1] = -24.0;
    InitialStateSpec init_pol;
    init_pol.variant = InitialStateSpec::Variant::dressed;
    init_pol.site = 1;
    init_pol.p = 1;
    init_pol.branch = Branch::minus;

    // phonon blockade: bare phonon at site 1, source beam off, blocked site resonant
    JchParams pho = params;
    pho.g_khz[0] = 0.0;
    pho.delta_khz[0] = 0.0;
    pho.delta_khz[1] = 0.0;
    InitialStateSpec init_pho;
    init_pho.variant = InitialStateSpec::Variant::bare;
    init_pho.site = 1;
    init_pho.bare_locals.assign(space.n_sites, {0, 0});
    init_pho.bare_locals[0] = {0, 1};

    auto run_case = [&](const JchParams& p, const InitialStateSpec& init, bool noisy,
                        double* mean, double* se) {
        PulseSequence seq;
        seq.dt_out_us = dt_out_us;
        seq.segments.push_back(PulseSegment::simulation(p, window_us.second));
        if (noisy) {
            const EnsembleResult ens =
                ensemble_run(seq, init, p, space, noise, window_us, workers);
            const LeakageResult leak = time_averaged_leakage(ens, 2, CountKind::polariton);
            *mean = leak.mean_leakage;
            *se = leak.stderr_.value_or(0.0);
        } else {
            const TrajectoryRecord traj = run_sequence(seq, init, p, space);
            *mean = time_averaged_leakage(traj, 2, CountKind::polariton, window_us)
                        .mean_leakage;
            *se = 0.0;
        }
    };

    BlockadeReport rep{};
    double se_dummy = 0.0;
    run_case(pol, init_pol, false, &rep.polariton_noiseless, &se_dummy);
    run_case(pho, init_pho, false, &rep.phonon_noiseless, &se_dummy);
    run_case(pol, init_pol, true, &rep.polariton_noisy, &rep.polariton_noisy_stderr);
    run_case(pho, init_pho, true, &rep.phonon_noisy, &rep.phonon_noisy_stderr);
    rep.ratio_noiseless = rep.phonon_noiseless / rep.polariton_noiseless;
    return rep;
}

}  // namespace jch
