#include "jch/noise.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

namespace jch {

void NoiseModel::validate() const {
    if (nbar < 0) throw ConfigError("nbar must be >= 0");
    if (intensity_sigma < 0) throw ConfigError("intensity_sigma must be >= 0");
    if (shots < 1) throw ConfigError("shots must be >= 1");
}

namespace {
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}  // namespace

ShotRng::ShotRng(std::uint64_t seed, std::uint64_t shot)
    : state_(mix64(seed) ^ mix64(shot * kGamma + 0xD1B54A32D192ED03ULL)) {}

std::uint64_t ShotRng::next_u64() {
    state_ += kGamma;
    return mix64(state_);
}

double ShotRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double ShotRng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * std::numbers::pi * u2);
}

int sample_thermal_occupation(double nbar, ShotRng& rng, int cutoff) {
    if (nbar < 0) throw ConfigError("nbar must be >= 0");
    const double u = rng.uniform();  // consumed even for nbar = 0
    if (nbar == 0.0 || cutoff == 0) return 0;
    const double log_r = std::log(nbar / (1.0 + nbar));
    // P(N <= n) = 1 - r^(n+1)  =>  n = floor(log(1-u) / log r)
    const int n = static_cast<int>(std::floor(std::log1p(-u) / log_r));
    return std::min(std::max(n, 0), cutoff);
}

double sample_intensity_factor(double sigma, ShotRng& rng) {
    if (sigma < 0) throw ConfigError("intensity_sigma must be >= 0");
    double f = 1.0 + sigma * rng.normal();
    while (f <= 0.0) f = 1.0 + sigma * rng.normal();
    return f;
}

ScaledShotInputs apply_intensity(const JchParams& params, const PulseSequence& seq,
                                 const InitialStateSpec& init,
                                 std::span<const double> site_factors) {
    if (static_cast<int>(site_factors.size()) != params.n_sites)
        throw ConfigError("apply_intensity: one factor per site required");
    ScaledShotInputs out{params, seq, init};
    for (int i = 0; i < params.n_sites; ++i) out.params.g_khz[i] *= site_factors[i];
    for (auto& seg : out.seq.segments) {
        if (seg.drives.size() != site_factors.size())
            throw ConfigError("apply_intensity: segment drive count mismatch");
        for (std::size_t i = 0; i < seg.drives.size(); ++i)
            seg.drives[i].rabi_khz *= site_factors[i];
    }
    const double f_target = site_factors[init.site - 1];
    out.init.carrier_rabi_khz *= f_target;
    if (out.init.rsb_rabi_khz > 0) out.init.rsb_rabi_khz *= f_target;
    return out;
}

namespace {

struct ShotDraws {
    std::vector<int> thermal_n;
    std::vector<double> factors;
};

ShotDraws draw_shot(const NoiseModel& noise, const CompositeSpace& space, std::uint64_t shot) {
    ShotRng rng(noise.seed, shot);
    ShotDraws d;
    d.thermal_n.resize(space.n_sites);
    for (int i = 0; i < space.n_sites; ++i)
        d.thermal_n[i] = sample_thermal_occupation(noise.nbar, rng, space.fock_cutoff);
    d.factors.resize(space.n_sites);
    if (noise.correlation == NoiseModel::Correlation::common) {
        const double f = sample_intensity_factor(noise.intensity_sigma, rng);
        std::fill(d.factors.begin(), d.factors.end(), f);
    } else {
        for (int i = 0; i < space.n_sites; ++i)
            d.factors[i] = sample_intensity_factor(noise.intensity_sigma, rng);
    }
    return d;
}

double window_average(const std::vector<double>& times, const std::vector<double>& series,
                      std::pair<double, double> window) {
    const double eps = 1e-9;
    double sum = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] >= window.first - eps && times[i] <= window.second + eps) {
            sum += series[i];
            ++count;
        }
    }
    if (count == 0) throw ConfigError("averaging window contains no samples");
    return sum / static_cast<double>(count);
}

constexpr int kShotBlock = 16;

// per-block running sums; merged sequentially in block order so the result is
// independent of which worker computed which block
struct BlockAccum {
    std::vector<double> sum, sumsq;           // flattened series, sites x 5 x T
    std::vector<double> leak_sum, leak_sumsq;  // sites x 2 (polariton, phonon)

    void init(std::size_t series_len, int n_sites) {
        sum.assign(series_len, 0.0);
        sumsq.assign(series_len, 0.0);
        leak_sum.assign(static_cast<std::size_t>(n_sites) * 2, 0.0);
        leak_sumsq.assign(static_cast<std::size_t>(n_sites) * 2, 0.0);
    }
};

void flatten_series(const TrajectoryRecord& rec, std::vector<double>& out) {
    out.clear();
    for (const auto& site : rec.sites)
        for (const auto* v :
             {&site.p_e, &site.p_ntot_ge1, &site.p_ntot_ge2, &site.p_nph_ge1, &site.n_tot_mean})
            out.insert(out.end(), v->begin(), v->end());
}

}  // namespace

TrajectoryRecord run_single_shot(const PulseSequence& seq, const InitialStateSpec& init,
                                 const JchParams& params, const CompositeSpace& space,
                                 const NoiseModel& noise, std::uint64_t shot) {
    const ShotDraws draws = draw_shot(noise, space, shot);
    const ScaledShotInputs in = apply_intensity(params, seq, init, draws.factors);
    StateVector psi0 = prepare_initial_thermal(in.init, space, in.params, draws.thermal_n);
    return run_sequence_from_state(in.seq, std::move(psi0), in.params, space);
}

EnsembleResult ensemble_run(const PulseSequence& seq, const InitialStateSpec& init,
                            const JchParams& params, const CompositeSpace& space,
                            const NoiseModel& noise, std::pair<double, double> window_us,
                            int workers) {
    noise.validate();
    params.validate();
    if (window_us.second < window_us.first) throw ConfigError("window end before start");

    // one reference shot fixes the grid layout
    TrajectoryRecord ref = run_single_shot(seq, init, params, space, noise, 0);
    const std::size_t n_t = ref.n_samples();
    const std::size_t series_len = static_cast<std::size_t>(space.n_sites) * 5 * n_t;

    const int shots = noise.shots;
    const int n_blocks = (shots + kShotBlock - 1) / kShotBlock;
    std::vector<BlockAccum> blocks(n_blocks);

    std::atomic<int> next_block{0};
    auto worker_fn = [&]() {
        std::vector<double> flat;
        for (;;) {
            const int b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            BlockAccum& acc = blocks[b];
            acc.init(series_len, space.n_sites);
            const int lo = b * kShotBlock;
            const int hi = std::min(shots, lo + kShotBlock);
            for (int shot = lo; shot < hi; ++shot) {
                const TrajectoryRecord rec =
                    (shot == 0) ? ref
                                : run_single_shot(seq, init, params, space, noise,
                                                  static_cast<std::uint64_t>(shot));
                if (rec.n_samples() != n_t)
                    throw NumericalError("inconsistent sample grid across shots");
                flatten_series(rec, flat);
                for (std::size_t i = 0; i < series_len; ++i) {
                    acc.sum[i] += flat[i];
                    acc.sumsq[i] += flat[i] * flat[i];
                }
                for (int s = 0; s < space.n_sites; ++s) {
                    const double lp =
                        window_average(rec.times_us, rec.sites[s].p_ntot_ge1, window_us);
                    const double lf =
                        window_average(rec.times_us, rec.sites[s].p_nph_ge1, window_us);
                    acc.leak_sum[s * 2] += lp;
                    acc.leak_sumsq[s * 2] += lp * lp;
                    acc.leak_sum[s * 2 + 1] += lf;
                    acc.leak_sumsq[s * 2 + 1] += lf * lf;
                }
            }
        }
    };

    int n_workers = workers > 0 ? workers
                                : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = std::min(n_workers, n_blocks);
    if (n_workers == 1) {
        worker_fn();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker_fn);
        for (auto& t : pool) t.join();
    }

    // merge in fixed block order
    std::vector<double> sum(series_len, 0.0), sumsq(series_len, 0.0);
    std::vector<double> leak_sum(space.n_sites * 2, 0.0), leak_sumsq(space.n_sites * 2, 0.0);
    for (const auto& acc : blocks) {
        for (std::size_t i = 0; i < series_len; ++i) {
            sum[i] += acc.sum[i];
            sumsq[i] += acc.sumsq[i];
        }
        for (std::size_t i = 0; i < leak_sum.size(); ++i) {
            leak_sum[i] += acc.leak_sum[i];
            leak_sumsq[i] += acc.leak_sumsq[i];
        }
    }

    const double n = static_cast<double>(shots);
    auto stderr_of = [&](double s, double sq) {
        if (shots < 2) return 0.0;
        const double var = std::max(0.0, (sq - s * s / n) / (n - 1.0));
        return std::sqrt(var / n);
    };

    EnsembleResult out;
    out.shots = shots;
    out.window_us = window_us;
    out.mean.times_us = ref.times_us;
    out.stderr_.times_us = ref.times_us;
    out.mean.sites.resize(space.n_sites);
    out.stderr_.sites.resize(space.n_sites);
    std::size_t idx = 0;
    for (int s = 0; s < space.n_sites; ++s) {
        auto fill = [&](std::vector<double> TrajectoryRecord::SiteSeries::* member) {
            auto& mean_v = out.mean.sites[s].*member;
            auto& se_v = out.stderr_.sites[s].*member;
            mean_v.resize(n_t);
            se_v.resize(n_t);
            for (std::size_t t = 0; t < n_t; ++t, ++idx) {
                mean_v[t] = sum[idx] / n;
                se_v[t] = stderr_of(sum[idx], sumsq[idx]);
            }
        };
        fill(&TrajectoryRecord::SiteSeries::p_e);
        fill(&TrajectoryRecord::SiteSeries::p_ntot_ge1);
        fill(&TrajectoryRecord::SiteSeries::p_ntot_ge2);
        fill(&TrajectoryRecord::SiteSeries::p_nph_ge1);
        fill(&TrajectoryRecord::SiteSeries::n_tot_mean);
    }
    out.polariton_leak.resize(space.n_sites);
    out.phonon_leak.resize(space.n_sites);
    for (int s = 0; s < space.n_sites; ++s) {
        out.polariton_leak[s] = {leak_sum[s * 2] / n,
                                 stderr_of(leak_sum[s * 2], leak_sumsq[s * 2])};
        out.phonon_leak[s] = {leak_sum[s * 2 + 1] / n,
                              stderr_of(leak_sum[s * 2 + 1], leak_sumsq[s * 2 + 1])};
    }
    return out;
}

}  // namespace jch
