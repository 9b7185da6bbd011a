#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jch/dynamics.hpp"

using namespace jch;

namespace {

// independent matrix exponential (scaling and squaring + Taylor), used as the
// closed-form oracle for the single-excitation block; deliberately avoids the
// library's spectral propagator
Eigen::Matrix4cd expm4(Eigen::Matrix4cd m) {
    int squarings = 0;
    double norm = m.cwiseAbs().sum();
    while (norm > 0.25) {
        m *= 0.5;
        norm *= 0.5;
        ++squarings;
    }
    Eigen::Matrix4cd result = Eigen::Matrix4cd::Identity();
    Eigen::Matrix4cd term = Eigen::Matrix4cd::Identity();
    for (int k = 1; k <= 24; ++k) {
        term = (term * m) / static_cast<double>(k);
        result += term;
    }
    for (int i = 0; i < squarings; ++i) result = result * result;
    return result;
}

struct SingleExcitationBasis {
    long idx[4];  // {|e g;00>, |g g;10>, |g g;01>, |g e;00>}

    explicit SingleExcitationBasis(const CompositeSpace& space) {
        const int b[4][2] = {{space.local_index(1, 0), space.local_index(0, 0)},
                             {space.local_index(0, 1), space.local_index(0, 0)},
                             {space.local_index(0, 0), space.local_index(0, 1)},
                             {space.local_index(0, 0), space.local_index(1, 0)}};
        for (int i = 0; i < 4; ++i) idx[i] = space.encode(b[i]);
    }
};

Eigen::Matrix4cd single_excitation_block(double g1, double g2, double d1, double d2,
                                         double k) {
    Eigen::Matrix4cd h;
    h << d1, g1, 0, 0,
         g1, 0, k / 2, 0,
         0, k / 2, 0, g2,
         0, 0, g2, d2;
    return h;
}

std::vector<double> peak_positions(const std::vector<double>& t,
                                   const std::vector<double>& y) {
    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] >= y[i - 1] && y[i] > y[i + 1]) peaks.push_back(t[i]);
    return peaks;
}

}  // namespace

TEST_CASE("pulse durations") {
    CHECK(carrier_pi_duration_us(600.0) == doctest::Approx(0.8333333).epsilon(1e-6));
    CHECK(rsb_pulse_duration_us(23.6, 0.5) == doctest::Approx(10.59322).epsilon(1e-6));
    CHECK(rsb_pulse_duration_us(23.6, 1.0) == doctest::Approx(21.18644).epsilon(1e-6));
    CHECK_THROWS_AS(carrier_pi_duration_us(0.0), ConfigError);
}

TEST_CASE("initial state preparation") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, -24.0, 5.9);

    SUBCASE("ground") {
        InitialStateSpec spec;
        spec.variant = InitialStateSpec::Variant::ground;
        const StateVector psi = prepare_initial(spec, space, params);
        CHECK(psi.amps(0) == Complex(1.0, 0.0));
        CHECK(psi.norm() == doctest::Approx(1.0));
    }

    SUBCASE("superposition (|0,e> - i|1,g>)/sqrt(2) at site 1") {
        InitialStateSpec spec;  // default
        const StateVector psi = prepare_initial(spec, space, params);
        const int e_locals[2] = {space.local_index(1, 0), space.local_index(0, 0)};
        const int g_locals[2] = {space.local_index(0, 1), space.local_index(0, 0)};
        CHECK(psi.amps(space.encode(e_locals)).real() ==
              doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(psi.amps(space.encode(g_locals)).imag() ==
              doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-14));
        CHECK(psi.amps.cwiseAbs2().sum() == doctest::Approx(1.0));
    }

    SUBCASE("dressed |1,-> at site 1 matches the spectrum eigenvector") {
        InitialStateSpec spec;
        spec.variant = InitialStateSpec::Variant::dressed;
        const StateVector psi = prepare_initial(spec, space, params);
        const JcEigen eig = jc_eigen(0.0, 11.8, 1);
        const int g1_locals[2] = {space.local_index(0, 1), space.local_index(0, 0)};
        const int e0_locals[2] = {space.local_index(1, 0), space.local_index(0, 0)};
        CHECK(psi.amps(space.encode(g1_locals)) == eig.v_minus(0));
        CHECK(psi.amps(space.encode(e0_locals)) == eig.v_minus(1));
    }

    SUBCASE("dressed p beyond the cutoff is rejected") {
        InitialStateSpec spec;
        spec.variant = InitialStateSpec::Variant::dressed;
        spec.p = 3;
        CHECK_THROWS_AS(prepare_initial(spec, space, params), ConfigError);
    }

    SUBCASE("thermal occupation raises the ladder") {
        InitialStateSpec spec;
        spec.variant = InitialStateSpec::Variant::dressed;
        const int therm[2] = {1, 2};
        const StateVector psi = prepare_initial_thermal(spec, space, params, therm);
        // site 1: p = 2 dressed state; site 2: |g,2>
        const JcEigen eig = jc_eigen(0.0, 11.8, 2);
        const int g2_locals[2] = {space.local_index(0, 2), space.local_index(0, 2)};
        const int e1_locals[2] = {space.local_index(1, 1), space.local_index(0, 2)};
        CHECK(psi.amps(space.encode(g2_locals)) == eig.v_minus(0));
        CHECK(psi.amps(space.encode(e1_locals)) == eig.v_minus(1));
    }

    SUBCASE("pulsed preparation reproduces the ideal superposition") {
        InitialStateSpec pulsed;
        pulsed.mode = InitialStateSpec::Mode::pulsed;
        pulsed.hopping_during_prep = false;
        const StateVector got = prepare_initial(pulsed, space, params);

        InitialStateSpec ideal;  // superposition
        const StateVector want = prepare_initial(ideal, space, params);
        const double fidelity = std::norm(want.amps.dot(got.amps));
        CHECK(fidelity >= 0.999);
    }

    SUBCASE("pulsed preparation with hopping on stays close to ideal") {
        InitialStateSpec pulsed;
        pulsed.mode = InitialStateSpec::Mode::pulsed;
        pulsed.hopping_during_prep = true;
        const StateVector got = prepare_initial(pulsed, space, params);
        InitialStateSpec ideal;
        const StateVector want = prepare_initial(ideal, space, params);
        const double fidelity = std::norm(want.amps.dot(got.amps));
        // hopping leaks a little amplitude during the ~11.4 us of pulses
        CHECK(fidelity >= 0.995);
        CHECK(fidelity <= 1.0 + 1e-12);
    }
}

TEST_CASE("segment propagation basics") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, 0.0, 5.9);
    const auto h = build_jch_hamiltonian(params, space);
    InitialStateSpec init;
    const StateVector psi0 = prepare_initial(init, space, params);

    SUBCASE("zero duration leaves the state unchanged") {
        const auto rec = propagate_segment(psi0, h, 0.0, 1.0);
        CHECK(rec.n_samples() == 1);
        CHECK((rec.final_state->amps - psi0.amps).norm() < 1e-14);
    }
    SUBCASE("zero Hamiltonian keeps the state constant") {
        OperatorMatrix zero{space, Matrix::Zero(space.dim(), space.dim()), true};
        const auto rec = propagate_segment(psi0, zero, 250.0, 50.0);
        CHECK((rec.final_state->amps - psi0.amps).norm() < 1e-12);
        for (std::size_t i = 0; i < rec.n_samples(); ++i)
            CHECK(rec.sites[0].p_e[i] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("non-hermitian Hamiltonian rejected") {
        OperatorMatrix bad{space, Matrix::Zero(space.dim(), space.dim()), true};
        bad.entries(0, 1) = 1.0;
        CHECK_THROWS_AS(propagate_segment(psi0, bad, 1.0, 1.0), NumericalError);
    }
}

TEST_CASE("single-excitation dynamics match the independent 4x4 oracle") {
    CompositeSpace space(2, 2);
    const double g = 11.8, k = 5.9;
    const double table_grid[] = {-500, -100, -50, -30, -28, -26, -24, -22,
                                 -20,  -15,  -10, 0,   10,  24,  500};

    for (double d2 : table_grid) {
        JchParams params = JchParams::two_site(g, 0.0, d2, k);
        const SingleExcitationBasis basis(space);
        const Eigen::Matrix4cd h4 = single_excitation_block(g, g, 0.0, d2, k);

        // dressed |1,-> at site 1: (|1,g> - |0,e>)/sqrt(2)
        Eigen::Vector4cd v0;
        v0 << -1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0, 0.0;

        InitialStateSpec init;
        init.variant = InitialStateSpec::Variant::dressed;
        PulseSequence seq;
        seq.segments.push_back(PulseSegment::simulation(params, 400.0));
        seq.dt_out_us = 1.0;
        const TrajectoryRecord rec = run_sequence(seq, init, params, space);

        // replay the full run against the oracle at a few sample times
        double max_err = 0.0;
        const Complex minus_i(0.0, -1.0);
        for (std::size_t m = 0; m < rec.n_samples(); m += 7) {
            const double t = rec.times_us[m];
            const Eigen::Matrix4cd u = expm4(minus_i * kPhasePerKhzUs * t * h4);
            const Eigen::Vector4cd expected = u * v0;
            // compare the recorded observables derived from these amplitudes
            const double p_e1 = std::norm(expected(0));
            const double p_ntot2 = std::norm(expected(2)) + std::norm(expected(3));
            max_err = std::max(max_err, std::abs(rec.sites[0].p_e[m] - p_e1));
            max_err = std::max(max_err, std::abs(rec.sites[1].p_ntot_ge1[m] - p_ntot2));
        }
        CHECK(max_err <= 1e-8);

        // amplitude-level agreement of the final state
        const Eigen::Matrix4cd u400 = expm4(minus_i * kPhasePerKhzUs * 400.0 * h4);
        const Eigen::Vector4cd expected = u400 * v0;
        for (int i = 0; i < 4; ++i)
            CHECK(std::abs(rec.final_state->amps(basis.idx[i]) - expected(i)) <= 1e-8);
    }
}

TEST_CASE("resonant two-site run shows the fast and envelope periods") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, 0.0, 5.9);
    InitialStateSpec init;  // superposition at site 1
    PulseSequence seq;
    seq.segments.push_back(PulseSegment::simulation(params, 800.0));
    const TrajectoryRecord rec = run_sequence(seq, init, params, space);

    // fast oscillation of P(e) at site 1: period 1/(2g) ≈ 42.4 us
    const auto fast_peaks = peak_positions(rec.times_us, rec.sites[0].p_e);
    REQUIRE(fast_peaks.size() >= 8);
    std::vector<double> spacings;
    for (std::size_t i = 1; i < fast_peaks.size(); ++i)
        spacings.push_back(fast_peaks[i] - fast_peaks[i - 1]);
    std::sort(spacings.begin(), spacings.end());
    const double fast_period = spacings[spacings.size() / 2];
    CHECK(std::abs(fast_period - 1000.0 / 23.6) < 4.0);

    // envelope exchange: <N_tot,1> returns with period 2/k ≈ 339 us
    // (smooth over one fast period first, the series carries interference
    // ripples at the dressed splitting)
    const int w = static_cast<int>(std::lround(fast_period));
    std::vector<double> smooth(rec.n_samples(), 0.0);
    for (std::size_t i = 0; i < rec.n_samples(); ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int j = -w / 2; j <= w / 2; ++j) {
            const long m = static_cast<long>(i) + j;
            if (m >= 0 && m < static_cast<long>(rec.n_samples())) {
                acc += rec.sites[0].n_tot_mean[m];
                ++cnt;
            }
        }
        smooth[i] = acc / cnt;
    }
    std::vector<double> t_int(rec.times_us.begin() + w, rec.times_us.end() - w);
    std::vector<double> y_int(smooth.begin() + w, smooth.end() - w);
    const auto env_peaks = peak_positions(t_int, y_int);
    REQUIRE(env_peaks.size() >= 2);
    const double env_period = env_peaks[1] - env_peaks[0];
    CHECK(std::abs(env_period - 2000.0 / 5.9) < 34.0);  // within 10%
}

TEST_CASE("detuned site 2 blocks the excitation") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, -20.0, 5.9);
    InitialStateSpec init;
    PulseSequence seq;
    seq.segments.push_back(PulseSegment::simulation(params, 400.0));
    const TrajectoryRecord rec = run_sequence(seq, init, params, space);
    for (double v : rec.sites[1].p_e) CHECK(v < 0.25);
}

TEST_CASE("zero hopping decouples the sites exactly") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, 0.0, 0.0);
    InitialStateSpec init;
    PulseSequence seq;
    seq.segments.push_back(PulseSegment::simulation(params, 400.0));
    const TrajectoryRecord rec = run_sequence(seq, init, params, space);
    for (std::size_t i = 0; i < rec.n_samples(); ++i) {
        CHECK(rec.sites[1].p_ntot_ge1[i] <= 1e-14);
        CHECK(rec.sites[1].p_e[i] <= 1e-14);
    }
}

TEST_CASE("conservation laws and reversibility") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, -24.0, 5.9);
    const auto h = build_jch_hamiltonian(params, space);
    InitialStateSpec init;
    const StateVector psi0 = prepare_initial(init, space, params);

    SUBCASE("norm drift below 1e-9 over 1000 output steps") {
        const auto rec = propagate_segment(psi0, h, 1000.0, 1.0);
        CHECK(rec.n_samples() == 1001);
        CHECK(std::abs(rec.final_state->norm() - 1.0) < 1e-9);
    }
    SUBCASE("<N_tot> and <H> constant within a segment") {
        const auto ntot1 = site_number_operator(1, CountKind::polariton, space);
        const auto ntot2 = site_number_operator(2, CountKind::polariton, space);
        const auto rec = propagate_segment(psi0, h, 400.0, 40.0);
        const double n0 = expectation(ntot1, psi0) + expectation(ntot2, psi0);
        const double h0 = expectation(h, psi0);
        for (std::size_t i = 0; i < rec.n_samples(); ++i) {
            const double n_t = rec.sites[0].n_tot_mean[i] + rec.sites[1].n_tot_mean[i];
            CHECK(std::abs(n_t - n0) < 1e-9);
        }
        StateVector fin = *rec.final_state;
        CHECK(std::abs(expectation(h, fin) - h0) < 1e-9);
    }
    SUBCASE("forward then backward propagation returns the initial state") {
        const auto fwd = propagate_segment(psi0, h, 400.0, 400.0);
        OperatorMatrix neg{space, -h.entries, true};
        const auto back = propagate_segment(*fwd.final_state, neg, 400.0, 400.0);
        CHECK((back.final_state->amps - psi0.amps).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("sequences stitch segments on a continuous time axis") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, 0.0, 5.9);
    InitialStateSpec init;

    PulseSequence seq;
    PulseSegment first = PulseSegment::simulation(params, 130.5);
    PulseSegment second = PulseSegment::simulation(params, 269.5);
    seq.segments = {first, second};
    const TrajectoryRecord split = run_sequence(seq, init, params, space);

    PulseSequence whole;
    whole.segments.push_back(PulseSegment::simulation(params, 400.0));
    const TrajectoryRecord joined = run_sequence(whole, init, params, space);

    REQUIRE(split.n_samples() == joined.n_samples());
    for (std::size_t i = 0; i < split.n_samples(); ++i) {
        CHECK(split.times_us[i] == doctest::Approx(joined.times_us[i]).epsilon(1e-12));
        CHECK(split.sites[0].p_e[i] == doctest::Approx(joined.sites[0].p_e[i]).epsilon(1e-9));
    }
    CHECK((split.final_state->amps - joined.final_state->amps).cwiseAbs().maxCoeff() < 1e-9);

    // times strictly increasing, probabilities in range
    for (std::size_t i = 1; i < split.n_samples(); ++i)
        CHECK(split.times_us[i] > split.times_us[i - 1]);
    for (int s = 0; s < 2; ++s)
        for (double v : split.sites[s].p_ntot_ge1) {
            CHECK(v >= -1e-12);
            CHECK(v <= 1.0 + 1e-12);
        }
}

TEST_CASE("simulation segment equals the assembled JCH Hamiltonian") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, -17.0, 5.9);
    const auto seg = PulseSegment::simulation(params, 100.0);
    const auto h_seg = segment_hamiltonian(seg, params, space);
    const auto h_jch = build_jch_hamiltonian(params, space);
    CHECK((h_seg.entries - h_jch.entries).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("empty sequences are rejected") {
    CompositeSpace space(2, 2);
    JchParams params = JchParams::two_site(11.8, 0.0, 0.0, 5.9);
    InitialStateSpec init;
    PulseSequence seq;
    CHECK_THROWS_AS(run_sequence(seq, init, params, space), ConfigError);
}
