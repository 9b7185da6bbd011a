#include <doctest.h>

#include <cmath>

#include "jch/spectrum.hpp"

using namespace jch;

TEST_CASE("generalized Rabi frequency") {
    CHECK(generalized_rabi(0.0, 12.0, 1) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(generalized_rabi(-17.0, 0.0, 1) == doctest::Approx(17.0).epsilon(1e-15));
    CHECK(generalized_rabi(-24.0, 11.8, 1) ==
          doctest::Approx(std::sqrt(576.0 + 556.96)).epsilon(1e-15));
    CHECK(generalized_rabi(5.0, 11.8, 3) ==
          doctest::Approx(std::sqrt(25.0 + 4.0 * 11.8 * 11.8 * 3.0)).epsilon(1e-15));
    CHECK_THROWS_AS(generalized_rabi(0.0, 12.0, 0), ConfigError);
}

TEST_CASE("dressed-state eigenenergies against the reference rows") {
    const double g = 11.8;
    SUBCASE("detuning -24 kHz") {
        const JcEigen e = jc_eigen(-24.0, g, 1);
        CHECK(std::abs(e.e_minus - (-28.8)) < 0.05);
        CHECK(std::abs(e.e_plus - 4.8) < 0.05);
    }
    SUBCASE("resonance: +/- g") {
        const JcEigen e = jc_eigen(0.0, g, 1);
        CHECK(e.e_minus == doctest::Approx(-11.8).epsilon(1e-14));
        CHECK(e.e_plus == doctest::Approx(11.8).epsilon(1e-14));
    }
    SUBCASE("detuning -10 kHz") {
        const JcEigen e = jc_eigen(-10.0, g, 1);
        CHECK(std::abs(e.e_minus - (-17.8)) < 0.05);
        CHECK(std::abs(e.e_plus - 7.8) < 0.05);
    }
}

TEST_CASE("eigen identities") {
    const double g = 11.8;
    for (double delta : {-500.0, -24.0, -1.3, 0.0, 7.7, 24.0, 500.0})
        for (int p : {1, 2, 3}) {
            const JcEigen e = jc_eigen(delta, g, p);
            // trace and splitting identities
            CHECK(e.e_plus + e.e_minus == doctest::Approx(delta).epsilon(1e-12));
            CHECK(e.e_plus - e.e_minus ==
                  doctest::Approx(generalized_rabi(delta, g, p)).epsilon(1e-12));
            CHECK(e.e_minus <= e.e_plus);
            // orthonormal eigenvectors, |p,g> coefficient real and >= 0
            CHECK(e.v_minus.norm() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(e.v_plus.norm() == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(std::abs(e.v_minus.dot(e.v_plus)) < 1e-12);
            CHECK(e.v_minus(0).real() >= 0.0);
            CHECK(e.v_plus(0).real() >= 0.0);
            CHECK(e.v_minus(0).imag() == 0.0);
            // they diagonalize [[0, g√p], [g√p, Δ]]
            Eigen::Matrix2cd h;
            const double c = g * std::sqrt(double(p));
            h << 0.0, c, c, delta;
            CHECK((h * e.v_minus - e.e_minus * e.v_minus).norm() < 1e-10);
            CHECK((h * e.v_plus - e.e_plus * e.v_plus).norm() < 1e-10);
        }
}

TEST_CASE("resonant eigenvectors have equal weight") {
    const JcEigen e = jc_eigen(0.0, 11.8, 1);
    CHECK(std::abs(e.v_minus(0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(e.v_minus(1)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(e.v_plus(0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    // minus branch: opposite relative sign
    CHECK((e.v_minus(0) * e.v_minus(1)).real() < 0.0);
    CHECK((e.v_plus(0) * e.v_plus(1)).real() > 0.0);
}

TEST_CASE("mirror symmetry in the detuning") {
    for (double delta : {0.5, 3.0, 10.0, 24.0, 120.0}) {
        const JcEigen plus = jc_eigen(delta, 11.8, 1);
        const JcEigen minus = jc_eigen(-delta, 11.8, 1);
        CHECK(minus.e_minus == doctest::Approx(-plus.e_plus).epsilon(1e-12));
        CHECK(minus.e_plus == doctest::Approx(-plus.e_minus).epsilon(1e-12));
    }
}

TEST_CASE("gap table against the reference rows") {
    const double g = 11.8;
    SUBCASE("negative detunings, minus reference") {
        const double deltas[] = {-24.0, -10.0};
        const auto rows = gap_table(deltas, g, Branch::minus);
        REQUIRE(rows.size() == 2);
        CHECK(std::abs(rows[0].gap_low - 17.0) < 0.1);
        CHECK(std::abs(rows[0].gap_high - 16.6) < 0.1);
        CHECK(std::abs(rows[1].gap_low - 6.0) < 0.1);
        CHECK(std::abs(rows[1].gap_high - 19.5) < 0.1);
    }
    SUBCASE("positive detunings, plus reference") {
        const double deltas[] = {24.0};
        const auto rows = gap_table(deltas, g, Branch::plus);
        CHECK(std::abs(rows[0].gap_low - 16.6) < 0.1);
        CHECK(std::abs(rows[0].gap_high - 17.0) < 0.1);
    }
    SUBCASE("empty list rejected") {
        CHECK_THROWS_AS(gap_table({}, g, Branch::minus), ConfigError);
    }
}

TEST_CASE("smaller gap is largest at -24 kHz on the reference grid") {
    const double g = 11.8;
    const std::vector<double> grid = {-30, -28, -26, -24, -22, -20, -15};
    const auto rows = gap_table(grid, g, Branch::minus);
    double best = -1.0;
    double best_delta = 0.0;
    for (const auto& r : rows) {
        const double min_gap = std::min(r.gap_low, r.gap_high);
        if (min_gap > best) {
            best = min_gap;
            best_delta = r.delta2;
        }
    }
    CHECK(best_delta == -24.0);
    CHECK(std::abs(best - 16.6) < 0.1);
}
