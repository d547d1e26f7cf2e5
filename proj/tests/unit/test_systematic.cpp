#include <cmath>
#include <random>

#include "doctest.h"
#include "relaycode/systematic.hpp"

using namespace relaycode;

namespace {

// The published product form: Q_a Q_b Q_c (P1 P2)^(M-i-j+k), written out
// independently of the multinomial implementation.
double q_product_form(const ChannelParams& p, NetworkState s) {
    const unsigned m = p.m;
    const double qa =
        binomial(m, s.i - s.k) * std::pow((1 - p.p1) * p.p2, static_cast<double>(s.i - s.k));
    const double qb = binomial(m - (s.i - s.k), s.j - s.k) *
                      std::pow((1 - p.p2) * p.p1 * p.p3, static_cast<double>(s.j - s.k));
    const double qc = binomial(m - s.i - s.j + 2 * s.k, s.k) *
                      std::pow((1 - p.p2) * (1 - p.p1 * p.p3), static_cast<double>(s.k));
    return qa * qb * qc * std::pow(p.p1 * p.p2, static_cast<double>(m - s.i - s.j + s.k));
}

}  // namespace

TEST_CASE("binomial helper") {
    CHECK(binomial(8, 0) == 1.0);
    CHECK(binomial(8, 3) == 56.0);
    CHECK(binomial(60, 30) == doctest::Approx(1.18264581564861424e17).epsilon(1e-12));
    CHECK(binomial(100, 50) == doctest::Approx(1.00891344545564193e29).epsilon(1e-9));
    CHECK(binomial(4, 5) == 0.0);
}

TEST_CASE("first-stage distribution, M = 1 by hand") {
    const auto dist = first_stage_distribution({0.2, 0.2, 0.2, 1});
    CHECK(dist.at({1, 0, 0}) == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(dist.at({0, 1, 0}) == doctest::Approx(0.032).epsilon(1e-12));
    CHECK(dist.at({1, 1, 1}) == doctest::Approx(0.768).epsilon(1e-12));
    CHECK(dist.at({0, 0, 0}) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("all mass on the empty state when both source links always erase") {
    const auto dist = first_stage_distribution({1, 1, 0.3, 4});
    CHECK(dist.at({0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("reliable direct link concentrates mass on completed states") {
    const auto dist = first_stage_distribution({0, 0.4, 0.6, 6});
    double on_completed = 0;
    for (const auto& [s, q] : dist)
        if (s.i == 6) on_completed += q;
    CHECK(on_completed == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.at({0, 0, 0}) == 0.0);  // (P1 P2)^M with P1 = 0
}

TEST_CASE("distribution sums to one and matches the product form") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0, 1);
    for (int round = 0; round < 30; ++round) {
        const unsigned m = 1 + static_cast<unsigned>(rng() % 16);
        const ChannelParams params{u(rng), u(rng), u(rng), m};

        // The four per-packet outcome probabilities partition the slot.
        const double sum_outcomes = (1 - params.p1) * params.p2 +
                                    (1 - params.p2) * params.p1 * params.p3 +
                                    (1 - params.p2) * (1 - params.p1 * params.p3) +
                                    params.p1 * params.p2;
        CHECK(sum_outcomes == doctest::Approx(1.0).epsilon(1e-12));

        double total = 0;
        for (const auto& [s, q] : first_stage_distribution(params)) {
            CHECK(q >= 0.0);
            CHECK(std::abs(q - q_product_form(params, s)) <= 1e-12);
            total += q;
        }
        CHECK(std::abs(total - 1.0) <= 1e-12);
    }
}

TEST_CASE("systematic completion time") {
    CHECK(t_sys({0, 0.2, 0.2, 8}) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(t_sys({0.2, 1, 0.2, 8}) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(t_sys({0.2, 0.2, 0.2, 1}) == doctest::Approx(1.0763888888888888).epsilon(1e-12));
    CHECK_THROWS_AS(t_sys({1, 1, 0.2, 4}), NeverCompletesError);
}

TEST_CASE("uncoded gain formula and monotonicity") {
    const UncodedGain endpoint = expected_uncoded_gain({1, 0.2, 0.2, 8});
    CHECK(endpoint.expected_gain == doctest::Approx(5.12).epsilon(1e-12));
    CHECK(endpoint.fraction == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(expected_uncoded_gain({0.2, 0, 0.2, 8}).fraction == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(expected_uncoded_gain({0, 0.5, 0.5, 8}).expected_gain == 0.0);

    double previous = -1;
    for (double p1 = 0; p1 <= 1.0001; p1 += 0.1) {
        const double f = expected_uncoded_gain({p1, 0.3, 0.4, 8}).fraction;
        CHECK(f >= previous);
        previous = f;
    }
    previous = 2;
    for (double p2 = 0; p2 <= 1.0001; p2 += 0.1) {
        const double f = expected_uncoded_gain({0.3, p2, 0.4, 8}).fraction;
        CHECK(f <= previous);
        previous = f;
    }
    previous = 2;
    for (double p3 = 0; p3 <= 1.0001; p3 += 0.1) {
        const double f = expected_uncoded_gain({0.3, 0.4, p3, 8}).fraction;
        CHECK(f <= previous);
        previous = f;
    }
}
