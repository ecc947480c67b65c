#include <doctest.h>

#include <cmath>
#include <limits>

#include "uavsim/channel.hpp"
#include "uavsim/errors.hpp"

using namespace uavsim;

TEST_CASE("los probability sigmoid") {
    RadioParams params;  // a=9.61 b=0.16
    SUBCASE("degenerate a=0 gives certainty") {
        params.los_sigmoid_a = 0.0;
        CHECK(los_probability(45.0, params) == doctest::Approx(1.0));
    }
    SUBCASE("reference values") {
        CHECK(los_probability(90.0, params) == doctest::Approx(0.999975074537903).epsilon(1e-12));
        CHECK(los_probability(10.0, params) == doctest::Approx(0.0997141956352968).epsilon(1e-12));
    }
    SUBCASE("nondecreasing in elevation") {
        RngStream rng(5);
        for (int i = 0; i < 2000; ++i) {
            double t1 = 0.1 + 89.9 * uniform01(rng);
            double t2 = 0.1 + 89.9 * uniform01(rng);
            if (t1 > t2)
                std::swap(t1, t2);
            CHECK(los_probability(t1, params) <= los_probability(t2, params) + 1e-15);
        }
    }
}

TEST_CASE("u2n expected gain") {
    SUBCASE("intercept-only at reference distance, pure LoS") {
        RadioParams params;
        params.los_sigmoid_a = 0.0;  // P(LoS) = 1
        params.pathloss_intercept_los_db = 30.0;
        const double g = u2n_expected_gain({0, 0, 1}, {0, 0, 0}, params);
        CHECK(g == doctest::Approx(1e-3).epsilon(1e-12));
    }
    SUBCASE("inverse-square scaling on the pure-LoS path") {
        RadioParams params;
        params.los_sigmoid_a = 0.0;
        params.pathloss_exponent_los = 2.0;
        const double g1 = u2n_expected_gain({0, 0, 100}, {0, 0, 0}, params);
        const double g2 = u2n_expected_gain({0, 0, 200}, {0, 0, 0}, params);
        CHECK(g2 / g1 == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("mixed LoS/NLoS at d=200, elevation 30, defaults") {
        RadioParams params;
        const double horizontal = 200.0 * std::cos(30.0 * M_PI / 180.0);
        const Point3 uav{horizontal, 0.0, 100.0};
        const Point3 bs{0, 0, 0};
        CHECK(distance(uav, bs) == doctest::Approx(200.0));
        CHECK(u2n_expected_gain(uav, bs, params) ==
              doctest::Approx(5.03117380538815e-10).epsilon(1e-9));
    }
    SUBCASE("sub-reference distances are rejected") {
        RadioParams params;
        CHECK_THROWS_AS(u2n_expected_gain({0, 0, 0.5}, {0, 0, 0}, params), DomainError);
    }
    SUBCASE("strictly decreasing along a fixed-elevation ray") {
        RadioParams params;
        RngStream rng(17);
        for (int i = 0; i < 200; ++i) {
            const double theta = (5.0 + 80.0 * uniform01(rng)) * M_PI / 180.0;
            const double d1 = 2.0 + 500.0 * uniform01(rng);
            const double d2 = d1 * (1.01 + uniform01(rng));
            const Point3 p1{d1 * std::cos(theta), 0, d1 * std::sin(theta)};
            const Point3 p2{d2 * std::cos(theta), 0, d2 * std::sin(theta)};
            CHECK(u2n_expected_gain(p1, {0, 0, 0}, params) >
                  u2n_expected_gain(p2, {0, 0, 0}, params));
        }
    }
}

TEST_CASE("u2u gain") {
    RadioParams params;
    SUBCASE("intercept-only") {
        params.u2u_intercept_db = 40.0;
        CHECK(u2u_gain({0, 0, 50}, {1, 0, 50}, params) == doctest::Approx(1e-4).epsilon(1e-12));
    }
    SUBCASE("square-law doubling") {
        params.u2u_pathloss_exponent = 2.0;
        const double g1 = u2u_gain({0, 0, 50}, {100, 0, 50}, params);
        const double g2 = u2u_gain({0, 0, 50}, {200, 0, 50}, params);
        CHECK(g2 / g1 == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("defaults at 500 m") {
        CHECK(u2u_gain({0, 0, 80}, {500, 0, 80}, params) ==
              doctest::Approx(1.84974342003744e-10).epsilon(1e-9));
    }
    SUBCASE("zero-distance error") {
        CHECK_THROWS_AS(u2u_gain({0, 0, 50}, {0, 0, 50}, params), DomainError);
    }
}

TEST_CASE("rician power fade normalization") {
    SUBCASE("pure LoS limit") {
        RngStream rng(1);
        for (int i = 0; i < 100; ++i)
            CHECK(sample_rician(200.0, rng) == doctest::Approx(1.0).epsilon(1e-6));
    }
    SUBCASE("rayleigh limit has unit mean") {
        RngStream rng(2);
        double sum = 0.0;
        const int n = 100000;
        for (int i = 0; i < n; ++i)
            sum += sample_rician(-std::numeric_limits<double>::infinity(), rng);
        CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
    }
    SUBCASE("any K keeps unit mean") {
        for (double k_db : {-10.0, 0.0, 6.0, 12.0}) {
            RngStream rng(3);
            double sum = 0.0;
            const int n = 100000;
            for (int i = 0; i < n; ++i)
                sum += sample_rician(k_db, rng);
            CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
        }
    }
    SUBCASE("deterministic under a fixed stream seed") {
        RngStream a(99), b(99);
        for (int i = 0; i < 50; ++i)
            CHECK(sample_rician(9.0, a) == sample_rician(9.0, b));
    }
}

TEST_CASE("sinr and rate") {
    RadioParams params;
    const double n0b = params.noise_power_w();

    SUBCASE("rate basics") {
        CHECK(rate(0.0, 180e3) == 0.0);
        CHECK(rate(3.0, 1.0) == doctest::Approx(2.0));
        CHECK(rate(1.0, 180e3) == doctest::Approx(180000.0));
    }
    SUBCASE("rate monotone and concave") {
        RngStream rng(13);
        for (int i = 0; i < 200; ++i) {
            const double s = 10.0 * uniform01(rng);
            const double h = 1e-3;
            const double f0 = rate(s, 1e6), fp = rate(s + h, 1e6), fm = rate(s - h < 0 ? 0 : s - h, 1e6);
            CHECK(fp > f0);
            CHECK(fp + fm - 2 * f0 <= 1e-6);  // second difference non-positive
        }
    }

    GainTable gains(3, 2);
    std::vector<Assignment> links(3);
    for (int i = 0; i < 3; ++i) {
        links[i].uav = i;
        links[i].mode = LinkMode::U2N;
        links[i].tx_power_w = 0.0;
    }

    SUBCASE("snr equals one when signal equals noise") {
        links.resize(1);
        links[0].subchannels = {0};
        links[0].tx_power_w = 1.0;
        gains.set(0, BS_NODE, 0, n0b);  // p*g == N0*B
        CHECK(sinr(links, 0, 0, gains, params) == doctest::Approx(1.0));
    }
    SUBCASE("one interferer arithmetic") {
        links.resize(2);
        links[0].subchannels = {0};
        links[0].tx_power_w = 1.0;
        links[1].subchannels = {0};
        links[1].tx_power_w = 1.0;
        links[1].relay = 0;  // unused; keeps receiver at BS via mode U2N
        gains.set(0, BS_NODE, 0, 4.0 * n0b);
        gains.set(1, BS_NODE, 0, n0b);
        CHECK(sinr(links, 0, 0, gains, params) == doctest::Approx(2.0));
    }
    SUBCASE("three-link shared channel matches a brute-force resum") {
        RngStream rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            GainTable table(3, 1);
            std::vector<Assignment> ls(3);
            for (int i = 0; i < 3; ++i) {
                ls[i].uav = i;
                ls[i].mode = i == 2 ? LinkMode::U2U : LinkMode::U2N;
                if (i == 2)
                    ls[i].relay = 0;
                ls[i].subchannels = {0};
                ls[i].tx_power_w = 0.01 + uniform01(rng);
            }
            for (int tx = 0; tx < 3; ++tx) {
                table.set(tx, BS_NODE, 0, 1e-9 * (0.1 + uniform01(rng)));
                for (int rx = 0; rx < 3; ++rx)
                    if (rx != tx)
                        table.set(tx, rx, 0, 1e-10 * (0.1 + uniform01(rng)));
            }
            for (int l = 0; l < 3; ++l) {
                const int rx = ls[l].mode == LinkMode::U2U ? *ls[l].relay : BS_NODE;
                double interference = 0.0;
                for (int t = 0; t < 3; ++t)
                    if (t != l && ls[t].uav != rx)  // co-located transmitter excluded
                        interference += ls[t].tx_power_w * table.at(t, rx, 0);
                const double expected =
                    ls[l].tx_power_w * table.at(l, rx, 0) / (interference + n0b);
                CHECK(sinr(ls, l, 0, table, params) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
    SUBCASE("interference strictly lowers sinr") {
        links.resize(2);
        links[0].subchannels = {0};
        links[0].tx_power_w = 0.5;
        links[1].subchannels = {};
        links[1].tx_power_w = 0.5;
        gains.set(0, BS_NODE, 0, 5 * n0b);
        gains.set(1, BS_NODE, 0, n0b);
        const double snr_alone = sinr(links, 0, 0, gains, params);
        links[1].subchannels = {0};
        CHECK(sinr(links, 0, 0, gains, params) < snr_alone);
    }
    SUBCASE("missing gain entry") {
        links.resize(1);
        links[0].subchannels = {1};
        links[0].tx_power_w = 1.0;
        gains.set(0, BS_NODE, 0, n0b);
        CHECK_THROWS_AS(sinr(links, 0, 1, gains, params), DomainError);
    }
}
