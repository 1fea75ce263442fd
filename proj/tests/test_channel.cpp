#include <doctest.h>

#include "offloadq/channel.hpp"
#include "offloadq/errors.hpp"
#include "test_support.hpp"

using namespace offloadq;
using testutil::close_abs;
using testutil::close_rel;

TEST_SUITE("channel") {

TEST_CASE("derive_rates maps the channel and deadline onto the service states") {
    ServiceStateRates r = derive_rates(ChannelParams(0.007, 0.016), OffloadPolicy(100.0));
    CHECK(r.f20 == doctest::Approx(0.016).epsilon(1e-12));
    CHECK(r.f01 == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(r.f02 == doctest::Approx(0.007).epsilon(1e-12));
    CHECK(r.f12 == doctest::Approx(0.007).epsilon(1e-12));

    ServiceStateRates unit = derive_rates(ChannelParams(1.0, 1.0), OffloadPolicy(1.0));
    CHECK(unit.f20 == 1.0);
    CHECK(unit.f01 == 1.0);
    CHECK(unit.f02 == 1.0);
    CHECK(unit.f12 == 1.0);

    ServiceStateRates v = derive_rates(ChannelParams(0.035, 0.079), OffloadPolicy(10.0));
    CHECK(v.f20 == doctest::Approx(0.079).epsilon(1e-12));
    CHECK(v.f01 == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(v.f02 == doctest::Approx(0.035).epsilon(1e-12));
    CHECK(v.f12 == doctest::Approx(0.035).epsilon(1e-12));
}

TEST_CASE("steady state at the pedestrian point (closed form vs generator null vector)") {
    ChannelParams ch(0.007, 0.016);
    OffloadPolicy po(100.0);
    CHECK(ch.wifi_ratio() == doctest::Approx(0.30434782608695654).epsilon(1e-14));
    CHECK(ch.mobility() == doctest::Approx(0.004869565217391305).epsilon(1e-14));

    Vec3 pi = steady_state(ch, po);
    // exact values 112/391, 160/391, 119/391
    CHECK(pi[0] == doctest::Approx(112.0 / 391.0).epsilon(1e-12));
    CHECK(pi[1] == doctest::Approx(160.0 / 391.0).epsilon(1e-12));
    CHECK(pi[2] == doctest::Approx(119.0 / 391.0).epsilon(1e-12));

    Vec3 from_gen = left_null_vector(modulation_generator(ch, po));
    for (int j = 0; j < 3; ++j) CHECK(close_abs(pi[j], from_gen[j], 1e-12));
}

TEST_CASE("steady state limits") {
    ChannelParams ch(0.007, 0.016);
    double r = ch.wifi_ratio();

    Vec3 small_tau = steady_state(ch, OffloadPolicy(1e-9));
    CHECK(close_abs(small_tau[0], 0.0, 1e-8));
    CHECK(close_abs(small_tau[1], 1.0 - r, 1e-8));
    CHECK(close_abs(small_tau[2], r, 1e-12));

    Vec3 large_tau = steady_state(ch, OffloadPolicy(1e9));
    CHECK(close_abs(large_tau[1], 0.0, 1e-6));
    CHECK(close_abs(large_tau[0], 1.0 - r, 1e-6));
}

TEST_CASE("average rate and stability") {
    SystemParams p = testutil::pedestrian_point(100.0);
    CHECK(average_rate(p) == doctest::Approx(0.4024450127877237).epsilon(1e-12));

    Stability st = stability(p);
    CHECK(st.stable);
    CHECK(st.rho == doctest::Approx(0.1 / 0.4024450127877237).epsilon(1e-12));

    // tau -> 0 with equal rates: mu_hat -> mu
    SystemParams p0 = testutil::pedestrian_point(1e-9);
    CHECK(close_rel(average_rate(p0), 0.564, 1e-8));

    // tau -> inf: mu_hat -> R mu2
    SystemParams pinf = testutil::pedestrian_point(1e9);
    CHECK(close_rel(average_rate(pinf), p.channel.wifi_ratio() * 0.564, 1e-6));

    // boundary lambda = mu_hat is excluded
    SystemParams pb = testutil::pedestrian_point(100.0, 0.564, average_rate(p));
    CHECK_FALSE(stability(pb).stable);

    // tau -> inf with lambda above R mu2 is unstable
    SystemParams pu = testutil::pedestrian_point(1e9, 0.564, 0.18);
    CHECK_FALSE(stability(pu).stable);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ChannelParams(0.0, 0.016), DomainError);
    CHECK_THROWS_AS(ChannelParams(0.007, -1.0), DomainError);
    CHECK_THROWS_AS(OffloadPolicy(0.0), DomainError);
    CHECK_THROWS_AS(OffloadPolicy(-5.0), DomainError);
    ChannelParams ch(0.007, 0.016);
    CHECK_THROWS_AS(SystemParams(ch, OffloadPolicy(1.0), 0.0, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(SystemParams(ch, OffloadPolicy(1.0), 1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("properties over randomized parameters") {
    testutil::ParamSampler sampler(11u);
    for (int trial = 0; trial < 1000; ++trial) {
        ChannelParams ch = sampler.channel();
        OffloadPolicy po = sampler.policy();
        Vec3 pi = steady_state(ch, po);

        // closed form equals the stationary vector of the assembled generator
        Vec3 from_gen = left_null_vector(modulation_generator(ch, po));
        for (int j = 0; j < 3; ++j) REQUIRE(close_abs(pi[j], from_gen[j], 1e-10));

        REQUIRE(close_abs(sum(pi), 1.0, 1e-12));
        REQUIRE(pi[2] == ch.wifi_ratio()); // algebraic identity, exact
        REQUIRE(ch.mobility() > 0.0);
        REQUIRE(ch.mobility() < std::min(ch.f_c, ch.f_f));
        REQUIRE(ch.wifi_ratio() > 0.0);
        REQUIRE(ch.wifi_ratio() < 1.0);
    }
}

TEST_CASE("average rate is nonincreasing in tau") {
    testutil::ParamSampler sampler(12u);
    for (int trial = 0; trial < 200; ++trial) {
        ChannelParams ch = sampler.channel();
        double mu1 = sampler.log_uniform(0.05, 20.0);
        double mu2 = sampler.log_uniform(0.05, 20.0);
        double prev = std::numeric_limits<double>::infinity();
        for (double tau = 1e-3; tau <= 1e6; tau *= 10.0) {
            SystemParams p(ch, OffloadPolicy(tau), mu1, mu2, 1e-6);
            double mu_hat = average_rate(p);
            REQUIRE(mu_hat <= prev * (1.0 + 1e-12));
            prev = mu_hat;
        }
    }
}

} // TEST_SUITE
