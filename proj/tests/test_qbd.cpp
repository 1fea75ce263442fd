#include <doctest.h>

#include <cmath>

#include "offloadq/errors.hpp"
#include "offloadq/qbd.hpp"
#include "test_support.hpp"

using namespace offloadq;
using testutil::close_abs;
using testutil::close_rel;

TEST_SUITE("qbd") {

TEST_CASE("assembled generator rows sum to zero") {
    for (SystemParams p : {testutil::pedestrian_point(100.0), testutil::vehicular_point(10.0),
                           testutil::pedestrian_point(0.5, 1.3, 0.2)}) {
        QbdGenerator gen = build_generator(p);
        const int levels = 6;
        std::vector<double> g = gen.assemble_dense(levels);
        for (int i = 0; i < 3 * levels; ++i) {
            double row_sum = 0.0;
            for (int j = 0; j < 3 * levels; ++j)
                row_sum += g[static_cast<std::size_t>(i) * 3 * levels + j];
            CHECK(close_abs(row_sum, 0.0, 1e-13));
        }
    }
}

TEST_CASE("off-diagonal entries of the assembled generator are nonnegative") {
    QbdGenerator gen = build_generator(testutil::pedestrian_point(100.0));
    const int levels = 5;
    std::vector<double> g = gen.assemble_dense(levels);
    for (int i = 0; i < 3 * levels; ++i)
        for (int j = 0; j < 3 * levels; ++j)
            if (i != j) CHECK(g[static_cast<std::size_t>(i) * 3 * levels + j] >= 0.0);
}

TEST_CASE("modulation sub-generator reproduces the closed-form stationary law") {
    SystemParams p = testutil::pedestrian_point(100.0);
    Vec3 pi = steady_state(p.channel, p.policy);
    Vec3 from_gen = left_null_vector(modulation_generator(p.channel, p.policy));
    for (int j = 0; j < 3; ++j) CHECK(close_abs(pi[j], from_gen[j], 1e-12));
}

TEST_CASE("M/M/1 reduction: small tau with equal rates gives the geometric law") {
    SystemParams p = testutil::pedestrian_point(1e-6);
    QueueSolution sol = solve_stationary(build_generator(p));
    REQUIRE(sol.converged);
    double rho = 0.1 / 0.564;
    for (int n = 0; n <= 20; ++n) {
        double geo = (1.0 - rho) * std::pow(rho, n);
        CHECK(close_abs(sol.level_total(n), geo, 1e-6));
    }
    CHECK(sol.level_total(0) == doctest::Approx(0.8226950354609929).epsilon(1e-6));
}

TEST_CASE("marginals match the service-state stationary law") {
    SystemParams p = testutil::pedestrian_point(100.0);
    QueueSolution sol = solve_stationary(build_generator(p));
    Vec3 pi = steady_state(p.channel, p.policy);
    for (int j = 0; j < 3; ++j)
        CHECK(close_abs(sol.marginal(j), pi[j], std::max(1e-8, sol.tail_mass)));
    CHECK(sol.marginal(2) == doctest::Approx(0.30434782608695654).epsilon(1e-8));
}

TEST_CASE("solution is a clean distribution") {
    QueueSolution sol = solve_stationary(build_generator(testutil::vehicular_point(100.0)));
    double total = 0.0;
    for (const Vec3& row : sol.p) {
        for (double v : row) REQUIRE(v >= 0.0);
        total += sum(row);
    }
    CHECK(close_abs(total, 1.0, 1e-10));
    CHECK(sol.tail_mass < 1e-10);
}

TEST_CASE("truncation stability: tightening the tail tolerance leaves scalars unchanged") {
    SystemParams p = testutil::pedestrian_point(100.0);
    SolveOptions loose, tight;
    tight.tail_tol = 1e-13;
    QueueSolution a = solve_stationary(build_generator(p), loose);
    QueueSolution b = solve_stationary(build_generator(p), tight);
    CHECK(b.truncation >= a.truncation);
    CHECK(close_rel(a.p[0][0], b.p[0][0], 1e-8));
    CHECK(close_rel(a.p[0][2], b.p[0][2], 1e-8));
    CHECK(close_rel(a.mean_queue_length(), b.mean_queue_length(), 1e-8));
}

TEST_CASE("generating function") {
    SystemParams p = testutil::pedestrian_point(100.0);
    QueueSolution sol = solve_stationary(build_generator(p));

    for (int j = 0; j < 3; ++j)
        CHECK(generating_function(sol, j, 0.0).value == sol.p[0][static_cast<std::size_t>(j)]);

    double near_one = 0.0;
    for (int j = 0; j < 3; ++j) near_one += generating_function(sol, j, 1.0 - 1e-9).value;
    CHECK(close_abs(near_one, 1.0, 1e-7));

    // beta for this point, frozen from the chain closed form
    double beta = 0.9717239282456674;
    Vec3 pi = steady_state(p.channel, p.policy);
    SolveOptions tight;
    tight.tail_tol = 1e-13;
    QueueSolution sol2 = solve_stationary(build_generator(p), tight);
    for (int j = 0; j < 3; ++j) {
        GfValue g = generating_function(sol, j, beta);
        GfValue g2 = generating_function(sol2, j, beta);
        CHECK(g.value > 0.0);
        CHECK(g.value <= pi[static_cast<std::size_t>(j)] + 1e-12);
        CHECK(close_abs(g.value, g2.value, 1e-9)); // truncation-doubling oracle
        CHECK(g.trunc_bound >= 0.0);
    }
    CHECK(generating_function(sol, 0, beta).value ==
          doctest::Approx(0.24031112033104937).epsilon(1e-6));
    CHECK(generating_function(sol, 1, beta).value ==
          doctest::Approx(0.4000952722963883).epsilon(1e-6));
    CHECK(generating_function(sol, 2, beta).value ==
          doctest::Approx(0.29779965586326995).epsilon(1e-6));

    CHECK_THROWS_AS(generating_function(sol, 0, 1.0), DomainError);
    CHECK_THROWS_AS(generating_function(sol, 0, -0.1), DomainError);
    CHECK_THROWS_AS(generating_function(sol, 3, 0.5), DomainError);
}

TEST_CASE("empty probabilities") {
    // tau -> 0 with equal rates: p_{0,j} = pi_j (1 - rho), the product form
    SystemParams p = testutil::pedestrian_point(1e-6);
    QueueSolution sol = solve_stationary(build_generator(p));
    Vec3 p0 = empty_probabilities(sol);
    Vec3 pi = steady_state(p.channel, p.policy);
    double rho = 0.1 / 0.564;
    CHECK(close_abs(p0[2], pi[2] * (1.0 - rho), 1e-6));

    for (int j = 0; j < 3; ++j) {
        CHECK(p0[static_cast<std::size_t>(j)] >= 0.0);
        CHECK(p0[static_cast<std::size_t>(j)] <= pi[static_cast<std::size_t>(j)] + 1e-12);
    }
    CHECK(close_abs(sum(p0), sol.level_total(0), 1e-15));

    // saturation: rho -> 1 drives every empty probability to zero
    double mu_hat = average_rate(p);
    SystemParams hot = testutil::pedestrian_point(1e-6, 0.564, 0.99 * mu_hat);
    QueueSolution hot_sol = solve_stationary(build_generator(hot));
    CHECK(sum(empty_probabilities(hot_sol)) < 0.011);
}

TEST_CASE("pedestrian tau=100 frozen level-0 values") {
    QueueSolution sol = solve_stationary(build_generator(testutil::pedestrian_point(100.0)));
    CHECK(sol.p[0][0] == doctest::Approx(0.03135884852239254).epsilon(1e-6));
    CHECK(sol.p[0][1] == doctest::Approx(0.30693844285327376).epsilon(1e-6));
    CHECK(sol.p[0][2] == doctest::Approx(0.22931157981999548).epsilon(1e-6));
    CHECK(sol.mean_queue_length() == doctest::Approx(2.5657917752041515).epsilon(1e-6));
}

TEST_CASE("instability and convergence errors") {
    SystemParams p = testutil::pedestrian_point(100.0, 0.564, 0.5); // mu_hat ~ 0.4
    CHECK_THROWS_AS(solve_stationary(build_generator(p)), InstabilityError);

    SolveOptions tiny_cap;
    tiny_cap.max_levels = 8; // below the starting level
    CHECK_THROWS_AS(solve_stationary(build_generator(testutil::pedestrian_point(100.0)), tiny_cap),
                    ConvergenceError);
}

TEST_CASE("randomized instances stay consistent") {
    testutil::ParamSampler sampler(13u);
    for (int trial = 0; trial < 50; ++trial) {
        SystemParams p = sampler.stable_params(0.8);
        QueueSolution sol = solve_stationary(build_generator(p));
        REQUIRE(sol.converged);
        Vec3 pi = steady_state(p.channel, p.policy);
        for (int j = 0; j < 3; ++j)
            REQUIRE(close_abs(sol.marginal(j), pi[static_cast<std::size_t>(j)],
                              std::max(1e-8, sol.tail_mass)));
        double total = 0.0;
        for (const Vec3& row : sol.p) total += sum(row);
        REQUIRE(close_abs(total, 1.0, 1e-10));
    }
}

} // TEST_SUITE
