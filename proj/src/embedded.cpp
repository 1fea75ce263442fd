#include "offloadq/embedded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "offloadq/errors.hpp"

namespace offloadq {

namespace {

double beta_closed_form(const SystemParams& params) {
    double r = params.channel.wifi_ratio();
    double f = params.channel.mobility();
    double tf = params.policy.tau * f;
    double mu1 = params.mu1, mu2 = params.mu2;
    double num = r * (1.0 - r) * (1.0 - r + tf) * mu1 * mu2;
    double den = (1.0 - r) * (1.0 - r) * f * mu1 + r * (1.0 - r + tf) * f * mu2 +
                 r * (1.0 - r) * (1.0 - r + tf) * mu1 * mu2;
    return num / den;
}

} // namespace

EmbeddedChain build_chain(const SystemParams& params) {
    ServiceStateRates rt = derive_rates(params.channel, params.policy);
    double beta = beta_closed_form(params);
    double c = rt.f01 / (rt.f01 + rt.f02); // deadline-first branch probability

    Mat3 q; // first row stays zero: no start-service point in the delayed state
    q(1, 0) = beta * c * (1.0 + rt.f20 / params.mu2);
    q(1, 1) = beta * (1.0 + c * rt.f20 / params.mu2);
    q(1, 2) = beta * c * rt.f20 / params.mu2;
    q(2, 0) = beta * (rt.f12 / params.mu1 + (1.0 - c));
    q(2, 1) = beta * rt.f12 / params.mu1;
    q(2, 2) = beta * (1.0 + rt.f12 / params.mu1);

    Vec3 pi = steady_state(params.channel, params.policy);
    Vec3 weights = {0.0, pi[1] * params.mu1, pi[2] * params.mu2};
    Vec3 theta = (1.0 / sum(weights)) * weights;

    return {q, beta, theta};
}

StartServiceProbs start_service_recursion(const QueueSolution& sol, const EmbeddedChain& chain,
                                          int n_max) {
    if (!sol.converged)
        throw ConvergenceError("start_service_recursion requires a converged queue solution");
    int top = sol.truncation;
    if (n_max >= 0) top = std::min(top, n_max);

    // pi_hat = sum_n qhat^n p_{n,.}  evaluated highest level first, so each
    // level's vector passes through exactly n applications of the recursion.
    Vec3 acc = sol.p[static_cast<std::size_t>(top)];
    for (int n = top - 1; n >= 0; --n) acc = chain.qhat * acc + sol.p[static_cast<std::size_t>(n)];

    StartServiceProbs out;
    out.pi_hat = acc;
    out.method = PiHatMethod::recursion;
    out.tail_bound = sol.tail_mass;
    out.discrepancy_vs_recursion = {0.0, 0.0, 0.0};
    return out;
}

StartServiceProbs start_service_closed_form(const SystemParams& params, const QueueSolution& sol,
                                            const EmbeddedChain& chain,
                                            const StartServiceProbs& recursion) {
    if (!sol.converged)
        throw ConvergenceError("start_service_closed_form requires a converged queue solution");
    double g0 = generating_function(sol, 0, chain.beta).value;
    double g1 = generating_function(sol, 1, chain.beta).value;
    double g2 = generating_function(sol, 2, chain.beta).value;
    double p00 = sol.p[0][0];

    double r = params.channel.wifi_ratio();
    double tf = params.policy.tau * params.channel.mobility();
    double cp = tf / (tf + 1.0 - r);
    double k = (1.0 - r) / (tf + 1.0 - r);
    double th1 = chain.theta[1], th2 = chain.theta[2];

    StartServiceProbs out;
    out.pi_hat = {
        p00,
        th1 + (th2 - cp) * g0 + th2 * g1 - th1 * g2 - k * p00,
        th2 - (th2 - cp) * g0 - th2 * g1 + th1 * g2 - k * p00,
    };
    out.method = PiHatMethod::closed_form;
    out.tail_bound = sol.tail_mass;
    out.discrepancy_vs_recursion = out.pi_hat - recursion.pi_hat;
    return out;
}

ServiceTimes mean_service_times(const SystemParams& params, const Vec3& pi_hat) {
    ServiceStateRates rt = derive_rates(params.channel, params.policy);
    double r = params.channel.wifi_ratio();
    double f = params.channel.mobility();
    double tau = params.policy.tau;
    double tf = tau * f;
    double mu1 = params.mu1, mu2 = params.mu2;

    double den = (1.0 - r) * (1.0 - r) * f * mu1 + r * (tf + 1.0 - r) * f * mu2 +
                 r * (1.0 - r) * (tf + 1.0 - r) * mu1 * mu2;
    Vec3 closed = {
        (tau * f * f + (1.0 - r) * f + (1.0 - r) * tf * mu1 +
         r * (1.0 - r) * (tf + 1.0 - r) * mu2 + r * (1.0 - r) * (1.0 - r) * tau * mu1 * mu2) /
            den,
        (tau * f * f + (1.0 - r) * f + r * (1.0 - r) * (tf + 1.0 - r) * mu2) / den,
        (tau * f * f + (1.0 - r) * f + r * (1.0 - r) * (1.0 - r) * mu1 + (1.0 - r) * tf * mu1) /
            den,
    };

    // Direct solve of the first-step system:
    //   E[T0] = 1/(f01+f02) + (f01 E[T1] + f02 E[T2]) / (f01+f02)
    //   E[T1] = 1/(mu1+f12) + f12/(mu1+f12) E[T2]
    //   E[T2] = 1/(mu2+f20) + f20/(mu2+f20) E[T0]
    double s0 = rt.f01 + rt.f02;
    Mat3 a = Mat3::identity();
    a(0, 1) = -rt.f01 / s0;
    a(0, 2) = -rt.f02 / s0;
    a(1, 2) = -rt.f12 / (mu1 + rt.f12);
    a(2, 0) = -rt.f20 / (mu2 + rt.f20);
    Vec3 b = {1.0 / s0, 1.0 / (mu1 + rt.f12), 1.0 / (mu2 + rt.f20)};
    Vec3 direct = solve(a, b);

    for (int j = 0; j < 3; ++j) {
        double scale = std::max(std::abs(closed[static_cast<std::size_t>(j)]), 1.0);
        if (std::abs(closed[static_cast<std::size_t>(j)] - direct[static_cast<std::size_t>(j)]) >
            1e-10 * scale)
            throw std::logic_error("mean service time closed form disagrees with direct solve");
    }

    return {closed, dot(pi_hat, closed)};
}

} // namespace offloadq
