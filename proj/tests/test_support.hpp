#ifndef OFFLOADQ_TEST_SUPPORT_HPP
#define OFFLOADQ_TEST_SUPPORT_HPP

#include <cmath>
#include <random>

#include "offloadq/channel.hpp"

namespace testutil {

inline bool close_rel(double a, double b, double rel) {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel * std::max(scale, 1e-300);
}

inline bool close_abs(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Randomized valid parameter sets for property tests. Rates are sampled
// log-uniformly; lambda is placed a chosen utilization below capacity.
struct ParamSampler {
    std::mt19937_64 rng;

    explicit ParamSampler(std::uint64_t seed = 20240901) : rng(seed) {}

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * std::generate_canonical<double, 53>(rng);
    }

    double log_uniform(double lo, double hi) {
        return std::pow(10.0, uniform(std::log10(lo), std::log10(hi)));
    }

    offloadq::ChannelParams channel() {
        return offloadq::ChannelParams(log_uniform(1e-3, 1.0), log_uniform(1e-3, 1.0));
    }

    offloadq::OffloadPolicy policy() { return offloadq::OffloadPolicy(log_uniform(0.1, 1e4)); }

    // stable by construction: rho in [0.05, max_rho]
    offloadq::SystemParams stable_params(double max_rho = 0.9) {
        offloadq::ChannelParams ch = channel();
        offloadq::OffloadPolicy po = policy();
        double mu1 = log_uniform(0.05, 20.0);
        double mu2 = log_uniform(0.05, 20.0);
        offloadq::Vec3 pi = offloadq::steady_state(ch, po);
        double mu_hat = pi[1] * mu1 + pi[2] * mu2;
        double lambda = uniform(0.05, max_rho) * mu_hat;
        return offloadq::SystemParams(ch, po, mu1, mu2, lambda);
    }

    offloadq::Vec3 stochastic_vec3() {
        double a = -std::log(std::generate_canonical<double, 53>(rng) + 1e-300);
        double b = -std::log(std::generate_canonical<double, 53>(rng) + 1e-300);
        double c = -std::log(std::generate_canonical<double, 53>(rng) + 1e-300);
        double s = a + b + c;
        return {a / s, b / s, c / s};
    }
};

inline offloadq::SystemParams pedestrian_point(double tau, double mu = 0.564,
                                               double lambda = 0.1) {
    return offloadq::SystemParams(offloadq::ChannelParams(0.007, 0.016),
                                  offloadq::OffloadPolicy(tau), mu, mu, lambda);
}

inline offloadq::SystemParams vehicular_point(double tau, double mu = 0.564,
                                              double lambda = 0.1) {
    return offloadq::SystemParams(offloadq::ChannelParams(0.035, 0.079),
                                  offloadq::OffloadPolicy(tau), mu, mu, lambda);
}

} // namespace testutil

#endif
