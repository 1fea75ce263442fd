#include "offloadq/channel.hpp"

#include <cmath>
#include <string>

#include "offloadq/errors.hpp"

namespace offloadq {

namespace {

void require_positive_finite(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(name) + " must be positive and finite, got " +
                          std::to_string(v));
}

} // namespace

ChannelParams::ChannelParams(double f_c_, double f_f_) : f_c(f_c_), f_f(f_f_) {
    require_positive_finite(f_c, "f_c");
    require_positive_finite(f_f, "f_f");
}

OffloadPolicy::OffloadPolicy(double tau_) : tau(tau_) {
    require_positive_finite(tau, "tau");
}

SystemParams::SystemParams(ChannelParams channel_, OffloadPolicy policy_, double mu1_, double mu2_,
                           double lambda_)
    : channel(channel_), policy(policy_), mu1(mu1_), mu2(mu2_), lambda(lambda_) {
    require_positive_finite(mu1, "mu1");
    require_positive_finite(mu2, "mu2");
    require_positive_finite(lambda, "lambda");
}

ServiceStateRates derive_rates(const ChannelParams& channel, const OffloadPolicy& policy) {
    return {channel.f_f, policy.deadline_rate(), channel.f_c, channel.f_c};
}

Mat3 modulation_generator(const ChannelParams& channel, const OffloadPolicy& policy) {
    ServiceStateRates r = derive_rates(channel, policy);
    Mat3 q;
    q(0, 0) = -(r.f01 + r.f02);
    q(0, 1) = r.f01;
    q(0, 2) = r.f02;
    q(1, 1) = -r.f12;
    q(1, 2) = r.f12;
    q(2, 0) = r.f20;
    q(2, 2) = -r.f20;
    return q;
}

Vec3 steady_state(const ChannelParams& channel, const OffloadPolicy& policy) {
    double r = channel.wifi_ratio();
    double tf = policy.tau * channel.mobility();
    double den = tf + 1.0 - r;
    return {(1.0 - r) * tf / den, (1.0 - r) * (1.0 - r) / den, r};
}

double average_rate(const SystemParams& params) {
    Vec3 pi = steady_state(params.channel, params.policy);
    return pi[1] * params.mu1 + pi[2] * params.mu2;
}

Stability stability(const SystemParams& params) {
    double mu_hat = average_rate(params);
    double rho = params.lambda / mu_hat;
    return {params.lambda < mu_hat, rho, mu_hat};
}

} // namespace offloadq
