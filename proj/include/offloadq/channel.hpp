#ifndef OFFLOADQ_CHANNEL_HPP
#define OFFLOADQ_CHANNEL_HPP

#include "offloadq/mat3.hpp"

// Two-state Markov wireless channel and the three-state Markov-modulated
// service process it induces. Service states: 0 = delayed (rate 0),
// 1 = cellular (rate mu1), 2 = Wi-Fi (rate mu2).

namespace offloadq {

struct ChannelParams {
    double f_c; // rate of leaving cellular-only coverage (1/s)
    double f_f; // rate of leaving Wi-Fi coverage (1/s)

    ChannelParams(double f_c_, double f_f_);

    // long-run fraction of time Wi-Fi is available
    double wifi_ratio() const { return f_c / (f_c + f_f); }

    // harmonic mobility rate: grows with user speed for a fixed hotspot layout
    double mobility() const { return f_c * f_f / (f_c + f_f); }
};

struct OffloadPolicy {
    double tau; // mean deadline of the delayed state (s)

    explicit OffloadPolicy(double tau_);

    double deadline_rate() const { return 1.0 / tau; }
};

struct SystemParams {
    ChannelParams channel;
    OffloadPolicy policy;
    double mu1;    // cellular service rate (files/s)
    double mu2;    // Wi-Fi service rate (files/s)
    double lambda; // Poisson arrival rate (files/s)

    SystemParams(ChannelParams channel_, OffloadPolicy policy_, double mu1_, double mu2_,
                 double lambda_);

    Vec3 service_rates() const { return {0.0, mu1, mu2}; } // mu0 = 0 always
};

// The four nonzero transition rates among service states.
struct ServiceStateRates {
    double f20; // Wi-Fi -> delayed
    double f01; // delayed -> cellular (deadline expiry)
    double f02; // delayed -> Wi-Fi
    double f12; // cellular -> Wi-Fi
};

ServiceStateRates derive_rates(const ChannelParams& channel, const OffloadPolicy& policy);

// Generator of the autonomous service-state chain (rows sum to zero).
Mat3 modulation_generator(const ChannelParams& channel, const OffloadPolicy& policy);

// Stationary probabilities (pi0, pi1, pi2) of the service-state chain.
Vec3 steady_state(const ChannelParams& channel, const OffloadPolicy& policy);

// Average transmission rate pi1*mu1 + pi2*mu2.
double average_rate(const SystemParams& params);

struct Stability {
    bool stable;    // lambda < mu_hat
    double rho;     // lambda / mu_hat
    double mu_hat;
};

Stability stability(const SystemParams& params);

} // namespace offloadq

#endif
