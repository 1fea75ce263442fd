#ifndef OFFLOADQ_METRICS_HPP
#define OFFLOADQ_METRICS_HPP

#include <string>
#include <vector>

#include "offloadq/channel.hpp"
#include "offloadq/embedded.hpp"
#include "offloadq/qbd.hpp"

// Headline performance quantities, each computed by at least two routes:
// waiting time by embedded-chain recursion (authoritative) and closed form,
// delay directly and via Little's law.

namespace offloadq {

enum class WaitingTimeReading {
    corrected, // summation term sum_j E[T_j] (pi_j - pi_hat_j)
    literal,   // summation term E[T] (pi_j - pi_hat_j), kept as a diagnostic
};

// Closed-form mean waiting time.
double waiting_time_closed_form(const SystemParams& params, const EmbeddedChain& chain,
                                const Vec3& pi_hat, const ServiceTimes& times,
                                WaitingTimeReading reading = WaitingTimeReading::corrected);

// Authoritative mean waiting time: accumulate the per-level conditional
// elapse-time vectors through the embedded recursion and average them over
// the arrival-seen distribution.
double waiting_time_recursion(const QueueSolution& sol, const EmbeddedChain& chain,
                              const ServiceTimes& times);

inline double mean_delay(double waiting_time, const ServiceTimes& times) {
    return waiting_time + times.mean;
}

// L / lambda with L counting the in-service file, i.e. mean system time.
double delay_via_little(const QueueSolution& sol, double lambda);

// Fraction of traffic delivered via Wi-Fi.
double efficiency(const QueueSolution& sol, const SystemParams& params);

// Mean delay in the infinite-deadline limit. Defined for lambda < R mu2;
// uses mu2 since only the Wi-Fi rate survives in that limit.
double asymptotic_delay(const SystemParams& params);

// Machine-readable record of two known defects in the closed-form routes,
// evaluated at a concrete operating point.
struct DiscrepancyReport {
    Vec3 pi_hat_recursion;
    Vec3 pi_hat_closed_form;
    Vec3 pi_hat_delta;
    double pi_hat_closed_form_sum; // != 1 in general
    double w_recursion;
    double w_corrected;
    double w_literal;
    double w_corrected_rel_gap; // |w_corrected - w_recursion| / w_recursion
};

struct PerfReport {
    // model point
    double f_c, f_f, tau, lambda, mu1, mu2;
    double wifi_ratio, mobility;
    // channel / chain quantities
    Vec3 pi;
    double mu_hat, rho;
    bool stable;
    double beta;
    Vec3 theta;
    Vec3 et;        // E[T_j]
    double et_mean; // E[T]
    Vec3 pi_hat;    // recursion method
    Vec3 pi_hat_closed;
    Vec3 p0;        // (p00, p01, p02)
    double mean_queue_length;
    // headline metrics
    double waiting_time;  // recursion route
    double waiting_time_closed;
    double delay;         // W + E[T]
    double delay_little;  // L / lambda
    double eta;
    double d_star; // NaN when lambda >= R mu2
    // solver diagnostics
    int truncation;
    double tail_mass;
    DiscrepancyReport discrepancies;
    // provenance notes, one per headline quantity
    std::vector<std::pair<std::string, std::string>> provenance;
};

// Full pipeline: channel -> QBD -> embedded chain -> metrics.
PerfReport analyze(const SystemParams& params, const SolveOptions& opts = {});

} // namespace offloadq

#endif
