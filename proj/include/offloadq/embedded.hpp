#ifndef OFFLOADQ_EMBEDDED_HPP
#define OFFLOADQ_EMBEDDED_HPP

#include "offloadq/channel.hpp"
#include "offloadq/mat3.hpp"
#include "offloadq/qbd.hpp"

// Hybrid embedded chain over start-service and state-transition points.
// qhat maps the start-service state distribution of one file in queue to
// that of the next; beta is its subdominant eigenvalue and the geometric
// decay rate of the embedded recursion.

namespace offloadq {

struct EmbeddedChain {
    Mat3 qhat;
    double beta;
    Vec3 theta; // theta_j = pi_j mu_j / sum_k pi_k mu_k; theta0 = 0
};

EmbeddedChain build_chain(const SystemParams& params);

enum class PiHatMethod { recursion, closed_form };

struct StartServiceProbs {
    Vec3 pi_hat;
    PiHatMethod method;
    double tail_bound;              // contribution lost past the truncation level
    Vec3 discrepancy_vs_recursion;  // zero for the recursion method itself
};

// Authoritative start-service probabilities: iterate the embedded recursion
// from p_{n,.}/p_n for each level and aggregate over the arrival-seen
// distribution. n_max < 0 means the solution's full truncation level.
StartServiceProbs start_service_recursion(const QueueSolution& sol, const EmbeddedChain& chain,
                                          int n_max = -1);

// Closed-form evaluation through the generating functions G_j(beta). Its
// components do not sum to one in general, which is why it is kept as a
// cross-check and not the authoritative path.
StartServiceProbs start_service_closed_form(const SystemParams& params, const QueueSolution& sol,
                                            const EmbeddedChain& chain,
                                            const StartServiceProbs& recursion);

struct ServiceTimes {
    Vec3 expected; // E[T_j]: mean service time of a file starting in state j
    double mean;   // E[T] = sum_j pi_hat_j E[T_j]
};

// Conditional mean service times, computed twice: by the closed forms and by
// a direct solve of the defining linear system, cross-checked at 1e-10.
ServiceTimes mean_service_times(const SystemParams& params, const Vec3& pi_hat);

} // namespace offloadq

#endif
