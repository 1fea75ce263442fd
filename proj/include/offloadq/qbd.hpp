#ifndef OFFLOADQ_QBD_HPP
#define OFFLOADQ_QBD_HPP

#include <cstddef>
#include <vector>

#include "offloadq/channel.hpp"
#include "offloadq/mat3.hpp"

// Joint continuous-time Markov chain over (queue length n, service state j).
// Level n holds the three phases j = 0,1,2; the generator is block
// tridiagonal and level-independent above level 0:
//
//   arrivals    (n,j) -> (n+1,j) at lambda, all n, all j
//   departures  (n,j) -> (n-1,j) at mu_j,   n >= 1, j in {1,2}
//   modulation  per the service-state rates, at ALL levels including n = 0
//               (the service-state process is autonomous)

namespace offloadq {

struct QbdGenerator {
    SystemParams params;

    explicit QbdGenerator(SystemParams p) : params(std::move(p)) {}

    Mat3 arrival_block() const;   // lambda * I
    Mat3 departure_block() const; // diag(0, mu1, mu2)
    Mat3 local_block() const;     // modulation minus diagonal compensation, interior level
    Mat3 boundary_block() const;  // level 0: no departures
    Mat3 top_block() const;       // truncation level: no arrivals out (reflecting)

    // Dense row-major (3*levels x 3*levels) truncated generator, for
    // inspection and tests; the solver never forms this.
    std::vector<double> assemble_dense(int levels) const;
};

QbdGenerator build_generator(const SystemParams& params);

struct SolveOptions {
    double tail_tol = 1e-10;   // required bound on mass above the truncation level
    double scalar_tol = 1e-8;  // relative change of p00, p02, L between doublings
    int max_levels = 1 << 20;  // hard cap on the truncation level
};

struct QueueSolution {
    std::vector<Vec3> p;   // p[n] = (p_{n,0}, p_{n,1}, p_{n,2}), 0 <= n <= truncation
    int truncation = 0;    // N
    double tail_mass = 0.0;
    bool converged = false;

    double level_total(int n) const { return sum(p[static_cast<std::size_t>(n)]); }
    Vec3 level0() const { return p[0]; }
    double marginal(int j) const;       // sum_n p_{n,j}
    double mean_queue_length() const;   // L = sum_n n * p_n (in-system count)
};

// Solves the truncated global balance equations by block backward
// substitution on the 3x3 block tridiagonal system, doubling the truncation
// level until the tail estimate and the tracked scalars settle.
// Throws InstabilityError when lambda >= mu_hat, ConvergenceError past the cap.
QueueSolution solve_stationary(const QbdGenerator& gen, const SolveOptions& opts = {});

struct GfValue {
    double value;
    double trunc_bound; // bound on the truncated part of the series
};

// G_j(z) = sum_n p_{n,j} z^n, truncated at the solution's level.
// Requires 0 <= z < 1.
GfValue generating_function(const QueueSolution& sol, int state, double z);

// First row of p: (p_{0,0}, p_{0,1}, p_{0,2}).
Vec3 empty_probabilities(const QueueSolution& sol);

} // namespace offloadq

#endif
