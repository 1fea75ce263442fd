#include "offloadq/qbd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "offloadq/errors.hpp"

namespace offloadq {

Mat3 QbdGenerator::arrival_block() const { return params.lambda * Mat3::identity(); }

Mat3 QbdGenerator::departure_block() const {
    return Mat3::diag({0.0, params.mu1, params.mu2});
}

Mat3 QbdGenerator::local_block() const {
    Mat3 q = modulation_generator(params.channel, params.policy);
    q(0, 0) -= params.lambda;
    q(1, 1) -= params.lambda + params.mu1;
    q(2, 2) -= params.lambda + params.mu2;
    return q;
}

Mat3 QbdGenerator::boundary_block() const {
    Mat3 q = modulation_generator(params.channel, params.policy);
    for (int j = 0; j < 3; ++j) q(j, j) -= params.lambda;
    return q;
}

Mat3 QbdGenerator::top_block() const { return local_block() + params.lambda * Mat3::identity(); }

std::vector<double> QbdGenerator::assemble_dense(int levels) const {
    const int dim = 3 * levels;
    std::vector<double> g(static_cast<std::size_t>(dim) * dim, 0.0);
    auto put = [&](int lev_r, int lev_c, const Mat3& m) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                g[static_cast<std::size_t>(3 * lev_r + i) * dim + 3 * lev_c + j] += m(i, j);
    };
    Mat3 a0 = arrival_block(), a1 = local_block(), a2 = departure_block();
    for (int n = 0; n < levels; ++n) {
        bool top = (n == levels - 1);
        if (n == 0)
            put(0, 0, top ? modulation_generator(params.channel, params.policy)
                          : boundary_block());
        else
            put(n, n, top ? top_block() : a1);
        if (!top) put(n, n + 1, a0);
        if (n > 0) put(n, n - 1, a2);
    }
    return g;
}

QbdGenerator build_generator(const SystemParams& params) { return QbdGenerator(params); }

double QueueSolution::marginal(int j) const {
    double s = 0.0;
    for (const Vec3& row : p) s += row[static_cast<std::size_t>(j)];
    return s;
}

double QueueSolution::mean_queue_length() const {
    double s = 0.0;
    for (std::size_t n = 1; n < p.size(); ++n) s += static_cast<double>(n) * sum(p[n]);
    return s;
}

namespace {

// One truncated solve at a fixed level count. Levels 0..n_top, reflecting at
// the top (arrivals out of n_top folded back into its diagonal).
//
// Backward substitution: with p_n = p_{n-1} S_n, the interior balance
//   p_{n-1} A0 + p_n A1 + p_{n+1} A2 = 0
// collapses to S_n = -A0 (A1 + S_{n+1} A2)^{-1}, seeded at the top by
// S_top = -A0 (A1 + lambda I)^{-1}. Level 0 then closes the system:
// p_0 (B + S_1 A2) = 0 with B the boundary block, solved as a left null
// vector and the whole vector renormalized.
QueueSolution solve_at(const QbdGenerator& gen, int n_top) {
    const Mat3 a0 = gen.arrival_block();
    const Mat3 a1 = gen.local_block();
    const Mat3 a2 = gen.departure_block();

    std::vector<Mat3> s(static_cast<std::size_t>(n_top) + 1);
    s[static_cast<std::size_t>(n_top)] = -1.0 * (a0 * inverse(gen.top_block()));
    for (int n = n_top - 1; n >= 1; --n)
        s[static_cast<std::size_t>(n)] =
            -1.0 * (a0 * inverse(a1 + s[static_cast<std::size_t>(n) + 1] * a2));

    Mat3 m0 = gen.boundary_block() + s[1] * a2;
    Vec3 p0 = left_null_vector(m0);

    QueueSolution sol;
    sol.truncation = n_top;
    sol.p.resize(static_cast<std::size_t>(n_top) + 1);
    sol.p[0] = p0;
    double total = sum(p0);
    for (int n = 1; n <= n_top; ++n) {
        sol.p[static_cast<std::size_t>(n)] =
            sol.p[static_cast<std::size_t>(n) - 1] * s[static_cast<std::size_t>(n)];
        total += sum(sol.p[static_cast<std::size_t>(n)]);
    }

    // Clamp the roundoff negatives, then renormalize.
    for (Vec3& row : sol.p)
        for (double& v : row)
            if (v < 0.0) v = 0.0;
    total = 0.0;
    for (const Vec3& row : sol.p) total += sum(row);
    for (Vec3& row : sol.p) row = (1.0 / total) * row;

    // The reflecting top level accumulates (approximately) the whole tail of
    // the infinite chain, so its mass is the natural truncation-error
    // estimate. Guard it from below with the interior geometric decay.
    double top_mass = sol.level_total(n_top);
    double m1 = sol.level_total(n_top - 2);
    double m2 = sol.level_total(n_top - 1);
    double geo = 0.0;
    if (m1 > 0.0 && m2 > 0.0 && m2 < m1) {
        double r = m2 / m1;
        geo = m2 * r / (1.0 - r);
    }
    sol.tail_mass = std::max(top_mass, geo);
    return sol;
}

} // namespace

QueueSolution solve_stationary(const QbdGenerator& gen, const SolveOptions& opts) {
    Stability st = stability(gen.params);
    if (!st.stable)
        throw InstabilityError("lambda = " + std::to_string(gen.params.lambda) +
                               " >= mu_hat = " + std::to_string(st.mu_hat));

    int n_top = std::max(64, static_cast<int>(std::ceil(20.0 / (1.0 - st.rho))));
    QueueSolution prev;
    bool have_prev = false;
    while (n_top <= opts.max_levels) {
        QueueSolution cur = solve_at(gen, n_top);
        if (have_prev && cur.tail_mass < opts.tail_tol) {
            auto rel = [](double a, double b) {
                double scale = std::max({std::abs(a), std::abs(b), 1e-300});
                return std::abs(a - b) / scale;
            };
            bool settled = rel(cur.p[0][0], prev.p[0][0]) < opts.scalar_tol &&
                           rel(cur.p[0][2], prev.p[0][2]) < opts.scalar_tol &&
                           rel(cur.mean_queue_length(), prev.mean_queue_length()) <
                               opts.scalar_tol;
            if (settled) {
                cur.converged = true;
                return cur;
            }
        }
        prev = std::move(cur);
        have_prev = true;
        n_top *= 2;
    }
    throw ConvergenceError("truncation level exceeded cap " + std::to_string(opts.max_levels) +
                           " (rho = " + std::to_string(st.rho) + ")");
}

GfValue generating_function(const QueueSolution& sol, int state, double z) {
    if (state < 0 || state > 2) throw DomainError("state must be 0, 1 or 2");
    if (!(z >= 0.0) || z >= 1.0) throw DomainError("z must lie in [0, 1)");
    // Horner over levels, highest first.
    double acc = 0.0;
    for (std::size_t n = sol.p.size(); n-- > 0;)
        acc = acc * z + sol.p[n][static_cast<std::size_t>(state)];
    return {acc, sol.tail_mass * std::pow(z, sol.truncation)};
}

Vec3 empty_probabilities(const QueueSolution& sol) { return sol.level0(); }

} // namespace offloadq
