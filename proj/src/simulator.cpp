#include "offloadq/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "offloadq/errors.hpp"

namespace offloadq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Dedicated stream per (seed, replication, purpose) so that e.g. arrival
// epochs are unchanged when the policy changes.
std::mt19937_64 make_stream(std::uint64_t seed, int replication, int purpose) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ (0x1000 + static_cast<std::uint64_t>(replication)));
    s = splitmix64(s ^ (0x2000000 + static_cast<std::uint64_t>(purpose)));
    return std::mt19937_64(s);
}

// Uniform in (0, 1]; keeps log() finite. Not std::uniform_real_distribution,
// whose output is implementation-defined.
double u01(std::mt19937_64& rng) {
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

double exp_draw(std::mt19937_64& rng, double rate) { return -std::log(u01(rng)) / rate; }

struct RepStats {
    double delay_mean = 0.0;
    double wait_mean = 0.0;
    double eta = 0.0;
    std::uint64_t completed = 0;
    std::uint64_t via_wifi = 0;
    std::array<double, 3> time_in_state{};
    std::array<double, 3> empty_time_in_state{};
    double observed_time = 0.0;
    std::uint64_t arrivals = 0;
    std::array<std::uint64_t, 3> seen_empty{};
    double queue_seen_sum = 0.0;
    double growth_slope = 0.0; // queue length vs time, post-warmup
    double growth_slope_se = 0.0;
    std::vector<double> batch_delay; // per-batch mean delays (single-rep CI)
};

struct File {
    double arrival;
    double service_start; // set when it becomes head of line
};

RepStats run_replication(const SimConfig& cfg, int replication,
                         std::vector<TraceEvent>* trace, double trace_duration) {
    const SystemParams& p = cfg.params;
    ServiceStateRates rates = derive_rates(p.channel, p.policy);
    const Vec3 mu = p.service_rates();
    const double exit_rate[3] = {rates.f01 + rates.f02, rates.f12, rates.f20};

    std::mt19937_64 arr_rng = make_stream(cfg.seed, replication, 0);
    std::mt19937_64 work_rng = make_stream(cfg.seed, replication, 1);
    std::mt19937_64 mod_rng = make_stream(cfg.seed, replication, 2);

    // Start the modulation chain in its stationary law.
    Vec3 pi = steady_state(p.channel, p.policy);
    int j;
    {
        double u = u01(mod_rng);
        j = (u <= pi[0]) ? 0 : (u <= pi[0] + pi[1] ? 1 : 2);
    }

    double clock = 0.0;
    double next_arrival = exp_draw(arr_rng, p.lambda);
    double next_mod = exp_draw(mod_rng, exit_rate[j]);
    std::deque<File> queue;
    double remaining_work = 0.0; // of the head-of-line file, in unit-work terms

    const bool by_files = cfg.horizon_files > 0;
    const std::uint64_t warmup_files =
        by_files ? static_cast<std::uint64_t>(cfg.warmup_fraction *
                                              static_cast<double>(cfg.horizon_files))
                 : 0;
    const double warmup_time = by_files ? 0.0 : cfg.warmup_fraction * cfg.horizon_seconds;

    RepStats st;
    double delay_sum = 0.0, wait_sum = 0.0;
    bool warm = false;
    double warm_start = 0.0;

    // growth trend accumulators (queue length sampled at every event, time-weighted OLS)
    double g_n = 0, g_st = 0, g_stt = 0, g_sq = 0, g_stq = 0, g_sqq = 0;

    // batch means over completions (used when replications == 1)
    const std::uint64_t batch_size =
        (by_files && cfg.batch_count > 0)
            ? std::max<std::uint64_t>(1, (cfg.horizon_files - warmup_files) /
                                             static_cast<std::uint64_t>(cfg.batch_count))
            : 0;
    double batch_delay_sum = 0.0;
    std::uint64_t batch_fill = 0;

    std::uint64_t completed_total = 0;

    auto emit = [&](TraceEventKind kind) {
        if (trace != nullptr && clock <= trace_duration)
            trace->push_back({clock, kind, queue.size(), j});
    };

    while (true) {
        if (by_files) {
            if (completed_total >= cfg.horizon_files) break;
        } else if (clock >= cfg.horizon_seconds) {
            break;
        }
        if (trace != nullptr && clock > trace_duration) break;

        double t_completion = kInf;
        if (!queue.empty() && mu[static_cast<std::size_t>(j)] > 0.0)
            t_completion = clock + remaining_work / mu[static_cast<std::size_t>(j)];
        double t_next = std::min({next_arrival, next_mod, t_completion});

        double dt = t_next - clock;
        if (warm) {
            st.time_in_state[static_cast<std::size_t>(j)] += dt;
            if (queue.empty()) st.empty_time_in_state[static_cast<std::size_t>(j)] += dt;
            double tq = t_next - warm_start;
            double q = static_cast<double>(queue.size());
            g_n += dt;
            g_st += dt * tq;
            g_stt += dt * tq * tq;
            g_sq += dt * q;
            g_stq += dt * tq * q;
            g_sqq += dt * q * q;
        }
        if (!queue.empty() && mu[static_cast<std::size_t>(j)] > 0.0)
            remaining_work -= mu[static_cast<std::size_t>(j)] * dt;
        clock = t_next;

        if (!warm) {
            bool past = by_files ? (completed_total >= warmup_files) : (clock >= warmup_time);
            if (past) {
                warm = true;
                warm_start = clock;
            }
        }

        if (t_next == t_completion) {
            // remaining work drains exactly to zero at a completion
            assert(std::abs(remaining_work) < 1e-6);
            File f = queue.front();
            queue.pop_front();
            ++completed_total;
            if (warm) {
                ++st.completed;
                if (j == 2) ++st.via_wifi;
                delay_sum += clock - f.arrival;
                wait_sum += f.service_start - f.arrival;
                if (batch_size > 0) {
                    batch_delay_sum += clock - f.arrival;
                    if (++batch_fill == batch_size) {
                        st.batch_delay.push_back(batch_delay_sum /
                                                 static_cast<double>(batch_fill));
                        batch_delay_sum = 0.0;
                        batch_fill = 0;
                    }
                }
            }
            if (!queue.empty()) {
                remaining_work = exp_draw(work_rng, 1.0);
                queue.front().service_start = clock;
            }
            emit(TraceEventKind::departure);
        } else if (t_next == next_arrival) {
            if (warm) {
                ++st.arrivals;
                st.queue_seen_sum += static_cast<double>(queue.size());
                if (queue.empty()) ++st.seen_empty[static_cast<std::size_t>(j)];
            }
            if (queue.empty()) {
                remaining_work = exp_draw(work_rng, 1.0);
                queue.push_back({clock, clock}); // starts service immediately
            } else {
                queue.push_back({clock, 0.0});
            }
            next_arrival = clock + exp_draw(arr_rng, p.lambda);
            emit(TraceEventKind::arrival);
        } else {
            // modulation transition; remaining work of the HOL file is untouched
            assert(queue.empty() || remaining_work >= -1e-9); // no overdrain at a rate switch
            TraceEventKind kind;
            if (j == 0) {
                double split = rates.f01 / (rates.f01 + rates.f02);
                if (u01(mod_rng) <= split) {
                    j = 1;
                    kind = TraceEventKind::mod_0_to_1;
                } else {
                    j = 2;
                    kind = TraceEventKind::mod_0_to_2;
                }
            } else if (j == 1) {
                j = 2;
                kind = TraceEventKind::mod_1_to_2;
            } else {
                j = 0;
                kind = TraceEventKind::mod_2_to_0;
            }
            next_mod = clock + exp_draw(mod_rng, exit_rate[j]);
            emit(kind);
        }
    }

    st.observed_time = warm ? clock - warm_start : 0.0;
    if (st.completed > 0) {
        st.delay_mean = delay_sum / static_cast<double>(st.completed);
        st.wait_mean = wait_sum / static_cast<double>(st.completed);
        st.eta = static_cast<double>(st.via_wifi) / static_cast<double>(st.completed);
    }
    // time-weighted OLS slope of queue length over post-warmup time
    if (g_n > 0.0) {
        double tbar = g_st / g_n, qbar = g_sq / g_n;
        double sxx = g_stt - g_n * tbar * tbar;
        double sxy = g_stq - g_n * tbar * qbar;
        if (sxx > 0.0) {
            st.growth_slope = sxy / sxx;
            double syy = g_sqq - g_n * qbar * qbar;
            double resid = std::max(0.0, syy - st.growth_slope * sxy);
            st.growth_slope_se = std::sqrt(resid / std::max(1e-12, g_n) / sxx);
        }
    }
    return st;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double stdev_of(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

Interval t_interval(const std::vector<double>& xs) {
    double m = mean_of(xs);
    if (xs.size() < 2) return {m, m, m};
    double half = student_t_quantile(static_cast<int>(xs.size()) - 1, 0.975) *
                  stdev_of(xs, m) / std::sqrt(static_cast<double>(xs.size()));
    return {m, m - half, m + half};
}

void validate(const SimConfig& cfg) {
    if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
    if (cfg.horizon_files == 0 && !(cfg.horizon_seconds > 0.0))
        throw ConfigError("either horizon_files or horizon_seconds must be positive");
    if (!(cfg.warmup_fraction >= 0.0) || cfg.warmup_fraction >= 1.0)
        throw ConfigError("warmup_fraction must lie in [0, 1)");
    if (cfg.replications == 1 && cfg.batch_count < 10)
        throw ConfigError("batch_count must be >= 10 for single-replication CIs");
}

} // namespace

SimEstimate run(const SimConfig& cfg) {
    validate(cfg);

    std::vector<RepStats> reps;
    reps.reserve(static_cast<std::size_t>(cfg.replications));
    for (int r = 0; r < cfg.replications; ++r)
        reps.push_back(run_replication(cfg, r, nullptr, 0.0));

    SimEstimate est;
    std::array<std::uint64_t, 3> seen_empty{};
    std::vector<double> slopes;
    for (const RepStats& st : reps) {
        est.rep_delay.push_back(st.delay_mean);
        est.rep_wait.push_back(st.wait_mean);
        est.rep_eta.push_back(st.eta);
        est.files_completed += st.completed;
        est.files_via_wifi += st.via_wifi;
        for (int k = 0; k < 3; ++k) {
            est.time_in_state[static_cast<std::size_t>(k)] +=
                st.time_in_state[static_cast<std::size_t>(k)];
            est.empty_time_in_state[static_cast<std::size_t>(k)] +=
                st.empty_time_in_state[static_cast<std::size_t>(k)];
            seen_empty[static_cast<std::size_t>(k)] += st.seen_empty[static_cast<std::size_t>(k)];
        }
        est.observed_time += st.observed_time;
        est.arrivals_observed += st.arrivals;
        est.mean_queue_seen += st.queue_seen_sum;
        slopes.push_back(st.growth_slope);
    }
    if (est.arrivals_observed > 0) {
        for (int k = 0; k < 3; ++k)
            est.seen_empty_fraction[static_cast<std::size_t>(k)] =
                static_cast<double>(seen_empty[static_cast<std::size_t>(k)]) /
                static_cast<double>(est.arrivals_observed);
        est.mean_queue_seen /= static_cast<double>(est.arrivals_observed);
    }

    for (int k = 0; k < 3; ++k) {
        std::vector<double> frac, empty;
        for (const RepStats& st : reps) {
            if (st.observed_time <= 0.0) continue;
            frac.push_back(st.time_in_state[static_cast<std::size_t>(k)] / st.observed_time);
            empty.push_back(st.empty_time_in_state[static_cast<std::size_t>(k)] /
                            st.observed_time);
        }
        if (!frac.empty()) {
            est.state_fraction[static_cast<std::size_t>(k)] = t_interval(frac);
            est.empty_fraction[static_cast<std::size_t>(k)] = t_interval(empty);
        }
    }

    if (cfg.replications >= 2) {
        est.delay = t_interval(est.rep_delay);
        est.wait = t_interval(est.rep_wait);
        est.efficiency = t_interval(est.rep_eta);
        // one-sided trend test on the replication slopes at 5%
        double m = mean_of(slopes);
        double sd = stdev_of(slopes, m);
        if (sd > 0.0) {
            double tstat = m / (sd / std::sqrt(static_cast<double>(slopes.size())));
            est.growth_detected = tstat > student_t_quantile(cfg.replications - 1, 0.95);
        }
    } else {
        const RepStats& st = reps[0];
        est.delay = {st.delay_mean, st.delay_mean, st.delay_mean};
        if (st.batch_delay.size() >= 2) {
            Interval ci = t_interval(st.batch_delay);
            est.delay.lo = std::min(ci.lo, st.delay_mean);
            est.delay.hi = std::max(ci.hi, st.delay_mean);
        }
        est.wait = {st.wait_mean, st.wait_mean, st.wait_mean};
        est.efficiency = {st.eta, st.eta, st.eta};
        if (st.growth_slope_se > 0.0)
            est.growth_detected = st.growth_slope / st.growth_slope_se > 1.6448536269514722;
    }
    return est;
}

std::vector<TraceEvent> state_machine_trace(const SimConfig& cfg, double duration) {
    if (!(duration > 0.0)) throw ConfigError("trace duration must be positive");
    SimConfig c = cfg;
    c.horizon_files = 0;
    c.horizon_seconds = duration;
    c.warmup_fraction = 0.0;
    std::vector<TraceEvent> trace;
    run_replication(c, 0, &trace, duration);
    return trace;
}

const char* trace_event_name(TraceEventKind kind) {
    switch (kind) {
        case TraceEventKind::arrival: return "arrival";
        case TraceEventKind::departure: return "departure";
        case TraceEventKind::mod_0_to_1: return "0->1";
        case TraceEventKind::mod_0_to_2: return "0->2";
        case TraceEventKind::mod_1_to_2: return "1->2";
        case TraceEventKind::mod_2_to_0: return "2->0";
    }
    return "?";
}

namespace {

// Regularized incomplete beta via the Lentz continued fraction.
double betacf(double a, double b, double x) {
    const int kMaxIter = 300;
    const double kEps = 3e-16, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double incbeta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                b * std::log(1.0 - x);
    double front = std::exp(ln);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - incbeta(b, a, 1.0 - x);
}

double t_cdf(double t, int dof) {
    double v = static_cast<double>(dof);
    double x = v / (v + t * t);
    double tail = 0.5 * incbeta(v / 2.0, 0.5, x);
    return t >= 0.0 ? 1.0 - tail : tail;
}

} // namespace

double student_t_quantile(int dof, double p) {
    if (dof < 1) throw DomainError("student_t_quantile: dof must be >= 1");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("student_t_quantile: p out of range");
    if (p == 0.5) return 0.0;
    double lo = -1000.0, hi = 1000.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (t_cdf(mid, dof) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace offloadq
