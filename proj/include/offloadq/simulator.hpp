#ifndef OFFLOADQ_SIMULATOR_HPP
#define OFFLOADQ_SIMULATOR_HPP

#include <array>
#include <cstdint>
#include <vector>

#include "offloadq/channel.hpp"

// Discrete-event simulation of the delayed-offloading process: Poisson
// arrivals, autonomous three-state modulation, FIFO service draining
// exponential unit work at the current state's rate (zero in the delayed
// state), so a file keeps its remaining work across rate switches.

namespace offloadq {

struct SimConfig {
    SystemParams params;
    std::uint64_t horizon_files = 100000; // completions per replication (0: use horizon_seconds)
    double horizon_seconds = 0.0;
    double warmup_fraction = 0.1; // leading share of the horizon discarded
    int replications = 10;
    std::uint64_t seed = 1;
    int batch_count = 20; // batch-means CI when running a single replication
};

struct Interval {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double rel_half_width() const { return (hi - lo) / 2.0 / point; }
};

struct SimEstimate {
    Interval delay;      // mean delay D (s)
    Interval wait;       // mean waiting time W (s)
    Interval efficiency; // fraction of files completed via Wi-Fi
    std::array<Interval, 3> state_fraction{}; // time share per service state
    std::array<Interval, 3> empty_fraction{}; // time share empty in each state
    std::uint64_t files_completed = 0; // counted (post-warmup) across replications
    std::uint64_t files_via_wifi = 0;
    std::array<double, 3> time_in_state{};       // post-warmup seconds, summed over replications
    std::array<double, 3> empty_time_in_state{}; // same, while the queue is empty
    double observed_time = 0.0;                  // post-warmup seconds, summed
    std::uint64_t arrivals_observed = 0;         // post-warmup arrivals
    std::array<double, 3> seen_empty_fraction{}; // arrivals finding an empty system in state j
    double mean_queue_seen = 0.0;                // average system size at arrival instants
    bool growth_detected = false;                // queue-length trend test tripped
    std::vector<double> rep_delay, rep_wait, rep_eta; // per-replication means
};

SimEstimate run(const SimConfig& config);

enum class TraceEventKind { arrival, departure, mod_0_to_1, mod_0_to_2, mod_1_to_2, mod_2_to_0 };

struct TraceEvent {
    double t;
    TraceEventKind kind;
    std::uint64_t n_after;
    int j_after;
};

// Short diagnostic run capturing every event up to `duration` seconds.
std::vector<TraceEvent> state_machine_trace(const SimConfig& config, double duration);

const char* trace_event_name(TraceEventKind kind);

// Two-sided Student-t critical value, e.g. student_t_quantile(9, 0.975).
double student_t_quantile(int dof, double p);

} // namespace offloadq

#endif
