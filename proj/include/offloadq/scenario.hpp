#ifndef OFFLOADQ_SCENARIO_HPP
#define OFFLOADQ_SCENARIO_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "offloadq/channel.hpp"
#include "offloadq/metrics.hpp"
#include "offloadq/simulator.hpp"

// Scenario presets and the sweep harness behind the CLI.

namespace offloadq {

struct Scenario {
    std::string name;
    ChannelParams channel;
    double mu1 = 0.564;
    double mu2 = 0.564;
    double lambda = 0.1;
    std::vector<double> tau_grid;

    SystemParams at(double tau) const {
        return SystemParams(channel, OffloadPolicy(tau), mu1, mu2, lambda);
    }
};

Scenario pedestrian_scenario();
Scenario vehicular_scenario();
Scenario scenario_by_name(const std::string& name); // throws ConfigError on unknown name

std::vector<double> default_tau_grid(); // logspace 1e-2 .. 1e5, 20 points

// "logspace:lo:hi:n" or a comma-separated list; must be strictly increasing
// and positive.
std::vector<double> parse_tau_grid(const std::string& spec);

// One output row per (grid point x method). Column order is the CSV contract.
struct SweepRow {
    std::string scenario;
    double f_c = 0, f_f = 0, tau = 0, lambda = 0, mu1 = 0, mu2 = 0;
    double wifi_ratio = 0, mobility = 0;
    double pi0 = 0, pi1 = 0, pi2 = 0;
    double beta = 0;
    double et_mean = 0;
    double waiting_time = 0;
    double delay = 0;
    double delay_little = 0;
    double eta = 0;
    double d_star = 0; // NaN when undefined
    std::string method; // "analytic" or "simulation"
    // CI columns, populated for simulation rows only (NaN otherwise)
    double delay_ci_lo = 0, delay_ci_hi = 0;
    double eta_ci_lo = 0, eta_ci_hi = 0;
    std::string error; // per-point failure note; empty on success
};

struct SweepOptions {
    bool simulate = false;
    std::uint64_t sim_horizon_files = 100000;
    int sim_replications = 10;
    std::uint64_t seed = 1;
    SolveOptions solve;
};

SweepRow analytic_row(const Scenario& sc, const PerfReport& rep);

// Evaluates every grid point; per-point failures land in the error column
// and the sweep continues. Rows are ordered by (scenario, tau, method).
std::vector<SweepRow> sweep(const Scenario& scenario, const SweepOptions& opts = {});

extern const char* const kSweepCsvHeader;

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& is); // inverse of write_csv

std::string to_json_string(const PerfReport& rep);
std::string to_json_string(const SimEstimate& est);
std::string to_json_string(const std::vector<SweepRow>& rows);
std::string discrepancy_json(const DiscrepancyReport& d);

// Human-oriented report at 4 significant figures, with provenance notes.
void print_report(std::ostream& os, const PerfReport& rep);
void print_comparison(std::ostream& os, const PerfReport& rep, const SimEstimate& est);

} // namespace offloadq

#endif
