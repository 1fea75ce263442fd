// Command-line front end: analyze a single operating point, sweep a deadline
// grid, compare analytics against simulation, or run the simulator directly.
//
// Exit codes: 0 ok, 1 usage/config error, 2 unstable system, 3 solver
// non-convergence.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "offloadq/errors.hpp"
#include "offloadq/metrics.hpp"
#include "offloadq/scenario.hpp"
#include "offloadq/simulator.hpp"

namespace {

using namespace offloadq;

struct PointFlags {
    std::string scenario;
    double f_c = 0.007;
    double f_f = 0.016;
    double mu1 = 0.564;
    double mu2 = 0.564;
    double lambda = 0.1;
};

void add_point_flags(CLI::App* cmd, PointFlags& pf) {
    cmd->add_option("--scenario,--name", pf.scenario, "preset: pedestrian or vehicular");
    cmd->add_option("--f-c,--f_c", pf.f_c, "rate of leaving cellular-only coverage (1/s)");
    cmd->add_option("--f-f,--f_f", pf.f_f, "rate of leaving Wi-Fi coverage (1/s)");
    cmd->add_option("--mu1", pf.mu1, "cellular service rate (files/s)");
    cmd->add_option("--mu2", pf.mu2, "Wi-Fi service rate (files/s)");
    cmd->add_option("--lambda", pf.lambda, "Poisson arrival rate (files/s)");
}

// CLI flags override scenario presets; a bare preset keeps its parameters.
Scenario resolve_scenario(const CLI::App* cmd, const PointFlags& pf) {
    Scenario sc = pf.scenario.empty() ? Scenario{"custom", ChannelParams(pf.f_c, pf.f_f),
                                                 pf.mu1, pf.mu2, pf.lambda, default_tau_grid()}
                                      : scenario_by_name(pf.scenario);
    if (!pf.scenario.empty()) {
        if (cmd->count("--f-c") > 0) sc.channel = ChannelParams(pf.f_c, sc.channel.f_f);
        if (cmd->count("--f-f") > 0) sc.channel = ChannelParams(sc.channel.f_c, pf.f_f);
        if (cmd->count("--mu1") > 0) sc.mu1 = pf.mu1;
        if (cmd->count("--mu2") > 0) sc.mu2 = pf.mu2;
        if (cmd->count("--lambda") > 0) sc.lambda = pf.lambda;
    }
    return sc;
}

std::ostream& open_out(std::ofstream& file, const std::string& path) {
    if (path.empty()) return std::cout;
    file.open(path);
    if (!file) throw ConfigError("cannot open output file '" + path + "'");
    return file;
}

void dump_distribution(const QueueSolution& sol, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open distribution dump file '" + path + "'");
    os << "n,p0,p1,p2\n";
    char buf[128];
    for (std::size_t n = 0; n < sol.p.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", n, sol.p[n][0], sol.p[n][1],
                      sol.p[n][2]);
        os << buf;
    }
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Delayed Wi-Fi offloading queue analyzer"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; CLI flags take precedence");

    // ---- analyze ----
    auto* analyze_cmd = app.add_subcommand("analyze", "solve a single operating point");
    PointFlags an_pf;
    double an_tau = 100.0;
    bool an_json = false;
    std::string an_out, an_dump;
    add_point_flags(analyze_cmd, an_pf);
    analyze_cmd->add_option("--tau", an_tau, "mean deadline of the delayed state (s)");
    analyze_cmd->add_flag("--json", an_json, "emit the full report as JSON");
    analyze_cmd->add_option("--out", an_out, "write output to a file instead of stdout");
    analyze_cmd->add_option("--dump-distribution", an_dump,
                            "write the joint queue distribution as CSV (n,p0,p1,p2)");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "run a deadline grid, emit CSV");
    PointFlags sw_pf;
    std::string sw_grid;
    bool sw_sim = false, sw_json = false;
    std::string sw_out;
    std::uint64_t sw_seed = 1, sw_horizon = 100000;
    int sw_reps = 10;
    add_point_flags(sweep_cmd, sw_pf);
    sweep_cmd->add_option("--tau-grid,--tau_grid", sw_grid,
                          "comma list or logspace:lo:hi:n (default logspace:1e-2:1e5:20)");
    sweep_cmd->add_flag("--simulate", sw_sim, "add one simulation row per grid point");
    sweep_cmd->add_option("--seed", sw_seed, "simulation seed");
    sweep_cmd->add_option("--horizon", sw_horizon, "files completed per replication");
    sweep_cmd->add_option("--replications", sw_reps, "simulation replications");
    sweep_cmd->add_option("--out", sw_out, "output CSV path (default stdout)");
    sweep_cmd->add_flag("--json", sw_json, "emit rows as JSON instead of CSV");

    // ---- compare ----
    auto* cmp_cmd = app.add_subcommand("compare", "analytic vs simulation at one point");
    PointFlags cp_pf;
    double cp_tau = 100.0;
    std::uint64_t cp_seed = 1, cp_horizon = 100000;
    int cp_reps = 10;
    bool cp_json = false;
    add_point_flags(cmp_cmd, cp_pf);
    cmp_cmd->add_option("--tau", cp_tau, "mean deadline (s)");
    cmp_cmd->add_option("--seed", cp_seed, "simulation seed");
    cmp_cmd->add_option("--horizon", cp_horizon, "files completed per replication");
    cmp_cmd->add_option("--replications", cp_reps, "simulation replications");
    cmp_cmd->add_flag("--json", cp_json, "emit both reports as JSON");

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "run the discrete-event simulator");
    PointFlags sm_pf;
    double sm_tau = 100.0;
    std::uint64_t sm_seed = 1, sm_horizon = 100000;
    int sm_reps = 10;
    bool sm_json = false;
    std::string sm_trace;
    double sm_trace_dur = 1000.0;
    add_point_flags(sim_cmd, sm_pf);
    sim_cmd->add_option("--tau", sm_tau, "mean deadline (s)");
    sim_cmd->add_option("--seed", sm_seed, "simulation seed");
    sim_cmd->add_option("--horizon", sm_horizon, "files completed per replication");
    sim_cmd->add_option("--replications", sm_reps, "replications");
    sim_cmd->add_flag("--json", sm_json, "emit the estimate as JSON");
    sim_cmd->add_option("--trace-out", sm_trace, "write an event trace CSV (t,event,n,j)");
    sim_cmd->add_option("--trace-duration", sm_trace_dur, "trace length in simulated seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1; // keep 0 for --help, usage errors exit 1
    }

    if (analyze_cmd->parsed()) {
        Scenario sc = resolve_scenario(analyze_cmd, an_pf);
        SystemParams params = sc.at(an_tau);
        Stability st = stability(params);
        if (!st.stable) {
            std::cerr << "unstable point: lambda = " << params.lambda
                      << " >= mu_hat = " << st.mu_hat << " (rho = " << st.rho << ")\n";
            return 2;
        }
        PerfReport rep = analyze(params);
        std::ofstream file;
        std::ostream& os = open_out(file, an_out);
        if (an_json)
            os << to_json_string(rep) << "\n";
        else
            print_report(os, rep);
        if (!an_dump.empty()) {
            QueueSolution sol = solve_stationary(build_generator(params));
            dump_distribution(sol, an_dump);
        }
        return 0;
    }

    if (sweep_cmd->parsed()) {
        SweepOptions opts;
        opts.simulate = sw_sim;
        opts.seed = sw_seed;
        opts.sim_horizon_files = sw_horizon;
        opts.sim_replications = sw_reps;
        std::vector<Scenario> scenarios;
        if (sw_pf.scenario.empty() && sweep_cmd->count("--f-c") == 0 &&
            sweep_cmd->count("--f-f") == 0) {
            scenarios = {pedestrian_scenario(), vehicular_scenario()};
        } else {
            scenarios = {resolve_scenario(sweep_cmd, sw_pf)};
        }
        std::vector<SweepRow> rows;
        for (Scenario& sc : scenarios) {
            if (!sw_grid.empty()) sc.tau_grid = parse_tau_grid(sw_grid);
            std::vector<SweepRow> part = sweep(sc, opts);
            rows.insert(rows.end(), part.begin(), part.end());
        }
        std::ofstream file;
        std::ostream& os = open_out(file, sw_out);
        if (sw_json)
            os << to_json_string(rows) << "\n";
        else
            write_csv(os, rows);
        return 0;
    }

    if (cmp_cmd->parsed()) {
        Scenario sc = resolve_scenario(cmp_cmd, cp_pf);
        SystemParams params = sc.at(cp_tau);
        Stability st = stability(params);
        if (!st.stable) {
            std::cerr << "unstable point: lambda = " << params.lambda
                      << " >= mu_hat = " << st.mu_hat << " (rho = " << st.rho << ")\n";
            return 2;
        }
        PerfReport rep = analyze(params);
        SimConfig cfg{params};
        cfg.seed = cp_seed;
        cfg.horizon_files = cp_horizon;
        cfg.replications = cp_reps;
        SimEstimate est = run(cfg);
        if (cp_json) {
            std::cout << "{\"analytic\": " << to_json_string(rep)
                      << ",\n\"simulation\": " << to_json_string(est) << "}\n";
        } else {
            print_comparison(std::cout, rep, est);
        }
        return 0;
    }

    // simulate
    Scenario sc = resolve_scenario(sim_cmd, sm_pf);
    SystemParams params = sc.at(sm_tau);
    SimConfig cfg{params};
    cfg.seed = sm_seed;
    cfg.horizon_files = sm_horizon;
    cfg.replications = sm_reps;
    if (!sm_trace.empty()) {
        std::vector<TraceEvent> trace = state_machine_trace(cfg, sm_trace_dur);
        std::ofstream os(sm_trace);
        if (!os) throw ConfigError("cannot open trace file '" + sm_trace + "'");
        os << "t,event,n_after,j_after\n";
        for (const TraceEvent& ev : trace)
            os << ev.t << ',' << trace_event_name(ev.kind) << ',' << ev.n_after << ','
               << ev.j_after << "\n";
    }
    SimEstimate est = run(cfg);
    if (sm_json) {
        std::cout << to_json_string(est) << "\n";
    } else {
        std::cout << "D   = " << est.delay.point << " s  [" << est.delay.lo << ", "
                  << est.delay.hi << "]\n"
                  << "W   = " << est.wait.point << " s  [" << est.wait.lo << ", " << est.wait.hi
                  << "]\n"
                  << "eta = " << est.efficiency.point << "    [" << est.efficiency.lo << ", "
                  << est.efficiency.hi << "]\n"
                  << "files = " << est.files_completed << " (" << est.files_via_wifi
                  << " via Wi-Fi)\n";
        if (est.growth_detected) std::cout << "warning: queue growth trend detected\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const InstabilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
