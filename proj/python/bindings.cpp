// Python bindings for the core operations: channel quantities, the CTMC
// solve, the embedded-chain metrics pipeline, the simulator and the sweep
// harness.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "offloadq/channel.hpp"
#include "offloadq/embedded.hpp"
#include "offloadq/errors.hpp"
#include "offloadq/metrics.hpp"
#include "offloadq/qbd.hpp"
#include "offloadq/scenario.hpp"
#include "offloadq/simulator.hpp"

namespace py = pybind11;
using namespace offloadq;

namespace {

SystemParams make_params(double f_c, double f_f, double tau, double mu1, double mu2,
                         double lambda) {
    return SystemParams(ChannelParams(f_c, f_f), OffloadPolicy(tau), mu1, mu2, lambda);
}

} // namespace

PYBIND11_MODULE(offloadq, m) {
    m.doc() = "Delayed Wi-Fi offloading queue analyzer: closed forms, CTMC solver, simulator";

    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<InstabilityError>(m, "InstabilityError");
    py::register_exception<ConvergenceError>(m, "ConvergenceError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init<double, double>(), py::arg("f_c"), py::arg("f_f"))
        .def_readonly("f_c", &ChannelParams::f_c)
        .def_readonly("f_f", &ChannelParams::f_f)
        .def_property_readonly("wifi_ratio", &ChannelParams::wifi_ratio)
        .def_property_readonly("mobility", &ChannelParams::mobility);

    py::class_<OffloadPolicy>(m, "OffloadPolicy")
        .def(py::init<double>(), py::arg("tau"))
        .def_readonly("tau", &OffloadPolicy::tau)
        .def_property_readonly("deadline_rate", &OffloadPolicy::deadline_rate);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init(&make_params), py::arg("f_c"), py::arg("f_f"), py::arg("tau"),
             py::arg("mu1"), py::arg("mu2"), py::arg("lambda_"))
        .def_readonly("channel", &SystemParams::channel)
        .def_readonly("policy", &SystemParams::policy)
        .def_readonly("mu1", &SystemParams::mu1)
        .def_readonly("mu2", &SystemParams::mu2)
        .def_readonly("lambda_", &SystemParams::lambda);

    m.def(
        "steady_state",
        [](const SystemParams& p) { return steady_state(p.channel, p.policy); },
        py::arg("params"), "Stationary probabilities (pi0, pi1, pi2) of the service states");
    m.def("average_rate", &average_rate, py::arg("params"));

    py::class_<Stability>(m, "Stability")
        .def_readonly("stable", &Stability::stable)
        .def_readonly("rho", &Stability::rho)
        .def_readonly("mu_hat", &Stability::mu_hat);
    m.def("stability", &stability, py::arg("params"));

    py::class_<QueueSolution>(m, "QueueSolution")
        .def_readonly("p", &QueueSolution::p)
        .def_readonly("truncation", &QueueSolution::truncation)
        .def_readonly("tail_mass", &QueueSolution::tail_mass)
        .def_readonly("converged", &QueueSolution::converged)
        .def("marginal", &QueueSolution::marginal, py::arg("state"))
        .def("mean_queue_length", &QueueSolution::mean_queue_length);
    m.def(
        "solve_stationary",
        [](const SystemParams& p, double tail_tol) {
            SolveOptions opts;
            opts.tail_tol = tail_tol;
            return solve_stationary(build_generator(p), opts);
        },
        py::arg("params"), py::arg("tail_tol") = 1e-10,
        "Joint stationary distribution p[n][j] of the (queue length, service state) chain");
    m.def("empty_probabilities", &empty_probabilities, py::arg("solution"),
          "(p00, p01, p02): probabilities of an empty system in each service state");
    m.def(
        "generating_function",
        [](const QueueSolution& sol, int state, double z) {
            GfValue g = generating_function(sol, state, z);
            return py::make_tuple(g.value, g.trunc_bound);
        },
        py::arg("solution"), py::arg("state"), py::arg("z"),
        "G_j(z) = sum_n p[n][j] z^n, returned with its truncation error bound");

    py::class_<PerfReport>(m, "PerfReport")
        .def_readonly("wifi_ratio", &PerfReport::wifi_ratio)
        .def_readonly("mobility", &PerfReport::mobility)
        .def_readonly("pi", &PerfReport::pi)
        .def_readonly("mu_hat", &PerfReport::mu_hat)
        .def_readonly("rho", &PerfReport::rho)
        .def_readonly("beta", &PerfReport::beta)
        .def_readonly("et", &PerfReport::et)
        .def_readonly("et_mean", &PerfReport::et_mean)
        .def_readonly("pi_hat", &PerfReport::pi_hat)
        .def_readonly("p0", &PerfReport::p0)
        .def_readonly("waiting_time", &PerfReport::waiting_time)
        .def_readonly("delay", &PerfReport::delay)
        .def_readonly("delay_little", &PerfReport::delay_little)
        .def_readonly("eta", &PerfReport::eta)
        .def_readonly("d_star", &PerfReport::d_star)
        .def("to_json", [](const PerfReport& r) { return to_json_string(r); })
        .def("__repr__", [](const PerfReport& r) {
            std::ostringstream ss;
            ss << "PerfReport(D=" << r.delay << ", eta=" << r.eta << ")";
            return ss.str();
        });
    m.def(
        "analyze", [](const SystemParams& p) { return analyze(p); }, py::arg("params"),
        "Full analytic pipeline: channel -> CTMC -> embedded chain -> metrics");
    m.def("asymptotic_delay", &asymptotic_delay, py::arg("params"),
          "Mean delay in the infinite-deadline limit");

    py::class_<Interval>(m, "Interval")
        .def_readonly("point", &Interval::point)
        .def_readonly("lo", &Interval::lo)
        .def_readonly("hi", &Interval::hi);

    py::class_<SimEstimate>(m, "SimEstimate")
        .def_readonly("delay", &SimEstimate::delay)
        .def_readonly("wait", &SimEstimate::wait)
        .def_readonly("efficiency", &SimEstimate::efficiency)
        .def_readonly("state_fraction", &SimEstimate::state_fraction)
        .def_readonly("empty_fraction", &SimEstimate::empty_fraction)
        .def_readonly("files_completed", &SimEstimate::files_completed)
        .def_readonly("files_via_wifi", &SimEstimate::files_via_wifi)
        .def_readonly("time_in_state", &SimEstimate::time_in_state)
        .def_readonly("empty_time_in_state", &SimEstimate::empty_time_in_state)
        .def_readonly("observed_time", &SimEstimate::observed_time)
        .def_readonly("growth_detected", &SimEstimate::growth_detected)
        .def("to_json", [](const SimEstimate& e) { return to_json_string(e); });
    m.def(
        "simulate",
        [](const SystemParams& p, std::uint64_t horizon_files, int replications,
           std::uint64_t seed) {
            SimConfig cfg{p};
            cfg.horizon_files = horizon_files;
            cfg.replications = replications;
            cfg.seed = seed;
            return run(cfg);
        },
        py::arg("params"), py::arg("horizon_files") = 100000, py::arg("replications") = 10,
        py::arg("seed") = 1, "Discrete-event simulation estimate of D, W and eta");

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("name", &Scenario::name)
        .def_readonly("mu1", &Scenario::mu1)
        .def_readonly("mu2", &Scenario::mu2)
        .def_readonly("lambda_", &Scenario::lambda)
        .def_readonly("tau_grid", &Scenario::tau_grid)
        .def("at", &Scenario::at, py::arg("tau"));
    m.def("pedestrian_scenario", &pedestrian_scenario);
    m.def("vehicular_scenario", &vehicular_scenario);
    m.def("parse_tau_grid", &parse_tau_grid, py::arg("spec"));

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("scenario", &SweepRow::scenario)
        .def_readonly("tau", &SweepRow::tau)
        .def_readonly("delay", &SweepRow::delay)
        .def_readonly("eta", &SweepRow::eta)
        .def_readonly("d_star", &SweepRow::d_star)
        .def_readonly("method", &SweepRow::method)
        .def_readonly("error", &SweepRow::error);
    m.def(
        "sweep",
        [](const Scenario& sc, bool simulate, std::uint64_t horizon_files, int replications,
           std::uint64_t seed) {
            SweepOptions opts;
            opts.simulate = simulate;
            opts.sim_horizon_files = horizon_files;
            opts.sim_replications = replications;
            opts.seed = seed;
            return sweep(sc, opts);
        },
        py::arg("scenario"), py::arg("simulate") = false, py::arg("horizon_files") = 100000,
        py::arg("replications") = 10, py::arg("seed") = 1);
}
