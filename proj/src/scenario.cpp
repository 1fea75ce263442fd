#include "offloadq/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "offloadq/errors.hpp"

namespace offloadq {

using nlohmann::json;

Scenario pedestrian_scenario() {
    return {"pedestrian", ChannelParams(0.007, 0.016), 0.564, 0.564, 0.1, default_tau_grid()};
}

Scenario vehicular_scenario() {
    return {"vehicular", ChannelParams(0.035, 0.079), 0.564, 0.564, 0.1, default_tau_grid()};
}

Scenario scenario_by_name(const std::string& name) {
    if (name == "pedestrian") return pedestrian_scenario();
    if (name == "vehicular") return vehicular_scenario();
    throw ConfigError("unknown scenario '" + name + "' (expected pedestrian or vehicular)");
}

std::vector<double> default_tau_grid() { return parse_tau_grid("logspace:1e-2:1e5:20"); }

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_double(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(std::string("cannot parse ") + what + " from '" + s + "'");
    }
}

void require_increasing_positive(const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("tau grid is empty");
    double prev = 0.0;
    for (double t : grid) {
        if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("tau grid values must be positive");
        if (t <= prev) throw ConfigError("tau grid must be strictly increasing");
        prev = t;
    }
}

} // namespace

std::vector<double> parse_tau_grid(const std::string& spec) {
    std::vector<double> grid;
    if (spec.rfind("logspace:", 0) == 0) {
        std::vector<std::string> parts = split(spec, ':');
        if (parts.size() != 4) throw ConfigError("expected logspace:lo:hi:n, got '" + spec + "'");
        double lo = parse_double(parts[1], "logspace lo");
        double hi = parse_double(parts[2], "logspace hi");
        double nd = parse_double(parts[3], "logspace n");
        int n = static_cast<int>(nd);
        if (n < 2 || !(lo > 0.0) || !(hi > lo))
            throw ConfigError("logspace needs 0 < lo < hi and n >= 2");
        double llo = std::log10(lo), lhi = std::log10(hi);
        for (int i = 0; i < n; ++i)
            grid.push_back(std::pow(10.0, llo + (lhi - llo) * i / (n - 1)));
    } else {
        for (const std::string& part : split(spec, ','))
            grid.push_back(parse_double(part, "tau"));
    }
    require_increasing_positive(grid);
    return grid;
}

SweepRow analytic_row(const Scenario& sc, const PerfReport& rep) {
    SweepRow row;
    row.scenario = sc.name;
    row.f_c = rep.f_c;
    row.f_f = rep.f_f;
    row.tau = rep.tau;
    row.lambda = rep.lambda;
    row.mu1 = rep.mu1;
    row.mu2 = rep.mu2;
    row.wifi_ratio = rep.wifi_ratio;
    row.mobility = rep.mobility;
    row.pi0 = rep.pi[0];
    row.pi1 = rep.pi[1];
    row.pi2 = rep.pi[2];
    row.beta = rep.beta;
    row.et_mean = rep.et_mean;
    row.waiting_time = rep.waiting_time;
    row.delay = rep.delay;
    row.delay_little = rep.delay_little;
    row.eta = rep.eta;
    row.d_star = rep.d_star;
    row.method = "analytic";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.delay_ci_lo = row.delay_ci_hi = row.eta_ci_lo = row.eta_ci_hi = nan;
    return row;
}

namespace {

SweepRow failure_row(const Scenario& sc, double tau, const std::string& method,
                     const std::string& error) {
    SweepRow row;
    row.scenario = sc.name;
    row.f_c = sc.channel.f_c;
    row.f_f = sc.channel.f_f;
    row.tau = tau;
    row.lambda = sc.lambda;
    row.mu1 = sc.mu1;
    row.mu2 = sc.mu2;
    row.wifi_ratio = sc.channel.wifi_ratio();
    row.mobility = sc.channel.mobility();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    row.pi0 = row.pi1 = row.pi2 = row.beta = row.et_mean = nan;
    row.waiting_time = row.delay = row.delay_little = row.eta = row.d_star = nan;
    row.delay_ci_lo = row.delay_ci_hi = row.eta_ci_lo = row.eta_ci_hi = nan;
    row.method = method;
    row.error = error;
    return row;
}

} // namespace

std::vector<SweepRow> sweep(const Scenario& scenario, const SweepOptions& opts) {
    std::vector<SweepRow> rows;
    for (double tau : scenario.tau_grid) {
        SystemParams params = scenario.at(tau);
        std::optional<PerfReport> rep;
        try {
            rep = analyze(params, opts.solve);
            rows.push_back(analytic_row(scenario, *rep));
        } catch (const std::exception& e) {
            rows.push_back(failure_row(scenario, tau, "analytic", e.what()));
        }
        if (!opts.simulate) continue;
        try {
            SimConfig cfg{params};
            cfg.horizon_files = opts.sim_horizon_files;
            cfg.replications = opts.sim_replications;
            cfg.seed = opts.seed;
            SimEstimate est = run(cfg);
            SweepRow row =
                rep ? analytic_row(scenario, *rep)
                    : failure_row(scenario, tau, "simulation", "");
            row.method = "simulation";
            row.error.clear();
            row.waiting_time = est.wait.point;
            row.delay = est.delay.point;
            row.delay_little = std::numeric_limits<double>::quiet_NaN();
            row.eta = est.efficiency.point;
            row.delay_ci_lo = est.delay.lo;
            row.delay_ci_hi = est.delay.hi;
            row.eta_ci_lo = est.efficiency.lo;
            row.eta_ci_hi = est.efficiency.hi;
            if (est.growth_detected) row.error = "queue growth trend detected";
            rows.push_back(row);
        } catch (const std::exception& e) {
            rows.push_back(failure_row(scenario, tau, "simulation", e.what()));
        }
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.scenario != b.scenario) return a.scenario < b.scenario;
        if (a.tau != b.tau) return a.tau < b.tau;
        return a.method < b.method;
    });
    return rows;
}

const char* const kSweepCsvHeader =
    "scenario,f_C,f_F,tau,lambda,mu1,mu2,R,f,pi0,pi1,pi2,beta,ET,W,D,D_little,eta,D_star,method,"
    "D_ci_lo,D_ci_hi,eta_ci_lo,eta_ci_hi,error";

namespace {

std::string fmt_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// keep the error column single-cell
std::string csv_safe(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n') ch = ';';
    return s;
}

} // namespace

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << kSweepCsvHeader << "\n";
    for (const SweepRow& r : rows) {
        os << csv_safe(r.scenario) << ',' << fmt_full(r.f_c) << ',' << fmt_full(r.f_f) << ','
           << fmt_full(r.tau) << ',' << fmt_full(r.lambda) << ',' << fmt_full(r.mu1) << ','
           << fmt_full(r.mu2) << ',' << fmt_full(r.wifi_ratio) << ',' << fmt_full(r.mobility)
           << ',' << fmt_full(r.pi0) << ',' << fmt_full(r.pi1) << ',' << fmt_full(r.pi2) << ','
           << fmt_full(r.beta) << ',' << fmt_full(r.et_mean) << ',' << fmt_full(r.waiting_time)
           << ',' << fmt_full(r.delay) << ',' << fmt_full(r.delay_little) << ','
           << fmt_full(r.eta) << ',' << fmt_full(r.d_star) << ',' << r.method << ','
           << fmt_full(r.delay_ci_lo) << ',' << fmt_full(r.delay_ci_hi) << ','
           << fmt_full(r.eta_ci_lo) << ',' << fmt_full(r.eta_ci_hi) << ',' << csv_safe(r.error)
           << "\n";
    }
}

std::vector<SweepRow> read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty sweep CSV");
    if (line != kSweepCsvHeader) throw ConfigError("unexpected sweep CSV header: " + line);
    std::vector<SweepRow> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f = split(line, ',');
        if (f.size() != 25) throw ConfigError("bad sweep CSV row: " + line);
        SweepRow r;
        int i = 0;
        r.scenario = f[i++];
        r.f_c = parse_double(f[i++], "f_C");
        r.f_f = parse_double(f[i++], "f_F");
        r.tau = parse_double(f[i++], "tau");
        r.lambda = parse_double(f[i++], "lambda");
        r.mu1 = parse_double(f[i++], "mu1");
        r.mu2 = parse_double(f[i++], "mu2");
        r.wifi_ratio = parse_double(f[i++], "R");
        r.mobility = parse_double(f[i++], "f");
        r.pi0 = parse_double(f[i++], "pi0");
        r.pi1 = parse_double(f[i++], "pi1");
        r.pi2 = parse_double(f[i++], "pi2");
        r.beta = parse_double(f[i++], "beta");
        r.et_mean = parse_double(f[i++], "ET");
        r.waiting_time = parse_double(f[i++], "W");
        r.delay = parse_double(f[i++], "D");
        r.delay_little = parse_double(f[i++], "D_little");
        r.eta = parse_double(f[i++], "eta");
        r.d_star = parse_double(f[i++], "D_star");
        r.method = f[i++];
        r.delay_ci_lo = parse_double(f[i++], "D_ci_lo");
        r.delay_ci_hi = parse_double(f[i++], "D_ci_hi");
        r.eta_ci_lo = parse_double(f[i++], "eta_ci_lo");
        r.eta_ci_hi = parse_double(f[i++], "eta_ci_hi");
        r.error = f[i++];
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

json nan_safe(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

json report_json(const PerfReport& rep) {
    json provenance = json::object();
    for (const auto& [key, note] : rep.provenance) provenance[key] = note;
    return json{{"f_C", rep.f_c},
                {"f_F", rep.f_f},
                {"tau", rep.tau},
                {"lambda", rep.lambda},
                {"mu1", rep.mu1},
                {"mu2", rep.mu2},
                {"R", rep.wifi_ratio},
                {"f", rep.mobility},
                {"pi", rep.pi},
                {"mu_hat", rep.mu_hat},
                {"rho", rep.rho},
                {"stable", rep.stable},
                {"beta", rep.beta},
                {"theta", rep.theta},
                {"ET_by_state", rep.et},
                {"ET", rep.et_mean},
                {"pi_hat", rep.pi_hat},
                {"pi_hat_closed_form", rep.pi_hat_closed},
                {"p0", rep.p0},
                {"L", rep.mean_queue_length},
                {"W", rep.waiting_time},
                {"W_closed", rep.waiting_time_closed},
                {"D", rep.delay},
                {"D_little", rep.delay_little},
                {"eta", rep.eta},
                {"D_star", nan_safe(rep.d_star)},
                {"truncation", rep.truncation},
                {"tail_mass", rep.tail_mass},
                {"method", "analytic"},
                {"provenance", provenance}};
}

json interval_json(const Interval& iv) {
    return json{{"point", iv.point}, {"ci_lo", iv.lo}, {"ci_hi", iv.hi}};
}

json estimate_json(const SimEstimate& est) {
    json state = json::array(), empty = json::array();
    for (int k = 0; k < 3; ++k) {
        state.push_back(interval_json(est.state_fraction[static_cast<std::size_t>(k)]));
        empty.push_back(interval_json(est.empty_fraction[static_cast<std::size_t>(k)]));
    }
    return json{{"D", interval_json(est.delay)},
                {"W", interval_json(est.wait)},
                {"eta", interval_json(est.efficiency)},
                {"state_fraction", state},
                {"empty_fraction", empty},
                {"files_completed", est.files_completed},
                {"files_via_wifi", est.files_via_wifi},
                {"time_in_state", est.time_in_state},
                {"empty_time_in_state", est.empty_time_in_state},
                {"observed_time", est.observed_time},
                {"arrivals_observed", est.arrivals_observed},
                {"seen_empty_fraction", est.seen_empty_fraction},
                {"mean_queue_seen", est.mean_queue_seen},
                {"growth_detected", est.growth_detected},
                {"method", "simulation"}};
}

} // namespace

std::string to_json_string(const PerfReport& rep) { return report_json(rep).dump(2); }

std::string to_json_string(const SimEstimate& est) { return estimate_json(est).dump(2); }

std::string to_json_string(const std::vector<SweepRow>& rows) {
    json arr = json::array();
    for (const SweepRow& r : rows) {
        arr.push_back(json{{"scenario", r.scenario},
                           {"f_C", r.f_c},
                           {"f_F", r.f_f},
                           {"tau", r.tau},
                           {"lambda", r.lambda},
                           {"mu1", r.mu1},
                           {"mu2", r.mu2},
                           {"R", r.wifi_ratio},
                           {"f", r.mobility},
                           {"pi0", nan_safe(r.pi0)},
                           {"pi1", nan_safe(r.pi1)},
                           {"pi2", nan_safe(r.pi2)},
                           {"beta", nan_safe(r.beta)},
                           {"ET", nan_safe(r.et_mean)},
                           {"W", nan_safe(r.waiting_time)},
                           {"D", nan_safe(r.delay)},
                           {"D_little", nan_safe(r.delay_little)},
                           {"eta", nan_safe(r.eta)},
                           {"D_star", nan_safe(r.d_star)},
                           {"method", r.method},
                           {"D_ci_lo", nan_safe(r.delay_ci_lo)},
                           {"D_ci_hi", nan_safe(r.delay_ci_hi)},
                           {"eta_ci_lo", nan_safe(r.eta_ci_lo)},
                           {"eta_ci_hi", nan_safe(r.eta_ci_hi)},
                           {"error", r.error}});
    }
    return arr.dump(2);
}

std::string discrepancy_json(const DiscrepancyReport& d) {
    return json{{"pi_hat_recursion", d.pi_hat_recursion},
                {"pi_hat_closed_form", d.pi_hat_closed_form},
                {"pi_hat_delta", d.pi_hat_delta},
                {"pi_hat_closed_form_sum", d.pi_hat_closed_form_sum},
                {"W_recursion", d.w_recursion},
                {"W_corrected", d.w_corrected},
                {"W_literal", d.w_literal},
                {"W_corrected_rel_gap", d.w_corrected_rel_gap}}
        .dump(2);
}

namespace {

std::string fmt4(double v) {
    if (std::isnan(v)) return "n/a";
    std::ostringstream ss;
    ss << std::setprecision(4) << v;
    return ss.str();
}

} // namespace

void print_report(std::ostream& os, const PerfReport& rep) {
    os << "point: f_C=" << fmt4(rep.f_c) << " f_F=" << fmt4(rep.f_f) << " tau=" << fmt4(rep.tau)
       << " lambda=" << fmt4(rep.lambda) << " mu1=" << fmt4(rep.mu1) << " mu2=" << fmt4(rep.mu2)
       << "\n";
    os << "channel: R=" << fmt4(rep.wifi_ratio) << " f=" << fmt4(rep.mobility)
       << " pi=(" << fmt4(rep.pi[0]) << ", " << fmt4(rep.pi[1]) << ", " << fmt4(rep.pi[2])
       << ") mu_hat=" << fmt4(rep.mu_hat) << " rho=" << fmt4(rep.rho) << "\n";
    os << "chain: beta=" << fmt4(rep.beta) << " pi_hat=(" << fmt4(rep.pi_hat[0]) << ", "
       << fmt4(rep.pi_hat[1]) << ", " << fmt4(rep.pi_hat[2]) << ") E[T]=" << fmt4(rep.et_mean)
       << "\n";
    os << "queue: p0=(" << fmt4(rep.p0[0]) << ", " << fmt4(rep.p0[1]) << ", " << fmt4(rep.p0[2])
       << ") L=" << fmt4(rep.mean_queue_length) << " truncation=" << rep.truncation
       << " tail_mass=" << fmt4(rep.tail_mass) << "\n";
    os << "  W        = " << fmt4(rep.waiting_time) << " s   [" << "embedded recursion" << "]\n";
    os << "  W_closed = " << fmt4(rep.waiting_time_closed) << " s   [corrected closed form]\n";
    os << "  D        = " << fmt4(rep.delay) << " s   [W + E[T]]\n";
    os << "  D_little = " << fmt4(rep.delay_little) << " s   [L / lambda]\n";
    os << "  eta      = " << fmt4(rep.eta) << "     [(mu2/lambda)(pi2 - p02)]\n";
    os << "  D_star   = " << fmt4(rep.d_star) << " s   [infinite-deadline limit]\n";
}

void print_comparison(std::ostream& os, const PerfReport& rep, const SimEstimate& est) {
    auto line = [&](const std::string& name, double analytic, const Interval& iv) {
        bool inside = iv.contains(analytic);
        os << "  " << name << ": analytic=" << fmt4(analytic) << "  sim=" << fmt4(iv.point)
           << " [" << fmt4(iv.lo) << ", " << fmt4(iv.hi) << "]  "
           << (inside ? "ok" : "OUTSIDE CI") << "\n";
    };
    os << "analytic vs simulation (95% CI, " << est.rep_delay.size() << " replications)\n";
    line("D   ", rep.delay, est.delay);
    line("W   ", rep.waiting_time, est.wait);
    line("eta ", rep.eta, est.efficiency);
    for (int k = 0; k < 3; ++k)
        line("pi" + std::to_string(k) + " ", rep.pi[static_cast<std::size_t>(k)],
             est.state_fraction[static_cast<std::size_t>(k)]);
    for (int k = 0; k < 3; ++k)
        line("p0," + std::to_string(k), rep.p0[static_cast<std::size_t>(k)],
             est.empty_fraction[static_cast<std::size_t>(k)]);
}

} // namespace offloadq
