#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "offloadq/scenario.hpp"

// Contract tests against the built binary. The path arrives via the
// OFFLOADQ_CLI environment variable (set by the ctest registration).

namespace {

struct CmdResult {
    int exit_code;
    std::string out;
};

CmdResult run_cli(const std::string& args) {
    const char* bin = std::getenv("OFFLOADQ_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "OFFLOADQ_CLI must point at the built binary");
    std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("analyze emits a full JSON report") {
    CmdResult res = run_cli("analyze --scenario pedestrian --tau 100 --json");
    REQUIRE(res.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(res.out);
    CHECK(j["D"].get<double>() == doctest::Approx(25.657917752041488).epsilon(1e-9));
    CHECK(j["eta"].get<double>() == doctest::Approx(0.4232044289456603).epsilon(1e-9));
    CHECK(j["W"].get<double>() > 0.0);
}

TEST_CASE("analyze human output carries the headline metrics") {
    CmdResult res = run_cli("analyze --scenario vehicular --tau 1e-6");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.find("D ") != std::string::npos);
    CHECK(res.out.find("2.155") != std::string::npos); // M/M/1 reduction delay
    CHECK(res.out.find("0.307") != std::string::npos); // eta ~ R
}

TEST_CASE("instability exits with code 2 and a diagnosis") {
    CmdResult res =
        run_cli("analyze --f-c 0.007 --f-f 0.016 --mu1 0.564 --mu2 0.564 --lambda 0.6 --tau 1e6");
    CHECK(res.exit_code == 2);
}

TEST_CASE("unknown flags exit with a usage error") {
    CmdResult res = run_cli("analyze --no-such-flag 1");
    CHECK(res.exit_code == 1);
}

TEST_CASE("sweep output parses back through the CSV reader") {
    std::string path = "cli_sweep_test.csv";
    CmdResult res = run_cli("sweep --scenario pedestrian --tau-grid 1,100 --out " + path);
    REQUIRE(res.exit_code == 0);
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<offloadq::SweepRow> rows = offloadq::read_csv(in);
    CHECK(rows.size() == 2);
    CHECK(rows[0].scenario == "pedestrian");
    CHECK(rows[0].tau == 1.0);
    std::remove(path.c_str());
}

TEST_CASE("distribution dump has the documented schema") {
    std::string path = "cli_dist_test.csv";
    CmdResult res =
        run_cli("analyze --scenario pedestrian --tau 100 --dump-distribution " + path);
    REQUIRE(res.exit_code == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,p0,p1,p2");
    std::string first;
    std::getline(in, first);
    CHECK(first.rfind("0,", 0) == 0);
    std::remove(path.c_str());
}

TEST_CASE("simulate writes an event trace") {
    std::string path = "cli_trace_test.csv";
    CmdResult res = run_cli("simulate --scenario pedestrian --tau 100 --horizon 2000 "
                            "--replications 1 --trace-out " +
                            path + " --trace-duration 5000");
    REQUIRE(res.exit_code == 0);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t,event,n_after,j_after");
    std::remove(path.c_str());
}

TEST_CASE("config file supplies point parameters, flags take precedence") {
    std::string path = "cli_config_test.conf";
    {
        std::ofstream cfg(path);
        cfg << "[analyze]\nf_c=0.007\nf_f=0.016\ntau=100\njson=true\n";
    }
    CmdResult from_file = run_cli("--config " + path + " analyze");
    REQUIRE(from_file.exit_code == 0);
    nlohmann::json j = nlohmann::json::parse(from_file.out);
    CHECK(j["tau"].get<double>() == 100.0);

    CmdResult overridden = run_cli("--config " + path + " analyze --tau 10");
    REQUIRE(overridden.exit_code == 0);
    nlohmann::json j2 = nlohmann::json::parse(overridden.out);
    CHECK(j2["tau"].get<double>() == 10.0);
    std::remove(path.c_str());
}

TEST_CASE("compare prints a containment table") {
    CmdResult res = run_cli("compare --scenario pedestrian --tau 100 --horizon 20000 "
                            "--replications 5 --seed 2");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.find("analytic vs simulation") != std::string::npos);
    CHECK(res.out.find("OUTSIDE CI") == std::string::npos);
}

} // TEST_SUITE
