#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ellip/catalog.hpp"
#include "ellip/parse.hpp"

using namespace ellip;

#ifndef ELLIP_CLI_PATH
#define ELLIP_CLI_PATH "./ellip"
#endif

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(ELLIP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("round-trip: parse(serialize(op)) = op for all catalog members") {
    for (const auto& name : catalog_names()) {
        CatalogParams p;
        p.n = name == "directional_example" ? 3 : 2;
        p.k = 2;
        Operator op = catalog(name, p);
        Operator back = parse_operator(operator_to_json(op).dump());
        CHECK(back == op);
    }
}

TEST_CASE("exit codes per command") {
    SUBCASE("decisive classification exits 0") {
        CHECK(run_cli("classify --catalog laplacian --n 2 --direction 0,1 --samples 8 "
                      "--out /tmp/ellip_cli_t1.json") == 0);
    }
    SUBCASE("budget exhaustion exits 2") {
        CHECK(run_cli("classify --catalog symmetric_gradient --n 2 --direction 0,1 "
                      "--budget 20 --samples 4 --out /tmp/ellip_cli_t2.json") == 2);
    }
    SUBCASE("errors exit 1, usage exits 64") {
        CHECK(run_cli("classify --catalog no_such_operator --direction 0,1") == 1);
        CHECK(run_cli("classify --direction 0,1") == 64);
        CHECK(run_cli("") == 64);
        CHECK(run_cli("classify --catalog gradient --n 2 --direction 0.5,1") == 1);
    }
    SUBCASE("catalog-list exits 0") { CHECK(run_cli("catalog-list --out /tmp/ellip_cli_t3.json") == 0); }
}

TEST_CASE("identical seeds give byte-identical artifacts") {
    std::string base = "classify --catalog cauchy_riemann --n 2 --direction 0,1 --samples 8 "
                       "--seed 11 --out ";
    REQUIRE(run_cli(base + "/tmp/ellip_cli_a.json") == 0);
    REQUIRE(run_cli(base + "/tmp/ellip_cli_b.json") == 0);
    CHECK(slurp("/tmp/ellip_cli_a.json") == slurp("/tmp/ellip_cli_b.json"));
    CHECK_FALSE(slurp("/tmp/ellip_cli_a.json").empty());
}

TEST_CASE("classify report carries witnesses and defaults") {
    REQUIRE(run_cli("classify --catalog laplacian --n 2 --direction 0,1 --samples 8 "
                    "--out /tmp/ellip_cli_w.json") == 0);
    nlohmann::json j = nlohmann::json::parse(slurp("/tmp/ellip_cli_w.json"));
    CHECK(j["boundary_elliptic"][0]["status"] == "fails");
    CHECK(j["boundary_elliptic"][0]["witness"].contains("residual"));
    CHECK(j["boundary_elliptic"][0]["witness"]["residual"].get<double>() <= 1e-9);
    CHECK(j.contains("defaults"));
    CHECK(j["chain_consistent"] == true);
    // n = 1 note
    REQUIRE(run_cli("classify --catalog laplacian --n 1 --direction 1 --samples 4 "
                    "--out /tmp/ellip_cli_n1.json") == 0);
    nlohmann::json j1 = nlohmann::json::parse(slurp("/tmp/ellip_cli_n1.json"));
    CHECK(j1.contains("note"));
}

TEST_CASE("experiment emits CSV plus JSON summary") {
    REQUIRE(run_cli("experiment trace-blowup --catalog laplacian --n 2 --direction 0,1 "
                    "--eps 2^-3..2^-6 --h 0.03125 --out /tmp/ellip_cli_tb") == 0);
    std::string csv = slurp("/tmp/ellip_cli_tb.csv");
    CHECK(csv.find("# model=log slope=") == 0);
    CHECK(csv.find("abscissa,ordinate,fit_residual") != std::string::npos);
    nlohmann::json j = nlohmann::json::parse(slurp("/tmp/ellip_cli_tb.json"));
    CHECK(j["variant"] == "blowup");
    CHECK(j["fit"]["slope"].get<double>() > 0);
}

TEST_CASE("operator file input") {
    {
        std::ofstream os("/tmp/ellip_cli_op.txt");
        os << "w1 = d1 u1 - d2 u2\nw2 = d2 u1 + d1 u2\n";
    }
    CHECK(run_cli("classify --operator /tmp/ellip_cli_op.txt --direction 0,1 --samples 8 "
                  "--out /tmp/ellip_cli_op.json") == 0);
    {
        std::ofstream os("/tmp/ellip_cli_bad.txt");
        os << "w1 = d1 u1 + d1 u2 u3\n";
    }
    CHECK(run_cli("classify --operator /tmp/ellip_cli_bad.txt --direction 0,1") == 1);
}
