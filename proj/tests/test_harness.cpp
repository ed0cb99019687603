#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "noisyauth/harness.hpp"

using namespace noisyauth;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = "/tmp/noisyauth_test_" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string identity_channel_file() {
    static const std::string path =
        write_temp("identity.json", Dmc::identity(2).to_json_text());
    return path;
}

}  // namespace

TEST_CASE("config parsing and defaults") {
    auto c = ExperimentConfig::from_json_text(R"({
        "experiment": "type1",
        "w1_bsc": 0.05,
        "w2_bsc": 0.25,
        "v1": 64,
        "n_prime": 200,
        "eps_override": 0.5,
        "trials": 123,
        "seed": 9,
        "strategy": "random_tamper",
        "tamper_prob": 0.3,
        "merge_at": 2
    })");
    CHECK(c.kind == "type1");
    CHECK(c.v1 == 64);
    CHECK(c.n_prime == 200);
    CHECK(c.eps_override == 0.5);
    CHECK(c.trials == 123);
    CHECK(c.seed == 9);
    CHECK(c.strategy == "random_tamper");
    CHECK(c.tamper_prob == doctest::Approx(0.3));
    CHECK(c.merge_at == 2);
    // Untouched defaults.
    CHECK(c.alpha == doctest::Approx(0.25));
    CHECK(c.beta1 == doctest::Approx(0.05));
    CHECK(c.threads == 1);
    CHECK_FALSE(c.out.has_value());

    CHECK(c.resolve_w1().rows[0][1] == doctest::Approx(0.05));
    CHECK(c.resolve_w2().rows[0][1] == doctest::Approx(0.25));

    auto bare = ExperimentConfig::from_json_text(R"({"experiment":"replay"})");
    CHECK_THROWS(bare.resolve_w1());
    CHECK_THROWS(ExperimentConfig::from_json_text("not json"));
    CHECK_THROWS(ExperimentConfig::load("/nonexistent/config.json"));
}

TEST_CASE("unknown experiment kinds are rejected") {
    ExperimentConfig c;
    c.kind = "frobnicate";
    CHECK_THROWS(run_experiment(c));
}

TEST_CASE("correctness on a noiseless degenerate instance is perfect") {
    ExperimentConfig c;
    c.kind = "correctness";
    c.w1_file = identity_channel_file();
    c.w2_bsc = 0.25;
    c.v1 = 8;
    c.n_prime = 100;
    c.beta2 = 0.5;  // phi = 0 for v1 = 8
    c.trials = 200;
    c.seed = 5;
    auto res = run_experiment(c);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].p_hat == doctest::Approx(1.0));
    CHECK(res.rows[0].params.find("phi=0") != std::string::npos);
    CHECK(res.exit_status == 0);
}

TEST_CASE("replay experiment meets its lower bound") {
    ExperimentConfig c;
    c.kind = "replay";
    c.w1_file = identity_channel_file();
    c.w2_bsc = 0.25;
    c.v1 = 16;
    c.n_prime = 100;
    c.beta2 = 0.5;
    c.code_size_override = 4;
    c.trials = 1000;
    c.seed = 6;
    auto res = run_experiment(c);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].bound_kind == "lower");
    CHECK(res.rows[0].p_hat >= res.rows[0].theory_bound - 0.05);
    CHECK(res.exit_status == 0);
}

TEST_CASE("cross-typicality experiment respects its bound") {
    ExperimentConfig c;
    c.kind = "lemma3_check";
    c.w1_bsc = 0.05;
    c.n_prime = 100;
    c.alpha = 0.5;
    c.eps = 0.05;
    c.trials = 500;
    c.seed = 7;
    auto res = run_experiment(c);
    CHECK(res.rows[0].bound_kind == "upper");
    CHECK(res.rows[0].theory_bound < 0.01);
    CHECK(res.exit_status == 0);
}

TEST_CASE("schedule audit accepts an asymptotic-rule tower source") {
    ExperimentConfig c;
    c.kind = "schedule_audit";
    c.v1_log2 = 65536.0;
    c.n_prime = 400;
    c.beta1 = 0.005;
    c.beta2 = 0.05;
    auto res = run_experiment(c);
    CHECK(res.rows[0].successes == 1);
    CHECK(res.rows[0].params.find("recursion=holds") != std::string::npos);
    CHECK(res.exit_status == 0);
}

TEST_CASE("identical configs produce byte-identical CSV") {
    ExperimentConfig c;
    c.kind = "type1";
    c.w1_bsc = 0.05;
    c.w2_bsc = 0.25;
    c.v1 = 64;
    c.n_prime = 100;
    c.beta2 = 0.02;
    c.eps_override = 0.5;
    c.trials = 200;
    c.seed = 8;
    auto a = run_experiment(c);
    auto b = run_experiment(c);
    CHECK(a.csv == b.csv);

    ExperimentConfig c2 = c;
    c2.seed = 9;
    CHECK(run_experiment(c2).csv != a.csv);
}

TEST_CASE("CSV shape and the out file") {
    ExperimentConfig c;
    c.kind = "ni_rate";
    c.w1_bsc = 0.05;
    c.w2_bsc = 0.25;
    c.n_prime = 64;
    c.alpha = 0.25;
    c.seed = 3;
    c.out = "/tmp/noisyauth_test_out.csv";
    std::remove(c.out->c_str());
    auto res = run_experiment(c);

    std::istringstream csv(res.csv);
    std::string header, row;
    REQUIRE(std::getline(csv, header));
    CHECK(header ==
          "experiment,seed,strategy,params,trials,successes,p_hat,ci_lo,"
          "ci_hi,theory_bound,bound_kind");
    REQUIRE(std::getline(csv, row));
    CHECK(row.rfind("ni_rate,3,", 0) == 0);

    std::ifstream written(*c.out);
    REQUIRE(written.good());
    std::stringstream buf;
    buf << written.rdbuf();
    CHECK(buf.str() == res.csv);
}

TEST_CASE("bound assertion direction") {
    AttackReport r;
    r.p_hat = 0.5;
    r.ci = {0.45, 0.55};
    r.theory_bound = 0.3;  // 0.3 + 3 * 0.05 = 0.45 < p_hat
    r.bound_kind = "upper";
    CHECK_FALSE(report_within_bound(r));
    r.bound_kind = "lower";
    CHECK(report_within_bound(r));
    r.bound_kind = "";
    CHECK(report_within_bound(r));
}
