#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noisyauth/adversary.hpp"

namespace noisyauth {

struct ExperimentConfig {
    std::string kind;  // correctness | type1 | type2 | replay | ni_rate
                       // | lemma2_check | lemma3_check | schedule_audit
    std::optional<std::string> w1_file, w2_file;
    std::optional<double> w1_bsc, w2_bsc;  // convenience: BSC flip probs
    std::optional<std::uint64_t> v1;
    std::optional<double> v1_log2;  // for sources beyond 64 bits
    std::uint64_t n_prime = 100;
    double alpha = 0.25;
    double beta1 = 0.05, beta2 = 0.05;
    std::optional<double> eps_override;
    std::optional<double> eps;  // typicality radius for lemma3_check
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::optional<std::string> out;
    std::optional<std::uint64_t> code_size_override;
    // type-1 strategy selection
    std::string strategy = "greedy_substitute";
    std::optional<std::uint64_t> target;
    double tamper_prob = 0.1;
    std::optional<int> merge_at;

    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig load(const std::string& path);

    Dmc resolve_w1() const;
    Dmc resolve_w2() const;
};

struct ExperimentResult {
    std::vector<AttackReport> rows;
    std::string csv;      // header + one line per row, byte-stable per seed
    int exit_status = 0;  // nonzero iff a bound assertion failed
};

ExperimentResult run_experiment(const ExperimentConfig& config);

std::string reports_to_csv(const std::string& experiment, std::uint64_t seed,
                           const std::vector<AttackReport>& rows);

// Bound assertion used for the exit status: upper bounds allow
// p_hat <= bound + 3 * half-width, lower bounds the mirror image.
bool report_within_bound(const AttackReport& r);

}  // namespace noisyauth
