#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "noisyauth/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Keyless-authentication protocol simulator"};

    std::string config_path;
    std::optional<std::uint64_t> seed, trials;
    std::optional<int> threads;
    std::optional<std::string> out, experiment;

    app.add_option("--config", config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "Master seed (overrides config)");
    app.add_option("--trials", trials, "Trial count (overrides config)");
    app.add_option("--out", out, "CSV output path (overrides config)");
    app.add_option("--threads", threads, "Worker threads (overrides config)");
    app.add_option("--experiment", experiment,
                   "Experiment kind (overrides config): correctness, type1, "
                   "type2, replay, ni_rate, lemma2_check, lemma3_check, "
                   "schedule_audit");

    CLI11_PARSE(app, argc, argv);

    try {
        noisyauth::ExperimentConfig cfg =
            noisyauth::ExperimentConfig::load(config_path);
        if (seed) cfg.seed = *seed;
        if (trials) cfg.trials = *trials;
        if (threads) cfg.threads = *threads;
        if (out) cfg.out = *out;
        if (experiment) cfg.kind = *experiment;

        const noisyauth::ExperimentResult res = noisyauth::run_experiment(cfg);
        std::cout << res.csv;
        return res.exit_status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
