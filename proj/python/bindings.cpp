#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "noisyauth/harness.hpp"

namespace py = pybind11;
using namespace noisyauth;

namespace {

ProtocolInstance py_setup(const Dmc& w1, const Dmc& w2, std::uint64_t v1,
                          std::uint64_t n_prime, double beta1, double beta2,
                          std::optional<double> eps_override,
                          std::uint64_t seed,
                          std::optional<std::uint64_t> code_size_override) {
    RngStream rng(seed);
    SetupOptions opts;
    opts.code_size_override = code_size_override;
    return setup(w1, w2, v1, n_prime, beta1, beta2, eps_override, rng, opts);
}

Type1Strategy strategy_from_name(const std::string& name,
                                 std::optional<std::uint64_t> target,
                                 double tamper_prob,
                                 std::optional<int> merge_at) {
    if (name == "pass_through") return PassThrough{};
    if (name == "substitute_first_flow") return SubstituteFirstFlow{target};
    if (name == "random_tamper") return RandomTamper{tamper_prob};
    if (name == "greedy_substitute") return GreedySubstitute{target, merge_at};
    throw std::invalid_argument("unknown strategy " + name);
}

py::dict report_to_dict(const AttackReport& r) {
    py::dict d;
    d["strategy"] = r.strategy;
    d["params"] = r.params;
    d["trials"] = r.trials;
    d["successes"] = r.successes;
    d["p_hat"] = r.p_hat;
    d["ci"] = py::make_tuple(r.ci.lo, r.ci.hi);
    d["theory_bound"] = r.theory_bound;
    d["bound_kind"] = r.bound_kind;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Keyless message authentication over simulated noisy channels";

    py::class_<Dmc>(m, "Dmc")
        .def_static("bsc", &Dmc::bsc, py::arg("flip_prob"))
        .def_static("identity", &Dmc::identity, py::arg("size"))
        .def_static("from_json_text", &Dmc::from_json_text)
        .def_static("load", &Dmc::load)
        .def("to_json_text", &Dmc::to_json_text)
        .def_readonly("input_size", &Dmc::input_size)
        .def_readonly("output_size", &Dmc::output_size)
        .def_readonly("rows", &Dmc::rows);

    m.def("statistical_distance", &statistical_distance);
    m.def(
        "hull_distance",
        [](const Distribution& p, const std::vector<Distribution>& rows) {
            const auto r = hull_distance(p, rows);
            return py::make_tuple(r.distance, r.weights);
        },
        py::arg("target"), py::arg("rows"),
        "Exact LP distance from a distribution to the convex hull of rows; "
        "returns (distance, convex weights).");
    m.def("theta", &theta, "Minimum row distance to the hull of the rest.");
    m.def(
        "capacity",
        [](const Dmc& w) {
            const auto r = capacity(w);
            return py::make_tuple(r.capacity_bits, r.input_dist);
        },
        "Blahut-Arimoto capacity in bits plus the optimal input law.");
    m.def(
        "choose_anchor",
        [](const Dmc& w1, const Dmc& w2) {
            const auto a = choose_anchor(w1, w2);
            return py::make_tuple(a.symbol, a.gamma, a.mixture);
        },
        "Anchor symbol, its hull distance gamma, and the closest mixture.");
    m.def("binary_entropy", &binary_entropy);

    py::class_<ProtocolInstance>(m, "ProtocolInstance")
        .def_property_readonly("phi", &ProtocolInstance::phi)
        .def_property_readonly("source_size", &ProtocolInstance::source_size)
        .def_property_readonly("code_size", &ProtocolInstance::code_size)
        .def_property_readonly(
            "eps", [](const ProtocolInstance& i) { return i.schedule.eps; })
        .def_readonly("gamma", &ProtocolInstance::gamma)
        .def_readonly("k", &ProtocolInstance::k)
        .def_readonly("n_prime", &ProtocolInstance::n_prime)
        .def_property_readonly("rounds", [](const ProtocolInstance& i) {
            return round_count(i);
        });

    m.def("setup", &py_setup, py::arg("w1"), py::arg("w2"), py::arg("v1"),
          py::arg("n_prime"), py::arg("beta1") = 0.05,
          py::arg("beta2") = 0.05, py::arg("eps_override") = std::nullopt,
          py::arg("seed") = 1, py::arg("code_size_override") = std::nullopt);

    m.def(
        "run_honest",
        [](const ProtocolInstance& inst, std::uint64_t s, std::uint64_t seed) {
            RngStream rng(seed);
            return run_honest(inst, s, rng).value;
        },
        py::arg("instance"), py::arg("s"), py::arg("seed") = 1,
        "Accepted source value, or None on rejection.");

    m.def(
        "run_type1",
        [](const ProtocolInstance& inst, const std::string& strategy,
           std::uint64_t trials, std::uint64_t seed, int threads,
           std::optional<std::uint64_t> target, double tamper_prob,
           std::optional<int> merge_at) {
            const Type1Strategy strat =
                strategy_from_name(strategy, target, tamper_prob, merge_at);
            auto rep = monte_carlo(
                [&](RngStream& rng) { return run_type1(inst, strat, rng); },
                trials, seed, threads);
            rep.strategy = strategy_name(strat);
            rep.params = strategy_params(strat);
            return report_to_dict(rep);
        },
        py::arg("instance"), py::arg("strategy") = "greedy_substitute",
        py::arg("trials") = 1000, py::arg("seed") = 1, py::arg("threads") = 1,
        py::arg("target") = std::nullopt, py::arg("tamper_prob") = 0.1,
        py::arg("merge_at") = std::nullopt);

    m.def(
        "run_type2",
        [](const ProtocolInstance& inst, std::uint64_t target,
           std::uint64_t trials, std::uint64_t seed, int threads) {
            auto rep = monte_carlo(
                [&](RngStream& rng) {
                    return run_type2(inst, Impersonate{target}, rng);
                },
                trials, seed, threads);
            rep.strategy = "impersonate";
            return report_to_dict(rep);
        },
        py::arg("instance"), py::arg("target") = 0, py::arg("trials") = 1000,
        py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "run_replay",
        [](const ProtocolInstance& inst, std::uint64_t trials,
           std::uint64_t seed, int threads) {
            auto rep = monte_carlo(
                [&](RngStream& rng) { return run_replay(inst, rng); }, trials,
                seed, threads);
            rep.strategy = "replay";
            return report_to_dict(rep);
        },
        py::arg("instance"), py::arg("trials") = 1000, py::arg("seed") = 1,
        py::arg("threads") = 1);

    py::class_<NiScheme>(m, "NiScheme")
        .def_readonly("xi", &NiScheme::xi)
        .def_readonly("theta", &NiScheme::theta)
        .def_readonly("eps", &NiScheme::eps)
        .def_readonly("k", &NiScheme::k)
        .def_readonly("n", &NiScheme::n)
        .def_property_readonly("size", &NiScheme::size);

    m.def(
        "ni_setup",
        [](const Dmc& w1, const Dmc& w2, std::uint64_t n, double alpha,
           std::uint64_t seed, std::uint64_t size_cap) {
            DistanceCodeOptions opts;
            opts.seed = seed;
            opts.size_cap = size_cap;
            return ni_setup(w1, w2, n, alpha, opts);
        },
        py::arg("w1"), py::arg("w2"), py::arg("n"), py::arg("alpha"),
        py::arg("seed") = 1, py::arg("size_cap") = 1024);

    m.def("ni_rate", [](const NiScheme& s) {
        const auto r = ni_rate(s);
        return py::make_tuple(r.rate, r.floor_rate);
    });

    m.def(
        "run_experiment_json",
        [](const std::string& config_json) {
            const auto cfg = ExperimentConfig::from_json_text(config_json);
            const auto res = run_experiment(cfg);
            return py::make_tuple(res.csv, res.exit_status);
        },
        py::arg("config_json"),
        "Full experiment runner on a JSON config; returns (csv, exit_status).");
}
