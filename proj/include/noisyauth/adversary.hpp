#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "noisyauth/noninteractive.hpp"
#include "noisyauth/setauth.hpp"
#include "noisyauth/stats.hpp"

namespace noisyauth {

// --- Strategies ----------------------------------------------------------

struct PassThrough {};

struct SubstituteFirstFlow {
    // Delivered instead of s_1; defaults to s_1 + 1 mod v_1.
    std::optional<std::uint64_t> target;
};

struct RandomTamper {
    double prob = 0.1;  // per-flow replacement probability
};

// Substitutes s_1, then keeps every later membership check satisfiable
// by re-routing each flow through a block containing the receiver's own
// previous value, and rejoins the honest chain the first time the
// genuine flow happens to pass the receiver's check (the lambda event
// the set system bounds). merge_at restricts the rejoin attempt to one
// specific iteration, for the per-flow bound sweep.
struct GreedySubstitute {
    std::optional<std::uint64_t> target;
    std::optional<int> merge_at;
};

using Type1Strategy =
    std::variant<PassThrough, SubstituteFirstFlow, RandomTamper, GreedySubstitute>;

struct Impersonate {
    std::uint64_t target = 0;  // the source state Oscar authenticates
};

// --- Single-trial runs ---------------------------------------------------

// Honest Alice with a uniform source; the strategy mediates the
// noiseless flows (DMC symbols are observe-only). Success iff Bob
// accepts a value different from Alice's source.
bool run_type1(const ProtocolInstance& inst, const Type1Strategy& strategy,
               RngStream& rng);

// Oscar plays Alice end-to-end; the final flow's first k symbols are
// drawn from the hull-optimal mixture over W2 inputs and the tail is
// Bob's expected codeword, all transmitted through W2. Success iff Bob
// accepts anything.
bool run_type2(const ProtocolInstance& inst, const Impersonate& strategy,
               RngStream& rng);

// Same attack against the one-flow scheme.
bool run_type2_ni(const NiScheme& scheme, const Impersonate& strategy,
                  const std::vector<double>& mixture, RngStream& rng);

// Two sessions: Alice authenticates s to a simulated receiver; Oscar
// replays her DMC transmission while authenticating a fresh uniform s'
// to the real Bob. Success iff Bob accepts s' and s' != s.
bool run_replay(const ProtocolInstance& inst, RngStream& rng);

// --- Estimation and closed-form bounds -----------------------------------

struct AttackReport {
    std::string strategy;
    std::string params;
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
    double p_hat = 0.0;
    Interval ci;
    double theory_bound = 0.0;
    std::string bound_kind;  // "upper" | "lower"
};

// Independent per-trial streams derived from (master_seed, index);
// deterministic for any thread count.
AttackReport monte_carlo(const std::function<bool(RngStream&)>& trial,
                         std::uint64_t trials, std::uint64_t master_seed,
                         int threads = 1);

// max(0, 2^(-H_F) - delta - 1/|S|): the replay success floor.
double success_lower_bound(double h_f, double delta, std::uint64_t source_size);

// max(0, log*|S| - log* n - 5), from log2|S|.
int round_lower_bound(double source_size_log2, std::uint64_t n);

// sum P^2 >= 2^(-H(P)).
bool collision_entropy_check(const Distribution& p_f);

std::string strategy_name(const Type1Strategy& s);
std::string strategy_params(const Type1Strategy& s);

}  // namespace noisyauth
