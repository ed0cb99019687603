#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "noisyauth/channel.hpp"
#include "noisyauth/codes.hpp"
#include "noisyauth/rng.hpp"
#include "noisyauth/setsys.hpp"

namespace noisyauth {

// --- Flows and outcomes --------------------------------------------------

struct FlowNoiseless {
    std::uint64_t value = 0;
};
struct FlowDmcInput {
    Sequence x;  // length k + n'
};
struct FlowReject {};

using Flow = std::variant<FlowNoiseless, FlowDmcInput, FlowReject>;

struct Outcome {
    std::optional<std::uint64_t> value;  // engaged iff accepted

    bool accepted() const { return value.has_value(); }
    static Outcome accept(std::uint64_t s) { return {s}; }
    static Outcome reject() { return {std::nullopt}; }
};

// --- Protocol instance ---------------------------------------------------

struct ProtocolInstance {
    Dmc w1, w2;
    Schedule schedule;
    // set_systems[j] covers iteration j (ground [v_j], v_{j+1} blocks),
    // for 1 <= j <= phi-1; slot 0 is empty (the iteration-1 membership
    // check is vacuous).
    std::vector<std::shared_ptr<const SetSystem>> set_systems;
    Codebook code;
    Symbol anchor = 0;
    double gamma = 0.0;
    std::vector<double> mixture;  // hull-optimal weights over w2's rows
    std::uint64_t k = 0;          // ceil(sqrt(n'))
    std::uint64_t n_prime = 0;
    bool rate_exceeds_capacity = false;

    int phi() const { return schedule.phi; }
    std::uint64_t source_size() const;  // v_1
    std::uint64_t code_size() const { return code.size(); }
    // Final-flow index for source value s. Identity for phi >= 2; the
    // degenerate phi = 0 instance maps s onto the codeword space by
    // reduction mod the code size.
    std::uint64_t encode(std::uint64_t s) const;
    const SetSystem& system(int j) const;

    Sequence dmc_input(std::uint64_t final_index) const;  // a^k | C_index
};

struct SetupOptions {
    // Largest v_j * v_{j+1} product materialized as an explicit,
    // exhaustively verified set system; above this the PRF-backed
    // Bernoulli family is used.
    std::uint64_t explicit_set_system_cap = 1ULL << 22;
    // Largest codeword count stored as an explicit random code; above
    // this the lazily expanded ensemble backing is used.
    std::uint64_t explicit_code_cap = 1ULL << 12;
    // Overrides the codeword count (default v_phi). Decouples the
    // final-flow alphabet from the source space; only meaningful for
    // degenerate phi = 0 instances.
    std::optional<std::uint64_t> code_size_override;
};

// Builds schedule, set systems, code and anchor. Deterministic given
// the rng stream. Throws on anchor infeasibility (Cov(W1) inside
// Cov(W2)), zero capacity, or set-system construction failure.
ProtocolInstance setup(const Dmc& w1, const Dmc& w2, std::uint64_t v1,
                       std::uint64_t n_prime, double beta1, double beta2,
                       std::optional<double> eps_override, RngStream& rng,
                       const SetupOptions& opts = {});

// phi + 1: phi noiseless flows plus the single DMC flow.
int round_count(const ProtocolInstance& instance);

// --- Party state machines ------------------------------------------------

class AliceSm {
public:
    AliceSm(const ProtocolInstance& inst, std::uint64_t s, RngStream rng);

    // Alice's actions in order: first next(nullopt) emits Noiseless(s)
    // (or, for phi = 0, is followed by one more next(nullopt) emitting
    // the DMC flow); afterwards each call consumes the incoming even-
    // iteration value and emits her response, the last one being the
    // DMC flow a^k | C_{s'_phi}. Emits FlowReject on a failed
    // membership check and refuses further transitions.
    Flow next(std::optional<std::uint64_t> incoming);

    bool rejected() const { return rejected_; }
    bool done() const { return done_; }
    // Index Alice encoded in her DMC flow, once emitted.
    std::optional<std::uint64_t> sent_index() const { return sent_index_; }

private:
    const ProtocolInstance* inst_;
    RngStream rng_;
    std::uint64_t s_;
    std::uint64_t s_last_ = 0;  // s_l she generated most recently
    int l_ = 0;                 // iteration of her last sent flow
    bool started_ = false, rejected_ = false, done_ = false;
    std::optional<std::uint64_t> sent_index_;
};

class BobSm {
public:
    BobSm(const ProtocolInstance& inst, RngStream rng);

    // Consumes the odd-iteration value s'_l and returns Bob's response
    // s_{l+1}, or FlowReject on a failed check. For phi = 0 this stores
    // the claimed source and returns no flow.
    std::optional<Flow> on_noiseless(std::uint64_t incoming);

    // Final verification on the channel output Z^{k+n'}: empirical type
    // of Z^k against W1(.|a) with radius gamma/(2|Z|), then decoding of
    // the tail compared against Bob's own s_phi. `src` is the codeword
    // index the tail was actually generated from, if any (simulation
    // knowledge for the lazy codebook; ignored by explicit codes).
    Outcome on_channel_output(std::span<const Symbol> z,
                              std::optional<std::uint64_t> src);

    bool rejected() const { return rejected_; }
    std::uint64_t expected_index() const;  // his s_phi (phi=0: encode(s'_1))

private:
    const ProtocolInstance* inst_;
    RngStream rng_;
    std::uint64_t s_first_ = 0;  // s'_1, the claimed source
    std::uint64_t s_last_ = 0;   // s_l he generated most recently
    int l_ = 0;
    bool rejected_ = false;
};

// --- Session orchestration ----------------------------------------------

// Man-in-the-middle hooks. Noiseless flows may be substituted; DMC
// symbols are observe-only (the channel cannot be tampered with).
class Mediator {
public:
    virtual ~Mediator() = default;
    // l is the iteration number; alice_to_bob tells the direction.
    virtual std::uint64_t on_noiseless(int l, bool alice_to_bob,
                                       std::uint64_t value) {
        return value;
    }
    virtual void on_dmc_input(const Sequence& x) { (void)x; }
    virtual void on_dmc_output(const Sequence& z) { (void)z; }
};

struct SessionResult {
    Outcome outcome;
    std::uint64_t s = 0;  // Alice's true source state
    // One line per flow: "<sid>,<dir>,<kind>,<payload>".
    std::vector<std::string> transcript;
};

// Runs one full session. Alice authenticates s; mediator (nullptr =
// faithful delivery) sits on the noiseless channel; the DMC flow is
// sampled through w1. Transcript logging is optional.
SessionResult run_session(const ProtocolInstance& inst, std::uint64_t s,
                          Mediator* mediator, RngStream& rng,
                          std::uint64_t session_id = 0,
                          bool keep_transcript = false);

Outcome run_honest(const ProtocolInstance& inst, std::uint64_t s, RngStream& rng);

}  // namespace noisyauth
