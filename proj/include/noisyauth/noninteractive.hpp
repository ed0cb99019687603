#pragma once

#include <cstdint>
#include <utility>

#include "noisyauth/channel.hpp"
#include "noisyauth/codes.hpp"
#include "noisyauth/rng.hpp"
#include "noisyauth/setauth.hpp"

namespace noisyauth {

// One-flow scheme: the source index rides the noiseless channel, a
// channel fingerprint a^k plus a minimum-distance codeword rides W1,
// and the verifier cross-checks the two via typicality.
struct NiScheme {
    Dmc w1, w2;
    DistanceCode code;
    Symbol anchor = 0;
    double xi = 0.0;     // distance from W1(.|a) to Cov(W2)
    double theta = 0.0;  // non-redundancy margin of W1
    double eps = 0.0;    // min{xi/(4|Z|), alpha*Theta/2}
    std::uint64_t k = 0, n = 0;

    std::uint64_t size() const { return code.code.codebook.size(); }
};

// code_opts controls the greedy code search (seed, scan and size caps);
// large spaces get expensive quadratically in the size cap.
NiScheme ni_setup(const Dmc& w1, const Dmc& w2, std::uint64_t n, double alpha,
                  const DistanceCodeOptions& code_opts = {});

// (DMC input a^k|C_s, noiseless value s).
std::pair<Sequence, std::uint64_t> ni_send(const NiScheme& scheme,
                                           std::uint64_t s);

Outcome ni_verify(const NiScheme& scheme, std::span<const Symbol> z,
                  std::uint64_t s_received);

struct NiRate {
    double rate = 0.0;        // log2 N / (n + k)
    double floor_rate = 0.0;  // from the greedy code's size lower bound
};

NiRate ni_rate(const NiScheme& scheme);

}  // namespace noisyauth
