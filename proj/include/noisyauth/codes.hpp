#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisyauth/channel.hpp"
#include "noisyauth/rng.hpp"
#include "noisyauth/stats.hpp"

namespace noisyauth {

std::uint64_t hamming_distance(std::span<const Symbol> x, std::span<const Symbol> y);

struct ChannelCode {
    std::vector<Sequence> codebook;
    std::uint64_t n = 0;  // codeword length
    std::size_t alphabet_size = 0;

    double rate() const;

    // Same text format as set-system blocks: one codeword per line.
    std::string serialize() const;
    static ChannelCode parse(std::size_t alphabet_size, const std::string& text);
};

// Codewords drawn i.i.d. from the capacity-achieving input distribution
// of w; duplicates are re-drawn.
ChannelCode build_random_code(const Dmc& w, std::uint64_t n_prime,
                              std::uint64_t num_codewords, RngStream& rng);

constexpr std::int64_t kDecodeReject = -1;

// Maximum-likelihood decoding in log space; deterministic tie-break
// toward the lowest index. Returns kDecodeReject when every codeword
// has zero likelihood.
std::int64_t ml_decode(const ChannelCode& code, const Dmc& w,
                       std::span<const Symbol> y);

struct ErrorEstimate {
    double p_hat = 0.0;
    Interval ci;
};

// Monte Carlo decoding-error estimate; max over per-codeword estimates
// for small codes (N <= 256), average over uniform codewords otherwise.
ErrorEstimate estimate_error_rate(const ChannelCode& code, const Dmc& w,
                                  std::uint64_t trials, RngStream& rng);

struct DistanceCode {
    ChannelCode code;
    double alpha = 0.0;
    std::uint64_t min_distance = 0;
};

struct DistanceCodeOptions {
    bool lexicographic = false;  // default: seeded-random scan order
    std::uint64_t seed = 1;
    std::uint64_t size_cap = 1ULL << 16;
    std::uint64_t scan_cap = 1ULL << 22;  // words examined per scan
};

// Greedy minimum-distance sweep: accept any word at distance
// >= ceil(alpha*n) from all accepted words. Requires 1/n <= alpha <= 1/2.
DistanceCode build_distance_code(std::size_t alphabet_size, std::uint64_t n,
                                 double alpha,
                                 const DistanceCodeOptions& opts = {});

// Size floor the greedy code must meet:
// (1/(alpha n)) |X|^n 2^(-n (h(alpha) + alpha log|X|)).
double distance_code_size_bound(std::size_t alphabet_size, std::uint64_t n,
                                double alpha);

// Codebook used by the interactive protocol: either a materialized
// ChannelCode or a lazily expanded random code for sizes far beyond
// what can be stored. The lazy backing requires a binary symmetric
// channel (uniform capacity-achieving input, ML = minimum Hamming
// distance); membership of the decode result is then simulated exactly
// under per-trial codebook resampling.
class Codebook {
public:
    Codebook() = default;  // empty; usable only after assignment

    static Codebook from_channel_code(ChannelCode code, Dmc w);
    static Codebook lazy_random(const Dmc& w, std::uint64_t n, std::uint64_t size,
                                std::uint64_t seed);

    std::uint64_t size() const { return size_; }
    std::uint64_t length() const { return n_; }
    bool lazy() const { return lazy_; }

    Sequence codeword(std::uint64_t index) const;

    // Whether ML decoding of y lands exactly on index t (lowest-index
    // tie-break). Deterministic for explicit codes; for the lazy
    // backing the comparison against codewords not pinned by y is
    // drawn from the exact codebook-ensemble law using rng. `src` is
    // the index whose codeword generated y, when y came from one: that
    // codeword is correlated with y and must be compared explicitly.
    bool decodes_to(std::span<const Symbol> y, std::uint64_t t,
                    std::optional<std::uint64_t> src, RngStream& rng) const;

    const ChannelCode& channel_code() const;
    const Dmc& channel() const { return w_; }

private:
    bool lazy_ = false;
    std::uint64_t size_ = 0, n_ = 0, seed_ = 0;
    double flip_prob_ = 0.0;  // lazy backing: BSC flip probability
    Dmc w_;
    std::optional<ChannelCode> code_;
};

}  // namespace noisyauth
