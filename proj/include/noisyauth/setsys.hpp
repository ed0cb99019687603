#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "noisyauth/rng.hpp"

namespace noisyauth {

// --- Iterated logarithms -------------------------------------------------

// Minimum i such that log2^(i) x < 2. Requires x >= 1.
int log_star(double x);

// log2 applied j times. Throws std::domain_error if an intermediate
// value is non-positive (log undefined from there on).
double iter_log(double x, int j);

// Source-space size that may be far beyond the double range; stored as
// log2(v). Exact when v is a power of two.
struct SourceSize {
    double log2_value = 0.0;
    std::optional<std::uint64_t> value;  // set when v fits in 64 bits

    static SourceSize from_value(std::uint64_t v);
    static SourceSize from_pow2(std::uint64_t exponent);

    // log2^(j) of the size; j >= 1 works entirely on log2_value.
    double iterated_log(int j) const;
    int log_star_value() const;
};

// --- Set systems ---------------------------------------------------------

// A family of b blocks over ground set [v]. Large instances are backed
// lazily by a PRF (each membership an independent Bernoulli draw), so
// the interface exposes membership and sampling rather than raw lists.
class SetSystem {
public:
    virtual ~SetSystem() = default;
    virtual std::uint64_t ground_size() const = 0;
    virtual std::uint64_t block_count() const = 0;
    virtual bool contains(std::uint64_t element, std::uint64_t block) const = 0;

    // Uniform draw from {i : element in block i}; nullopt when the draw
    // cannot find a containing block (empty membership list).
    virtual std::optional<std::uint64_t> sample_block_containing(
        std::uint64_t element, RngStream& rng) const = 0;
};

class ExplicitSetSystem final : public SetSystem {
public:
    ExplicitSetSystem(std::uint64_t v, std::vector<std::vector<std::uint32_t>> blocks);

    std::uint64_t ground_size() const override { return v_; }
    std::uint64_t block_count() const override { return blocks_.size(); }
    bool contains(std::uint64_t element, std::uint64_t block) const override;
    std::optional<std::uint64_t> sample_block_containing(
        std::uint64_t element, RngStream& rng) const override;

    // Ascending indices of blocks containing x.
    const std::vector<std::uint32_t>& blocks_containing(std::uint64_t x) const;
    const std::vector<std::vector<std::uint32_t>>& blocks() const { return blocks_; }

    // One block per line, space-separated element indices.
    std::string serialize() const;
    static ExplicitSetSystem parse(std::uint64_t v, const std::string& text);

private:
    std::uint64_t v_;
    std::vector<std::vector<std::uint32_t>> blocks_;    // sorted element lists
    std::vector<std::vector<std::uint32_t>> inverted_;  // element -> block indices
};

// Lazily evaluated Bernoulli(p) membership keyed by (seed, element, block).
class BernoulliSetSystem final : public SetSystem {
public:
    BernoulliSetSystem(std::uint64_t v, std::uint64_t b, double inclusion_prob,
                       std::uint64_t seed);

    std::uint64_t ground_size() const override { return v_; }
    std::uint64_t block_count() const override { return b_; }
    bool contains(std::uint64_t element, std::uint64_t block) const override;
    std::optional<std::uint64_t> sample_block_containing(
        std::uint64_t element, RngStream& rng) const override;

    double inclusion_prob() const { return p_; }

private:
    std::uint64_t v_, b_, seed_;
    double p_;
    std::uint64_t threshold_;  // p mapped onto the 64-bit hash range
};

struct SetSystemReport {
    bool ok = false;
    std::uint64_t min_r = 0;       // min over elements of block membership count
    std::uint64_t max_lambda = 0;  // max over element pairs of co-occurrence
};

// Exhaustive check of the (r, lambda) conditions.
SetSystemReport verify_set_system(const ExplicitSetSystem& s, std::uint64_t r,
                                  std::uint64_t lambda);

// Randomized construction with post-verification; retried up to
// max_retries. Throws std::runtime_error carrying the best attempt's
// achieved (r, lambda) if all retries fail.
ExplicitSetSystem construct_set_system(std::uint64_t v, std::uint64_t b,
                                       double inclusion_prob, RngStream& rng,
                                       std::uint64_t r_target,
                                       std::uint64_t lambda_target,
                                       int max_retries = 8);

// --- Parameter schedule --------------------------------------------------

// Largest v_j a schedule may materialize before aborting.
constexpr std::uint64_t kScheduleSizeCap = 1ULL << 40;

struct Schedule {
    int phi = 0;  // even
    SourceSize v1;
    std::vector<std::uint64_t> v_rest;  // v_2..v_phi (empty when phi <= 1)
    double eps = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    std::uint64_t n_prime = 0;

    std::uint64_t v(int j) const;  // v_j for 2 <= j <= phi
    // v_phi; for the degenerate phi = 0 schedule this is v_1 itself.
    std::uint64_t final_size() const;
};

// phi is the minimal even t with log^(t) v1 <= beta2*n' + sqrt(n');
// eps = eps_override if present, else 2^(-beta1 n'); and
// v_{j+1} = floor(2^(phi-j+8) eps^-4 log2 v_j) for 1 <= j < phi.
Schedule make_schedule(SourceSize v1, std::uint64_t n_prime, double beta1,
                       double beta2, std::optional<double> eps_override);

enum class RecursionBound { Holds, Violated, Inapplicable };

// Checks every v_{j+1} against the recursion growth bound and v_phi
// against its closed-form corollary. Inapplicable when phi < 2 or
// log^(phi-1) v1 < 3.
RecursionBound check_recursion_bound(const Schedule& s);

}  // namespace noisyauth
