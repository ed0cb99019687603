#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "noisyauth/rng.hpp"

namespace noisyauth {

using Symbol = std::uint32_t;
using Sequence = std::vector<Symbol>;

// Probability vector over an index-based alphabet 0..size-1.
using Distribution = std::vector<double>;

constexpr double kProbTol = 1e-9;

// Throws std::invalid_argument unless every entry is in [0,1] and the
// entries sum to 1 within kProbTol.
void validate_distribution(const Distribution& p);

// Row-stochastic matrix over finite input/output alphabets.
struct Dmc {
    std::size_t input_size = 0;
    std::size_t output_size = 0;
    std::vector<Distribution> rows;

    void validate() const;

    const Distribution& row(Symbol x) const;

    static Dmc bsc(double p);
    static Dmc identity(std::size_t size);

    // Channel description file: {"input_size": p, "output_size": q,
    // "rows": [[...], ...]}.
    static Dmc from_json_text(const std::string& text);
    static Dmc load(const std::string& path);
    std::string to_json_text() const;
};

struct EmpiricalType {
    std::vector<std::uint64_t> counts;
    std::uint64_t length = 0;

    Distribution frequencies() const;
};

EmpiricalType empirical_type(std::span<const Symbol> z, std::size_t alphabet_size);

// Unhalved total-variation sum: sum_x |P(x) - Q(x)|, range [0, 2].
double statistical_distance(const Distribution& p, const Distribution& q);

struct HullDistanceResult {
    double distance = 0.0;
    std::vector<double> weights;  // convex coefficients over the row set
};

// min over Q in Cov(rows) of statistical_distance(p, Q), solved as an
// exact linear program.
HullDistanceResult hull_distance(const Distribution& p,
                                 const std::vector<Distribution>& rows);

// min over rows i of hull_distance(row_i, remaining rows). Requires at
// least two input rows.
double theta(const Dmc& w);

bool is_nonredundant(const Dmc& w);

Sequence sample(const Dmc& w, std::span<const Symbol> x, RngStream& rng);

// eps-typicality per empirical type: every symbol deviates by at most
// eps/|alphabet| and zero-probability symbols never occur.
bool is_typical(std::span<const Symbol> z, const Distribution& p, double eps);

// Conditional eps-typicality of y given x under channel w, evaluated on
// the joint empirical type with per-cell radius eps/(|X||Y|).
bool is_cond_typical(std::span<const Symbol> y, std::span<const Symbol> x,
                     const Dmc& w, double eps);

struct CapacityResult {
    double capacity_bits = 0.0;
    Distribution input_dist;  // the maximizing input distribution
};

// Blahut-Arimoto alternating maximization.
CapacityResult capacity(const Dmc& w, double tol = 1e-9);

double binary_entropy(double alpha);
double entropy(const Distribution& p);

// Fig-of-merit of the anchor symbol: hull distance from W1's row `a` to
// the convex hull of W2's rows. Channels must share the output alphabet.
double channel_gamma(const Dmc& w1, Symbol a, const Dmc& w2);

struct AnchorChoice {
    Symbol symbol = 0;
    double gamma = 0.0;
    std::vector<double> mixture;  // hull-optimal weights over W2's rows
};

// Picks the W1 input symbol whose row is farthest from Cov(W2). Throws
// std::runtime_error when the maximum is ~0 (authentication infeasible).
AnchorChoice choose_anchor(const Dmc& w1, const Dmc& w2);

// Hoeffding surrogate for the typicality lemma: a bound on
// Pr[not is_typical(Z^n, P, eps)] for i.i.d. Z ~ P.
double typicality_failure_bound(std::size_t alphabet_size, std::uint64_t n, double eps);

// Hull-distance bound implied by observing concentrated output types:
// |Z| eps1 + |Z| sqrt(ln(2/eps2) / (2n)).
double output_concentration_hull_bound(std::size_t output_size, double eps1,
                                       double eps2, std::uint64_t n);

// Cross-typicality bound for inputs at Hamming distance alpha*n through
// a non-redundant channel: 2^(-2n (alpha*Theta - eps)^2 / (|X|^2 |Y|^2)).
double cross_typicality_bound(const Dmc& w, double alpha, double eps, std::uint64_t n);

}  // namespace noisyauth
