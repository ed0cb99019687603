#pragma once

#include <cstdint>
#include <utility>

namespace noisyauth {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson score interval at 95% confidence.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials);

// P(Bin(n, p) <= k), computed termwise; exact to double rounding.
double binomial_cdf(std::uint64_t k, std::uint64_t n, double p);

// P(Bin(n, p) == k).
double binomial_pmf(std::uint64_t k, std::uint64_t n, double p);

}  // namespace noisyauth
