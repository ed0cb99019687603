#include "noisyauth/setsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace noisyauth {

// --- Iterated logarithms -------------------------------------------------

int log_star(double x) {
    if (!(x >= 1.0)) throw std::invalid_argument("log_star: requires x >= 1");
    int i = 0;
    while (x >= 2.0) {
        x = std::log2(x);
        ++i;
    }
    return i;
}

double iter_log(double x, int j) {
    if (j < 0) throw std::invalid_argument("iter_log: negative iteration count");
    for (int i = 0; i < j; ++i) {
        if (x <= 0.0) throw std::domain_error("iter_log: non-positive intermediate value");
        x = std::log2(x);
    }
    return x;
}

SourceSize SourceSize::from_value(std::uint64_t v) {
    if (v < 1) throw std::invalid_argument("SourceSize: v must be >= 1");
    SourceSize s;
    s.value = v;
    s.log2_value = std::log2(static_cast<double>(v));
    return s;
}

SourceSize SourceSize::from_pow2(std::uint64_t exponent) {
    SourceSize s;
    s.log2_value = static_cast<double>(exponent);
    if (exponent < 63) s.value = 1ULL << exponent;
    return s;
}

double SourceSize::iterated_log(int j) const {
    if (j == 0) {
        return value ? static_cast<double>(*value)
                     : std::numeric_limits<double>::infinity();
    }
    return iter_log(log2_value, j - 1);
}

int SourceSize::log_star_value() const {
    if (value && *value < 2) return 0;
    return 1 + log_star(log2_value);
}

// --- Explicit set system -------------------------------------------------

ExplicitSetSystem::ExplicitSetSystem(std::uint64_t v,
                                     std::vector<std::vector<std::uint32_t>> blocks)
    : v_(v), blocks_(std::move(blocks)) {
    inverted_.assign(v_, {});
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        auto& blk = blocks_[i];
        std::sort(blk.begin(), blk.end());
        blk.erase(std::unique(blk.begin(), blk.end()), blk.end());
        for (std::uint32_t x : blk) {
            if (x >= v_) throw std::invalid_argument("set system: element out of ground set");
            inverted_[x].push_back(static_cast<std::uint32_t>(i));
        }
    }
}

bool ExplicitSetSystem::contains(std::uint64_t element, std::uint64_t block) const {
    if (element >= v_ || block >= blocks_.size()) return false;
    const auto& blk = blocks_[block];
    return std::binary_search(blk.begin(), blk.end(),
                              static_cast<std::uint32_t>(element));
}

std::optional<std::uint64_t> ExplicitSetSystem::sample_block_containing(
    std::uint64_t element, RngStream& rng) const {
    const auto& lst = blocks_containing(element);
    if (lst.empty()) return std::nullopt;
    return lst[rng.uniform_int(lst.size())];
}

const std::vector<std::uint32_t>& ExplicitSetSystem::blocks_containing(
    std::uint64_t x) const {
    if (x >= v_) throw std::invalid_argument("blocks_containing: element out of ground set");
    return inverted_[x];
}

std::string ExplicitSetSystem::serialize() const {
    std::ostringstream out;
    for (const auto& blk : blocks_) {
        for (std::size_t i = 0; i < blk.size(); ++i) {
            if (i) out << ' ';
            out << blk[i];
        }
        out << '\n';
    }
    return out.str();
}

ExplicitSetSystem ExplicitSetSystem::parse(std::uint64_t v, const std::string& text) {
    std::vector<std::vector<std::uint32_t>> blocks;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::uint32_t> blk;
        std::uint32_t x;
        while (ls >> x) blk.push_back(x);
        blocks.push_back(std::move(blk));
    }
    return ExplicitSetSystem(v, std::move(blocks));
}

// --- Bernoulli set system ------------------------------------------------

BernoulliSetSystem::BernoulliSetSystem(std::uint64_t v, std::uint64_t b,
                                       double inclusion_prob, std::uint64_t seed)
    : v_(v), b_(b), seed_(seed), p_(inclusion_prob) {
    if (!(inclusion_prob > 0.0 && inclusion_prob < 1.0))
        throw std::invalid_argument("BernoulliSetSystem: inclusion_prob outside (0,1)");
    threshold_ = static_cast<std::uint64_t>(
        static_cast<long double>(p_) * 18446744073709551615.0L);
}

bool BernoulliSetSystem::contains(std::uint64_t element, std::uint64_t block) const {
    if (element >= v_ || block >= b_) return false;
    return mix64(seed_, element, block) < threshold_;
}

std::optional<std::uint64_t> BernoulliSetSystem::sample_block_containing(
    std::uint64_t element, RngStream& rng) const {
    // Rejection sampling over block indices is exactly uniform over the
    // membership set. Failure after the cap is treated as empty.
    const std::uint64_t cap =
        static_cast<std::uint64_t>(std::ceil(64.0 / p_)) + 64;
    for (std::uint64_t t = 0; t < cap; ++t) {
        std::uint64_t i = rng.uniform_int(b_);
        if (contains(element, i)) return i;
    }
    return std::nullopt;
}

// --- Verification and construction --------------------------------------

SetSystemReport verify_set_system(const ExplicitSetSystem& s, std::uint64_t r,
                                  std::uint64_t lambda) {
    SetSystemReport rep;
    const std::uint64_t v = s.ground_size();
    rep.min_r = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t x = 0; x < v; ++x)
        rep.min_r = std::min<std::uint64_t>(rep.min_r, s.blocks_containing(x).size());
    if (v == 0) rep.min_r = 0;

    rep.max_lambda = 0;
    if (v <= 4096) {
        std::vector<std::uint32_t> pair_count(v * v, 0);
        for (const auto& blk : s.blocks()) {
            for (std::size_t i = 0; i < blk.size(); ++i) {
                for (std::size_t j = i + 1; j < blk.size(); ++j) {
                    std::uint32_t c = ++pair_count[blk[i] * v + blk[j]];
                    rep.max_lambda = std::max<std::uint64_t>(rep.max_lambda, c);
                }
            }
        }
    } else {
        // Pairwise intersection of inverted lists (lists are sorted).
        for (std::uint64_t x = 0; x < v; ++x) {
            const auto& lx = s.blocks_containing(x);
            for (std::uint64_t y = x + 1; y < v; ++y) {
                const auto& ly = s.blocks_containing(y);
                std::size_t i = 0, j = 0;
                std::uint64_t common = 0;
                while (i < lx.size() && j < ly.size()) {
                    if (lx[i] < ly[j]) ++i;
                    else if (lx[i] > ly[j]) ++j;
                    else { ++common; ++i; ++j; }
                }
                rep.max_lambda = std::max(rep.max_lambda, common);
            }
        }
    }
    rep.ok = rep.min_r >= r && rep.max_lambda <= lambda;
    return rep;
}

ExplicitSetSystem construct_set_system(std::uint64_t v, std::uint64_t b,
                                       double inclusion_prob, RngStream& rng,
                                       std::uint64_t r_target,
                                       std::uint64_t lambda_target,
                                       int max_retries) {
    if (v < 2 || b < 1) throw std::invalid_argument("construct_set_system: v >= 2, b >= 1");
    if (!(inclusion_prob >= 0.0 && inclusion_prob <= 1.0))
        throw std::invalid_argument("construct_set_system: inclusion_prob outside [0,1]");
    SetSystemReport best;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<std::vector<std::uint32_t>> blocks(b);
        for (std::uint64_t i = 0; i < b; ++i) {
            for (std::uint64_t x = 0; x < v; ++x) {
                if (rng.uniform() < inclusion_prob)
                    blocks[i].push_back(static_cast<std::uint32_t>(x));
            }
        }
        ExplicitSetSystem sys(v, std::move(blocks));
        SetSystemReport rep = verify_set_system(sys, r_target, lambda_target);
        if (rep.ok) return sys;
        if (attempt == 0 || rep.min_r > best.min_r) best = rep;
    }
    std::ostringstream msg;
    msg << "construct_set_system: verification failed after " << max_retries
        << " retries (targets r>=" << r_target << ", lambda<=" << lambda_target
        << "; best achieved min_r=" << best.min_r
        << ", max_lambda=" << best.max_lambda << ")";
    throw std::runtime_error(msg.str());
}

// --- Schedule ------------------------------------------------------------

std::uint64_t Schedule::v(int j) const {
    if (j < 2 || j > phi) throw std::invalid_argument("Schedule::v: index out of range");
    return v_rest[static_cast<std::size_t>(j) - 2];
}

std::uint64_t Schedule::final_size() const {
    if (phi == 0) {
        if (!v1.value)
            throw std::runtime_error("Schedule: degenerate schedule with oversized v1");
        return *v1.value;
    }
    return v_rest.back();
}

Schedule make_schedule(SourceSize v1, std::uint64_t n_prime, double beta1,
                       double beta2, std::optional<double> eps_override) {
    if (v1.log2_value < 1.0) throw std::invalid_argument("make_schedule: v1 must be >= 2");
    if (n_prime < 4) throw std::invalid_argument("make_schedule: n_prime must be >= 4");
    if (beta1 <= 0.0 || beta2 <= 0.0)
        throw std::invalid_argument("make_schedule: beta1, beta2 must be positive");
    if (eps_override && !(*eps_override > 0.0 && *eps_override < 1.0))
        throw std::invalid_argument("make_schedule: eps_override outside (0,1)");

    Schedule s;
    s.v1 = v1;
    s.n_prime = n_prime;
    s.beta1 = beta1;
    s.beta2 = beta2;
    s.eps = eps_override ? *eps_override
                         : std::exp2(-beta1 * static_cast<double>(n_prime));
    if (s.eps <= 0.0)
        throw std::runtime_error("make_schedule: eps underflowed; use eps_override");

    const double bound = beta2 * static_cast<double>(n_prime) +
                         std::sqrt(static_cast<double>(n_prime));
    int phi = -1;
    for (int t = 0; t <= 128; t += 2) {
        bool ok;
        try {
            ok = v1.iterated_log(t) <= bound;
        } catch (const std::domain_error&) {
            ok = true;  // the iterated value collapsed below 1; certainly <= bound
        }
        if (ok) {
            phi = t;
            break;
        }
    }
    if (phi < 0) throw std::runtime_error("make_schedule: no even t <= 128 satisfies the bound");
    s.phi = phi;

    double prev_log = v1.log2_value;  // log2(v_1)
    const double eps4 = std::pow(s.eps, 4.0);
    for (int j = 1; j < phi; ++j) {
        double val = std::floor(std::exp2(static_cast<double>(phi - j + 8)) / eps4 * prev_log);
        if (!(val >= 2.0)) {
            std::ostringstream msg;
            msg << "make_schedule: recursion truncated at j=" << j + 1
                << " (value " << val << " < 2); eps=" << s.eps;
            throw std::runtime_error(msg.str());
        }
        if (val > static_cast<double>(kScheduleSizeCap)) {
            std::ostringstream msg;
            msg << "make_schedule: v_" << j + 1 << " = " << val
                << " exceeds the 2^40 cap; eps=" << s.eps
                << " log2(v_" << j << ")=" << prev_log;
            throw std::runtime_error(msg.str());
        }
        s.v_rest.push_back(static_cast<std::uint64_t>(val));
        prev_log = std::log2(val);
    }
    return s;
}

RecursionBound check_recursion_bound(const Schedule& s) {
    if (s.phi < 2) return RecursionBound::Inapplicable;
    if (s.v1.iterated_log(s.phi - 1) < 3.0) return RecursionBound::Inapplicable;

    // delta = 2^-9 eps^4 makes the schedule recursion meet the growth
    // lemma's hypothesis with equality (the schedule multiplies by
    // 2^(phi-j+8) eps^-4 = 2 * 2^(k-j)/delta at delta = 2^-8 eps^4,
    // which would overshoot the hypothesis by a factor of two).
    const int k = s.phi - 1;
    const double delta = std::exp2(-9.0) * std::pow(s.eps, 4.0);
    for (int j = 1; j < s.phi; ++j) {
        double first = std::exp2(static_cast<double>(k - j)) / delta *
                       s.v1.iterated_log(j);
        double c = std::exp2(static_cast<double>(k - (j - 1))) / delta;
        double bound = first + c * std::log2(c);
        if (!(static_cast<double>(s.v(j + 1)) < bound)) return RecursionBound::Violated;
    }

    // Closed-form bound on the final size, with beta recovered from eps
    // so that eps_override profiles are covered too.
    const double beta_eff = -std::log2(s.eps) / static_cast<double>(s.n_prime);
    double corollary = std::exp2(9.0 + 4.0 * beta_eff * static_cast<double>(s.n_prime)) *
                       (s.v1.iterated_log(s.phi - 1) +
                        20.0 + 8.0 * beta_eff * static_cast<double>(s.n_prime));
    if (!(static_cast<double>(s.final_size()) < corollary)) return RecursionBound::Violated;
    return RecursionBound::Holds;
}

}  // namespace noisyauth
