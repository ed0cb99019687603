#include "noisyauth/codes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace noisyauth {

std::uint64_t hamming_distance(std::span<const Symbol> x, std::span<const Symbol> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("hamming_distance: length mismatch");
    std::uint64_t d = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) ++d;
    return d;
}

double ChannelCode::rate() const {
    if (n == 0 || codebook.empty()) return 0.0;
    return std::log2(static_cast<double>(codebook.size())) / static_cast<double>(n);
}

std::string ChannelCode::serialize() const {
    std::ostringstream out;
    for (const auto& cw : codebook) {
        for (std::size_t i = 0; i < cw.size(); ++i) {
            if (i) out << ' ';
            out << cw[i];
        }
        out << '\n';
    }
    return out.str();
}

ChannelCode ChannelCode::parse(std::size_t alphabet_size, const std::string& text) {
    ChannelCode code;
    code.alphabet_size = alphabet_size;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        Sequence cw;
        std::uint64_t sym;
        while (ls >> sym) {
            if (sym >= alphabet_size)
                throw std::invalid_argument("ChannelCode::parse: symbol out of range");
            cw.push_back(static_cast<Symbol>(sym));
        }
        if (!code.codebook.empty() && cw.size() != code.codebook.front().size())
            throw std::invalid_argument("ChannelCode::parse: ragged codeword lengths");
        code.codebook.push_back(std::move(cw));
    }
    code.n = code.codebook.empty() ? 0 : code.codebook.front().size();
    return code;
}

ChannelCode build_random_code(const Dmc& w, std::uint64_t n_prime,
                              std::uint64_t num_codewords, RngStream& rng) {
    w.validate();
    if (n_prime == 0 || num_codewords == 0)
        throw std::invalid_argument("build_random_code: empty code");
    const CapacityResult cap = capacity(w);
    // Inverse-CDF table over the capacity-achieving input distribution.
    std::vector<double> cdf(cap.input_dist.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += cap.input_dist[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;

    auto draw = [&]() {
        Sequence cw(n_prime);
        for (auto& s : cw) {
            const double u = rng.uniform();
            s = static_cast<Symbol>(
                std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        }
        return cw;
    };

    ChannelCode code;
    code.n = n_prime;
    code.alphabet_size = w.input_size;
    std::set<Sequence> seen;
    while (code.codebook.size() < num_codewords) {
        Sequence cw = draw();
        if (seen.insert(cw).second) code.codebook.push_back(std::move(cw));
    }
    return code;
}

std::int64_t ml_decode(const ChannelCode& code, const Dmc& w,
                       std::span<const Symbol> y) {
    std::int64_t best = kDecodeReject;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < code.codebook.size(); ++i) {
        const Sequence& cw = code.codebook[i];
        if (cw.size() != y.size())
            throw std::invalid_argument("ml_decode: length mismatch");
        double ll = 0.0;
        bool zero = false;
        for (std::size_t j = 0; j < cw.size(); ++j) {
            const double p = w.row(cw[j])[y[j]];
            if (p <= 0.0) { zero = true; break; }
            ll += std::log(p);
        }
        if (zero) continue;
        if (ll > best_ll + 1e-12) {  // strict improvement: lowest index wins ties
            best_ll = ll;
            best = static_cast<std::int64_t>(i);
        }
    }
    return best;
}

ErrorEstimate estimate_error_rate(const ChannelCode& code, const Dmc& w,
                                  std::uint64_t trials, RngStream& rng) {
    if (trials == 0) throw std::invalid_argument("estimate_error_rate: no trials");
    const std::uint64_t N = code.codebook.size();
    auto run = [&](std::uint64_t idx, std::uint64_t t) {
        std::uint64_t errors = 0;
        for (std::uint64_t i = 0; i < t; ++i) {
            Sequence y = sample(w, code.codebook[idx], rng);
            if (ml_decode(code, w, y) != static_cast<std::int64_t>(idx)) ++errors;
        }
        return errors;
    };
    if (N <= 256) {
        // Worst codeword: each message gets its own batch.
        const std::uint64_t each = std::max<std::uint64_t>(1, trials / N);
        ErrorEstimate worst;
        worst.p_hat = -1.0;
        for (std::uint64_t idx = 0; idx < N; ++idx) {
            const std::uint64_t errors = run(idx, each);
            const double p = static_cast<double>(errors) / static_cast<double>(each);
            if (p > worst.p_hat) {
                worst.p_hat = p;
                worst.ci = wilson_interval(errors, each);
            }
        }
        return worst;
    }
    std::uint64_t errors = 0;
    for (std::uint64_t i = 0; i < trials; ++i)
        errors += run(rng.uniform_int(N), 1);
    return {static_cast<double>(errors) / static_cast<double>(trials),
            wilson_interval(errors, trials)};
}

double distance_code_size_bound(std::size_t alphabet_size, std::uint64_t n,
                                double alpha) {
    const double x = static_cast<double>(alphabet_size);
    const double nn = static_cast<double>(n);
    const double exponent =
        nn * std::log2(x) - nn * (binary_entropy(alpha) + alpha * std::log2(x));
    return std::exp2(exponent) / (alpha * nn);
}

DistanceCode build_distance_code(std::size_t alphabet_size, std::uint64_t n,
                                 double alpha, const DistanceCodeOptions& opts) {
    if (alphabet_size < 2) throw std::invalid_argument("build_distance_code: alphabet");
    if (n == 0 || alpha < 1.0 / static_cast<double>(n) || alpha > 0.5)
        throw std::invalid_argument("build_distance_code: alpha out of range");
    const std::uint64_t d = static_cast<std::uint64_t>(
        std::ceil(alpha * static_cast<double>(n) - 1e-12));

    const double total_log2 = static_cast<double>(n) * std::log2(alphabet_size);
    const bool enumerable = total_log2 < 63.0;
    std::uint64_t total = 0;
    if (enumerable) {
        total = 1;
        for (std::uint64_t i = 0; i < n; ++i) total *= alphabet_size;
    }

    auto word_at = [&](std::uint64_t idx) {
        Sequence w(n);
        for (std::uint64_t pos = n; pos-- > 0;) {
            w[pos] = static_cast<Symbol>(idx % alphabet_size);
            idx /= alphabet_size;
        }
        return w;
    };

    DistanceCode out;
    out.alpha = alpha;
    out.code.n = n;
    out.code.alphabet_size = alphabet_size;
    auto try_add = [&](const Sequence& w) {
        for (const auto& cw : out.code.codebook)
            if (hamming_distance(cw, w) < d) return;
        out.code.codebook.push_back(w);
    };

    if (opts.lexicographic) {
        if (!enumerable)
            throw std::invalid_argument("build_distance_code: space too large for lex scan");
        const std::uint64_t limit = std::min(total, opts.scan_cap);
        for (std::uint64_t idx = 0; idx < limit; ++idx) {
            try_add(word_at(idx));
            if (out.code.codebook.size() >= opts.size_cap) break;
        }
    } else {
        RngStream rng(opts.seed);
        if (enumerable && total <= opts.scan_cap) {
            // Full scan in a seeded random order.
            std::vector<std::uint64_t> order(total);
            for (std::uint64_t i = 0; i < total; ++i) order[i] = i;
            std::shuffle(order.begin(), order.end(), rng.engine());
            for (std::uint64_t idx : order) {
                try_add(word_at(idx));
                if (out.code.codebook.size() >= opts.size_cap) break;
            }
        } else {
            for (std::uint64_t i = 0; i < opts.scan_cap; ++i) {
                Sequence w(n);
                for (auto& s : w)
                    s = static_cast<Symbol>(rng.uniform_int(alphabet_size));
                try_add(w);
                if (out.code.codebook.size() >= opts.size_cap) break;
            }
        }
    }

    out.min_distance = std::numeric_limits<std::uint64_t>::max();
    if (out.code.codebook.size() < 2) out.min_distance = n;
    for (std::size_t i = 0; i < out.code.codebook.size(); ++i)
        for (std::size_t j = i + 1; j < out.code.codebook.size(); ++j)
            out.min_distance = std::min(
                out.min_distance,
                hamming_distance(out.code.codebook[i], out.code.codebook[j]));
    return out;
}

// --- Codebook ------------------------------------------------------------

Codebook Codebook::from_channel_code(ChannelCode code, Dmc w) {
    if (code.codebook.empty())
        throw std::invalid_argument("Codebook: empty code");
    Codebook cb;
    cb.lazy_ = false;
    cb.size_ = code.codebook.size();
    cb.n_ = code.n;
    cb.w_ = std::move(w);
    cb.code_ = std::move(code);
    return cb;
}

Codebook Codebook::lazy_random(const Dmc& w, std::uint64_t n, std::uint64_t size,
                               std::uint64_t seed) {
    w.validate();
    if (w.input_size != 2 || w.output_size != 2 ||
        std::abs(w.rows[0][1] - w.rows[1][0]) > 1e-12 || w.rows[0][1] >= 0.5)
        throw std::invalid_argument(
            "Codebook::lazy_random: needs a binary symmetric channel with "
            "flip probability < 1/2");
    if (n == 0 || size == 0)
        throw std::invalid_argument("Codebook::lazy_random: empty code");
    Codebook cb;
    cb.lazy_ = true;
    cb.size_ = size;
    cb.n_ = n;
    cb.seed_ = seed;
    cb.flip_prob_ = w.rows[0][1];
    cb.w_ = w;
    return cb;
}

Sequence Codebook::codeword(std::uint64_t index) const {
    if (index >= size_) throw std::out_of_range("Codebook::codeword");
    if (!lazy_) return code_->codebook[index];
    Sequence cw(n_);
    for (std::uint64_t pos = 0; pos < n_; ++pos)
        cw[pos] = static_cast<Symbol>(mix64(seed_, index, pos) & 1);
    return cw;
}

const ChannelCode& Codebook::channel_code() const {
    if (lazy_)
        throw std::logic_error("Codebook::channel_code: lazy backing has no table");
    return *code_;
}

bool Codebook::decodes_to(std::span<const Symbol> y, std::uint64_t t,
                          std::optional<std::uint64_t> src, RngStream& rng) const {
    if (t >= size_) throw std::out_of_range("Codebook::decodes_to");
    if (!lazy_) return ml_decode(*code_, w_, y) == static_cast<std::int64_t>(t);

    // For a BSC with flip probability < 1/2, ML decoding is minimum
    // Hamming distance with lowest-index tie-break. Codewords not
    // pinned by y (every index except t and src) are uniform and
    // independent of y, so each one's distance to y is Bin(n, 1/2).
    // Codeword t wins iff every lower-index competitor is strictly
    // farther and every higher-index competitor is at least as far.
    const std::uint64_t dt = hamming_distance(y, codeword(t));
    if (src && *src != t) {
        const std::uint64_t ds = hamming_distance(y, codeword(*src));
        if (ds < dt || (ds == dt && *src < t)) return false;
    }
    std::uint64_t lower = t, upper = size_ - 1 - t;
    if (src && *src != t) (*src < t ? lower : upper) -= 1;
    const double q_lt = dt == 0 ? 0.0 : binomial_cdf(dt - 1, n_, 0.5);
    const double q_le = binomial_cdf(dt, n_, 0.5);
    double log_win = 0.0;  // guard 0 * -inf when a factor is absent
    if (lower > 0) log_win += static_cast<double>(lower) * std::log1p(-q_le);
    if (upper > 0) log_win += static_cast<double>(upper) * std::log1p(-q_lt);
    return rng.uniform() < std::exp(log_win);
}

}  // namespace noisyauth
