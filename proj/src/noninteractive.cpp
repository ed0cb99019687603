#include "noisyauth/noninteractive.hpp"

#include <cmath>
#include <stdexcept>

namespace noisyauth {

NiScheme ni_setup(const Dmc& w1, const Dmc& w2, std::uint64_t n, double alpha,
                  const DistanceCodeOptions& code_opts) {
    w1.validate();
    w2.validate();
    NiScheme s;
    s.w1 = w1;
    s.w2 = w2;
    s.theta = theta(w1);
    if (s.theta <= 1e-9)
        throw std::runtime_error("ni_setup: W1 is redundant (Theta = 0)");
    const AnchorChoice anchor = choose_anchor(w1, w2);
    s.anchor = anchor.symbol;
    s.xi = anchor.gamma;
    s.eps = std::min(s.xi / (4.0 * static_cast<double>(w1.output_size)),
                     alpha * s.theta / 2.0);
    s.n = n;
    s.k = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    s.code = build_distance_code(w1.input_size, n, alpha, code_opts);
    return s;
}

std::pair<Sequence, std::uint64_t> ni_send(const NiScheme& scheme,
                                           std::uint64_t s) {
    if (s >= scheme.size()) throw std::out_of_range("ni_send: source value");
    Sequence x(scheme.k + scheme.n, scheme.anchor);
    const Sequence& cw = scheme.code.code.codebook[s];
    std::copy(cw.begin(), cw.end(), x.begin() + static_cast<std::ptrdiff_t>(scheme.k));
    return {x, s};
}

Outcome ni_verify(const NiScheme& scheme, std::span<const Symbol> z,
                  std::uint64_t s_received) {
    if (z.size() != scheme.k + scheme.n)
        throw std::invalid_argument("ni_verify: length mismatch");
    if (s_received >= scheme.size()) return Outcome::reject();
    const Sequence head(scheme.k, scheme.anchor);
    if (!is_cond_typical(z.first(scheme.k), head, scheme.w1, scheme.eps))
        return Outcome::reject();
    if (!is_cond_typical(z.subspan(scheme.k),
                         scheme.code.code.codebook[s_received], scheme.w1,
                         scheme.eps))
        return Outcome::reject();
    return Outcome::accept(s_received);
}

NiRate ni_rate(const NiScheme& scheme) {
    NiRate r;
    const double uses = static_cast<double>(scheme.n + scheme.k);
    r.rate = std::log2(static_cast<double>(scheme.size())) / uses;
    const double floor_size =
        distance_code_size_bound(scheme.w1.input_size, scheme.n,
                                 scheme.code.alpha);
    r.floor_rate = floor_size >= 1.0 ? std::log2(floor_size) / uses : 0.0;
    return r;
}

}  // namespace noisyauth
