#include "noisyauth/adversary.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>
#include <vector>

namespace noisyauth {

namespace {

std::uint64_t flow_value_range(const ProtocolInstance& inst, int ell) {
    return ell == 1 ? inst.source_size()
                    : inst.schedule.v(ell);  // block indices of system ell-1
}

class SubstituteFirstFlowMediator final : public Mediator {
public:
    SubstituteFirstFlowMediator(const ProtocolInstance& inst,
                                std::optional<std::uint64_t> target)
        : inst_(&inst), target_(target) {}

    std::uint64_t on_noiseless(int l, bool, std::uint64_t value) override {
        if (l != 1) return value;
        const std::uint64_t v1 = inst_->source_size();
        std::uint64_t t = target_.value_or((value + 1) % v1);
        if (t == value) t = (value + 1) % v1;
        return t % v1;
    }

private:
    const ProtocolInstance* inst_;
    std::optional<std::uint64_t> target_;
};

class RandomTamperMediator final : public Mediator {
public:
    RandomTamperMediator(const ProtocolInstance& inst, double prob,
                         RngStream rng)
        : inst_(&inst), prob_(prob), rng_(rng) {}

    std::uint64_t on_noiseless(int l, bool, std::uint64_t value) override {
        if (rng_.uniform() >= prob_) return value;
        return rng_.uniform_int(flow_value_range(*inst_, l));
    }

private:
    const ProtocolInstance* inst_;
    double prob_;
    RngStream rng_;
};

class GreedySubstituteMediator final : public Mediator {
public:
    GreedySubstituteMediator(const ProtocolInstance& inst,
                             const GreedySubstitute& cfg, RngStream rng)
        : inst_(&inst), cfg_(cfg), rng_(rng) {}

    std::uint64_t on_noiseless(int l, bool, std::uint64_t value) override {
        sent_[l] = value;  // genuine values, observed pre-delivery
        if (l == 1) {
            const std::uint64_t v1 = inst_->source_size();
            std::uint64_t t = cfg_.target.value_or((value + 1) % v1);
            if (t == value) t = (value + 1) % v1;
            return t % v1;
        }
        if (merged_) return value;
        // The receiver of iteration l generated and sent iteration l-1.
        const std::uint64_t receiver_prev = sent_.at(l - 1);
        const SetSystem& sys = inst_->system(l - 1);
        const bool may_merge = !cfg_.merge_at || *cfg_.merge_at == l;
        if (may_merge && cfg_.merge_at) {
            // Forced rejoin attempt: deliver the genuine value and let
            // the receiver's check decide.
            merged_ = true;
            return value;
        }
        if (may_merge && sys.contains(receiver_prev, value)) {
            merged_ = true;
            return value;
        }
        auto d = sys.sample_block_containing(receiver_prev, rng_);
        if (!d) return value;  // nothing satisfiable; trial is lost
        if (*d == value) merged_ = true;
        return *d;
    }

private:
    const ProtocolInstance* inst_;
    GreedySubstitute cfg_;
    RngStream rng_;
    bool merged_ = false;
    std::map<int, std::uint64_t> sent_;
};

Sequence mixture_prefix_input(const std::vector<double>& mixture,
                              std::uint64_t k, RngStream& rng) {
    // Inverse-CDF draw of W2 input symbols from the hull-optimal mixture.
    std::vector<double> cdf(mixture.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += mixture[i];
        cdf[i] = acc;
    }
    cdf.back() = 1.0;
    Sequence x(k);
    for (auto& s : x) {
        const double u = rng.uniform();
        s = static_cast<Symbol>(
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
    return x;
}

// Runs the noiseless phase between the two machines with faithful
// delivery; returns Alice's DMC input, or nullopt if either rejected.
std::optional<Sequence> drive_noiseless(AliceSm& alice, BobSm& bob) {
    Flow f = alice.next(std::nullopt);
    while (true) {
        if (std::holds_alternative<FlowReject>(f)) return std::nullopt;
        if (auto* dmc = std::get_if<FlowDmcInput>(&f)) return dmc->x;
        const std::uint64_t v = std::get<FlowNoiseless>(f).value;
        auto resp = bob.on_noiseless(v);
        if (!resp) {
            f = alice.next(std::nullopt);  // phi = 0: the DMC flow
            continue;
        }
        f = *resp;
        if (std::holds_alternative<FlowReject>(f)) return std::nullopt;
        f = alice.next(std::get<FlowNoiseless>(f).value);
    }
}

}  // namespace

bool run_type1(const ProtocolInstance& inst, const Type1Strategy& strategy,
               RngStream& rng) {
    const std::uint64_t s = rng.uniform_int(inst.source_size());
    RngStream session_rng = rng.derive_child(1);
    RngStream mediator_rng = rng.derive_child(2);

    std::unique_ptr<Mediator> mediator;
    if (std::holds_alternative<PassThrough>(strategy)) {
        mediator = std::make_unique<Mediator>();
    } else if (auto* sf = std::get_if<SubstituteFirstFlow>(&strategy)) {
        mediator = std::make_unique<SubstituteFirstFlowMediator>(inst, sf->target);
    } else if (auto* rt = std::get_if<RandomTamper>(&strategy)) {
        mediator =
            std::make_unique<RandomTamperMediator>(inst, rt->prob, mediator_rng);
    } else {
        mediator = std::make_unique<GreedySubstituteMediator>(
            inst, std::get<GreedySubstitute>(strategy), mediator_rng);
    }
    const SessionResult res = run_session(inst, s, mediator.get(), session_rng);
    return res.outcome.accepted() && *res.outcome.value != s;
}

bool run_type2(const ProtocolInstance& inst, const Impersonate& strategy,
               RngStream& rng) {
    AliceSm oscar(inst, strategy.target % inst.source_size(),
                  rng.derive_child(1));
    BobSm bob(inst, rng.derive_child(2));
    RngStream chan = rng.derive_child(3);
    RngStream mix = rng.derive_child(4);

    auto honest_input = drive_noiseless(oscar, bob);
    if (!honest_input) return false;
    // Replace the fingerprint prefix: Oscar cannot produce W1(.|a), the
    // best he can do over W2 is the hull-optimal input mixture.
    Sequence x = mixture_prefix_input(inst.mixture, inst.k, mix);
    const std::optional<std::uint64_t> src = oscar.sent_index();
    Sequence cw = inst.code.codeword(*src);
    x.insert(x.end(), cw.begin(), cw.end());
    Sequence z = sample(inst.w2, x, chan);
    return bob.on_channel_output(z, src).accepted();
}

bool run_type2_ni(const NiScheme& scheme, const Impersonate& strategy,
                  const std::vector<double>& mixture, RngStream& rng) {
    RngStream chan = rng.derive_child(1);
    RngStream mix = rng.derive_child(2);
    const std::uint64_t s = strategy.target % scheme.size();
    Sequence x = mixture_prefix_input(mixture, scheme.k, mix);
    const Sequence& cw = scheme.code.code.codebook[s];
    x.insert(x.end(), cw.begin(), cw.end());
    Sequence z = sample(scheme.w2, x, chan);
    return ni_verify(scheme, z, s).accepted();
}

bool run_replay(const ProtocolInstance& inst, RngStream& rng) {
    const std::uint64_t v1 = inst.source_size();
    const std::uint64_t s = rng.uniform_int(v1);
    const std::uint64_t s2 = rng.uniform_int(v1);

    // Session 1: honest Alice, receiver simulated by Oscar.
    AliceSm alice(inst, s, rng.derive_child(1));
    BobSm intercept(inst, rng.derive_child(2));
    auto x = drive_noiseless(alice, intercept);
    if (!x) return false;
    const std::optional<std::uint64_t> src = alice.sent_index();

    // Session 2: Oscar authenticates s2 to the real Bob, replaying
    // Alice's W1 transmission as his own DMC flow.
    AliceSm oscar(inst, s2, rng.derive_child(3));
    BobSm bob(inst, rng.derive_child(4));
    if (!drive_noiseless(oscar, bob)) return false;
    RngStream chan = rng.derive_child(5);
    Sequence z = sample(inst.w1, *x, chan);
    const Outcome out = bob.on_channel_output(z, src);
    return out.accepted() && *out.value != s;
}

AttackReport monte_carlo(const std::function<bool(RngStream&)>& trial,
                         std::uint64_t trials, std::uint64_t master_seed,
                         int threads) {
    if (trials == 0) throw std::invalid_argument("monte_carlo: no trials");
    if (threads < 1) threads = 1;
    std::atomic<std::uint64_t> next{0}, successes{0};
    auto worker = [&]() {
        while (true) {
            const std::uint64_t i = next.fetch_add(1);
            if (i >= trials) return;
            RngStream stream = RngStream::derive(master_seed, i);
            if (trial(stream)) successes.fetch_add(1);
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    AttackReport rep;
    rep.trials = trials;
    rep.successes = successes.load();
    rep.p_hat = static_cast<double>(rep.successes) / static_cast<double>(trials);
    rep.ci = wilson_interval(rep.successes, trials);
    return rep;
}

double success_lower_bound(double h_f, double delta,
                           std::uint64_t source_size) {
    const double b =
        std::exp2(-h_f) - delta - 1.0 / static_cast<double>(source_size);
    return b > 0.0 ? b : 0.0;
}

int round_lower_bound(double source_size_log2, std::uint64_t n) {
    const int ls_source = 1 + log_star(source_size_log2);
    const int ls_n = log_star(static_cast<double>(n));
    const int b = ls_source - ls_n - 5;
    return b > 0 ? b : 0;
}

bool collision_entropy_check(const Distribution& p_f) {
    validate_distribution(p_f);
    double sq = 0.0;
    for (double p : p_f) sq += p * p;
    return sq >= std::exp2(-entropy(p_f)) - 1e-12;
}

std::string strategy_name(const Type1Strategy& s) {
    if (std::holds_alternative<PassThrough>(s)) return "pass_through";
    if (std::holds_alternative<SubstituteFirstFlow>(s))
        return "substitute_first_flow";
    if (std::holds_alternative<RandomTamper>(s)) return "random_tamper";
    return "greedy_substitute";
}

std::string strategy_params(const Type1Strategy& s) {
    std::ostringstream out;
    if (auto* sf = std::get_if<SubstituteFirstFlow>(&s)) {
        if (sf->target) out << "target=" << *sf->target;
    } else if (auto* rt = std::get_if<RandomTamper>(&s)) {
        out << "prob=" << rt->prob;
    } else if (auto* gs = std::get_if<GreedySubstitute>(&s)) {
        if (gs->target) out << "target=" << *gs->target << ";";
        if (gs->merge_at) out << "merge_at=" << *gs->merge_at;
    }
    return out.str();
}

}  // namespace noisyauth
