#include "noisyauth/setauth.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace noisyauth {

std::uint64_t ProtocolInstance::source_size() const {
    if (!schedule.v1.value)
        throw std::logic_error("ProtocolInstance: source size beyond 64 bits");
    return *schedule.v1.value;
}

std::uint64_t ProtocolInstance::encode(std::uint64_t s) const {
    if (phi() >= 2) return s;
    return s % code.size();
}

const SetSystem& ProtocolInstance::system(int j) const {
    if (j < 1 || j >= phi() || !set_systems[static_cast<std::size_t>(j)])
        throw std::out_of_range("ProtocolInstance::system");
    return *set_systems[static_cast<std::size_t>(j)];
}

Sequence ProtocolInstance::dmc_input(std::uint64_t final_index) const {
    Sequence x(k + n_prime, anchor);
    Sequence cw = code.codeword(final_index);
    std::copy(cw.begin(), cw.end(), x.begin() + static_cast<std::ptrdiff_t>(k));
    return x;
}

int round_count(const ProtocolInstance& instance) {
    return instance.phi() + 1;
}

ProtocolInstance setup(const Dmc& w1, const Dmc& w2, std::uint64_t v1,
                       std::uint64_t n_prime, double beta1, double beta2,
                       std::optional<double> eps_override, RngStream& rng,
                       const SetupOptions& opts) {
    w1.validate();
    w2.validate();
    ProtocolInstance inst;
    inst.w1 = w1;
    inst.w2 = w2;

    const CapacityResult cap = capacity(w1);
    if (cap.capacity_bits <= 0.0)
        throw std::runtime_error("setup: W1 has zero capacity");
    const AnchorChoice anchor = choose_anchor(w1, w2);
    inst.anchor = anchor.symbol;
    inst.gamma = anchor.gamma;
    inst.mixture = anchor.mixture;

    inst.schedule = make_schedule(SourceSize::from_value(v1), n_prime, beta1,
                                  beta2, eps_override);
    inst.n_prime = n_prime;
    inst.k = static_cast<std::uint64_t>(
        std::ceil(std::sqrt(static_cast<double>(n_prime))));

    const int phi = inst.schedule.phi;
    const double eps = inst.schedule.eps;
    inst.set_systems.assign(static_cast<std::size_t>(std::max(phi, 1)), nullptr);
    for (int j = 1; j < phi; ++j) {
        const std::uint64_t vj = j == 1 ? v1 : inst.schedule.v(j);
        const std::uint64_t b = inst.schedule.v(j + 1);
        const int t = phi - j;
        const double r = std::exp2(-0.25 * t - 2.0) * eps * static_cast<double>(b);
        const double lambda =
            std::exp2(-0.5 * t - 2.0) * eps * eps * static_cast<double>(b);
        // Inclusion probability: enough mean slack for the r lower
        // tail while keeping the expected pair co-occurrence at most
        // half the lambda budget.
        const double p = std::min(2.0 * r / static_cast<double>(b),
                                  std::sqrt(lambda / (2.0 * static_cast<double>(b))));
        if (static_cast<double>(vj) * static_cast<double>(b) <=
            static_cast<double>(opts.explicit_set_system_cap)) {
            auto r_target = static_cast<std::uint64_t>(std::floor(r));
            auto l_target = static_cast<std::uint64_t>(std::ceil(lambda));
            inst.set_systems[static_cast<std::size_t>(j)] =
                std::make_shared<ExplicitSetSystem>(construct_set_system(
                    vj, b, p, rng, r_target, l_target));
        } else {
            inst.set_systems[static_cast<std::size_t>(j)] =
                std::make_shared<BernoulliSetSystem>(vj, b, p, rng.next_u64());
        }
    }

    if (opts.code_size_override && phi != 0)
        throw std::invalid_argument(
            "setup: code_size_override requires a phi = 0 schedule");
    const std::uint64_t code_size =
        opts.code_size_override.value_or(inst.schedule.final_size());
    inst.rate_exceeds_capacity =
        std::log2(static_cast<double>(code_size)) /
            static_cast<double>(n_prime) >=
        cap.capacity_bits;
    if (code_size <= opts.explicit_code_cap) {
        inst.code = Codebook::from_channel_code(
            build_random_code(w1, n_prime, code_size, rng), w1);
    } else {
        inst.code = Codebook::lazy_random(w1, n_prime, code_size, rng.next_u64());
    }
    return inst;
}

// --- Alice ---------------------------------------------------------------

AliceSm::AliceSm(const ProtocolInstance& inst, std::uint64_t s, RngStream rng)
    : inst_(&inst), rng_(rng), s_(s) {
    if (s >= inst.source_size())
        throw std::invalid_argument("AliceSm: source state out of range");
}

Flow AliceSm::next(std::optional<std::uint64_t> incoming) {
    if (rejected_ || done_)
        throw std::logic_error("AliceSm::next: session finished");
    if (!started_) {
        started_ = true;
        l_ = 1;
        s_last_ = s_;
        return FlowNoiseless{s_};
    }
    if (inst_->phi() == 0) {
        done_ = true;
        sent_index_ = inst_->encode(s_);
        return FlowDmcInput{inst_->dmc_input(*sent_index_)};
    }
    if (!incoming)
        throw std::logic_error("AliceSm::next: expected an incoming value");
    const int ell = l_ + 1;  // even iteration she is receiving
    const std::uint64_t sp = *incoming;
    const SetSystem& check_sys = inst_->system(ell - 1);
    if (sp >= check_sys.block_count() || !check_sys.contains(s_last_, sp)) {
        rejected_ = true;
        return FlowReject{};
    }
    if (ell == inst_->phi()) {
        done_ = true;
        sent_index_ = sp;
        return FlowDmcInput{inst_->dmc_input(sp)};
    }
    auto drawn = inst_->system(ell).sample_block_containing(sp, rng_);
    if (!drawn) {
        rejected_ = true;
        return FlowReject{};
    }
    s_last_ = *drawn;
    l_ = ell + 1;
    return FlowNoiseless{*drawn};
}

// --- Bob -----------------------------------------------------------------

BobSm::BobSm(const ProtocolInstance& inst, RngStream rng)
    : inst_(&inst), rng_(rng) {}

std::optional<Flow> BobSm::on_noiseless(std::uint64_t incoming) {
    if (rejected_) throw std::logic_error("BobSm::on_noiseless: rejected");
    const int ell = l_ + 1;  // odd iteration he is receiving
    if (ell == 1) {
        if (incoming >= inst_->source_size()) {
            rejected_ = true;
            return Flow{FlowReject{}};
        }
        s_first_ = incoming;
        l_ = 1;  // treat the claimed source as received; check vacuous (s_0)
        if (inst_->phi() == 0) return std::nullopt;
    } else {
        const SetSystem& check_sys = inst_->system(ell - 1);
        if (incoming >= check_sys.block_count() ||
            !check_sys.contains(s_last_, incoming)) {
            rejected_ = true;
            return Flow{FlowReject{}};
        }
        l_ = ell;
    }
    auto drawn = inst_->system(l_).sample_block_containing(incoming, rng_);
    if (!drawn) {
        rejected_ = true;
        return Flow{FlowReject{}};
    }
    s_last_ = *drawn;
    l_ += 1;  // he now owns iteration l_'s flow
    return Flow{FlowNoiseless{*drawn}};
}

std::uint64_t BobSm::expected_index() const {
    if (inst_->phi() == 0) return inst_->encode(s_first_);
    return s_last_;
}

Outcome BobSm::on_channel_output(std::span<const Symbol> z,
                                 std::optional<std::uint64_t> src) {
    if (rejected_) return Outcome::reject();
    if (z.size() != inst_->k + inst_->n_prime)
        throw std::invalid_argument("BobSm::on_channel_output: length mismatch");
    // Plain type check on Z^k against W1(.|a), radius gamma/(2|Z|).
    const Distribution& row_a = inst_->w1.row(inst_->anchor);
    const auto type =
        empirical_type(z.first(inst_->k), inst_->w1.output_size).frequencies();
    const double radius =
        inst_->gamma / (2.0 * static_cast<double>(inst_->w1.output_size));
    // Boundary tolerance mirrors is_typical: exactly-radius deviations
    // pass despite inexact frequency representation.
    for (std::size_t u = 0; u < row_a.size(); ++u)
        if (std::abs(type[u] - row_a[u]) > radius + 1e-9) return Outcome::reject();
    if (!inst_->code.decodes_to(z.subspan(inst_->k), expected_index(), src, rng_))
        return Outcome::reject();
    return Outcome::accept(s_first_);
}

// --- Session orchestration ----------------------------------------------

namespace {

std::string seq_to_string(const Sequence& x) {
    std::ostringstream out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) out << ' ';
        out << x[i];
    }
    return out.str();
}

void log_line(SessionResult& res, bool keep, std::uint64_t sid,
              const std::string& dir, const std::string& kind,
              const std::string& payload) {
    if (!keep) return;
    std::ostringstream out;
    out << sid << ',' << dir << ',' << kind << ',' << payload;
    res.transcript.push_back(out.str());
}

}  // namespace

SessionResult run_session(const ProtocolInstance& inst, std::uint64_t s,
                          Mediator* mediator, RngStream& rng,
                          std::uint64_t session_id, bool keep_transcript) {
    SessionResult res;
    res.s = s;
    res.outcome = Outcome::reject();

    AliceSm alice(inst, s, rng.derive_child(1));
    BobSm bob(inst, rng.derive_child(2));
    RngStream chan = rng.derive_child(3);

    Flow f = alice.next(std::nullopt);
    int ell = 1;
    while (true) {
        const bool from_alice = (ell % 2 == 1);
        const std::string dir = from_alice ? "A->B" : "B->A";
        if (std::holds_alternative<FlowReject>(f)) {
            log_line(res, keep_transcript, session_id, dir, "reject", "");
            return res;
        }
        if (auto* dmc = std::get_if<FlowDmcInput>(&f)) {
            log_line(res, keep_transcript, session_id, "A->B", "dmc",
                     seq_to_string(dmc->x));
            if (mediator) mediator->on_dmc_input(dmc->x);
            Sequence z = sample(inst.w1, dmc->x, chan);
            if (mediator) mediator->on_dmc_output(z);
            res.outcome = bob.on_channel_output(z, alice.sent_index());
            log_line(res, keep_transcript, session_id, "B",
                     res.outcome.accepted() ? "accept" : "reject",
                     res.outcome.accepted() ? std::to_string(*res.outcome.value)
                                            : "");
            return res;
        }
        const std::uint64_t v = std::get<FlowNoiseless>(f).value;
        log_line(res, keep_transcript, session_id, dir, "noiseless",
                 std::to_string(v));
        std::uint64_t delivered = v;
        if (mediator) delivered = mediator->on_noiseless(ell, from_alice, v);
        if (delivered != v)
            log_line(res, keep_transcript, session_id,
                     from_alice ? "O->B" : "O->A", "noiseless",
                     std::to_string(delivered));
        if (from_alice) {
            auto resp = bob.on_noiseless(delivered);
            if (!resp) {
                // phi = 0: Bob waits for the channel; Alice's DMC flow next.
                f = alice.next(std::nullopt);
                continue;
            }
            f = *resp;
        } else {
            f = alice.next(delivered);
        }
        ++ell;
    }
}

Outcome run_honest(const ProtocolInstance& inst, std::uint64_t s,
                   RngStream& rng) {
    return run_session(inst, s, nullptr, rng).outcome;
}

}  // namespace noisyauth
