#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "noisyauth/adversary.hpp"

using namespace noisyauth;

namespace {

ProtocolInstance explicit_phi2() {
    RngStream rng(31);  // same profile the protocol tests exercise
    return setup(Dmc::bsc(0.05), Dmc::bsc(0.25), 64, 100, 0.05, 0.02, 0.5,
                 rng);
}

ProtocolInstance tight_phi2() {
    // eps = 1/16 pushes v_2 to ~2*10^8: Bernoulli systems, lazy code,
    // and a non-vacuous 6*eps substitution bound.
    RngStream rng(61);
    return setup(Dmc::bsc(0.05), Dmc::bsc(0.25), 64, 100, 0.05, 0.02,
                 1.0 / 16.0, rng);
}

ProtocolInstance replay_phi0(std::uint64_t code_size) {
    RngStream rng(62);
    SetupOptions opts;
    opts.code_size_override = code_size;
    // Noiseless main channel: the fingerprint and decode never fail,
    // isolating the collision-probability floor. v_1 = 16 <= beta2 n' +
    // sqrt(n') keeps the schedule at phi = 0.
    return setup(Dmc::identity(2), Dmc::bsc(0.25), 16, 100, 0.05, 0.5,
                 std::nullopt, rng, opts);
}

double three_sigma(double p, std::uint64_t n) {
    return 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                           static_cast<double>(n));
}

}  // namespace

TEST_CASE("monte_carlo counts and derives independent streams") {
    auto never = [](RngStream&) { return false; };
    auto always = [](RngStream&) { return true; };
    auto coin = [](RngStream& rng) { return rng.uniform() < 0.5; };

    CHECK(monte_carlo(never, 500, 1).successes == 0);
    CHECK(monte_carlo(always, 500, 1).p_hat == doctest::Approx(1.0));

    auto c = monte_carlo(coin, 4000, 2);
    CHECK(c.p_hat > 0.45);
    CHECK(c.p_hat < 0.55);
    CHECK(c.ci.lo < 0.5);
    CHECK(c.ci.hi > 0.5);

    // Thread count never changes the result.
    auto multi = monte_carlo(coin, 4000, 2, 4);
    CHECK(multi.successes == c.successes);

    CHECK_THROWS(monte_carlo(never, 0, 1));
}

TEST_CASE("success_lower_bound arithmetic") {
    CHECK(success_lower_bound(2.0, 0.01, 100) == doctest::Approx(0.23));
    CHECK(success_lower_bound(10.0, 0.5, 4) == doctest::Approx(0.0));
}

TEST_CASE("round_lower_bound formula and clamp") {
    // 1 + log*(log2|S|) - log*(n) - 5, clamped at zero.
    CHECK(round_lower_bound(16.0, 400) == 0);
    CHECK(round_lower_bound(65536.0, 400) == 0);
    // log*(65536) = 4, so 1 + 4 - log*(4) - 5 = -2 -> 0; force positive
    // values through tiny n is impossible (log* n >= 0), so the bound
    // only separates for towers far beyond double range.
    CHECK(round_lower_bound(65536.0, 2) == 1 + 4 - 1 - 5 + 1);

    // The interactive protocol sits within 9 rounds of the bound.
    auto inst = explicit_phi2();
    const int rounds = round_count(inst);
    const int lower = round_lower_bound(std::log2(64.0), inst.n_prime);
    CHECK(rounds >= lower);
    CHECK(rounds - lower <= 9);
}

TEST_CASE("collision_entropy_check") {
    CHECK(collision_entropy_check({0.25, 0.25, 0.25, 0.25}));  // equality
    CHECK(collision_entropy_check({1.0, 0.0}));
    CHECK(collision_entropy_check({0.75, 0.25}));  // 0.625 >= 2^-0.811
}

TEST_CASE("strategy naming") {
    CHECK(strategy_name(PassThrough{}) == "pass_through");
    CHECK(strategy_name(SubstituteFirstFlow{}) == "substitute_first_flow");
    CHECK(strategy_name(RandomTamper{0.3}) == "random_tamper");
    CHECK(strategy_name(GreedySubstitute{}) == "greedy_substitute");
    CHECK(strategy_params(RandomTamper{0.3}) == "prob=0.3");
    CHECK(strategy_params(GreedySubstitute{5, 2}) == "target=5;merge_at=2");
}

TEST_CASE("pass-through mediation never yields a substitution") {
    auto inst = explicit_phi2();
    auto rep = monte_carlo(
        [&](RngStream& rng) { return run_type1(inst, PassThrough{}, rng); },
        500, 71);
    CHECK(rep.successes == 0);
}

TEST_CASE("first-flow substitution succeeds at the block-overlap rate") {
    auto inst = explicit_phi2();

    // Exact overlap oracle from the explicit system: the probability
    // that Bob's block for s+1 also contains s, averaged over s. The
    // attack succeeds iff that happens and the final flow decodes.
    const SetSystem& sys = inst.system(1);
    double overlap = 0.0;
    for (std::uint64_t s = 0; s < 64; ++s) {
        const std::uint64_t t = (s + 1) % 64;
        std::uint64_t both = 0, any = 0;
        for (std::uint64_t b = 0; b < sys.block_count(); ++b) {
            if (!sys.contains(t, b)) continue;
            ++any;
            both += sys.contains(s, b);
        }
        overlap += any ? static_cast<double>(both) / static_cast<double>(any)
                       : 0.0;
    }
    overlap /= 64.0;

    auto rep = monte_carlo(
        [&](RngStream& rng) {
            return run_type1(inst, SubstituteFirstFlow{}, rng);
        },
        4000, 72);
    CHECK(rep.p_hat <= overlap + three_sigma(overlap, rep.trials));
    CHECK(rep.p_hat >= 0.5 * overlap - three_sigma(overlap, rep.trials));
}

TEST_CASE("greedy substitution stays under 6 eps on the tight instance") {
    auto inst = tight_phi2();
    CHECK(inst.schedule.eps == doctest::Approx(1.0 / 16.0));
    CHECK(inst.code.lazy());

    const double bound = 6.0 * inst.schedule.eps;
    auto rep = monte_carlo(
        [&](RngStream& rng) {
            return run_type1(inst, GreedySubstitute{}, rng);
        },
        2000, 73);
    CHECK(rep.p_hat <= bound + three_sigma(bound, rep.trials));

    // Forced rejoin at the single interior flow: the lambda event alone,
    // bounded by 2^(-0.25) eps for j = 1.
    auto merged = monte_carlo(
        [&](RngStream& rng) {
            return run_type1(inst, GreedySubstitute{std::nullopt, 2}, rng);
        },
        2000, 74);
    const double per_flow = std::exp2(-0.25) * inst.schedule.eps;
    CHECK(merged.p_hat <= per_flow + three_sigma(per_flow, merged.trials));
}

TEST_CASE("random tampering is no better than the substitution bound") {
    auto inst = explicit_phi2();
    auto rep = monte_carlo(
        [&](RngStream& rng) {
            return run_type1(inst, RandomTamper{0.5}, rng);
        },
        1000, 75);
    // eps = 1/2 makes 6 eps vacuous; the interesting check is that the
    // harness runs and the rate stays well below certainty.
    CHECK(rep.p_hat < 0.5);
}

TEST_CASE("impersonation stays under the fingerprint bound") {
    auto inst = explicit_phi2();
    const double bound =
        2.0 * std::exp(-static_cast<double>(inst.k) * inst.gamma *
                       inst.gamma /
                       (8.0 * 4.0));  // |Z|^2 = 4
    auto rep = monte_carlo(
        [&](RngStream& rng) { return run_type2(inst, Impersonate{3}, rng); },
        2000, 76);
    CHECK(rep.p_hat <= bound + three_sigma(std::min(bound, 1.0), rep.trials));
    // The mixture prefix concentrates far from W1(.|a): most trials die
    // at the type check even where the theory bound is vacuous.
    CHECK(rep.p_hat < 0.6);
}

TEST_CASE("impersonating the one-flow scheme") {
    DistanceCodeOptions opts;
    opts.seed = 9;
    opts.size_cap = 64;
    auto scheme = ni_setup(Dmc::bsc(0.05), Dmc::bsc(0.25), 100, 0.25, opts);
    const auto anchor = choose_anchor(scheme.w1, scheme.w2);
    auto rep = monte_carlo(
        [&](RngStream& rng) {
            return run_type2_ni(scheme, Impersonate{1}, anchor.mixture, rng);
        },
        2000, 77);
    // W2's flip rate 0.25 overwhelms the eps = 0.05 typicality radius on
    // the 100-symbol tail.
    CHECK(rep.p_hat < 0.05);
}

TEST_CASE("replay with a single final-flow value always lands") {
    auto inst = replay_phi0(1);
    auto rep = monte_carlo(
        [&](RngStream& rng) { return run_replay(inst, rng); }, 2000, 78);
    // Every source collapses onto the one codeword; success iff the
    // fresh source differs: 15/16.
    CHECK(rep.p_hat > 0.9375 - three_sigma(0.9375, rep.trials));
    CHECK(rep.p_hat < 0.9375 + three_sigma(0.9375, rep.trials));
}

TEST_CASE("replay beats the collision-entropy floor") {
    auto inst = replay_phi0(4);
    // F = s mod 4 is uniform over 4 values: H(F) = 2 bits; the noiseless
    // main channel makes the honest-failure delta zero.
    const double bound = success_lower_bound(2.0, 0.0, 16);
    CHECK(bound == doctest::Approx(0.1875));
    auto rep = monte_carlo(
        [&](RngStream& rng) { return run_replay(inst, rng); }, 2000, 79);
    CHECK(rep.p_hat >= bound - three_sigma(bound, rep.trials));
}
