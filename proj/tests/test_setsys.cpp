#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "noisyauth/setsys.hpp"

using namespace noisyauth;

TEST_CASE("log_star basics") {
    CHECK(log_star(3) == 1);
    CHECK(log_star(4) == 2);
    CHECK(log_star(65536) == 4);
    CHECK(log_star(1.5) == 0);
}

TEST_CASE("log_star recursion identity") {
    RngStream rng(5);
    for (int it = 0; it < 200; ++it) {
        const double x = 2.0 + rng.uniform() * 1e6;
        CHECK(log_star(x) == 1 + log_star(std::log2(x)));
    }
}

TEST_CASE("iter_log and the log_star shift identity") {
    CHECK(iter_log(65536, 2) == doctest::Approx(4.0));
    CHECK(iter_log(100, 0) == doctest::Approx(100.0));
    CHECK_THROWS(iter_log(1.0, 2));  // log2(1) = 0, next step undefined

    RngStream rng(6);
    for (int it = 0; it < 100; ++it) {
        const double x = 16.0 + rng.uniform() * 1e9;
        const int ls = log_star(x);
        for (int j = 1; j <= ls; ++j)
            CHECK(log_star(iter_log(x, j)) == ls - j);
    }
}

TEST_CASE("Claim 1: towers D_i = 2^(1+D_{i+1}) collapse under iterated logs") {
    for (int L = 1; L <= 4; ++L) {
        for (double dl : {3.0, 4.0, 8.0}) {
            // Build the tower from the top; D_1 may exceed double range,
            // so track log2(D_1) once the values get large.
            std::vector<double> d(static_cast<std::size_t>(L) + 1);
            d[static_cast<std::size_t>(L)] = dl;
            bool log_domain = false;
            double log2_d1 = 0.0;
            for (int i = L - 1; i >= 1; --i) {
                const double next = d[static_cast<std::size_t>(i + 1)];
                if (!log_domain && 1.0 + next < 1000.0) {
                    d[static_cast<std::size_t>(i)] = std::exp2(1.0 + next);
                } else if (!log_domain) {
                    log2_d1 = 1.0 + next;  // first overflow step
                    log_domain = true;
                } else {
                    log2_d1 = 1.0 + std::exp2(log2_d1);  // cannot happen for L<=4
                }
            }
            const double target = 1.0 + std::log2(dl);
            if (!log_domain) {
                CHECK(iter_log(d[1], L) <= target + 1e-9);
            } else {
                // log2(D_1) known exactly: apply the remaining L-1 logs.
                CHECK(iter_log(log2_d1, L - 1) <= target + 1e-9);
            }
        }
    }
}

TEST_CASE("SourceSize iterated logs, including the big-integer log path") {
    auto v = SourceSize::from_value(65536);
    CHECK(v.log2_value == doctest::Approx(16.0));
    CHECK(v.log_star_value() == 4);
    CHECK(v.iterated_log(1) == doctest::Approx(16.0));
    CHECK(v.iterated_log(2) == doctest::Approx(4.0));

    auto big = SourceSize::from_pow2(65536);  // 2^65536
    CHECK_FALSE(big.value.has_value());
    CHECK(big.iterated_log(1) == doctest::Approx(65536.0));
    CHECK(big.iterated_log(2) == doctest::Approx(16.0));
    CHECK(big.log_star_value() == 5);

    auto huge = SourceSize::from_pow2(256);
    CHECK(huge.log_star_value() == 1 + log_star(256.0));
}

TEST_CASE("make_schedule degenerate and phi=2 profiles") {
    // v1 below the threshold: direct-send profile.
    auto s0 = make_schedule(SourceSize::from_value(8), 100, 0.05, 0.5,
                            std::nullopt);
    CHECK(s0.phi == 0);
    CHECK(s0.v_rest.empty());
    CHECK(s0.final_size() == 8);

    // v1 = 2^65536 with threshold beta2*n' + sqrt(n') = 20: phi = 2.
    auto s1 = make_schedule(SourceSize::from_pow2(65536), 16, 0.05, 1.0, 0.125);
    CHECK(s1.phi == 2);
    CHECK(s1.v(2) == (1ULL << 37));  // floor(2^9 * 8^4 * 65536)

    // Spec-arithmetic profile: eps=1/8, v1=2^64.
    auto s2 = make_schedule(SourceSize::from_pow2(64), 16, 0.05, 1.0, 0.125);
    CHECK(s2.phi == 2);
    CHECK(s2.v(2) == 512ULL * 4096ULL * 64ULL);

    // Asymptotic rule: eps = 2^(-beta1 n').
    auto s3 = make_schedule(SourceSize::from_pow2(256), 400, 0.005, 0.05,
                            std::nullopt);
    CHECK(s3.eps == doctest::Approx(std::exp2(-2.0)));
    CHECK(s3.phi == 2);
}

TEST_CASE("make_schedule aborts past the size cap") {
    // eps = 2^-8 makes v_2 = 2^9 * 2^32 * 65536 = 2^57 > 2^40.
    CHECK_THROWS(make_schedule(SourceSize::from_pow2(65536), 16, 0.5, 1.0,
                               std::optional<double>(1.0 / 256.0)));
}

TEST_CASE("verify_set_system brute force") {
    // Blocks {0,1}, {1,2}, {0,2} over v=3.
    ExplicitSetSystem s(3, {{0, 1}, {1, 2}, {0, 2}});
    auto r1 = verify_set_system(s, 2, 1);
    CHECK(r1.ok);
    CHECK(r1.min_r == 2);
    CHECK(r1.max_lambda == 1);
    CHECK_FALSE(verify_set_system(s, 3, 1).ok);

    ExplicitSetSystem empty(3, {});
    CHECK(verify_set_system(empty, 0, 0).ok);
}

TEST_CASE("blocks_containing") {
    ExplicitSetSystem s(3, {{0, 1}, {1, 2}, {0, 2}});
    CHECK(s.blocks_containing(1) == std::vector<std::uint32_t>{0, 1});
    ExplicitSetSystem sparse(3, {{0}});
    CHECK(sparse.blocks_containing(2).empty());
    CHECK_THROWS(s.blocks_containing(5));
}

TEST_CASE("construct_set_system edge probabilities") {
    RngStream rng(9);
    auto all = construct_set_system(4, 5, 1.0, rng, 5, 5);
    auto rep = verify_set_system(all, 5, 5);
    CHECK(rep.min_r == 5);
    CHECK(rep.max_lambda == 5);

    CHECK_THROWS(construct_set_system(4, 5, 0.0, rng, 1, 5, 2));
}

TEST_CASE("construct_set_system desk profile v=64 b=2048") {
    RngStream rng(10);
    auto s = construct_set_system(64, 2048, 0.125, rng, 128, 64);
    auto rep = verify_set_system(s, 128, 64);
    CHECK(rep.ok);

    // Brute-force oracle over all pairs, independent of the inverted index.
    std::uint64_t min_r = ~0ULL, max_l = 0;
    for (std::uint64_t x = 0; x < 64; ++x) {
        std::uint64_t cnt = 0;
        for (std::uint64_t b = 0; b < 2048; ++b) cnt += s.contains(x, b);
        min_r = std::min(min_r, cnt);
        for (std::uint64_t y = x + 1; y < 64; ++y) {
            std::uint64_t pair = 0;
            for (std::uint64_t b = 0; b < 2048; ++b)
                pair += s.contains(x, b) && s.contains(y, b);
            max_l = std::max(max_l, pair);
        }
    }
    CHECK(min_r == rep.min_r);
    CHECK(max_l == rep.max_lambda);
}

TEST_CASE("explicit set system sampling and serialization") {
    ExplicitSetSystem s(3, {{0, 1}, {1, 2}, {0, 2}});
    RngStream rng(12);
    std::set<std::uint64_t> seen;
    for (int it = 0; it < 200; ++it) {
        auto b = s.sample_block_containing(1, rng);
        REQUIRE(b.has_value());
        CHECK(s.contains(1, *b));
        seen.insert(*b);
    }
    CHECK(seen == std::set<std::uint64_t>{0, 1});

    ExplicitSetSystem sparse(3, {{0}});
    CHECK_FALSE(sparse.sample_block_containing(2, rng).has_value());

    auto back = ExplicitSetSystem::parse(3, s.serialize());
    CHECK(back.blocks() == s.blocks());
}

TEST_CASE("bernoulli set system is a deterministic PRF family") {
    BernoulliSetSystem s(1000, 500, 0.2, 42);
    BernoulliSetSystem same(1000, 500, 0.2, 42);
    std::uint64_t members = 0;
    for (std::uint64_t x = 0; x < 100; ++x)
        for (std::uint64_t b = 0; b < 500; ++b) {
            CHECK(s.contains(x, b) == same.contains(x, b));
            members += s.contains(x, b);
        }
    const double freq = static_cast<double>(members) / (100.0 * 500.0);
    CHECK(freq > 0.18);
    CHECK(freq < 0.22);

    RngStream rng(13);
    for (int it = 0; it < 100; ++it) {
        auto b = s.sample_block_containing(7, rng);
        REQUIRE(b.has_value());
        CHECK(s.contains(7, *b));
    }
}

TEST_CASE("check_recursion_bound") {
    auto s0 = make_schedule(SourceSize::from_value(8), 100, 0.05, 0.5,
                            std::nullopt);
    CHECK(check_recursion_bound(s0) == RecursionBound::Inapplicable);

    // Asymptotic-rule schedule: Lemma 6 guarantees the bound.
    auto s1 = make_schedule(SourceSize::from_pow2(256), 400, 0.005, 0.05,
                            std::nullopt);
    REQUIRE(s1.phi >= 2);
    CHECK(check_recursion_bound(s1) == RecursionBound::Holds);

    auto s2 = make_schedule(SourceSize::from_pow2(65536), 400, 0.005, 0.05,
                            std::nullopt);
    CHECK(check_recursion_bound(s2) == RecursionBound::Holds);

    // Hand-built schedule violating the recursion by an order of magnitude.
    Schedule bad = s1;
    for (auto& v : bad.v_rest) v *= 100;
    CHECK(check_recursion_bound(bad) == RecursionBound::Violated);
}
