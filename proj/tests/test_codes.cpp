#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "noisyauth/codes.hpp"

using namespace noisyauth;

namespace {

std::int64_t min_hamming_decode(const ChannelCode& code,
                                std::span<const Symbol> y) {
    std::int64_t best = -1;
    std::uint64_t best_d = ~0ULL;
    for (std::size_t i = 0; i < code.codebook.size(); ++i) {
        const std::uint64_t d = hamming_distance(code.codebook[i], y);
        if (d < best_d) {
            best_d = d;
            best = static_cast<std::int64_t>(i);
        }
    }
    return best;
}

}  // namespace

TEST_CASE("hamming_distance") {
    Sequence a{0, 1, 2}, b{0, 2, 2};
    CHECK(hamming_distance(a, a) == 0);
    CHECK(hamming_distance(Sequence{0, 0, 0}, Sequence{1, 1, 1}) == 3);
    CHECK(hamming_distance(a, b) == 1);
    CHECK_THROWS(hamming_distance(a, Sequence{0, 1}));
}

TEST_CASE("build_random_code draws distinct codewords at the right rate") {
    RngStream rng(21);
    auto code = build_random_code(Dmc::bsc(0.05), 40, 32, rng);
    CHECK(code.codebook.size() == 32);
    CHECK(code.n == 40);
    std::set<Sequence> uniq(code.codebook.begin(), code.codebook.end());
    CHECK(uniq.size() == 32);
    CHECK(code.rate() == doctest::Approx(5.0 / 40.0));
}

TEST_CASE("ml_decode on the identity channel is exact") {
    RngStream rng(22);
    Dmc id = Dmc::identity(2);
    auto code = build_random_code(id, 12, 8, rng);
    for (std::size_t i = 0; i < 8; ++i)
        CHECK(ml_decode(code, id, code.codebook[i]) ==
              static_cast<std::int64_t>(i));
}

TEST_CASE("ml_decode tie-break and reject marker") {
    ChannelCode code;
    code.alphabet_size = 2;
    code.n = 2;
    code.codebook = {{0, 0}, {1, 1}};
    // (0,1) is equidistant from both codewords under a BSC: lower index.
    CHECK(ml_decode(code, Dmc::bsc(0.1), Sequence{0, 1}) == 0);

    // Identity channel, y matching no codeword: zero likelihood everywhere.
    CHECK(ml_decode(code, Dmc::identity(2), Sequence{0, 1}) == kDecodeReject);
}

TEST_CASE("ml_decode equals minimum-Hamming decoding over a BSC") {
    RngStream rng(23);
    Dmc w = Dmc::bsc(0.1);
    auto code = build_random_code(w, 6, 8, rng);
    for (std::uint64_t y = 0; y < 64; ++y) {
        Sequence seq(6);
        for (int i = 0; i < 6; ++i) seq[i] = (y >> i) & 1;
        // Equivalence holds whenever the minimum is unique; with ties
        // both rules pick the lowest index among minimum-distance words.
        CHECK(ml_decode(code, w, seq) == min_hamming_decode(code, seq));
    }
}

TEST_CASE("ml_decode corrects one flip at pairwise distance >= 5") {
    ChannelCode code;
    code.alphabet_size = 2;
    code.n = 10;
    code.codebook = {{0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                     {1, 1, 1, 1, 1, 0, 0, 0, 0, 0},
                     {0, 0, 0, 0, 0, 1, 1, 1, 1, 1}};
    Dmc w = Dmc::bsc(0.1);
    for (std::size_t i = 0; i < code.codebook.size(); ++i) {
        for (std::size_t flip = 0; flip < 10; ++flip) {
            Sequence y = code.codebook[i];
            y[flip] ^= 1;
            CHECK(ml_decode(code, w, y) == static_cast<std::int64_t>(i));
        }
    }
}

TEST_CASE("estimate_error_rate") {
    RngStream rng(24);
    Dmc id = Dmc::identity(2);
    auto idcode = build_random_code(id, 10, 4, rng);
    CHECK(estimate_error_rate(idcode, id, 400, rng).p_hat == doctest::Approx(0.0));

    // BSC(0.5): both codewords have equal likelihood for every y, so
    // the tie-break always decodes to index 0. The small-code estimate
    // is the max over codewords: codeword 1 always errs.
    ChannelCode two;
    two.alphabet_size = 2;
    two.n = 16;
    two.codebook = {Sequence(16, 0), Sequence(16, 1)};
    auto est = estimate_error_rate(two, Dmc::bsc(0.5), 4000, rng);
    CHECK(est.p_hat == doctest::Approx(1.0));

    // BSC(0.4): codeword 1 errs whenever ones <= 8 under Bin(16, 0.6).
    auto est04 = estimate_error_rate(two, Dmc::bsc(0.4), 4000, rng);
    const double bin_le_8 = binomial_cdf(8, 16, 0.6);
    CHECK(est04.p_hat > bin_le_8 - 0.05);
    CHECK(est04.p_hat < bin_le_8 + 0.05);

    // Deep below capacity: tiny error.
    auto good = build_random_code(Dmc::bsc(0.05), 200, 16, rng);
    auto est2 = estimate_error_rate(good, Dmc::bsc(0.05), 1600, rng);
    CHECK(est2.p_hat <= 0.01);
}

TEST_CASE("error rate decays with block length at fixed rate") {
    RngStream rng(25);
    Dmc w = Dmc::bsc(0.1);
    double prev = 1.0;
    for (std::uint64_t n : {25, 100, 400}) {  // 16 codewords, rate 4/n
        auto code = build_random_code(w, n, 16, rng);
        auto est = estimate_error_rate(code, w, 800, rng);
        CHECK(est.p_hat <= prev + 0.1);  // qualitative decay, CI slack
        prev = est.p_hat;
    }
    CHECK(prev <= 0.02);
}

TEST_CASE("build_distance_code greedy lexicographic profile") {
    DistanceCodeOptions lex;
    lex.lexicographic = true;
    auto dc = build_distance_code(2, 4, 0.5, lex);
    REQUIRE(dc.code.codebook.size() >= 4);
    CHECK(dc.code.codebook[0] == Sequence{0, 0, 0, 0});
    CHECK(dc.code.codebook[1] == Sequence{0, 0, 1, 1});
    CHECK(dc.code.codebook[2] == Sequence{0, 1, 0, 1});
    CHECK(dc.min_distance == 2);

    // Lemma 4 floor: 0.125 for this profile, greedy gives >= 4.
    CHECK(distance_code_size_bound(2, 4, 0.5) == doctest::Approx(0.125));
    CHECK(static_cast<double>(dc.code.codebook.size()) >=
          distance_code_size_bound(2, 4, 0.5));
}

TEST_CASE("build_distance_code alpha=1/n accepts all words") {
    auto dc = build_distance_code(2, 3, 1.0 / 3.0);
    CHECK(dc.code.codebook.size() == 8);
    CHECK(dc.min_distance >= 1);
    CHECK_THROWS(build_distance_code(2, 8, 0.6));
    CHECK_THROWS(build_distance_code(2, 8, 0.05));
}

TEST_CASE("distance codes verify exhaustively and meet the size floor") {
    for (std::size_t q : {2, 3}) {
        for (std::uint64_t n : {4ULL, 6ULL, q == 2 ? 12ULL : 7ULL}) {
            for (double alpha :
                 {1.0 / static_cast<double>(n), 0.25, 0.5}) {
                if (alpha < 1.0 / static_cast<double>(n)) continue;
                auto dc = build_distance_code(q, n, alpha);
                const auto d = static_cast<std::uint64_t>(
                    std::ceil(alpha * static_cast<double>(n) - 1e-12));
                for (std::size_t i = 0; i < dc.code.codebook.size(); ++i)
                    for (std::size_t j = i + 1; j < dc.code.codebook.size(); ++j)
                        CHECK(hamming_distance(dc.code.codebook[i],
                                               dc.code.codebook[j]) >= d);
                CHECK(static_cast<double>(dc.code.codebook.size()) >=
                      distance_code_size_bound(q, n, alpha));
            }
        }
    }
}

TEST_CASE("codebook serialization round trip") {
    RngStream rng(26);
    auto code = build_random_code(Dmc::bsc(0.1), 8, 4, rng);
    auto back = ChannelCode::parse(2, code.serialize());
    CHECK(back.codebook == code.codebook);
    CHECK_THROWS(ChannelCode::parse(2, "0 1 2\n"));
}

TEST_CASE("explicit codebook facade matches ml_decode") {
    RngStream rng(27);
    Dmc w = Dmc::bsc(0.1);
    auto code = build_random_code(w, 30, 8, rng);
    auto cb = Codebook::from_channel_code(code, w);
    for (int it = 0; it < 50; ++it) {
        const std::uint64_t t = rng.uniform_int(8);
        Sequence z = sample(w, code.codebook[t], rng);
        const auto decoded = ml_decode(code, w, z);
        for (std::uint64_t q = 0; q < 8; ++q)
            CHECK(cb.decodes_to(z, q, t, rng) ==
                  (decoded == static_cast<std::int64_t>(q)));
    }
}

TEST_CASE("lazy codebook reproduces the random-code ensemble law") {
    Dmc w = Dmc::bsc(0.1);
    auto lazy = Codebook::lazy_random(w, 50, 16, 99);
    CHECK(lazy.lazy());
    CHECK(lazy.codeword(3) == lazy.codeword(3));
    CHECK(lazy.codeword(3).size() == 50);

    // Honest decode frequency under the lazy ensemble law vs the
    // empirical rate of freshly drawn explicit codes of the same shape.
    RngStream rng(28);
    const std::uint64_t trials = 4000;
    std::uint64_t lazy_ok = 0, explicit_ok = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        const std::uint64_t t = rng.uniform_int(16);
        Sequence z = sample(w, lazy.codeword(t), rng);
        lazy_ok += lazy.decodes_to(z, t, t, rng);

        RngStream fresh = rng.derive_child(i);
        auto code = build_random_code(w, 50, 16, fresh);
        Sequence z2 = sample(w, code.codebook[t], fresh);
        explicit_ok += ml_decode(code, w, z2) == static_cast<std::int64_t>(t);
    }
    const double p_lazy = static_cast<double>(lazy_ok) / trials;
    const double p_explicit = static_cast<double>(explicit_ok) / trials;
    CHECK(std::abs(p_lazy - p_explicit) < 0.03);

    // Querying the wrong index almost never succeeds.
    std::uint64_t wrong = 0;
    for (std::uint64_t i = 0; i < 500; ++i) {
        Sequence z = sample(w, lazy.codeword(1), rng);
        wrong += lazy.decodes_to(z, 2, 1, rng);
    }
    CHECK(wrong <= 5);

    CHECK_THROWS(Codebook::lazy_random(Dmc::identity(3), 10, 4, 1));
}
