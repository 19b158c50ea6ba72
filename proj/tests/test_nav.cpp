#include <doctest.h>

#include <array>
#include <cstdint>

#include "jcap/nav.hpp"
#include "jcap/nav_decode.hpp"
#include "jcap/rng.hpp"

using namespace jcap;

namespace {

// Independent oracle: the six parity equations expressed as the well-known
// 24-bit hex masks over d1..d24 (d1 = MSB), instead of the tap-index loop the
// implementation uses.
constexpr std::array<std::uint32_t, 6> kParityMasks = {
    0xEC7CD2, 0x763E69, 0xBB1F34, 0x5D8F9A, 0xAEC7CD, 0x2DEA27};
constexpr std::array<int, 6> kPrevBit = {29, 30, 29, 30, 30, 29};  // D29* or D30*

std::array<std::uint8_t, 6> oracle_parity(const std::array<std::uint8_t, 24>& d,
                                          std::uint8_t d29p, std::uint8_t d30p) {
    std::uint32_t w = 0;
    for (int i = 0; i < 24; ++i) w = (w << 1) | d[std::size_t(i)];
    std::array<std::uint8_t, 6> p{};
    for (int i = 0; i < 6; ++i) {
        std::uint32_t m = w & kParityMasks[std::size_t(i)];
        int pop = __builtin_popcount(m);
        p[std::size_t(i)] = std::uint8_t((pop & 1) ^ (kPrevBit[std::size_t(i)] == 29 ? d29p : d30p));
    }
    return p;
}

std::array<std::uint8_t, 24> random_word(Rng& rng) {
    std::array<std::uint8_t, 24> d{};
    for (auto& b : d) b = rng.coin();
    return d;
}

}  // namespace

TEST_CASE("all-zero data with zero chain gives zero parity") {
    std::array<std::uint8_t, 24> d{};
    auto p = lnav::parity_bits(d.data(), 0, 0);
    for (int i = 0; i < 6; ++i) CHECK(p[std::size_t(i)] == 0);
}

TEST_CASE("parity equations match the hex-mask oracle") {
    Rng rng(101);
    for (int n = 0; n < 10000; ++n) {
        auto d = random_word(rng);
        std::uint8_t d29p = rng.coin(), d30p = rng.coin();
        auto got = lnav::parity_bits(d.data(), d29p, d30p);
        auto want = oracle_parity(d, d29p, d30p);
        REQUIRE(got == want);
    }
}

TEST_CASE("encode then check round trip with chaining") {
    Rng rng(202);
    std::uint8_t d29 = 0, d30 = 0;
    for (int n = 0; n < 10000; ++n) {
        auto d = random_word(rng);
        auto word = lnav::encode_word(d, d29, d30);
        auto decoded = parity_check_word(word.data(), d29, d30);
        REQUIRE(decoded.has_value());
        REQUIRE(*decoded == d);
        d29 = word[28];
        d30 = word[29];
    }
}

TEST_CASE("any single-bit corruption is detected") {
    Rng rng(303);
    for (int n = 0; n < 300; ++n) {
        auto d = random_word(rng);
        std::uint8_t d29 = rng.coin(), d30 = rng.coin();
        auto word = lnav::encode_word(d, d29, d30);
        for (int bit = 0; bit < kWordBits; ++bit) {
            auto bad = word;
            bad[std::size_t(bit)] ^= 1;
            CHECK_FALSE(parity_check_word(bad.data(), d29, d30).has_value());
        }
    }
}

TEST_CASE("random words pass parity at about the 2^-6 rate") {
    Rng rng(404);
    int pass = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        std::uint8_t w[kWordBits];
        for (auto& b : w) b = rng.coin();
        if (parity_check_word(w, rng.coin(), rng.coin()).has_value()) ++pass;
    }
    // Expected 156; +-5 binomial sigma is about +-62.
    CHECK(pass > 90);
    CHECK(pass < 220);
}

TEST_CASE("solved-tail encoding zeroes the trailing parity bits") {
    Rng rng(505);
    for (int n = 0; n < 1000; ++n) {
        auto d = random_word(rng);
        std::uint8_t d29 = rng.coin(), d30 = rng.coin();
        auto word = lnav::encode_word(d, d29, d30, /*solve_tail=*/true);
        CHECK(word[28] == 0);
        CHECK(word[29] == 0);
        // Still a valid word.
        CHECK(parity_check_word(word.data(), d29, d30).has_value());
    }
}

TEST_CASE("built NAV message structure") {
    const int n_sub = 4;
    NavMessage msg = build_nav_message(7, n_sub);
    REQUIRE(msg.size() == n_sub * kSubframeBits);

    std::uint8_t d29 = 0, d30 = 0;
    for (int s = 0; s < n_sub; ++s) {
        const std::uint8_t* sf = &msg.bits[std::size_t(s * kSubframeBits)];
        // Word-10 tail of the previous subframe is solved, so the chain resets.
        CHECK(d29 == 0);
        CHECK(d30 == 0);
        for (int w = 0; w < kWordsPerSubframe; ++w) {
            auto data = parity_check_word(sf + w * kWordBits, d29, d30);
            REQUIRE(data.has_value());
            if (w == 0) {
                for (int i = 0; i < 8; ++i) CHECK((*data)[std::size_t(i)] == kTlmPreamble[std::size_t(i)]);
            }
            if (w == 1) {
                // 17-bit TOW counter increments per subframe; subframe ID cycles 1..5.
                std::uint32_t tow = 0;
                for (int i = 0; i < 17; ++i) tow = (tow << 1) | (*data)[std::size_t(i)];
                CHECK(tow == std::uint32_t(1000 + s));
                std::uint32_t sfid = 0;
                for (int i = 19; i < 22; ++i) sfid = (sfid << 1) | (*data)[std::size_t(i)];
                CHECK(sfid == std::uint32_t(s % 5) + 1);
            }
            d29 = sf[w * kWordBits + 28];
            d30 = sf[w * kWordBits + 29];
        }
        // HOW and word 10 end in solved (zero) parity tails.
        CHECK(sf[58] == 0);
        CHECK(sf[59] == 0);
        CHECK(sf[298] == 0);
        CHECK(sf[299] == 0);
    }
}

TEST_CASE("message build is deterministic in the seed") {
    NavMessage a = build_nav_message(42, 3);
    NavMessage b = build_nav_message(42, 3);
    NavMessage c = build_nav_message(43, 3);
    CHECK(a.bits == b.bits);
    CHECK(a.bits != c.bits);
}

TEST_CASE("invalid subframe count rejected") {
    CHECK_THROWS_AS(build_nav_message(1, 0), std::invalid_argument);
}
