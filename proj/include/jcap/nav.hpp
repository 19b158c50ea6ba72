#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "jcap/rng.hpp"

namespace jcap {

inline constexpr int kWordBits = 30;
inline constexpr int kDataBitsPerWord = 24;
inline constexpr int kWordsPerSubframe = 10;
inline constexpr int kSubframeBits = kWordsPerSubframe * kWordBits;  // 300
inline constexpr double kNavBitRate = 50.0;  // bps
inline constexpr std::array<std::uint8_t, 8> kTlmPreamble = {1, 0, 0, 0, 1, 0, 1, 1};

namespace lnav {

// IS-GPS-200 parity equations: source data bit indices (1-based) entering each
// of the six parity bits D25..D30.
inline constexpr std::array<std::array<int, 15>, 6> kParityTaps = {{
    {1, 2, 3, 5, 6, 10, 11, 12, 13, 14, 17, 18, 20, 23, 0},
    {2, 3, 4, 6, 7, 11, 12, 13, 14, 15, 18, 19, 21, 24, 0},
    {1, 3, 4, 5, 7, 8, 12, 13, 14, 15, 16, 19, 20, 22, 0},
    {2, 4, 5, 6, 8, 9, 13, 14, 15, 16, 17, 20, 21, 23, 0},
    {1, 3, 5, 6, 7, 9, 10, 14, 15, 16, 17, 18, 21, 22, 24},
    {3, 5, 6, 8, 9, 10, 11, 13, 15, 19, 22, 23, 24, 0, 0},
}};

// D25..D28 chain from D29*, D30 from D29*, D29 from D30*.
inline constexpr std::array<int, 6> kParityPrev = {29, 30, 29, 30, 30, 29};

/// Computes the six parity bits for 24 source data bits (before the D30*
/// complement is applied to the transmitted word).
inline std::array<std::uint8_t, 6> parity_bits(const std::uint8_t* data24,
                                               std::uint8_t d29_prev, std::uint8_t d30_prev) {
    std::array<std::uint8_t, 6> p{};
    for (int i = 0; i < 6; ++i) {
        std::uint8_t acc = (kParityPrev[i] == 29) ? d29_prev : d30_prev;
        for (int tap : kParityTaps[i]) {
            if (tap == 0) break;
            acc ^= data24[tap - 1];
        }
        p[i] = acc;
    }
    return p;
}

/// Encodes one word: transmitted data bits are source xor D30*, followed by
/// the six parity bits. If `solve_tail` is set, source bits d23 and d24 are
/// overwritten so that the resulting D29 and D30 are both zero (the HOW /
/// word-10 constraint).
inline std::array<std::uint8_t, kWordBits> encode_word(std::array<std::uint8_t, 24> data,
                                                       std::uint8_t d29_prev, std::uint8_t d30_prev,
                                                       bool solve_tail = false) {
    if (solve_tail) {
        // D29 depends on d24 but not d23; D30 depends on both.
        data[23] = 0;
        data[22] = 0;
        auto p = parity_bits(data.data(), d29_prev, d30_prev);
        data[23] = p[4];            // force D29 = 0
        data[22] = p[5] ^ data[23]; // then force D30 = 0
    }
    auto p = parity_bits(data.data(), d29_prev, d30_prev);
    std::array<std::uint8_t, kWordBits> out{};
    for (int i = 0; i < 24; ++i) out[i] = data[i] ^ d30_prev;
    for (int i = 0; i < 6; ++i) out[24 + i] = p[i];
    return out;
}

}  // namespace lnav

/// Checks one received 30-bit word against the IS-GPS-200 parity equations.
/// Returns the 24 decoded source data bits on success.
inline std::optional<std::array<std::uint8_t, 24>> parity_check_word(
    const std::uint8_t* word30, std::uint8_t d29_prev, std::uint8_t d30_prev) {
    std::array<std::uint8_t, 24> data{};
    for (int i = 0; i < 24; ++i) data[i] = word30[i] ^ d30_prev;
    auto p = lnav::parity_bits(data.data(), d29_prev, d30_prev);
    for (int i = 0; i < 6; ++i)
        if (p[i] != word30[24 + i]) return std::nullopt;
    return data;
}

/// Synthesized 50 bps navigation message with known truth bits. Subframes
/// start every 300 bits; each word carries valid chained parity.
struct NavMessage {
    std::vector<std::uint8_t> bits;  // transmitted bits, 0/1
    int n_subframes = 0;

    int size() const { return int(bits.size()); }
    double duration() const { return bits.size() / kNavBitRate; }
};

/// Builds a parity-valid NAV message: word 1 of each subframe is a TLM with
/// the 8-bit preamble, word 2 a HOW with an incrementing time-of-week count
/// and solved tail bits, words 3..10 pseudorandom payload. Word 10 also
/// solves its tail so every subframe starts from D29* = D30* = 0.
inline NavMessage build_nav_message(std::uint64_t data_seed, int n_subframes) {
    if (n_subframes < 1)
        throw std::invalid_argument("build_nav_message: n_subframes must be >= 1");

    Rng rng(derive_seed(data_seed, "nav-payload"));
    NavMessage msg;
    msg.n_subframes = n_subframes;
    msg.bits.reserve(std::size_t(n_subframes) * kSubframeBits);

    std::uint8_t d29 = 0, d30 = 0;
    const std::uint32_t tow0 = 1000;
    for (int s = 0; s < n_subframes; ++s) {
        for (int w = 0; w < kWordsPerSubframe; ++w) {
            std::array<std::uint8_t, 24> data{};
            if (w == 0) {
                for (int i = 0; i < 8; ++i) data[i] = kTlmPreamble[i];
                for (int i = 8; i < 24; ++i) data[i] = rng.coin();
            } else if (w == 1) {
                std::uint32_t tow = tow0 + std::uint32_t(s);
                for (int i = 0; i < 17; ++i) data[i] = (tow >> (16 - i)) & 1;
                data[17] = 0;  // alert
                data[18] = 0;  // anti-spoof
                std::uint32_t sfid = std::uint32_t(s % 5) + 1;
                for (int i = 0; i < 3; ++i) data[19 + i] = (sfid >> (2 - i)) & 1;
                // tail solved below
            } else {
                for (int i = 0; i < 24; ++i) data[i] = rng.coin();
            }
            bool solve = (w == 1) || (w == kWordsPerSubframe - 1);
            auto word = lnav::encode_word(data, d29, d30, solve);
            msg.bits.insert(msg.bits.end(), word.begin(), word.end());
            d29 = word[28];
            d30 = word[29];
        }
    }
    return msg;
}

}  // namespace jcap
