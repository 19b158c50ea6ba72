#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "jcap/nav.hpp"

namespace jcap {

/// Per-trial demodulation score. P_sub aggregates decoded/attempted.
struct TrialResult {
    double ber = 0.0;
    int bits_compared = 0;
    int bit_errors = 0;
    int subframes_attempted = 0;
    int subframes_decoded = 0;
    bool locked = false;  // polarity/frame resolution succeeded
};

/// Hard decisions from bit-aligned 20 ms prompts: positive I maps to bit 0
/// (before polarity resolution).
inline std::vector<std::uint8_t> bits_from_prompts(const std::vector<std::complex<double>>& prompts) {
    std::vector<std::uint8_t> bits(prompts.size());
    for (std::size_t i = 0; i < prompts.size(); ++i)
        bits[i] = prompts[i].real() > 0.0 ? 0 : 1;
    return bits;
}

struct FrameAlignment {
    int offset = 0;      // bit index of the first confirmed subframe start
    bool inverted = false;
};

namespace detail {
inline bool word_parity_ok(const std::uint8_t* bits, bool inv, std::uint8_t d29p,
                           std::uint8_t d30p) {
    std::uint8_t w[kWordBits];
    for (int i = 0; i < kWordBits; ++i) w[i] = bits[i] ^ std::uint8_t(inv);
    return parity_check_word(w, d29p, d30p).has_value();
}

inline bool preamble_at(const std::uint8_t* bits, bool inv) {
    for (int i = 0; i < 8; ++i)
        if ((bits[i] ^ std::uint8_t(inv)) != kTlmPreamble[i]) return false;
    return true;
}

inline void chain_state(const std::uint8_t* bits, int offset, bool inv, std::uint8_t& d29p,
                        std::uint8_t& d30p) {
    // Trailing bits of the preceding word; by construction every subframe
    // starts from a solved word-10 tail, so 0/0 is correct when the stream
    // begins exactly at a subframe boundary.
    d29p = offset >= 2 ? std::uint8_t(bits[offset - 2] ^ std::uint8_t(inv)) : 0;
    d30p = offset >= 1 ? std::uint8_t(bits[offset - 1] ^ std::uint8_t(inv)) : 0;
}
}  // namespace detail

/// Resolves the Costas 180-degree ambiguity and the subframe boundary: a
/// preamble candidate is confirmed only if the two following words pass
/// parity and — whenever the window is long enough — the preamble repeats one
/// subframe (300 bits) later. The repetition check matters on genuinely
/// word-aligned streams, where chained parity is polarity-invariant and would
/// otherwise confirm any data bits that happen to spell the preamble.
/// Returns the first confirmed alignment.
inline std::optional<FrameAlignment> resolve_polarity_and_frame(
    const std::vector<std::uint8_t>& bits) {
    if (bits.size() < std::size_t(kSubframeBits)) return std::nullopt;
    const int n = int(bits.size());
    const int last = n - 2 * kWordBits;
    for (int o = 0; o <= last; ++o) {
        for (int inv = 0; inv <= 1; ++inv) {
            if (!detail::preamble_at(&bits[std::size_t(o)], inv)) continue;
            std::uint8_t d29p, d30p;
            detail::chain_state(bits.data(), o, inv, d29p, d30p);
            if (!detail::word_parity_ok(&bits[std::size_t(o)], inv, d29p, d30p)) continue;
            std::uint8_t nd29 = bits[std::size_t(o + 28)] ^ std::uint8_t(inv);
            std::uint8_t nd30 = bits[std::size_t(o + 29)] ^ std::uint8_t(inv);
            if (!detail::word_parity_ok(&bits[std::size_t(o + kWordBits)], inv, nd29, nd30))
                continue;
            if (o + kSubframeBits + 8 <= n &&
                !detail::preamble_at(&bits[std::size_t(o + kSubframeBits)], inv))
                continue;
            return FrameAlignment{o, inv != 0};
        }
    }
    return std::nullopt;
}

/// Attempts to decode the complete subframe starting at `start`: preamble at
/// the expected position and all ten words passing chained parity.
inline bool decode_subframe(const std::vector<std::uint8_t>& bits, int start, bool inv) {
    if (start < 0 || start + kSubframeBits > int(bits.size())) return false;
    if (!detail::preamble_at(&bits[std::size_t(start)], inv)) return false;
    std::uint8_t d29p, d30p;
    detail::chain_state(bits.data(), start, inv, d29p, d30p);
    for (int w = 0; w < kWordsPerSubframe; ++w) {
        const std::uint8_t* word = &bits[std::size_t(start + w * kWordBits)];
        if (!detail::word_parity_ok(word, inv, d29p, d30p)) return false;
        d29p = word[28] ^ std::uint8_t(inv);
        d30p = word[29] ^ std::uint8_t(inv);
    }
    return true;
}

/// Scores one trial: BER against the truth bits after polarity resolution
/// (minimum over polarities when resolution fails, which keeps BER <= 0.5),
/// and decode success for every complete subframe inside the trial.
/// `truth_offset` is the truth-bit index transmitted at trial bit 0; subframes
/// truncated by the trial edges are not counted as attempted.
inline TrialResult score_trial(const std::vector<std::uint8_t>& bits, const NavMessage& truth,
                               int truth_offset) {
    TrialResult r;
    const int n = int(bits.size());
    r.bits_compared = n;

    auto mismatches = [&](bool inv) {
        int m = 0;
        for (int i = 0; i < n; ++i)
            m += int((bits[std::size_t(i)] ^ std::uint8_t(inv)) !=
                     truth.bits[std::size_t(truth_offset + i)]);
        return m;
    };

    auto align = resolve_polarity_and_frame(bits);
    bool inv = false;
    if (align) {
        r.locked = true;
        inv = align->inverted;
        r.bit_errors = mismatches(inv);
    } else {
        r.bit_errors = std::min(mismatches(false), mismatches(true));
    }
    r.ber = n > 0 ? double(r.bit_errors) / n : 0.0;

    // Complete subframes: trial bit positions congruent with the truth
    // subframe grid and fully inside the trial.
    int first = (kSubframeBits - truth_offset % kSubframeBits) % kSubframeBits;
    for (int start = first; start + kSubframeBits <= n; start += kSubframeBits) {
        ++r.subframes_attempted;
        if (align && decode_subframe(bits, start, inv)) ++r.subframes_decoded;
    }
    return r;
}

}  // namespace jcap
