#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

namespace jcap {

inline constexpr int kCaCodeLength = 1023;
inline constexpr double kCaChipRate = 1.023e6;  // chips per second
inline constexpr int kChipsPerNavBit = 20 * kCaCodeLength;  // 20 ms bit at 50 bps

/// One period of a GPS L1 C/A spreading code, chips in {+1, -1}.
struct CaCode {
    int prn = 0;
    std::array<std::int8_t, kCaCodeLength> chips{};
};

/// G2 phase-select taps per PRN (IS-GPS-200, PRNs 1..32), 1-based stages.
inline constexpr std::array<std::array<int, 2>, 32> kG2PhaseTaps = {{
    {2, 6},  {3, 7},  {4, 8},  {5, 9},  {1, 9},  {2, 10}, {1, 8},  {2, 9},
    {3, 10}, {2, 3},  {3, 4},  {5, 6},  {6, 7},  {7, 8},  {8, 9},  {9, 10},
    {1, 4},  {2, 5},  {3, 6},  {4, 7},  {5, 8},  {6, 9},  {1, 3},  {4, 6},
    {5, 7},  {6, 8},  {7, 9},  {8, 10}, {1, 6},  {2, 7},  {3, 8},  {4, 9},
}};

/// Generates the C/A Gold code for one PRN. G1 feedback taps 3,10; G2 feedback
/// taps 2,3,6,8,9,10; output chip = G1 out xor (G2 at the two phase-select
/// stages). Binary 0 maps to +1 and 1 to -1.
inline CaCode generate_ca_code(int prn) {
    if (prn < 1 || prn > 32)
        throw std::invalid_argument("generate_ca_code: prn must be in 1..32");

    std::array<int, 10> g1, g2;
    g1.fill(1);
    g2.fill(1);
    const auto [ts1, ts2] = kG2PhaseTaps[prn - 1];

    CaCode code;
    code.prn = prn;
    for (int i = 0; i < kCaCodeLength; ++i) {
        int bit = g1[9] ^ g2[ts1 - 1] ^ g2[ts2 - 1];
        code.chips[i] = bit ? -1 : +1;

        int fb1 = g1[2] ^ g1[9];
        int fb2 = g2[1] ^ g2[2] ^ g2[5] ^ g2[7] ^ g2[8] ^ g2[9];
        for (int j = 9; j > 0; --j) {
            g1[j] = g1[j - 1];
            g2[j] = g2[j - 1];
        }
        g1[0] = fb1;
        g2[0] = fb2;
    }
    return code;
}

/// Periodic cross-correlation (unnormalized) of two codes at an integer lag.
inline int ca_cross_correlation(const CaCode& a, const CaCode& b, int lag) {
    int acc = 0;
    for (int i = 0; i < kCaCodeLength; ++i) {
        int j = i + lag;
        j %= kCaCodeLength;
        if (j < 0) j += kCaCodeLength;
        acc += int(a.chips[i]) * int(b.chips[j]);
    }
    return acc;
}

}  // namespace jcap
