#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "jcap/ca_code.hpp"
#include "jcap/doppler.hpp"
#include "jcap/nav.hpp"
#include "jcap/stream.hpp"

namespace jcap {

/// Options for the L1 C/A sampler. `code_doppler`, when set, dilates the chip
/// clock by the instantaneous carrier Doppler scaled by chip-rate/carrier
/// ratio, keeping code and carrier physically consistent over long runs.
struct L1caOptions {
    double code_phase0 = 0.0;          // chips
    int start_bit = 0;                 // first NAV bit index emitted at t = 0
    const DopplerProfile* code_doppler = nullptr;
    double fc = 2e9;                   // carrier for the chip-dilation ratio, Hz
};

/// Samples the spread NAV message at `rate`: sample k = nav_bit * chip, with
/// the chip clock at 1.023 Mcps (optionally Doppler-dilated), 20 code periods
/// per bit, rectangular chips by nearest-chip indexing. Mean power is 1.
inline SampleStream sample_l1ca(int prn, const NavMessage& nav, double rate,
                                double duration, const L1caOptions& opt = {}) {
    if (rate < 2.046e6)
        throw std::invalid_argument("sample_l1ca: rate below 2.046 MSps");
    if (duration <= 0.0)
        throw std::invalid_argument("sample_l1ca: non-positive duration");
    // Worst-case bit consumption; dilation shifts edges by far less than a bit.
    int bits_needed = opt.start_bit + int(std::ceil(duration * kNavBitRate)) + 1;
    if (bits_needed > nav.size())
        throw std::invalid_argument("sample_l1ca: duration exceeds NAV message");

    const CaCode code = generate_ca_code(prn);
    const std::size_t n = std::size_t(std::llround(duration * rate));

    SampleStream out;
    out.rate = rate;
    out.samples.resize(n);

    const double inv_fc = 1.0 / opt.fc;
    const bool dilate = opt.code_doppler != nullptr;
    // Chips per sample; exact (0.25) at the commensurate 4.092 MSps rate, so
    // chip boundaries land on samples without floating-point floor jitter.
    const double chips_per_sample = kCaChipRate / rate;
    for (std::size_t k = 0; k < n; ++k) {
        double t = double(k) / rate;
        // Absolute chip position: integral of the (possibly dilated) chip rate.
        double x = opt.code_phase0 + double(k) * chips_per_sample;
        if (dilate)
            x += kCaChipRate * inv_fc * opt.code_doppler->phase_cycles(t);
        long long chip_total = (long long)std::floor(x);
        int chip_idx = int(chip_total % kCaCodeLength);
        if (chip_idx < 0) chip_idx += kCaCodeLength;
        long long bit_idx = opt.start_bit + (chip_total >= 0 ? chip_total / kChipsPerNavBit
                                                             : -1 - (-1 - chip_total) / kChipsPerNavBit);
        float v = float(code.chips[chip_idx]);
        if (nav.bits[std::size_t(bit_idx)]) v = -v;
        out.samples[k] = {v, 0.0f};
    }
    return out;
}

}  // namespace jcap
