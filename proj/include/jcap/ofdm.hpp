#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jcap/fft.hpp"
#include "jcap/rng.hpp"
#include "jcap/stream.hpp"

namespace jcap {

/// CP-OFDM numerology. Defaults: 15 kHz SCS, FFT 512, 25 RB at 7.68 MSps
/// (normal CP scaled from the 30.72 MSps reference lengths 160/144).
struct OfdmConfig {
    double scs = 15e3;
    int fft_size = 512;
    int n_rb = 25;
    double rate = 7.68e6;

    int occupied_subcarriers() const { return 12 * n_rb; }
    int symbols_per_subframe() const { return 14; }
    int cp_length(int symbol) const {
        int scale = 2048 / fft_size;
        return (symbol == 0 || symbol == 7) ? 160 / scale : 144 / scale;
    }
    int samples_per_subframe() const {
        int n = 0;
        for (int s = 0; s < symbols_per_subframe(); ++s) n += fft_size + cp_length(s);
        return n;
    }

    void validate() const {
        if (fft_size <= 0 || (fft_size & (fft_size - 1)) != 0)
            throw std::invalid_argument("OfdmConfig: fft_size must be a power of two");
        if (std::abs(rate - scs * fft_size) > 1e-6 * rate)
            throw std::invalid_argument("OfdmConfig: rate != scs * fft_size");
        if (occupied_subcarriers() > fft_size)
            throw std::invalid_argument("OfdmConfig: occupied subcarriers exceed fft_size");
        if (samples_per_subframe() != int(std::llround(rate * 1e-3)))
            throw std::invalid_argument("OfdmConfig: CP schedule does not fill a 1 ms subframe");
    }
};

/// Streaming CP-OFDM downlink source: seeded random QPSK on all occupied
/// subcarriers (DC unused), full load every symbol. One subframe per call.
/// Output mean power is exactly 1 (unit-magnitude constellation + Parseval).
class OfdmGenerator {
public:
    OfdmGenerator(const OfdmConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(seed), fft_(std::size_t(cfg.fft_size)) {
        cfg_.validate();
        freq_.resize(std::size_t(cfg_.fft_size));
        // Unit-magnitude bins -> symbol power n_occ/N^2 after the 1/N inverse
        // transform; rescale to exactly 1.
        scale_ = double(cfg_.fft_size) / std::sqrt(double(cfg_.occupied_subcarriers()));
    }

    const OfdmConfig& config() const { return cfg_; }

    /// Appends one 1 ms subframe (samples_per_subframe() samples) to `out`.
    void subframe(std::vector<cfloat>& out) {
        const int n = cfg_.fft_size;
        const int half = cfg_.occupied_subcarriers() / 2;
        const double amp = scale_ / std::sqrt(2.0);
        for (int sym = 0; sym < cfg_.symbols_per_subframe(); ++sym) {
            std::fill(freq_.begin(), freq_.end(), std::complex<double>(0.0, 0.0));
            for (int k = -half; k <= half; ++k) {
                if (k == 0) continue;
                std::uint64_t b = rng_.next_u64();
                double re = (b & 1) ? -amp : amp;
                double im = (b & 2) ? -amp : amp;
                int bin = k >= 0 ? k : n + k;
                freq_[std::size_t(bin)] = {re, im};
            }
            fft_.inverse(freq_.data());
            int cp = cfg_.cp_length(sym);
            for (int i = n - cp; i < n; ++i)
                out.emplace_back(float(freq_[std::size_t(i)].real()),
                                 float(freq_[std::size_t(i)].imag()));
            for (int i = 0; i < n; ++i)
                out.emplace_back(float(freq_[std::size_t(i)].real()),
                                 float(freq_[std::size_t(i)].imag()));
        }
    }

private:
    OfdmConfig cfg_;
    Rng rng_;
    Fft fft_;
    std::vector<std::complex<double>> freq_;
    double scale_ = 1.0;
};

/// Whole-stream convenience wrapper; duration must be a positive multiple of
/// the 1 ms subframe.
inline SampleStream generate_ofdm_downlink(const OfdmConfig& cfg, double duration,
                                           std::uint64_t seed) {
    cfg.validate();
    double subframes = duration * 1e3;
    long long n_sub = std::llround(subframes);
    if (n_sub < 1 || std::abs(subframes - double(n_sub)) > 1e-9)
        throw std::invalid_argument("generate_ofdm_downlink: duration must be a multiple of 1 ms");

    OfdmGenerator gen(cfg, seed);
    SampleStream out;
    out.rate = cfg.rate;
    out.samples.reserve(std::size_t(n_sub) * std::size_t(cfg.samples_per_subframe()));
    for (long long i = 0; i < n_sub; ++i) gen.subframe(out.samples);
    return out;
}

}  // namespace jcap
