#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "jcap/stream.hpp"

namespace jcap {

namespace detail {
inline double bessel_i0(double x) {
    double sum = 1.0, term = 1.0;
    double half = x / 2.0;
    for (int k = 1; k < 64; ++k) {
        term *= (half / k) * (half / k);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}
}  // namespace detail

/// Streaming rational polyphase resampler (ratio L/M) with a Kaiser-windowed
/// sinc prototype. Output is group-delay compensated: output sample n lands at
/// input time n*M/L, and the total output count for N fed inputs (after
/// flush()) is round(N*L/M).
class RationalResampler {
public:
    RationalResampler(double rate_in, double rate_out, int taps_per_phase = 24,
                      double atten_db = 70.0)
        : rate_in_(rate_in), rate_out_(rate_out) {
        if (rate_in <= 0.0 || rate_out <= 0.0)
            throw std::invalid_argument("RationalResampler: rates must be positive");
        long long a = std::llround(rate_in), b = std::llround(rate_out);
        if (std::abs(rate_in - double(a)) > 1e-6 || std::abs(rate_out - double(b)) > 1e-6)
            throw std::invalid_argument("RationalResampler: rates must be integer Hz");
        long long g = std::gcd(a, b);
        up_ = int(b / g);
        down_ = int(a / g);
        identity_ = (up_ == 1 && down_ == 1);
        if (identity_) return;

        tpp_ = taps_per_phase;
        const int n_taps = up_ * tpp_;
        const double fc = 0.5 * std::min(rate_in, rate_out);  // cutoff, Hz
        const double f_virt = rate_in * up_;
        const double fn = fc / f_virt;  // cycles per virtual sample
        const double beta = atten_db > 50.0 ? 0.1102 * (atten_db - 8.7)
                                            : 0.5842 * std::pow(atten_db - 21.0, 0.4) +
                                                  0.07886 * (atten_db - 21.0);
        const double center = 0.5 * (n_taps - 1);
        const double i0b = detail::bessel_i0(beta);
        taps_.resize(std::size_t(n_taps));
        for (int i = 0; i < n_taps; ++i) {
            double t = i - center;
            double sinc = (t == 0.0) ? 2.0 * fn : std::sin(2.0 * M_PI * fn * t) / (M_PI * t);
            double w = t / (center);
            double win = detail::bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - w * w))) / i0b;
            taps_[std::size_t(i)] = float(double(up_) * sinc * win);
        }
        // Polyphase layout: phase r holds h[r], h[r+L], ... so the inner
        // product over the history is contiguous.
        poly_.resize(std::size_t(up_) * std::size_t(tpp_));
        for (int r = 0; r < up_; ++r)
            for (int t = 0; t < tpp_; ++t)
                poly_[std::size_t(r) * tpp_ + t] = taps_[std::size_t(r + t * up_)];
        skip_ = int(std::llround(center / down_));
    }

    double rate_in() const { return rate_in_; }
    double rate_out() const { return rate_out_; }
    int up() const { return up_; }
    int down() const { return down_; }

    /// Feeds input samples; appends whatever outputs become available to `out`.
    void process(const cfloat* in, std::size_t count, std::vector<cfloat>& out) {
        if (identity_) {
            out.insert(out.end(), in, in + count);
            return;
        }
        buf_.insert(buf_.end(), in, in + count);
        fed_ += (long long)count;
        drain(out);
    }

    /// Flushes the tail so that the total emitted equals round(fed * L / M).
    void flush(std::vector<cfloat>& out) {
        if (identity_) return;
        long long target = std::llround(double(fed_) * up_ / down_);
        std::vector<cfloat> zeros(std::size_t(tpp_) + 4, cfloat{0.0f, 0.0f});
        while (emitted_ < target) {
            buf_.insert(buf_.end(), zeros.begin(), zeros.end());
            fed_virtual_ += (long long)zeros.size();
            drain(out, target);
        }
    }

    void reset() {
        buf_.clear();
        fed_ = emitted_ = raw_index_ = fed_virtual_ = 0;
        base_ = 0;
    }

private:
    void drain(std::vector<cfloat>& out, long long limit = -1) {
        // Raw output j needs input indices m-tpp+1 .. m with m = floor(j*M/L);
        // the first `skip_` raw outputs are group delay and are discarded.
        long long avail = base_ + (long long)buf_.size();
        for (;;) {
            long long j = raw_index_;
            long long num = j * down_;
            long long m = num / up_;
            int r = int(num - m * up_);
            if (m >= avail) break;
            if (limit >= 0 && emitted_ >= limit) break;
            float accr = 0.0f, acci = 0.0f;
            const float* h = &poly_[std::size_t(r) * tpp_];
            long long hist = m - base_;  // index of newest sample used
            for (int t = 0; t < tpp_; ++t) {
                long long idx = hist - t;
                if (idx < 0) break;  // zero history before the stream start
                cfloat x = buf_[std::size_t(idx)];
                accr += h[t] * x.real();
                acci += h[t] * x.imag();
            }
            ++raw_index_;
            if (j >= skip_) {
                out.emplace_back(accr, acci);
                ++emitted_;
            }
        }
        // Drop history no longer reachable by future outputs.
        long long next_m = (raw_index_ * down_) / up_;
        long long keep_from = next_m - tpp_ + 1;
        if (keep_from > base_) {
            long long drop = std::min(keep_from - base_, (long long)buf_.size());
            buf_.erase(buf_.begin(), buf_.begin() + drop);
            base_ += drop;
        }
    }

    double rate_in_, rate_out_;
    int up_ = 1, down_ = 1, tpp_ = 0, skip_ = 0;
    bool identity_ = false;
    std::vector<float> taps_, poly_;
    std::vector<cfloat> buf_;
    long long base_ = 0, fed_ = 0, fed_virtual_ = 0, emitted_ = 0, raw_index_ = 0;
};

/// Whole-stream band-limited rational resampling.
inline SampleStream resample(const SampleStream& s, double target_rate) {
    if (target_rate <= 0.0)
        throw std::invalid_argument("resample: target rate must be positive");
    RationalResampler rs(s.rate, target_rate);
    SampleStream out;
    out.rate = target_rate;
    out.t0 = s.t0;
    out.samples.reserve(std::size_t(double(s.samples.size()) * target_rate / s.rate) + 16);
    if (!s.samples.empty()) rs.process(s.samples.data(), s.samples.size(), out.samples);
    rs.flush(out.samples);
    return out;
}

}  // namespace jcap
