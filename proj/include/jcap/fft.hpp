#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace jcap {

/// Iterative radix-2 FFT for power-of-two sizes. Twiddles and bit-reversal
/// are precomputed at construction; forward/inverse operate in place.
class Fft {
public:
    explicit Fft(std::size_t n) : n_(n) {
        if (n == 0 || (n & (n - 1)) != 0)
            throw std::invalid_argument("Fft: size must be a power of two");
        rev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t(1) << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (log2n - 1 - b);
            rev_[i] = r;
        }
        tw_.resize(n / 2);
        for (std::size_t k = 0; k < n / 2; ++k) {
            double a = -2.0 * M_PI * double(k) / double(n);
            tw_[k] = {std::cos(a), std::sin(a)};
        }
    }

    std::size_t size() const { return n_; }

    void forward(std::complex<double>* x) const { run(x, false); }

    /// Inverse transform including the 1/N scaling.
    void inverse(std::complex<double>* x) const {
        run(x, true);
        double s = 1.0 / double(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] *= s;
    }

private:
    void run(std::complex<double>* x, bool inv) const {
        for (std::size_t i = 0; i < n_; ++i)
            if (rev_[i] > i) std::swap(x[i], x[rev_[i]]);
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            std::size_t step = n_ / len;
            for (std::size_t i = 0; i < n_; i += len) {
                for (std::size_t k = 0; k < len / 2; ++k) {
                    std::complex<double> w = tw_[k * step];
                    if (inv) w = std::conj(w);
                    std::complex<double> u = x[i + k];
                    std::complex<double> v = x[i + k + len / 2] * w;
                    x[i + k] = u + v;
                    x[i + k + len / 2] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<std::complex<double>> tw_;
};

}  // namespace jcap
