#pragma once

#include <complex>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace jcap {

using cfloat = std::complex<float>;
using cdouble = std::complex<double>;

/// Complex baseband sample sequence plus its sample rate.
struct SampleStream {
    std::vector<cfloat> samples;
    double rate = 0.0;  // samples per second
    double t0 = 0.0;    // start time in seconds

    std::size_t size() const { return samples.size(); }
    double duration() const { return rate > 0.0 ? samples.size() / rate : 0.0; }
};

/// Mean of |x|^2 over the stream.
inline double measure_mean_power(const SampleStream& s) {
    if (s.samples.empty())
        throw std::invalid_argument("measure_mean_power: empty stream");
    double acc = 0.0;
    for (const auto& x : s.samples)
        acc += double(x.real()) * x.real() + double(x.imag()) * x.imag();
    return acc / double(s.samples.size());
}

/// Writes interleaved float32 I/Q (little-endian) to `path` and a text sidecar
/// header to `path + ".hdr"`. Extra lines are appended to the header verbatim.
inline void write_iq(const SampleStream& s, const std::string& path,
                     const std::vector<std::string>& header_extra = {}) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("write_iq: cannot open " + path);
    if (!s.samples.empty()) {
        std::size_t n = std::fwrite(s.samples.data(), sizeof(cfloat), s.samples.size(), f);
        if (n != s.samples.size()) {
            std::fclose(f);
            throw std::runtime_error("write_iq: short write to " + path);
        }
    }
    std::fclose(f);

    std::FILE* h = std::fopen((path + ".hdr").c_str(), "w");
    if (!h) throw std::runtime_error("write_iq: cannot open " + path + ".hdr");
    std::fprintf(h, "format interleaved_float32_iq_le\n");
    std::fprintf(h, "rate %.17g\n", s.rate);
    std::fprintf(h, "t0 %.17g\n", s.t0);
    std::fprintf(h, "samples %zu\n", s.samples.size());
    for (const auto& line : header_extra)
        std::fprintf(h, "%s\n", line.c_str());
    std::fclose(h);
}

inline SampleStream read_iq(const std::string& path, double rate, double t0 = 0.0) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("read_iq: cannot open " + path);
    SampleStream s;
    s.rate = rate;
    s.t0 = t0;
    cfloat buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, sizeof(cfloat), 4096, f)) > 0)
        s.samples.insert(s.samples.end(), buf, buf + n);
    std::fclose(f);
    return s;
}

}  // namespace jcap
