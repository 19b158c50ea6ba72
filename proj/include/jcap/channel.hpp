#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "jcap/doppler.hpp"
#include "jcap/rng.hpp"
#include "jcap/stream.hpp"

namespace jcap {

/// SINR at or above SIR would require negative noise power.
struct UnreachableSinrError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

/// rho = sir / (1 + sir): the GNSS share of unit total transmit power.
inline double sir_to_rho(double sir_db) {
    double sir = db_to_lin(sir_db);
    return sir / (1.0 + sir);
}

/// Power split and noise calibration under the unit-total-transmit-power
/// convention: P_GNSS = rho, P_5G = 1 - rho, noise = P_GNSS/sinr - P_5G.
struct PowerAndNoiseConfig {
    double sir_db = 0.0;
    double rho = 1.0;
    double sinr_db = 0.0;
    double bandwidth_B = 4.092e6;  // GNSS complex sampling bandwidth, Hz
    double noise_power = 0.0;      // N0 * B, linear
};

inline PowerAndNoiseConfig make_power_noise(double sir_db, double sinr_db,
                                            double bandwidth_B = 4.092e6) {
    double sir = db_to_lin(sir_db);
    double sinr = db_to_lin(sinr_db);
    if (!(sinr < sir))
        throw UnreachableSinrError("make_power_noise: SINR must be strictly below SIR");
    PowerAndNoiseConfig cfg;
    cfg.sir_db = sir_db;
    cfg.sinr_db = sinr_db;
    cfg.bandwidth_B = bandwidth_B;
    cfg.rho = sir / (1.0 + sir);
    cfg.noise_power = cfg.rho / sinr - (1.0 - cfg.rho);
    return cfg;
}

/// C/N0 treating 5G-plus-noise as an equivalent white floor over B.
inline double effective_cn0(const PowerAndNoiseConfig& cfg) {
    return lin_to_db(db_to_lin(cfg.sinr_db) * cfg.bandwidth_B);
}

/// sqrt(rho)*gnss + sqrt(1-rho)*fiveg, elementwise. Streams must already be
/// rate- and length-aligned.
inline SampleStream combine(const SampleStream& gnss, const SampleStream& fiveg, double rho) {
    if (gnss.samples.size() != fiveg.samples.size())
        throw std::invalid_argument("combine: length mismatch");
    if (std::abs(gnss.rate - fiveg.rate) > 1e-6)
        throw std::invalid_argument("combine: rate mismatch");
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("combine: rho must be in [0,1]");
    SampleStream out;
    out.rate = gnss.rate;
    out.t0 = gnss.t0;
    out.samples.resize(gnss.samples.size());
    float a = float(std::sqrt(rho));
    float b = float(std::sqrt(1.0 - rho));
    for (std::size_t i = 0; i < out.samples.size(); ++i)
        out.samples[i] = a * gnss.samples[i] + b * fiveg.samples[i];
    return out;
}

/// In-place carrier rotation exp(j*phi(t)), phi = 2*pi*integral of the Doppler
/// polynomial. The phase is evaluated from the closed-form cubic at every
/// sample, not accumulated.
inline void apply_doppler_inplace(SampleStream& s, const DopplerProfile& d) {
    const double inv_rate = 1.0 / s.rate;
    for (std::size_t k = 0; k < s.samples.size(); ++k) {
        double t = s.t0 + double(k) * inv_rate;
        double cycles = d.phase_cycles(t);
        double frac = cycles - std::floor(cycles);
        double ang = 2.0 * M_PI * frac;
        float c = float(std::cos(ang)), sn = float(std::sin(ang));
        cfloat x = s.samples[k];
        s.samples[k] = {x.real() * c - x.imag() * sn, x.real() * sn + x.imag() * c};
    }
}

inline SampleStream apply_doppler(const SampleStream& s, const DopplerProfile& d) {
    SampleStream out = s;
    apply_doppler_inplace(out, d);
    return out;
}

/// Adds circularly-symmetric complex Gaussian noise of total power
/// cfg.noise_power, split equally between I and Q.
inline void add_awgn_inplace(SampleStream& s, const PowerAndNoiseConfig& cfg,
                             std::uint64_t seed) {
    Rng rng(seed);
    const float sigma = float(std::sqrt(cfg.noise_power / 2.0));
    for (auto& x : s.samples)
        x += cfloat(sigma * float(rng.gaussian()), sigma * float(rng.gaussian()));
}

inline SampleStream add_awgn(const SampleStream& s, const PowerAndNoiseConfig& cfg,
                             std::uint64_t seed) {
    SampleStream out = s;
    add_awgn_inplace(out, cfg, seed);
    return out;
}

}  // namespace jcap
