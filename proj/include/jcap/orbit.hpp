#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "jcap/doppler.hpp"
#include "jcap/rng.hpp"

namespace jcap {

inline constexpr double kEarthMu = 3.986004418e14;   // m^3/s^2
inline constexpr double kEarthRadius = 6371e3;       // m, spherical model
inline constexpr double kEarthRate = 7.2921150e-5;   // rad/s
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
};

/// Circular-orbit propagation setup for the Doppler statistics study.
struct OrbitConfig {
    double altitude = 1.2e6;       // m
    double inclination_deg = 90.0;
    double fc = 2e9;               // Hz
    double epoch_step = 15.0;      // s
    double span_periods = 6.0;
    double elev_min_deg = 30.0;
    double elev_max_deg = 90.0;

    double semi_major() const { return kEarthRadius + altitude; }
    double period() const { return 2.0 * M_PI * std::sqrt(std::pow(semi_major(), 3) / kEarthMu); }
};

struct SatState {
    Vec3 pos, vel, acc;  // ECEF, m / m/s / m/s^2
};

/// Circular Keplerian motion in the inclined plane, rotated into ECEF with
/// Earth rotation; velocity and acceleration by analytic differentiation.
inline SatState propagate(const OrbitConfig& cfg, double t) {
    const double a = cfg.semi_major();
    const double n = std::sqrt(kEarthMu / (a * a * a));
    const double i = cfg.inclination_deg * M_PI / 180.0;
    const double u = n * t;

    // Orbital plane basis (RAAN = 0): e1 along the ascending node,
    // e2 = 90 deg ahead in the plane.
    const Vec3 e1{1.0, 0.0, 0.0};
    const Vec3 e2{0.0, std::cos(i), std::sin(i)};

    Vec3 r_i = e1 * (a * std::cos(u)) + e2 * (a * std::sin(u));
    Vec3 v_i = e1 * (-a * n * std::sin(u)) + e2 * (a * n * std::cos(u));
    Vec3 ac_i = r_i * (-n * n);

    // ECEF = Rz(-we*t) * ECI.
    const double th = -kEarthRate * t;
    const double c = std::cos(th), s = std::sin(th);
    auto rot = [&](const Vec3& v) { return Vec3{c * v.x - s * v.y, s * v.x + c * v.y, v.z}; };
    auto drot = [&](const Vec3& v) {
        // d/dt of Rz(-we t) applied to a constant vector
        return Vec3{kEarthRate * (s * v.x + c * v.y), kEarthRate * (-c * v.x + s * v.y), 0.0};
    };
    auto ddrot = [&](const Vec3& v) {
        return Vec3{-kEarthRate * kEarthRate * (c * v.x - s * v.y),
                    -kEarthRate * kEarthRate * (s * v.x + c * v.y), 0.0};
    };

    SatState st;
    st.pos = rot(r_i);
    st.vel = rot(v_i) + drot(r_i);
    st.acc = rot(ac_i) + drot(v_i) * 2.0 + ddrot(r_i);
    return st;
}

inline double elevation_deg(const Vec3& rx, const Vec3& sat) {
    Vec3 los = sat - rx;
    double se = rx.dot(los) / (rx.norm() * los.norm());
    return std::asin(std::clamp(se, -1.0, 1.0)) * 180.0 / M_PI;
}

struct GeometrySample {
    SatState sat;
    Vec3 rx_pos;
    double epoch = 0.0;      // s
    double elevation = 0.0;  // deg
    double f0 = 0.0;         // Hz
    double fdot = 0.0;       // Hz/s
    double fddot = 0.0;      // Hz/s^2
};

namespace detail {
inline double range_at(const OrbitConfig& cfg, const Vec3& rx, double t) {
    return (propagate(cfg, t).pos - rx).norm();
}
}  // namespace detail

/// Line-of-sight Doppler derivatives by central finite differences of the
/// range, f = -fc/c * d(range)/dt.
inline void doppler_from_geometry(const OrbitConfig& cfg, const Vec3& rx, double t,
                                  double& f0, double& fdot, double& fddot, double h = 0.5) {
    const double k = -cfg.fc / kSpeedOfLight;
    double rm2 = detail::range_at(cfg, rx, t - 2 * h);
    double rm1 = detail::range_at(cfg, rx, t - h);
    double rp1 = detail::range_at(cfg, rx, t + h);
    double rp2 = detail::range_at(cfg, rx, t + 2 * h);
    double r0 = detail::range_at(cfg, rx, t);
    double rdot = (rp1 - rm1) / (2 * h);
    double rddot = (rp1 - 2 * r0 + rm1) / (h * h);
    double rdddot = (rp2 - 2 * rp1 + 2 * rm1 - rm2) / (2 * h * h * h);
    f0 = k * rdot;
    fdot = k * rddot;
    fddot = k * rdddot;
}

/// Earth-central angle between the receiver and the subsatellite point at
/// which the satellite sits at the given elevation (monotone decreasing in
/// elevation; solved by bisection).
inline double central_angle_for_elevation(const OrbitConfig& cfg, double elev_deg) {
    const double ratio = kEarthRadius / cfg.semi_major();
    auto elev_at = [&](double g) {
        return std::atan2(std::cos(g) - ratio, std::sin(g)) * 180.0 / M_PI;
    };
    double lo = 0.0, hi = std::acos(ratio);  // hi = horizon (elevation 0)
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        if (elev_at(mid) > elev_deg) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Samples a visible geometry: uniform epoch on the 15 s grid, receiver drawn
/// uniformly in angular offset from the subsatellite point (azimuth uniform)
/// within the elevation-mask cap.
inline GeometrySample sample_geometry(const OrbitConfig& cfg, Rng& rng) {
    const long long n_epochs = (long long)std::floor(cfg.span_periods * cfg.period() /
                                                     cfg.epoch_step) + 1;
    const double g_min = central_angle_for_elevation(cfg, cfg.elev_max_deg);
    const double g_max = central_angle_for_elevation(cfg, cfg.elev_min_deg);
    for (long long tries = 0; tries < 1000000; ++tries) {
        double t = cfg.epoch_step * double(rng.index(std::uint64_t(n_epochs)));
        double gamma = g_min + (g_max - g_min) * rng.uniform();
        double az = 2.0 * M_PI * rng.uniform();
        SatState sat = propagate(cfg, t);
        Vec3 u = sat.pos * (1.0 / sat.pos.norm());
        Vec3 a{-u.y, u.x, 0.0};
        double an = a.norm();
        a = (an > 1e-12) ? a * (1.0 / an) : Vec3{1.0, 0.0, 0.0};
        Vec3 b{u.y * a.z - u.z * a.y, u.z * a.x - u.x * a.z, u.x * a.y - u.y * a.x};
        Vec3 dir = u * std::cos(gamma) +
                   (a * std::cos(az) + b * std::sin(az)) * std::sin(gamma);
        Vec3 rx = dir * kEarthRadius;
        double el = elevation_deg(rx, sat.pos);
        // Guard against numerical edge cases at the cap boundary.
        if (el < cfg.elev_min_deg - 1e-9 || el > cfg.elev_max_deg + 1e-9) continue;
        GeometrySample g;
        g.sat = sat;
        g.rx_pos = rx;
        g.epoch = t;
        g.elevation = std::clamp(el, cfg.elev_min_deg, cfg.elev_max_deg);
        doppler_from_geometry(cfg, rx, t, g.f0, g.fdot, g.fddot);
        return g;
    }
    throw std::runtime_error("sample_geometry: rejection failure (elevation mask unreachable)");
}

/// Empirical |fdot| / |fddot| quantile thresholds for the dynamic classes.
struct QuantileTable {
    double rate_q33 = 0, rate_q66 = 0, rate_q99 = 0;    // Hz/s
    double acc_q33 = 0, acc_q66 = 0, acc_q99 = 0;       // Hz/s^2
};

/// Class thresholds adopted for signal generation at fc = 2 GHz (1200 km
/// circular polar orbit, 30-90 deg elevation mask).
inline QuantileTable default_doppler_thresholds() {
    return {153.01, 214.90, 246.59, 0.47, 0.80, 1.13};
}

namespace detail {
inline double quantile(std::vector<double>& v, double q) {
    std::size_t idx = std::size_t(q * double(v.size() - 1) + 0.5);
    std::nth_element(v.begin(), v.begin() + long(idx), v.end());
    return v[idx];
}
}  // namespace detail

struct DopplerStats {
    QuantileTable table;
    std::vector<double> rates, accels;  // |fdot|, |fddot| samples
};

inline DopplerStats collect_doppler_stats(const OrbitConfig& cfg, int n_trials,
                                          std::uint64_t seed) {
    if (n_trials < 1) throw std::invalid_argument("collect_doppler_stats: n_trials < 1");
    DopplerStats st;
    st.rates.reserve(std::size_t(n_trials));
    st.accels.reserve(std::size_t(n_trials));
    Rng rng(seed);
    for (int i = 0; i < n_trials; ++i) {
        GeometrySample g = sample_geometry(cfg, rng);
        st.rates.push_back(std::abs(g.fdot));
        st.accels.push_back(std::abs(g.fddot));
    }
    std::vector<double> r = st.rates, a = st.accels;
    st.table.rate_q33 = detail::quantile(r, 0.33);
    st.table.rate_q66 = detail::quantile(r, 0.66);
    st.table.rate_q99 = detail::quantile(r, 0.99);
    st.table.acc_q33 = detail::quantile(a, 0.33);
    st.table.acc_q66 = detail::quantile(a, 0.66);
    st.table.acc_q99 = detail::quantile(a, 0.99);
    return st;
}

inline QuantileTable estimate_quantiles(const OrbitConfig& cfg, int n_trials,
                                        std::uint64_t seed) {
    return collect_doppler_stats(cfg, n_trials, seed).table;
}

enum class DynamicClass { low, medium, high };

inline const char* to_string(DynamicClass c) {
    switch (c) {
        case DynamicClass::low: return "low";
        case DynamicClass::medium: return "medium";
        default: return "high";
    }
}

/// Representative profile for a dynamic class: the class maximum from the
/// quantile table, negative rate by default (setting pass geometry), with f0
/// drawn uniformly.
inline DopplerProfile draw_profile(DynamicClass cls, const QuantileTable& table, Rng& rng,
                                   double f0_range = 40e3, double rate_sign = -1.0) {
    DopplerProfile p;
    switch (cls) {
        case DynamicClass::low:
            p.fdot = rate_sign * table.rate_q33;
            p.fddot = table.acc_q33;
            break;
        case DynamicClass::medium:
            p.fdot = rate_sign * table.rate_q66;
            p.fddot = table.acc_q66;
            break;
        case DynamicClass::high:
            p.fdot = rate_sign * table.rate_q99;
            p.fddot = table.acc_q99;
            break;
    }
    p.f0 = rng.uniform(-f0_range, f0_range);
    return p;
}

/// CSV histogram export: bin_center,count.
inline void write_histogram_csv(const std::vector<double>& data, int n_bins,
                                const std::string& path) {
    if (data.empty() || n_bins < 1) throw std::invalid_argument("write_histogram_csv: bad input");
    double lo = *std::min_element(data.begin(), data.end());
    double hi = *std::max_element(data.begin(), data.end());
    if (hi <= lo) hi = lo + 1.0;
    double w = (hi - lo) / n_bins;
    std::vector<long> counts(std::size_t(n_bins), 0);
    for (double v : data) {
        int b = std::min(n_bins - 1, int((v - lo) / w));
        ++counts[std::size_t(b)];
    }
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_histogram_csv: cannot open " + path);
    std::fprintf(f, "bin_center,count\n");
    for (int b = 0; b < n_bins; ++b)
        std::fprintf(f, "%.10g,%ld\n", lo + (b + 0.5) * w, counts[std::size_t(b)]);
    std::fclose(f);
}

}  // namespace jcap
