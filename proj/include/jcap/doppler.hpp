#pragma once

namespace jcap {

/// Second-order polynomial Doppler model: f(t) = f0 + fdot*t + fddot*t^2/2.
struct DopplerProfile {
    double f0 = 0.0;     // Hz
    double fdot = 0.0;   // Hz/s
    double fddot = 0.0;  // Hz/s^2

    double frequency(double t) const { return f0 + fdot * t + 0.5 * fddot * t * t; }

    /// Integral of f(t) from 0 to t, in cycles.
    double phase_cycles(double t) const {
        return t * (f0 + t * (fdot / 2.0 + t * fddot / 6.0));
    }
};

}  // namespace jcap
