#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "jcap/ca_code.hpp"
#include "jcap/stream.hpp"

namespace jcap {

/// Scheduled loop-bandwidth reductions. A zero duration on the last stage
/// means "remainder of the trial". The same bn drives FLL, PLL and DLL.
struct StagePlan {
    struct Stage {
        double duration;        // s
        double bn;              // Hz
        double fll_weight = 1.0;  // FLL-assist error gain for this stage
    };
    // Default schedule runs a pure PLL in every stage: the tracker is handed
    // the acquisition frequency estimate directly, and at the lowest C/N0
    // operating points the FLL discriminator noise random-walks the carrier
    // phase enough to break NAV demodulation. Set fll_weight > 0 per stage to
    // enable the FLL assist (useful with a coarse frequency handoff).
    std::vector<Stage> stages{{1.5, 18.0, 0.0}, {1.5, 7.0, 0.0}, {0.0, 2.0, 0.0}};
    double integration_time = 0.020;  // s
    double el_spacing = 0.5;          // chips

    int stage_at(double t) const {
        double edge = 0.0;
        for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
            edge += stages[i].duration;
            if (t < edge) return int(i);
        }
        return int(stages.size()) - 1;
    }
    double bn_at(double t) const { return stages[std::size_t(stage_at(t))].bn; }
    double fll_weight_at(double t) const { return stages[std::size_t(stage_at(t))].fll_weight; }

    void validate() const {
        if (stages.empty()) throw std::invalid_argument("StagePlan: no stages");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            if (stages[i].bn <= 0.0) throw std::invalid_argument("StagePlan: bn must be > 0");
            if (stages[i].fll_weight < 0.0)
                throw std::invalid_argument("StagePlan: fll_weight must be >= 0");
            if (i + 1 < stages.size() && stages[i].duration <= 0.0)
                throw std::invalid_argument("StagePlan: stage durations must be positive");
            if (i > 0 && stages[i].bn >= stages[i - 1].bn)
                throw std::invalid_argument("StagePlan: bandwidths must strictly decrease");
        }
        if (integration_time <= 0.0)
            throw std::invalid_argument("StagePlan: integration time must be positive");
    }
};

/// Carrier and code NCO/filter state. Phase in cycles, frequency in Hz,
/// code phase in (absolute) chips, code frequency in chips/s.
struct LoopState {
    double carrier_phase = 0.0;
    double carrier_freq = 0.0;
    double pll_acc1 = 0.0;  // Hz/s
    double pll_acc2 = 0.0;  // Hz
    double code_phase = 0.0;
    double code_freq = kCaChipRate;
    double dll_acc = 0.0;   // chips/s
};

/// Telemetry for one coherent integration epoch.
struct EpochOutput {
    double t = 0.0;
    std::complex<double> E, P, L;
    std::complex<double> P_first_half, P_second_half;
    double phase_err = 0.0;    // cycles
    double freq_err = 0.0;     // Hz
    double code_err = 0.0;     // chips
    double est_doppler = 0.0;  // Hz (replica frequency used during the epoch)
    int stage = 0;
};

/// Two-quadrant Costas discriminator, cycles. Insensitive to the NAV bit sign.
inline double pll_discriminator(std::complex<double> P) {
    if (P.real() == 0.0 && P.imag() == 0.0) return 0.0;
    if (P.real() == 0.0) return (P.imag() > 0.0 ? 0.25 : -0.25);
    return std::atan(P.imag() / P.real()) / (2.0 * M_PI);
}

/// Four-quadrant cross/dot frequency discriminator over two half-epoch
/// prompts of the same NAV bit, Hz. Range is +-1/(2*dt).
inline double fll_discriminator(std::complex<double> P1, std::complex<double> P2, double dt) {
    if (dt <= 0.0) throw std::invalid_argument("fll_discriminator: dt must be > 0");
    double cross = P1.real() * P2.imag() - P2.real() * P1.imag();
    double dot = P1.real() * P2.real() + P1.imag() * P2.imag();
    if (cross == 0.0 && dot == 0.0) return 0.0;
    return std::atan2(cross, dot) / (2.0 * M_PI * dt);
}

/// Normalized noncoherent early-minus-late power discriminator, chips.
inline double dll_discriminator(std::complex<double> E, std::complex<double> L) {
    double e = std::abs(E), l = std::abs(L);
    if (e + l == 0.0) return 0.0;
    return 0.5 * (e - l) / (e + l);
}

/// Integrates one epoch of E/P/L correlations against the NCO-driven carrier
/// and code replicas. The early replica leads the prompt by d/2 chips. The
/// prompt is also accumulated over the two epoch halves for the FLL. The
/// carrier replica phase starts exactly at state.carrier_phase.
inline EpochOutput correlate_epoch(const SampleStream& s, const LoopState& state,
                                   std::size_t first_sample, double T, double el_spacing,
                                   const CaCode& code) {
    if (el_spacing <= 0.0 || el_spacing > 1.0)
        throw std::invalid_argument("correlate_epoch: el_spacing must be in (0,1]");
    const std::size_t n = std::size_t(std::llround(T * s.rate));
    if (first_sample + n > s.samples.size())
        throw std::out_of_range("correlate_epoch: stream underrun");

    const double inv_rate = 1.0 / s.rate;
    const double half_d = 0.5 * el_spacing;

    // Carrier replica: incremental rotation, re-anchored each epoch so phase
    // continuity across epochs is exact.
    double ph0 = state.carrier_phase - std::floor(state.carrier_phase);
    double rr = std::cos(-2.0 * M_PI * ph0), ri = std::sin(-2.0 * M_PI * ph0);
    const double ang = -2.0 * M_PI * state.carrier_freq * inv_rate;
    const double sr = std::cos(ang), si = std::sin(ang);

    double cp = state.code_phase;
    const double cstep = state.code_freq * inv_rate;

    double Er = 0, Ei = 0, Pr = 0, Pi = 0, Lr = 0, Li = 0;
    double P1r = 0, P1i = 0, P2r = 0, P2i = 0;
    const std::size_t half_n = n / 2;
    const cfloat* x = s.samples.data() + first_sample;
    const std::int8_t* chips = code.chips.data();

    for (std::size_t i = 0; i < n; ++i) {
        double vr = double(x[i].real()) * rr - double(x[i].imag()) * ri;
        double vi = double(x[i].real()) * ri + double(x[i].imag()) * rr;
        // conj(carrier replica) = rotation by -phase; rr/ri already carry the sign
        long long cip = (long long)std::floor(cp);
        long long cie = (long long)std::floor(cp + half_d);
        long long cil = (long long)std::floor(cp - half_d);
        int ip = int(cip % kCaCodeLength); if (ip < 0) ip += kCaCodeLength;
        int ie = int(cie % kCaCodeLength); if (ie < 0) ie += kCaCodeLength;
        int il = int(cil % kCaCodeLength); if (il < 0) il += kCaCodeLength;
        double cpv = chips[ip], cev = chips[ie], clv = chips[il];
        Pr += vr * cpv; Pi += vi * cpv;
        Er += vr * cev; Ei += vi * cev;
        Lr += vr * clv; Li += vi * clv;
        if (i < half_n) { P1r += vr * cpv; P1i += vi * cpv; }
        else            { P2r += vr * cpv; P2i += vi * cpv; }
        cp += cstep;
        double nrr = rr * sr - ri * si;
        ri = rr * si + ri * sr;
        rr = nrr;
    }

    EpochOutput out;
    out.t = first_sample * inv_rate + s.t0;
    out.E = {Er, Ei};
    out.P = {Pr, Pi};
    out.L = {Lr, Li};
    out.P_first_half = {P1r, P1i};
    out.P_second_half = {P2r, P2i};
    out.est_doppler = state.carrier_freq;
    out.phase_err = pll_discriminator(out.P);
    out.freq_err = fll_discriminator(out.P_first_half, out.P_second_half, 0.5 * T);
    out.code_err = dll_discriminator(out.E, out.L);
    return out;
}

/// FLL-assisted third-order PLL + frequency-aided second-order DLL update.
/// Advances both NCO phases by T at the frequencies that drove the epoch,
/// then computes the commands for the next epoch. Coefficients follow the
/// characteristic-parameter table the bandwidths were taken from.
inline void loop_update(LoopState& state, const EpochOutput& epoch, double bn, double T,
                        double fll_weight = 1.0, double fc = 2e9) {
    if (bn <= 0.0) throw std::invalid_argument("loop_update: bn must be > 0");
    const double w0p = bn / 0.7845;
    const double w0f = bn / 0.53;
    const double w0d = bn / 0.53;
    const double a2 = 1.414, a3 = 1.1, b3 = 2.4;

    // Phase continuity: advance with the frequencies used during the epoch.
    state.carrier_phase += state.carrier_freq * T;
    state.code_phase += state.code_freq * T;

    const double phi = epoch.phase_err;       // cycles
    const double fe = fll_weight * epoch.freq_err;  // Hz
    const double ce = epoch.code_err;    // chips

    state.pll_acc1 += T * (w0p * w0p * w0p * phi + w0f * w0f * fe);
    state.pll_acc2 += T * (state.pll_acc1 + a3 * w0p * w0p * phi + a2 * w0f * fe);
    state.carrier_freq = state.pll_acc2 + b3 * w0p * phi;

    state.dll_acc += T * w0d * w0d * ce;
    state.code_freq = kCaChipRate * (1.0 + state.carrier_freq / fc) + state.dll_acc +
                      a2 * w0d * ce;
}

struct TrackInit {
    double tau0 = 0.0;  // chips
    double f0 = 0.0;    // Hz
};

struct TrackResult {
    std::vector<EpochOutput> epochs;
    LoopState final_state;
    bool lost_lock = false;  // non-finite state encountered
    bool truncated = false;  // stream ended before the plan
};

/// Staged closed-loop tracking: correlate -> discriminate -> filter at the
/// integration period, with bandwidth switches at stage boundaries and filter
/// integrators carried across switches.
inline TrackResult run_tracking(const SampleStream& s, const TrackInit& init,
                                const StagePlan& plan, int prn = 1, double fc = 2e9) {
    plan.validate();
    const double T = plan.integration_time;
    const std::size_t n_per_epoch = std::size_t(std::llround(T * s.rate));
    if (n_per_epoch == 0) throw std::invalid_argument("run_tracking: epoch shorter than one sample");

    TrackResult res;
    LoopState st;
    st.carrier_phase = 0.0;
    st.carrier_freq = init.f0;
    st.pll_acc2 = init.f0;  // frequency integrator carries the initial estimate
    st.code_phase = init.tau0;
    st.code_freq = kCaChipRate * (1.0 + init.f0 / fc);

    double planned = 0.0;
    for (const auto& stg : plan.stages) planned += stg.duration;
    if (plan.stages.back().duration == 0.0) planned = s.duration();
    const std::size_t n_epochs_planned = std::size_t(std::floor(planned / T + 0.5));

    const CaCode c = generate_ca_code(prn);
    res.epochs.reserve(n_epochs_planned);
    for (std::size_t k = 0; k < n_epochs_planned; ++k) {
        std::size_t first = k * n_per_epoch;
        if (first + n_per_epoch > s.samples.size()) {
            res.truncated = true;
            break;
        }
        double t = double(k) * T;
        EpochOutput ep = correlate_epoch(s, st, first, T, plan.el_spacing, c);
        ep.stage = plan.stage_at(t);
        if (!std::isfinite(ep.phase_err) || !std::isfinite(ep.freq_err) ||
            !std::isfinite(ep.code_err)) {
            res.lost_lock = true;
            res.epochs.push_back(ep);
            break;
        }
        loop_update(st, ep, plan.bn_at(t), T, plan.fll_weight_at(t), fc);
        res.epochs.push_back(ep);
    }
    res.final_state = st;
    return res;
}

}  // namespace jcap
