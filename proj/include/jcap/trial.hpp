#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "jcap/channel.hpp"
#include "jcap/l1ca.hpp"
#include "jcap/nav.hpp"
#include "jcap/nav_decode.hpp"
#include "jcap/ofdm.hpp"
#include "jcap/orbit.hpp"
#include "jcap/resample.hpp"
#include "jcap/stream.hpp"
#include "jcap/tracking.hpp"

namespace jcap {

/// Per-trial fixed parameters (everything except SIR/SINR/Doppler/seed).
struct TrialConfig {
    int prn = 1;
    double duration = 10.0;       // s, multiple of 1 ms
    double gnss_rate = 4.092e6;   // Sps
    OfdmConfig ofdm{};
    StagePlan plan{};
    bool code_doppler = true;
    double fc = 2e9;
    // First NAV bit transmitted at t = 0. The default puts the first complete
    // subframe boundary at t = 3 s, after the pull-in and coarse stages.
    int start_bit = 150;
    double f0_range = 40e3;  // Hz, uniform draw for the initial Doppler
};

struct TrialOutcome {
    TrialResult score;
    double mean_doppler_err = 0.0;  // Hz, final-stage mean |est - true|
    bool lost_lock = false;
    bool truncated = false;
};

/// Builds the received JCAP stream for one trial: spread NAV at the GNSS
/// rate, OFDM interferer resampled down and combined at rho, carrier Doppler
/// rotation, calibrated AWGN. All sub-seeds derive from (seed, label).
inline SampleStream build_trial_stream(const TrialConfig& tc, const PowerAndNoiseConfig& pn,
                                       const DopplerProfile& profile, std::uint64_t seed,
                                       const NavMessage& nav) {
    const std::size_t n = std::size_t(std::llround(tc.duration * tc.gnss_rate));

    L1caOptions lopt;
    lopt.code_phase0 = 0.0;
    lopt.start_bit = tc.start_bit;
    lopt.code_doppler = tc.code_doppler ? &profile : nullptr;
    lopt.fc = tc.fc;
    SampleStream s = sample_l1ca(tc.prn, nav, tc.gnss_rate, tc.duration, lopt);

    const float a = float(std::sqrt(pn.rho));
    const float b = float(std::sqrt(1.0 - pn.rho));
    for (auto& x : s.samples) x *= a;

    if (b > 0.0f) {
        // Interferer generated subframe-by-subframe and resampled in a
        // streaming fashion to bound memory.
        OfdmGenerator gen(tc.ofdm, derive_seed(seed, "ofdm"));
        RationalResampler rs(tc.ofdm.rate, tc.gnss_rate);
        long long n_sub = std::llround(tc.duration * 1e3);
        std::vector<cfloat> sub, out;
        sub.reserve(std::size_t(tc.ofdm.samples_per_subframe()));
        std::size_t cursor = 0;
        auto mix = [&]() {
            for (const auto& v : out) {
                if (cursor >= n) break;
                s.samples[cursor++] += b * v;
            }
            out.clear();
        };
        for (long long i = 0; i < n_sub; ++i) {
            sub.clear();
            gen.subframe(sub);
            rs.process(sub.data(), sub.size(), out);
            mix();
        }
        rs.flush(out);
        mix();
    }

    apply_doppler_inplace(s, profile);
    add_awgn_inplace(s, pn, derive_seed(seed, "noise"));
    return s;
}

/// Full deterministic trial: generate -> channel -> track -> decode -> score.
inline TrialOutcome run_trial(const TrialConfig& tc, double sir_db, double sinr_db,
                              const DopplerProfile& profile, std::uint64_t seed,
                              std::vector<EpochOutput>* telemetry = nullptr) {
    double subframes = tc.duration * 1e3;
    if (std::abs(subframes - std::round(subframes)) > 1e-9)
        throw std::invalid_argument("run_trial: duration must be a multiple of 1 ms");

    const int total_bits = int(std::llround(tc.duration * kNavBitRate));
    const int n_subframes = (tc.start_bit + total_bits + 1 + kSubframeBits - 1) / kSubframeBits + 1;
    NavMessage nav = build_nav_message(derive_seed(seed, "nav"), n_subframes);

    PowerAndNoiseConfig pn = make_power_noise(sir_db, sinr_db, tc.gnss_rate);
    SampleStream s = build_trial_stream(tc, pn, profile, seed, nav);

    TrackResult tr = run_tracking(s, TrackInit{0.0, profile.f0}, tc.plan, tc.prn, tc.fc);

    std::vector<std::complex<double>> prompts;
    prompts.reserve(tr.epochs.size());
    for (const auto& e : tr.epochs) prompts.push_back(e.P);
    std::vector<std::uint8_t> bits = bits_from_prompts(prompts);

    TrialOutcome out;
    out.lost_lock = tr.lost_lock;
    out.truncated = tr.truncated;
    out.score = score_trial(bits, nav, tc.start_bit);

    // Doppler estimation quality over the final stage.
    const double T = tc.plan.integration_time;
    int n_fine = 0;
    double acc = 0.0;
    int last_stage = int(tc.plan.stages.size()) - 1;
    for (const auto& e : tr.epochs) {
        if (e.stage != last_stage) continue;
        acc += std::abs(e.est_doppler - profile.frequency(e.t + 0.5 * T));
        ++n_fine;
    }
    out.mean_doppler_err = n_fine > 0 ? acc / n_fine : 0.0;

    if (telemetry) *telemetry = std::move(tr.epochs);
    return out;
}

// ---------------------------------------------------------------------------
// Campaign orchestration
// ---------------------------------------------------------------------------

struct CampaignConfig {
    std::vector<double> sir_db_list{-10.0, -20.0, -30.0};
    // SINR expressed as offsets below each SIR, since SINR < SIR always.
    std::vector<double> sinr_offset_db_list{0.5, 2.0, 5.0, 10.0, 15.0};
    std::vector<DynamicClass> classes{DynamicClass::low, DynamicClass::medium,
                                      DynamicClass::high};
    int n_trials = 100;
    std::uint64_t master_seed = 1;
    int workers = 1;
    TrialConfig trial{};
    bool use_table_thresholds = true;  // Table of fixed class thresholds vs fresh estimate
    int orbit_samples = 100000;        // when estimating thresholds
    QuantileTable thresholds = default_doppler_thresholds();

    // Doppler-rate sweep settings.
    double sweep_rate_min = 200.0;  // Hz/s magnitude
    double sweep_rate_max = 250.0;
    double sweep_rate_step = 0.5;
    double sweep_fddot = 1.13;           // Hz/s^2
    double sweep_sinr_offset_db = 2.0;   // SINR = SIR - offset during the sweep
};

struct CampaignRecord {
    double sir_db = 0, sinr_db = 0;
    DynamicClass cls = DynamicClass::low;
    double fdot = 0, fddot = 0, f0 = 0;
    int trial_index = 0;
    std::uint64_t seed = 0;
    TrialOutcome outcome;
};

struct CellAggregate {
    double sir_db = 0, sinr_db = 0;
    DynamicClass cls = DynamicClass::low;
    double fdot = 0;  // only meaningful for sweeps
    int n_trials = 0;
    double mean_ber = 0, se_ber = 0;
    double p_sub = 0, se_psub = 0;
};

namespace detail {

inline void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline CellAggregate aggregate_cell(const CampaignRecord* recs, int n) {
    CellAggregate agg;
    agg.sir_db = recs[0].sir_db;
    agg.sinr_db = recs[0].sinr_db;
    agg.cls = recs[0].cls;
    agg.fdot = recs[0].fdot;
    agg.n_trials = n;
    double sum = 0, sum2 = 0, psum = 0;
    for (int i = 0; i < n; ++i) {
        double b = recs[i].outcome.score.ber;
        sum += b;
        sum2 += b * b;
        const auto& sc = recs[i].outcome.score;
        psum += sc.subframes_attempted > 0
                    ? double(sc.subframes_decoded) / sc.subframes_attempted
                    : 0.0;
    }
    agg.mean_ber = sum / n;
    if (n > 1) {
        double var = (sum2 - sum * sum / n) / (n - 1);
        agg.se_ber = std::sqrt(std::max(0.0, var) / n);
    }
    agg.p_sub = psum / n;
    agg.se_psub = std::sqrt(std::max(0.0, agg.p_sub * (1.0 - agg.p_sub)) / n);
    return agg;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace detail

inline void write_trials_csv(const std::vector<CampaignRecord>& recs, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_trials_csv: cannot open " + path);
    std::fprintf(f,
                 "sir_db,sinr_db,class,fdot_hzps,fddot_hzps2,f0_hz,trial_index,seed,"
                 "ber,bits_compared,subframes_attempted,subframes_decoded,locked,"
                 "mean_est_doppler_error_hz\n");
    for (const auto& r : recs) {
        const auto& sc = r.outcome.score;
        std::fprintf(f, "%s,%s,%s,%s,%s,%s,%d,%llu,%s,%d,%d,%d,%d,%s\n",
                     detail::fmt(r.sir_db).c_str(), detail::fmt(r.sinr_db).c_str(),
                     to_string(r.cls), detail::fmt(r.fdot).c_str(),
                     detail::fmt(r.fddot).c_str(), detail::fmt(r.f0).c_str(), r.trial_index,
                     (unsigned long long)r.seed, detail::fmt(sc.ber).c_str(), sc.bits_compared,
                     sc.subframes_attempted, sc.subframes_decoded, int(sc.locked),
                     detail::fmt(r.outcome.mean_doppler_err).c_str());
    }
    std::fclose(f);
}

inline void write_aggregate_csv(const std::vector<CellAggregate>& aggs, const std::string& path,
                                bool sweep = false) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_aggregate_csv: cannot open " + path);
    if (sweep)
        std::fprintf(f, "sir_db,sinr_db,fdot_hzps,n_trials,mean_ber,se_ber,p_sub,se_psub\n");
    else
        std::fprintf(f, "sir_db,sinr_db,class,n_trials,mean_ber,se_ber,p_sub,se_psub\n");
    for (const auto& a : aggs) {
        if (sweep)
            std::fprintf(f, "%s,%s,%s,%d,%s,%s,%s,%s\n", detail::fmt(a.sir_db).c_str(),
                         detail::fmt(a.sinr_db).c_str(), detail::fmt(a.fdot).c_str(), a.n_trials,
                         detail::fmt(a.mean_ber).c_str(), detail::fmt(a.se_ber).c_str(),
                         detail::fmt(a.p_sub).c_str(), detail::fmt(a.se_psub).c_str());
        else
            std::fprintf(f, "%s,%s,%s,%d,%s,%s,%s,%s\n", detail::fmt(a.sir_db).c_str(),
                         detail::fmt(a.sinr_db).c_str(), to_string(a.cls), a.n_trials,
                         detail::fmt(a.mean_ber).c_str(), detail::fmt(a.se_ber).c_str(),
                         detail::fmt(a.p_sub).c_str(), detail::fmt(a.se_psub).c_str());
    }
    std::fclose(f);
}

struct CampaignResult {
    std::vector<CampaignRecord> records;
    std::vector<CellAggregate> aggregates;
};

/// Runs the SIR x SINR x dynamic-class grid. Trials are independent work
/// units; aggregation is a deterministic fold in trial order.
inline CampaignResult run_campaign(const CampaignConfig& cfg) {
    QuantileTable thresholds = cfg.thresholds;
    if (!cfg.use_table_thresholds) {
        OrbitConfig oc;
        oc.fc = cfg.trial.fc;
        thresholds = estimate_quantiles(oc, cfg.orbit_samples,
                                        derive_seed(cfg.master_seed, "orbit"));
    }

    struct Cell {
        double sir_db, sinr_db;
        DynamicClass cls;
        std::size_t id;
    };
    std::vector<Cell> cells;
    std::size_t cell_id = 0;
    for (double sir : cfg.sir_db_list)
        for (double off : cfg.sinr_offset_db_list)
            for (DynamicClass cls : cfg.classes)
                cells.push_back({sir, sir - off, cls, cell_id++});

    CampaignResult res;
    res.records.resize(cells.size() * std::size_t(cfg.n_trials));

    detail::parallel_for(res.records.size(), cfg.workers, [&](std::size_t i) {
        const Cell& cell = cells[i / std::size_t(cfg.n_trials)];
        int trial = int(i % std::size_t(cfg.n_trials));
        std::uint64_t seed = derive_seed(cfg.master_seed, "trial", cell.id, std::uint64_t(trial));
        Rng prof_rng(derive_seed(seed, "profile"));
        DopplerProfile profile = draw_profile(cell.cls, thresholds, prof_rng,
                                              cfg.trial.f0_range);
        CampaignRecord rec;
        rec.sir_db = cell.sir_db;
        rec.sinr_db = cell.sinr_db;
        rec.cls = cell.cls;
        rec.fdot = profile.fdot;
        rec.fddot = profile.fddot;
        rec.f0 = profile.f0;
        rec.trial_index = trial;
        rec.seed = seed;
        rec.outcome = run_trial(cfg.trial, cell.sir_db, cell.sinr_db, profile, seed);
        res.records[i] = rec;
    });

    for (std::size_t c = 0; c < cells.size(); ++c)
        res.aggregates.push_back(detail::aggregate_cell(
            &res.records[c * std::size_t(cfg.n_trials)], cfg.n_trials));
    return res;
}

/// Doppler-rate lock-limit sweep: for each SIR, P_sub versus |fdot| over
/// [rate_min, rate_max] (applied with negative sign) at fixed fddot, with a
/// zero-rate control point appended.
inline CampaignResult sweep_doppler_rate(const CampaignConfig& cfg) {
    std::vector<double> rates;
    for (double r = cfg.sweep_rate_min; r <= cfg.sweep_rate_max + 1e-9; r += cfg.sweep_rate_step)
        rates.push_back(r);
    rates.push_back(0.0);  // benign-dynamics control

    struct Point {
        double sir_db, rate;
        std::size_t id;
    };
    std::vector<Point> points;
    std::size_t id = 0;
    for (double sir : cfg.sir_db_list)
        for (double r : rates) points.push_back({sir, r, id++});

    CampaignResult res;
    res.records.resize(points.size() * std::size_t(cfg.n_trials));

    detail::parallel_for(res.records.size(), cfg.workers, [&](std::size_t i) {
        const Point& pt = points[i / std::size_t(cfg.n_trials)];
        int trial = int(i % std::size_t(cfg.n_trials));
        std::uint64_t seed = derive_seed(cfg.master_seed, "sweep", pt.id, std::uint64_t(trial));
        Rng prof_rng(derive_seed(seed, "profile"));
        DopplerProfile profile;
        profile.fdot = -pt.rate;
        profile.fddot = cfg.sweep_fddot;
        profile.f0 = prof_rng.uniform(-cfg.trial.f0_range, cfg.trial.f0_range);
        double sinr = pt.sir_db - cfg.sweep_sinr_offset_db;
        CampaignRecord rec;
        rec.sir_db = pt.sir_db;
        rec.sinr_db = sinr;
        rec.cls = DynamicClass::high;
        rec.fdot = profile.fdot;
        rec.fddot = profile.fddot;
        rec.f0 = profile.f0;
        rec.trial_index = trial;
        rec.seed = seed;
        rec.outcome = run_trial(cfg.trial, pt.sir_db, sinr, profile, seed);
        res.records[i] = rec;
    });

    for (std::size_t p = 0; p < points.size(); ++p)
        res.aggregates.push_back(detail::aggregate_cell(
            &res.records[p * std::size_t(cfg.n_trials)], cfg.n_trials));
    return res;
}

}  // namespace jcap
