// jcap: GNSS-over-5G downlink tracking simulator CLI.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "jcap/config.hpp"
#include "jcap/trial.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct CommonOpts {
    CLI::Option* seed = nullptr;
    CLI::Option* workers = nullptr;
    CLI::Option* trials = nullptr;
};

CommonOpts add_config_overrides(CLI::App* cmd, jcap::CampaignConfig& cfg,
                                std::string& config_path, std::vector<std::string>& overrides) {
    CommonOpts o;
    cmd->add_option("--config", config_path, "key=value config file");
    cmd->add_option("--set", overrides, "config override, key=value (repeatable)");
    o.seed = cmd->add_option("--seed", cfg.master_seed, "master seed");
    o.workers = cmd->add_option("--workers", cfg.workers, "worker thread count");
    o.trials = cmd->add_option("--trials", cfg.n_trials, "MC trials per grid cell");
    return o;
}

jcap::CampaignConfig resolve_config(const std::string& config_path,
                                    const std::vector<std::string>& overrides,
                                    const jcap::CampaignConfig& cli_cfg, const CommonOpts& o) {
    jcap::CampaignConfig cfg =
        config_path.empty() ? jcap::CampaignConfig{} : jcap::load_config(config_path);
    // Explicit CLI flags win over the file.
    if (o.seed->count()) cfg.master_seed = cli_cfg.master_seed;
    if (o.workers->count()) cfg.workers = cli_cfg.workers;
    if (o.trials->count()) cfg.n_trials = cli_cfg.n_trials;
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set expects key=value");
        jcap::apply_config_key(cfg, ov.substr(0, eq), ov.substr(eq + 1));
    }
    return cfg;
}

void write_manifest(const jcap::CampaignConfig& cfg, const std::string& mode,
                    const fs::path& out_dir) {
    json m;
    m["tool"] = "jcap";
    m["version"] = kVersion;
    m["mode"] = mode;
    m["master_seed"] = cfg.master_seed;
    m["config"] = jcap::dump_config(cfg);
    std::ofstream f(out_dir / "manifest.json");
    f << m.dump(2) << "\n";
}

int cmd_campaign(const jcap::CampaignConfig& cfg, const std::string& out) {
    fs::create_directories(out);
    write_manifest(cfg, "campaign", out);
    auto res = jcap::run_campaign(cfg);
    jcap::write_trials_csv(res.records, (fs::path(out) / "trials.csv").string());
    jcap::write_aggregate_csv(res.aggregates, (fs::path(out) / "aggregate.csv").string());
    std::printf("campaign: %zu trials, %zu cells -> %s\n", res.records.size(),
                res.aggregates.size(), out.c_str());
    return 0;
}

int cmd_sweep(const jcap::CampaignConfig& cfg, const std::string& out) {
    fs::create_directories(out);
    write_manifest(cfg, "sweep-rate", out);
    auto res = jcap::sweep_doppler_rate(cfg);
    jcap::write_trials_csv(res.records, (fs::path(out) / "sweep_trials.csv").string());
    jcap::write_aggregate_csv(res.aggregates, (fs::path(out) / "sweep.csv").string(), true);
    std::printf("sweep-rate: %zu trials, %zu points -> %s\n", res.records.size(),
                res.aggregates.size(), out.c_str());
    return 0;
}

int cmd_doppler_stats(const jcap::CampaignConfig& cfg, const std::string& out, int n_bins) {
    fs::create_directories(out);
    write_manifest(cfg, "doppler-stats", out);
    jcap::OrbitConfig oc;
    oc.fc = cfg.trial.fc;
    auto stats = jcap::collect_doppler_stats(oc, cfg.orbit_samples,
                                             jcap::derive_seed(cfg.master_seed, "orbit"));
    jcap::write_histogram_csv(stats.rates, n_bins, (fs::path(out) / "doppler_rate_hist.csv").string());
    jcap::write_histogram_csv(stats.accels, n_bins, (fs::path(out) / "doppler_accel_hist.csv").string());
    std::FILE* f = std::fopen((fs::path(out) / "quantiles.csv").string().c_str(), "w");
    std::fprintf(f, "metric,q33,q66,q99\n");
    std::fprintf(f, "rate_hzps,%.10g,%.10g,%.10g\n", stats.table.rate_q33, stats.table.rate_q66,
                 stats.table.rate_q99);
    std::fprintf(f, "accel_hzps2,%.10g,%.10g,%.10g\n", stats.table.acc_q33, stats.table.acc_q66,
                 stats.table.acc_q99);
    std::fclose(f);
    std::printf("doppler-stats: %d samples -> %s\n", cfg.orbit_samples, out.c_str());
    std::printf("rate  q33/q66/q99: %.2f / %.2f / %.2f Hz/s\n", stats.table.rate_q33,
                stats.table.rate_q66, stats.table.rate_q99);
    std::printf("accel q33/q66/q99: %.3f / %.3f / %.3f Hz/s^2\n", stats.table.acc_q33,
                stats.table.acc_q66, stats.table.acc_q99);
    return 0;
}

int cmd_trial(const jcap::CampaignConfig& cfg, double sir, double sinr, const std::string& cls,
              double fdot_override, bool have_fdot, const std::string& telemetry_path) {
    std::uint64_t seed = jcap::derive_seed(cfg.master_seed, "trial", 0, 0);
    jcap::Rng prof_rng(jcap::derive_seed(seed, "profile"));
    jcap::DopplerProfile profile =
        jcap::draw_profile(jcap::parse_class(cls), cfg.thresholds, prof_rng, cfg.trial.f0_range);
    if (have_fdot) profile.fdot = fdot_override;

    std::vector<jcap::EpochOutput> epochs;
    auto outcome = jcap::run_trial(cfg.trial, sir, sinr, profile, seed, &epochs);

    if (!telemetry_path.empty()) {
        std::FILE* f = std::fopen(telemetry_path.c_str(), "w");
        if (!f) throw std::runtime_error("cannot open " + telemetry_path);
        std::fprintf(f, "t,I_P,Q_P,est_doppler,code_err,stage\n");
        for (const auto& e : epochs)
            std::fprintf(f, "%.6f,%.10g,%.10g,%.10g,%.10g,%d\n", e.t, e.P.real(), e.P.imag(),
                         e.est_doppler, e.code_err, e.stage);
        std::fclose(f);
    }
    std::printf("trial: sir=%g dB sinr=%g dB f0=%.1f Hz fdot=%.2f Hz/s fddot=%.2f Hz/s^2\n", sir,
                sinr, profile.f0, profile.fdot, profile.fddot);
    std::printf("ber=%.6f errors=%d/%d subframes=%d/%d locked=%d doppler_err=%.2f Hz\n",
                outcome.score.ber, outcome.score.bit_errors, outcome.score.bits_compared,
                outcome.score.subframes_decoded, outcome.score.subframes_attempted,
                int(outcome.score.locked), outcome.mean_doppler_err);
    return outcome.score.subframes_attempted == outcome.score.subframes_decoded ? 0 : 1;
}

int cmd_export_iq(const jcap::CampaignConfig& cfg, const std::string& kind,
                  const std::string& path, double duration) {
    std::uint64_t seed = jcap::derive_seed(cfg.master_seed, "export", 0, 0);
    if (kind == "gnss") {
        int bits = int(std::ceil(duration * jcap::kNavBitRate)) + 1;
        int n_sub = (bits + jcap::kSubframeBits - 1) / jcap::kSubframeBits;
        auto nav = jcap::build_nav_message(seed, n_sub);
        auto s = jcap::sample_l1ca(cfg.trial.prn, nav, cfg.trial.gnss_rate, duration);
        jcap::write_iq(s, path, {"signal gnss_l1ca", "prn " + std::to_string(cfg.trial.prn),
                                 "seed " + std::to_string(seed)});
    } else if (kind == "5g") {
        auto s = jcap::generate_ofdm_downlink(cfg.trial.ofdm, duration, seed);
        jcap::write_iq(s, path, {"signal ofdm_downlink", "seed " + std::to_string(seed)});
    } else {
        throw CLI::ValidationError("--kind must be gnss or 5g");
    }
    std::printf("export-iq: %s -> %s (+.hdr)\n", kind.c_str(), path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GNSS-over-5G downlink tracking Monte Carlo simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    jcap::CampaignConfig cli_cfg;
    std::string config_path, out_dir = "out", cls = "low", telemetry_path, kind = "gnss",
                iq_path = "signal.iq";
    std::vector<std::string> overrides;
    double sir = -10.0, sinr = -12.0, fdot_override = 0.0, duration = 0.1;
    int n_bins = 80;

    auto* campaign = app.add_subcommand("campaign", "run the SIR x SINR x class grid");
    CommonOpts campaign_o = add_config_overrides(campaign, cli_cfg, config_path, overrides);
    campaign->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep-rate", "Doppler-rate lock-limit sweep");
    CommonOpts sweep_o = add_config_overrides(sweep, cli_cfg, config_path, overrides);
    sweep->add_option("--out", out_dir, "output directory");

    auto* dstats = app.add_subcommand("doppler-stats", "orbit propagation Doppler statistics");
    CommonOpts dstats_o = add_config_overrides(dstats, cli_cfg, config_path, overrides);
    dstats->add_option("--out", out_dir, "output directory");
    dstats->add_option("--bins", n_bins, "histogram bins");

    auto* trial = app.add_subcommand("trial", "single-trial debug run");
    CommonOpts trial_o = add_config_overrides(trial, cli_cfg, config_path, overrides);
    trial->add_option("--sir", sir, "SIR, dB");
    trial->add_option("--sinr", sinr, "SINR, dB");
    trial->add_option("--class", cls, "dynamic class: low|medium|high");
    auto* fdopt = trial->add_option("--fdot", fdot_override, "override Doppler rate, Hz/s");
    trial->add_option("--telemetry", telemetry_path, "per-epoch telemetry CSV path");

    auto* exp = app.add_subcommand("export-iq", "write a generated stream as float32 I/Q");
    CommonOpts exp_o = add_config_overrides(exp, cli_cfg, config_path, overrides);
    exp->add_option("--kind", kind, "gnss|5g");
    exp->add_option("--path", iq_path, "output file");
    exp->add_option("--duration", duration, "seconds");

    CLI11_PARSE(app, argc, argv);

    try {
        const CommonOpts& o = campaign->parsed()  ? campaign_o
                              : sweep->parsed()   ? sweep_o
                              : dstats->parsed()  ? dstats_o
                              : trial->parsed()   ? trial_o
                                                  : exp_o;
        jcap::CampaignConfig cfg = resolve_config(config_path, overrides, cli_cfg, o);
        if (campaign->parsed()) return cmd_campaign(cfg, out_dir);
        if (sweep->parsed()) return cmd_sweep(cfg, out_dir);
        if (dstats->parsed()) return cmd_doppler_stats(cfg, out_dir, n_bins);
        if (trial->parsed())
            return cmd_trial(cfg, sir, sinr, cls, fdot_override, fdopt->count() > 0,
                             telemetry_path);
        if (exp->parsed()) return cmd_export_iq(cfg, kind, iq_path, duration);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
