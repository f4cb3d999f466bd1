// rissk: command-line runner for ABEP, outage and throughput sweeps.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rissk/analytic.hpp"
#include "rissk/errors.hpp"
#include "rissk/experiment.hpp"
#include "rissk/montecarlo.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct SweepFlags {
    std::string config;
    int n_elements = 0;
    int n_tx = 0;
    double li_level = 0.0;
    std::string err_mode;
    std::string snr;
    std::string methods;
    double rate = 0.0;
    double trials = 0.0;
    double min_events = 0.0;
    std::uint64_t seed = 0;
    int gcq_order = 0;
    int workers = 0;
    std::string label;
};

struct OutputFlags {
    std::string out_dir;
    std::string name;
    bool to_stdout = false;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string tok; std::getline(ss, tok, sep);)
        if (!tok.empty()) out.push_back(tok);
    return out;
}

std::int64_t as_count(double v, const char* what) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9.0e18)
        throw rissk::ConfigError(std::string(what) + " must be a non-negative integer");
    return static_cast<std::int64_t>(v);
}

void add_sweep_options(CLI::App* app, SweepFlags& f, bool with_rate) {
    app->add_option("--config", f.config, "JSON config file; flags given on the command line take precedence");
    app->add_option("--n-elements,-N", f.n_elements, "RIS elements N");
    app->add_option("--n-tx", f.n_tx, "transmit antennas N_t (power of two)");
    app->add_option("--li-level,-k", f.li_level, "residual loop-interference level k^2");
    app->add_option("--err-mode,-e", f.err_mode, "perfect | fixed:<var> | variable:<T>");
    app->add_option("--snr", f.snr, "SNR grid in dB: lo:hi:step or a,b,c");
    app->add_option("--methods,-m", f.methods, "comma list of sim,exact,gcq,upper,asymptotic");
    if (with_rate) app->add_option("--rate", f.rate, "target rate R in bps (outage)");
    app->add_option("--trials", f.trials, "Monte Carlo trials per point");
    app->add_option("--min-events", f.min_events, "stop a point early once this many events are counted");
    app->add_option("--seed", f.seed, "master seed");
    app->add_option("--gcq-order", f.gcq_order, "GCQ order Q");
    app->add_option("--workers,-j", f.workers, "worker threads (0: all cores)");
    app->add_option("--label", f.label, "series label for free-form runs");
}

void add_output_options(CLI::App* app, OutputFlags& o) {
    app->add_option("--out-dir,-o", o.out_dir, "output directory (default: $RISSK_OUTPUT_DIR or .)");
    app->add_option("--name", o.name, "base name of the CSV and manifest files");
    app->add_flag("--stdout", o.to_stdout, "also print the CSV to stdout");
}

bool given(CLI::App* app, const std::string& opt) { return app->count(opt) > 0; }

json load_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw rissk::ConfigError("cannot read config file " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw rissk::ConfigError("config file " + path + ": " + e.what());
    }
}

// Merges the JSON config with explicitly given flags into one config object.
json sweep_json(CLI::App* app, const SweepFlags& f) {
    json j = f.config.empty() ? json::object() : load_json(f.config);
    if (given(app, "--n-elements")) j["n_elements"] = f.n_elements;
    if (given(app, "--n-tx")) j["n_tx"] = f.n_tx;
    if (given(app, "--li-level")) j["li_level"] = f.li_level;
    if (given(app, "--err-mode")) j["err_mode"] = f.err_mode;
    if (given(app, "--snr")) j["snr_grid_db"] = f.snr;
    if (given(app, "--methods")) j["methods"] = split(f.methods, ',');
    if (app->get_option_no_throw("--rate") && given(app, "--rate")) j["rate_bps"] = f.rate;
    if (given(app, "--trials")) j["trials"] = as_count(f.trials, "--trials");
    if (given(app, "--min-events")) j["min_events"] = as_count(f.min_events, "--min-events");
    if (given(app, "--seed")) j["master_seed"] = f.seed;
    if (given(app, "--gcq-order")) j["gcq_order"] = f.gcq_order;
    if (given(app, "--workers")) j["workers"] = f.workers;
    if (given(app, "--label")) j["label"] = f.label;
    return j;
}

fs::path output_dir(const OutputFlags& o) {
    if (!o.out_dir.empty()) return o.out_dir;
    if (const char* env = std::getenv("RISSK_OUTPUT_DIR"); env && *env) return env;
    return ".";
}

void write_outputs(const rissk::ExperimentOutput& out, const OutputFlags& o, const std::string& default_name,
                   const json& command) {
    const fs::path dir = output_dir(o);
    fs::create_directories(dir);
    const std::string name = o.name.empty() ? default_name : o.name;
    const fs::path csv = dir / (name + ".csv");
    const fs::path manifest = dir / (name + ".manifest.json");
    rissk::emit_csv(out.series, csv);
    json m = out.manifest;
    m["command"] = command;
    m["csv"] = csv.filename().string();
    std::ofstream(manifest) << m.dump(2) << '\n';
    if (o.to_stdout) rissk::write_csv(out.series, std::cout);
    std::cerr << "wrote " << csv.string() << " and " << manifest.string() << '\n';
}

json argv_json(int argc, char** argv) {
    json a = json::array();
    for (int i = 0; i < argc; ++i) a.push_back(argv[i]);
    return a;
}

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f%%", 100.0 * v);
    return buf;
}

void print_audit(const rissk::MomentAudit& a) {
    auto row = [](const char* name, const rissk::MomentLine& l) {
        std::printf("%-14s %14.6f %14.6f %10s\n", name, l.empirical, l.theoretical, pct(l.relative_error).c_str());
    };
    std::printf("N=%d samples=%lld\n", a.n_elements, static_cast<long long>(a.samples));
    std::printf("%-14s %14s %14s %10s\n", "quantity", "empirical", "theory", "rel.err");
    row("chi mean", a.chi_mean);
    row("chi var", a.chi_var);
    row("u mean", a.u_mean);
    row("u var", a.u_var);
    row("a*b mean", a.product_mean);
    row("a*b var", a.product_var);
    std::printf("%-14s %14.6f %14.6f %10s\n", "phasor |mean|", a.phasor_mean.empirical, 0.0, "abs");
    row("phasor var", a.phasor_var);
    std::printf("Im(u) var %.6f\nKS distance of chi to its CLT Gaussian: %.5f (%s)\n", a.u_imag_var,
                a.chi_ks_distance, a.gaussian_fit_ok ? "ok" : "Gaussian model flagged");
}

json audit_json(const rissk::MomentAudit& a) {
    auto line = [](const rissk::MomentLine& l) {
        return json{{"empirical", l.empirical}, {"theoretical", l.theoretical}, {"relative_error", l.relative_error}};
    };
    return {{"n_elements", a.n_elements},
            {"samples", a.samples},
            {"chi_mean", line(a.chi_mean)},
            {"chi_var", line(a.chi_var)},
            {"u_mean", line(a.u_mean)},
            {"u_var", line(a.u_var)},
            {"product_mean", line(a.product_mean)},
            {"product_var", line(a.product_var)},
            {"phasor_mean", line(a.phasor_mean)},
            {"phasor_var", line(a.phasor_var)},
            {"u_imag_var", a.u_imag_var},
            {"chi_ks_distance", a.chi_ks_distance},
            {"ks_threshold", rissk::kGaussianFitThreshold},
            {"gaussian_fit_ok", a.gaussian_fit_ok}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RIS-assisted full-duplex SSK link laboratory"};
    app.require_subcommand(1);
    app.set_version_flag("--version", rissk::kToolVersion);

    struct Sweep {
        CLI::App* app;
        rissk::Metric metric;
        SweepFlags flags;
        OutputFlags out;
    };
    std::vector<std::unique_ptr<Sweep>> sweeps;
    for (auto [name, metric, help] : {std::tuple{"abep", rissk::Metric::abep, "ABEP versus SNR"},
                                      std::tuple{"outage", rissk::Metric::outage, "outage probability versus SNR"},
                                      std::tuple{"throughput", rissk::Metric::throughput, "throughput versus SNR"}}) {
        auto s = std::make_unique<Sweep>();
        s->app = app.add_subcommand(name, help);
        s->metric = metric;
        add_sweep_options(s->app, s->flags, metric == rissk::Metric::outage);
        add_output_options(s->app, s->out);
        sweeps.push_back(std::move(s));
    }

    std::string preset;
    SweepFlags fig_flags;
    OutputFlags fig_out;
    bool list_presets = false;
    auto* fig = app.add_subcommand("figure", "run a figure preset");
    fig->add_option("preset", preset, "preset name");
    fig->add_flag("--list", list_presets, "list preset names");
    add_sweep_options(fig, fig_flags, true);
    add_output_options(fig, fig_out);

    int audit_n = 64;
    double audit_samples = 1e6;
    std::uint64_t audit_seed = 1;
    int audit_workers = 0;
    OutputFlags audit_out;
    auto* audit = app.add_subcommand("audit-moments", "empirical against CLT moments of the cascade gains");
    audit->add_option("--n-elements,-N", audit_n, "RIS elements N");
    audit->add_option("--samples", audit_samples, "number of realizations (>= 1e4)");
    audit->add_option("--seed", audit_seed, "seed");
    audit->add_option("--workers,-j", audit_workers, "worker threads");
    add_output_options(audit, audit_out);

    int gcq_n = 100;
    double gcq_k2 = 0.1;
    std::string gcq_err = "fixed:0.1";
    std::string gcq_snr = "-25,-23,-21";
    int gcq_max = 20;
    OutputFlags gcq_out;
    auto* gcq = app.add_subcommand("verify-gcq", "GCQ order sweep against adaptive quadrature");
    gcq->add_option("--n-elements,-N", gcq_n, "RIS elements N");
    gcq->add_option("--li-level,-k", gcq_k2, "residual loop-interference level k^2");
    gcq->add_option("--err-mode,-e", gcq_err, "perfect | fixed:<var> | variable:<T>");
    gcq->add_option("--snr", gcq_snr, "SNR grid in dB");
    gcq->add_option("--max-order", gcq_max, "largest GCQ order")->check(CLI::Range(1, 10000));
    add_output_options(gcq, gcq_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const json command = argv_json(argc, argv);
    try {
        for (auto& s : sweeps) {
            if (!s->app->parsed()) continue;
            json j = sweep_json(s->app, s->flags);
            if (j.contains("preset")) throw rissk::ConfigError("use 'figure <preset>' to run presets");
            j["metric"] = rissk::metric_name(s->metric);
            if (!j.contains("methods")) j["methods"] = {"exact"};
            const auto cfg = rissk::config_from_json(j);
            write_outputs(rissk::run_experiment(cfg), s->out, rissk::metric_name(s->metric), command);
            return 0;
        }
        if (fig->parsed()) {
            if (list_presets) {
                for (const auto& n : rissk::preset_names()) std::cout << n << '\n';
                return 0;
            }
            json j = sweep_json(fig, fig_flags);
            if (!preset.empty()) j["preset"] = preset;
            if (!j.contains("preset")) throw rissk::ConfigError("figure needs a preset name");
            const auto cfg = rissk::config_from_json(j);
            write_outputs(rissk::run_experiment(cfg), fig_out, *cfg.preset, command);
            return 0;
        }
        if (audit->parsed()) {
            const auto result = rissk::moment_audit(audit_n, as_count(audit_samples, "--samples"), audit_seed,
                                                    audit_workers);
            print_audit(result);
            const fs::path dir = output_dir(audit_out);
            fs::create_directories(dir);
            const fs::path path = dir / ((audit_out.name.empty() ? "audit-moments" : audit_out.name) + ".json");
            json m = {{"tool", "rissk"},
                      {"version", rissk::kToolVersion},
                      {"command", command},
                      {"seed", audit_seed},
                      {"audit", audit_json(result)}};
            std::ofstream(path) << m.dump(2) << '\n';
            if (audit_out.to_stdout) std::cout << m.dump(2) << '\n';
            std::cerr << "wrote " << path.string() << '\n';
            return 0;
        }
        if (gcq->parsed()) {
            rissk::SystemParams base;
            base.n_elements = gcq_n;
            base.li_level = gcq_k2;
            base.err_mode = rissk::parse_error_mode(gcq_err);
            base.validate();
            rissk::ExperimentOutput out;
            json worst = json::array();
            std::printf("%8s %6s %16s %12s %12s\n", "snr_db", "Q", "abep", "|Q - exact|", "|Q - (Q-1)|");
            for (double snr : rissk::parse_grid(gcq_snr)) {
                const auto p = base.with_snr_db(snr);
                const double exact = rissk::abep(p, rissk::Exact{});
                rissk::CurveSeries s{"SNR=" + std::to_string(snr) + " dB", {}};
                double prev = std::nan("");
                for (int q = 1; q <= gcq_max; ++q) {
                    const double v = rissk::abep(p, rissk::Gcq{q});
                    std::printf("%8.2f %6d %16.9e %12.3e %12.3e\n", snr, q, v, std::abs(v - exact),
                                std::abs(v - prev));
                    s.points.push_back({snr, v, 0.0, "gcq@" + std::to_string(q)});
                    prev = v;
                }
                std::printf("%8.2f %6s %16.9e\n", snr, "exact", exact);
                s.points.push_back({snr, exact, 0.0, "exact"});
                out.series.push_back(std::move(s));
            }
            out.manifest = {{"tool", "rissk"},
                            {"version", rissk::kToolVersion},
                            {"preset", "verify-gcq"},
                            {"params", rissk::params_to_json(base)},
                            {"max_order", gcq_max}};
            write_outputs(out, gcq_out, "verify-gcq", command);
            return 0;
        }
    } catch (const rissk::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (best estimate " << e.best_estimate() << ")\n";
        return kExitNumerical;
    } catch (const rissk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const rissk::DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
