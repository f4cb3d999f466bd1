#include "rissk/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <map>
#include <sstream>

#include "rissk/analytic.hpp"
#include "rissk/errors.hpp"
#include "rissk/montecarlo.hpp"
#include "rissk/random.hpp"

namespace rissk {

using nlohmann::json;

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::abep: return "abep";
        case Metric::outage: return "outage";
        case Metric::throughput: return "throughput";
    }
    return "abep";
}

Metric parse_metric(const std::string& name) {
    if (name == "abep") return Metric::abep;
    if (name == "outage") return Metric::outage;
    if (name == "throughput") return Metric::throughput;
    throw ConfigError("unknown metric '" + name + "'");
}

void ParamOverrides::apply(SystemParams& p) const {
    if (n_elements) p.n_elements = *n_elements;
    if (n_tx) p.n_tx = *n_tx;
    if (li_level) p.li_level = *li_level;
    if (err_mode) p.err_mode = *err_mode;
}

bool ParamOverrides::empty() const { return !n_elements && !n_tx && !li_level && !err_mode; }

namespace {

enum class PresetKind { curves, gcq_values, gcq_diffs };

constexpr int kMaxGcqOrder = 10;
constexpr std::int64_t kPresetTrials = 1000000;
constexpr std::int64_t kPresetMinEvents = 20000;
constexpr std::uint64_t kPointsPerSeries = 1 << 16;

struct SeriesSpec {
    std::string label;
    SystemParams params;
    std::vector<std::string> methods;
    double rate_bps = 3.0;
    bool hd = false;  // params are the FD link; the HD baseline is derived after overrides
};

struct Preset {
    std::string name;
    std::string title;
    PresetKind kind = PresetKind::curves;
    Metric metric = Metric::abep;
    std::vector<double> grid;
    std::vector<SeriesSpec> series;
    json stated = json::object();
    json assumed = json::object();
};

std::vector<double> range(double lo, double hi, double step) {
    std::vector<double> g;
    const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) g.push_back(lo + i * step);
    return g;
}

SystemParams make(int n, double k2, EstimationErrorMode mode, int nt = 2) {
    SystemParams p;
    p.n_elements = n;
    p.n_tx = nt;
    p.li_level = k2;
    p.err_mode = mode;
    return p;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

const std::string kHdNote = "convention: equal-spectral-efficiency baseline";

Preset gcq_preset(const std::string& name, PresetKind kind) {
    Preset p;
    p.name = name;
    p.kind = kind;
    p.title = kind == PresetKind::gcq_diffs ? "GCQ error term: |ABEP(Q) - ABEP(Q-1)| versus Q"
                                            : "GCQ convergence: ABEP versus Q";
    p.grid = {-25.0, -23.0, -21.0};
    const SystemParams base = make(100, 0.1, FixedError{0.1});
    for (double snr : p.grid) p.series.push_back({"SNR=" + fmt(snr) + " dB", base.with_snr_db(snr), {}});
    p.stated = {{"n_elements", 100}, {"li_level", 0.1}, {"err_mode", "fixed:0.1"}, {"snr_db", p.grid},
                {"orders", kind == PresetKind::gcq_diffs ? "2..10" : "1..10"}};
    p.assumed = {{"n_tx", 2}};
    return p;
}

Preset build_preset(const std::string& name) {
    if (name == "fig3a") return gcq_preset(name, PresetKind::gcq_diffs);
    if (name == "fig3b") return gcq_preset(name, PresetKind::gcq_values);

    Preset p;
    p.name = name;
    if (name == "fig4a") {
        p.title = "ABEP versus SNR for several N, simulation against CLT analysis";
        p.grid = range(-40, -10, 2);
        for (int n : {9, 25, 100, 256})
            p.series.push_back({"N=" + std::to_string(n), make(n, 0.1, FixedError{0.1}), {"sim", "exact"}});
        p.stated = {{"li_level", 0.1}, {"err_mode", "fixed:0.1"}, {"n_elements_range", "9 to 256"}};
        p.assumed = {{"n_elements", {9, 25, 100, 256}}, {"snr_grid_db", "-40:-10:2"}};
    } else if (name == "fig4b") {
        p.title = "Simulation, exact, upper bound and asymptotic ABEP";
        p.grid = range(-40, 20, 2);
        p.series.push_back({"N=256", make(256, 0.1, FixedError{2.0}), {"sim", "exact", "upper", "asymptotic"}});
        p.stated = {{"n_elements", 256}, {"li_level", 0.1}, {"err_mode", "fixed:2"}};
        p.assumed = {{"snr_grid_db", "-40:20:2"}};
    } else if (name == "fig5a") {
        p.title = "Fixed estimation error, N=25 (simulation)";
        p.grid = range(-30, 10, 2);
        for (double v : {1.0, 0.1, 0.01})
            p.series.push_back({"sigma_e^2=" + fmt(v), make(25, 0.1, FixedError{v}), {"sim"}});
        p.series.push_back({"perfect CSI", make(25, 0.1, PerfectCsi{}), {"sim"}});
        p.stated = {{"n_elements", 25}, {"li_level", 0.1}};
        p.assumed = {{"sigma_e2", {1.0, 0.1, 0.01}}, {"snr_grid_db", "-30:10:2"}};
    } else if (name == "fig5b") {
        p.title = "Fixed estimation error, N=256";
        p.grid = range(-20, 20, 2);
        for (double v : {3.0, 2.0, 1.0})
            p.series.push_back({"sigma_e^2=" + fmt(v), make(256, 0.1, FixedError{v}), {"sim", "exact", "asymptotic"}});
        p.series.push_back({"perfect CSI", make(256, 0.1, PerfectCsi{}), {"sim", "exact"}});
        p.stated = {{"n_elements", 256}, {"li_level", 0.1}, {"sigma_e2", {3.0, 2.0, 1.0}}};
        p.assumed = {{"snr_grid_db", "-20:20:2"}};
    } else if (name == "fig6a") {
        p.title = "Variable estimation error 1/(T rho), N=25 (simulation)";
        p.grid = range(-30, 10, 2);
        for (int t : {1, 10, 100})
            p.series.push_back({"T=" + std::to_string(t), make(25, 0.1, VariableError{t}), {"sim"}});
        p.series.push_back({"perfect CSI", make(25, 0.1, PerfectCsi{}), {"sim"}});
        p.stated = {{"n_elements", 25}, {"li_level", 0.1}, {"err_mode", "variable"}};
        p.assumed = {{"pilots", {1, 10, 100}}, {"snr_grid_db", "-30:10:2"}};
    } else if (name == "fig6b") {
        p.title = "Variable estimation error 1/(T rho), N=256";
        p.grid = range(-40, 0, 2);
        for (int t : {1, 10, 100})
            p.series.push_back({"T=" + std::to_string(t), make(256, 0.1, VariableError{t}), {"sim", "exact"}});
        p.series.push_back({"perfect CSI", make(256, 0.1, PerfectCsi{}), {"sim", "exact"}});
        p.stated = {{"n_elements", 256}, {"li_level", 0.1}, {"err_mode", "variable"}};
        p.assumed = {{"pilots", {1, 10, 100}}, {"snr_grid_db", "-40:0:2"}};
    } else if (name == "fig7a" || name == "fig7b") {
        const int n = name == "fig7a" ? 9 : 16;
        p.title = "Residual loop interference, FD against HD, N=" + std::to_string(n) + " (simulation)";
        p.grid = range(-10, 30, 2);
        for (double k2 : {0.3, 0.1, 0.01})
            p.series.push_back({"FD k^2=" + fmt(k2), make(n, k2, FixedError{0.1}), {"sim"}});
        p.series.push_back({"HD (" + kHdNote + ")", make(n, 0.0, FixedError{0.1}), {"sim"}, 3.0, true});
        p.stated = {{"n_elements", n}, {"err_mode", "fixed:0.1"}};
        p.assumed = {{"li_level", {0.3, 0.1, 0.01}},
                     {"hd", "li_level 0, n_tx squared"},
                     {"snr_grid_db", "-10:30:2"}};
    } else if (name == "fig8a") {
        p.title = "FD against HD with fixed estimation error, N=400";
        p.grid = range(-50, -26, 2);
        const SystemParams fd = make(400, 0.3, FixedError{0.1});
        p.series.push_back({"FD", fd, {"sim", "exact"}});
        p.series.push_back({"HD (" + kHdNote + ")", fd, {"sim", "exact"}, 3.0, true});
        p.series.push_back({"FD perfect CSI", make(400, 0.3, PerfectCsi{}), {"sim", "exact"}});
        p.stated = {{"n_elements", 400}, {"li_level", 0.3}};
        p.assumed = {{"err_mode", "fixed:0.1"},
                     {"hd", "li_level 0, n_tx squared"},
                     {"snr_grid_db", "-50:-26:2"}};
    } else if (name == "fig8b") {
        p.title = "FD against HD with variable estimation error, N=400";
        p.grid = range(-50, 0, 2);
        for (int t : {10, 100}) {
            const SystemParams fd = make(400, 0.3, VariableError{t});
            p.series.push_back({"FD T=" + std::to_string(t), fd, {"sim", "exact"}});
            p.series.push_back({"HD T=" + std::to_string(t) + " (" + kHdNote + ")", fd, {"sim", "exact"}, 3.0, true});
        }
        p.series.push_back({"FD perfect CSI", make(400, 0.3, PerfectCsi{}), {"sim", "exact"}});
        p.stated = {{"n_elements", 400}, {"li_level", 0.3}, {"err_mode", "variable"}};
        p.assumed = {{"pilots", {10, 100}},
                     {"hd", "li_level 0, n_tx squared"},
                     {"snr_grid_db", "-50:0:2"}};
    } else if (name == "fig9") {
        p.title = "Outage probability for N and R";
        p.metric = Metric::outage;
        p.grid = range(-40, -10, 1);
        for (int n : {50, 100})
            for (double r : {3.0, 5.0})
                p.series.push_back({"N=" + std::to_string(n) + ", R=" + fmt(r), make(n, 0.1, FixedError{0.1}),
                                    {"sim", "exact"}, r});
        p.stated = {{"n_elements", {50, 100}}, {"rate_bps", {3, 5}}};
        p.assumed = {{"li_level", 0.1}, {"err_mode", "fixed:0.1"}, {"snr_grid_db", "-40:-10:1"}};
    } else if (name == "fig10a") {
        p.title = "Outage probability with fixed estimation error, N=200, R=3";
        p.metric = Metric::outage;
        p.grid = range(-50, -20, 1);
        for (double v : {1.0, 0.1})
            p.series.push_back({"sigma_e^2=" + fmt(v), make(200, 0.1, FixedError{v}), {"sim", "exact", "asymptotic"}});
        p.series.push_back({"perfect CSI", make(200, 0.1, PerfectCsi{}), {"sim", "exact", "asymptotic"}});
        p.stated = {{"n_elements", 200}, {"rate_bps", 3}, {"err_mode", "fixed"}};
        p.assumed = {{"li_level", 0.1}, {"sigma_e2", {1.0, 0.1}}, {"snr_grid_db", "-50:-20:1"}};
    } else if (name == "fig10b") {
        p.title = "Outage probability with variable estimation error, N=200, R=3";
        p.metric = Metric::outage;
        p.grid = range(-45, 0, 1);
        for (int t : {1, 10})
            p.series.push_back({"T=" + std::to_string(t), make(200, 0.1, VariableError{t}), {"sim", "exact"}});
        p.series.push_back({"perfect CSI", make(200, 0.1, PerfectCsi{}), {"sim", "exact", "asymptotic"}});
        p.stated = {{"n_elements", 200}, {"rate_bps", 3}, {"err_mode", "variable"}};
        p.assumed = {{"li_level", 0.1}, {"pilots", {1, 10}}, {"snr_grid_db", "-45:0:1"}};
    } else if (name == "fig11a") {
        p.title = "Throughput for several N";
        p.metric = Metric::throughput;
        p.grid = range(-40, 0, 2);
        for (int n : {49, 100, 196})
            p.series.push_back({"N=" + std::to_string(n), make(n, 0.1, FixedError{1.0}), {"sim", "exact"}});
        p.stated = {{"n_elements", {49, 100, 196}}, {"err_mode", "fixed:1"}, {"n_tx", 2}};
        p.assumed = {{"li_level", 0.1}, {"snr_grid_db", "-40:0:2"}, {"slot_duration", 1}};
    } else if (name == "fig11b") {
        p.title = "Throughput for several N_t";
        p.metric = Metric::throughput;
        p.grid = range(-40, 0, 2);
        for (int nt : {2, 4})
            p.series.push_back({"N_t=" + std::to_string(nt), make(100, 0.1, FixedError{1.0}, nt), {"sim", "exact"}});
        p.stated = {{"n_elements", 100}, {"err_mode", "fixed:1"}, {"n_tx", {2, 4}}};
        p.assumed = {{"li_level", 0.1}, {"snr_grid_db", "-40:0:2"}, {"slot_duration", 1}};
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    return p;
}

const std::set<std::string> kAllMethods = {"sim", "exact", "gcq", "upper", "asymptotic"};

bool method_allowed(Metric m, const std::string& method) {
    if (!kAllMethods.count(method)) return false;
    if (m == Metric::outage) return method == "sim" || method == "exact" || method == "asymptotic";
    return true;
}

void check_grid(const std::vector<double>& g) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!std::isfinite(g[i])) throw ConfigError("SNR grid contains a non-finite value");
        if (i > 0 && !(g[i] > g[i - 1])) throw ConfigError("SNR grid must be strictly increasing");
    }
}

double analytic_value(Metric metric, const SystemParams& p, const std::string& method, double rate, int order) {
    switch (metric) {
        case Metric::abep: return abep(p, parse_method(method, order));
        case Metric::throughput: return throughput_closed(p, parse_method(method, order));
        case Metric::outage:
            return method == "asymptotic" ? outage_asymptotic(p, rate).value : outage_closed(p, rate).value;
    }
    return 0.0;
}

// Below this many elements the CLT analysis is not trusted to decide which
// points are out of simulation reach.
constexpr int kMinCltElements = 25;

bool deep_tail(const SystemParams& p) {
    return p.n_elements >= kMinCltElements && abep(p, Exact{}) < kDeepTailThreshold;
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

json overrides_to_json(const ParamOverrides& o) {
    json j = json::object();
    if (o.n_elements) j["n_elements"] = *o.n_elements;
    if (o.n_tx) j["n_tx"] = *o.n_tx;
    if (o.li_level) j["li_level"] = *o.li_level;
    if (o.err_mode) j["err_mode"] = format_error_mode(*o.err_mode);
    return j;
}

struct RunContext {
    const ExperimentConfig& cfg;
    std::int64_t trials;
    std::int64_t min_events;
    json sim_log = json::array();

    TrialPlan plan(std::uint64_t seed) const {
        TrialPlan t;
        t.master_seed = seed;
        t.n_trials = trials;
        t.min_events = min_events;
        t.workers = cfg.workers;
        return t;
    }

    void log(const std::string& label, double snr, const EstimateResult& r) {
        sim_log.push_back({{"label", label},
                           {"snr_db", snr},
                           {"trials", r.trials},
                           {"events", r.events},
                           {"seed", r.seed}});
    }
};

CurveSeries run_curves(RunContext& ctx, Metric metric, const SeriesSpec& s, const std::vector<double>& grid,
                       std::uint64_t series_index) {
    CurveSeries out{s.label, {}};
    const int order = ctx.cfg.gcq_order;
    for (const auto& method : s.methods) {
        if (method == "sim") continue;
        for (double snr : grid) {
            const SystemParams p = s.params.with_snr_db(snr);
            out.points.push_back({snr, analytic_value(metric, p, method, s.rate_bps, order), 0.0, method});
        }
    }
    if (std::find(s.methods.begin(), s.methods.end(), "sim") == s.methods.end()) return out;

    const std::uint64_t base = series_index * kPointsPerSeries;
    if (metric == Metric::outage) {
        const std::uint64_t seed = derive_seed(ctx.cfg.master_seed, base);
        const auto res = run_outage_sweep(s.params, grid, {s.rate_bps}, ctx.plan(seed));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& r = res[i][0];
            out.points.push_back({grid[i], r.estimate, r.std_error, "sim"});
            ctx.log(s.label, grid[i], r);
        }
        return out;
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const SystemParams p = s.params.with_snr_db(grid[i]);
        if (deep_tail(p)) {
            out.points.push_back({grid[i], std::nullopt, 0.0, "sim"});
            continue;
        }
        const auto plan = ctx.plan(derive_seed(ctx.cfg.master_seed, base + i + 1));
        if (metric == Metric::abep) {
            const auto r = run_ber(p, plan);
            out.points.push_back({grid[i], r.estimate, r.std_error, "sim"});
            ctx.log(s.label, grid[i], r);
        } else {
            const auto t = run_throughput(p, plan);
            out.points.push_back({grid[i], t.value, t.std_error, "sim"});
            ctx.log(s.label, grid[i], t.ber);
        }
    }
    return out;
}

CurveSeries run_gcq(const Preset& preset, const SeriesSpec& s) {
    CurveSeries out{s.label, {}};
    const double snr = s.params.snr_db;
    std::vector<double> v(kMaxGcqOrder + 1);
    for (int q = 1; q <= kMaxGcqOrder; ++q) v[q] = abep(s.params, Gcq{q});
    if (preset.kind == PresetKind::gcq_values) {
        for (int q = 1; q <= kMaxGcqOrder; ++q) out.points.push_back({snr, v[q], 0.0, "gcq@" + std::to_string(q)});
    } else {
        for (int q = 2; q <= kMaxGcqOrder; ++q)
            out.points.push_back({snr, std::abs(v[q] - v[q - 1]), 0.0, "gcq_diff@" + std::to_string(q)});
    }
    out.points.push_back({snr, abep(s.params, Exact{}), 0.0, "exact"});
    return out;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"fig3a", "fig3b", "fig4a",  "fig4b",  "fig5a",  "fig5b",
                                                   "fig6a", "fig6b", "fig7a",  "fig7b",  "fig8a",  "fig8b",
                                                   "fig9",  "fig10a", "fig10b", "fig11a", "fig11b"};
    return names;
}

void ExperimentConfig::validate() const {
    Metric m = metric;
    if (preset) {
        const auto& names = preset_names();
        if (std::find(names.begin(), names.end(), *preset) == names.end())
            throw ConfigError("unknown preset '" + *preset + "'");
        m = build_preset(*preset).metric;
    } else {
        if (!overrides.n_elements || !overrides.li_level || !overrides.err_mode)
            throw ConfigError("without a preset, n_elements, li_level and err_mode are required");
        if (snr_grid_db.empty()) throw ConfigError("without a preset, an SNR grid is required");
        if (!methods) throw ConfigError("without a preset, methods are required");
    }
    if (methods) {
        if (methods->empty()) throw ConfigError("methods set is empty");
        for (const auto& name : *methods)
            if (!method_allowed(m, name))
                throw ConfigError("method '" + name + "' is not available for metric " + metric_name(m));
    }
    check_grid(snr_grid_db);
    if (trials && *trials < 1) throw ConfigError("trials must be >= 1");
    if (min_events && *min_events < 0) throw ConfigError("min_events must be >= 0");
    if (rate_bps && !(std::isfinite(*rate_bps) && *rate_bps > 0.0)) throw ConfigError("rate_bps must be positive");
    if (gcq_order < 1) throw ConfigError("gcq_order must be >= 1");
    if (workers < 0) throw ConfigError("workers must be >= 0");
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    Preset preset;
    if (cfg.preset) {
        preset = build_preset(*cfg.preset);
    } else {
        preset.name = "custom";
        preset.title = "free-form sweep";
        preset.metric = cfg.metric;
        preset.series.push_back({cfg.label, SystemParams{}, {}});
    }
    if (!cfg.snr_grid_db.empty()) preset.grid = cfg.snr_grid_db;

    // Resolve overrides, methods, and HD derivation per series.
    std::vector<SeriesSpec> series = preset.series;
    if (preset.kind != PresetKind::curves && !cfg.snr_grid_db.empty()) {
        series.clear();
        const SystemParams base = preset.series.front().params;
        for (double snr : preset.grid) series.push_back({"SNR=" + fmt(snr) + " dB", base.with_snr_db(snr), {}});
    }
    for (auto& s : series) {
        cfg.overrides.apply(s.params);
        if (s.hd) s.params = hd_baseline(s.params);
        if (cfg.methods) s.methods.assign(cfg.methods->begin(), cfg.methods->end());
        if (cfg.rate_bps) s.rate_bps = *cfg.rate_bps;
        s.params.validate();
    }

    RunContext ctx{cfg, cfg.trials.value_or(kPresetTrials),
                   cfg.min_events.value_or(cfg.preset ? kPresetMinEvents : 0)};

    ExperimentOutput out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (preset.kind == PresetKind::curves)
            out.series.push_back(run_curves(ctx, preset.metric, series[i], preset.grid, i));
        else
            out.series.push_back(run_gcq(preset, series[i]));
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json& m = out.manifest;
    m["tool"] = "rissk";
    m["version"] = kToolVersion;
    m["created_utc"] = utc_now();
    m["preset"] = preset.name;
    m["title"] = preset.title;
    m["metric"] = metric_name(preset.metric);
    m["snr_grid_db"] = preset.grid;
    m["trials"] = ctx.trials;
    m["min_events"] = ctx.min_events;
    m["master_seed"] = cfg.master_seed;
    m["gcq_order"] = cfg.gcq_order;
    m["workers"] = cfg.workers;
    m["deep_tail_threshold"] = kDeepTailThreshold;
    m["stated"] = preset.stated;
    m["assumed"] = preset.assumed;
    m["overrides"] = overrides_to_json(cfg.overrides);
    json js = json::array();
    for (const auto& s : series) {
        json e = {{"label", s.label}, {"params", params_to_json(s.params)}, {"methods", s.methods}};
        if (preset.metric == Metric::outage) e["rate_bps"] = s.rate_bps;
        if (s.hd) e["hd_convention"] = kHdNote;
        js.push_back(e);
    }
    m["series"] = js;
    m["sim_runs"] = ctx.sim_log;
    m["wall_time_s"] = wall;
    return out;
}

EstimationErrorMode parse_error_mode(const std::string& text) {
    if (text == "perfect") return PerfectCsi{};
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("error mode must be perfect, fixed:<var> or variable:<T>");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    std::size_t used = 0;
    try {
        if (kind == "fixed") {
            const double v = std::stod(arg, &used);
            if (used != arg.size() || !std::isfinite(v) || v < 0.0) throw ConfigError("");
            return FixedError{v};
        }
        if (kind == "variable") {
            const int t = std::stoi(arg, &used);
            if (used != arg.size() || t < 1) throw ConfigError("");
            return VariableError{t};
        }
    } catch (const std::exception&) {
        throw ConfigError("bad error mode argument in '" + text + "'");
    }
    throw ConfigError("unknown error mode '" + kind + "'");
}

std::string format_error_mode(const EstimationErrorMode& mode) {
    if (std::holds_alternative<PerfectCsi>(mode)) return "perfect";
    if (const auto* f = std::get_if<FixedError>(&mode)) return "fixed:" + fmt(f->variance);
    return "variable:" + std::to_string(std::get<VariableError>(mode).pilots);
}

std::vector<double> parse_grid(const std::string& text) {
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + s + "' in grid '" + text + "'");
        }
        if (used != s.size()) throw ConfigError("bad number '" + s + "' in grid '" + text + "'");
        return v;
    };
    std::vector<double> g;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
        if (parts.size() != 3) throw ConfigError("range grid must be lo:hi:step");
        const double lo = num(parts[0]), hi = num(parts[1]), step = num(parts[2]);
        if (!(step > 0.0) || !(hi >= lo)) throw ConfigError("range grid needs hi >= lo and step > 0");
        if ((hi - lo) / step > 1e6) throw ConfigError("range grid has too many points");
        g = range(lo, hi, step);
    } else {
        std::stringstream ss(text);
        for (std::string tok; std::getline(ss, tok, ',');) g.push_back(num(tok));
    }
    if (g.empty()) throw ConfigError("empty SNR grid");
    check_grid(g);
    return g;
}

json params_to_json(const SystemParams& p) {
    return {{"n_elements", p.n_elements},
            {"n_tx", p.n_tx},
            {"li_level", p.li_level},
            {"err_mode", format_error_mode(p.err_mode)},
            {"noise_power", p.noise_power}};
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    static const std::set<std::string> known = {
        "preset", "metric",  "rate_bps", "n_elements", "n_tx",      "li_level", "err_mode", "snr_grid_db",
        "trials", "min_events", "master_seed", "methods", "gcq_order", "workers", "label"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

    ExperimentConfig c;
    try {
        if (j.contains("preset")) c.preset = j.at("preset").get<std::string>();
        if (j.contains("metric")) c.metric = parse_metric(j.at("metric").get<std::string>());
        if (j.contains("rate_bps")) c.rate_bps = j.at("rate_bps").get<double>();
        if (j.contains("n_elements")) c.overrides.n_elements = j.at("n_elements").get<int>();
        if (j.contains("n_tx")) c.overrides.n_tx = j.at("n_tx").get<int>();
        if (j.contains("li_level")) c.overrides.li_level = j.at("li_level").get<double>();
        if (j.contains("err_mode")) c.overrides.err_mode = parse_error_mode(j.at("err_mode").get<std::string>());
        if (j.contains("snr_grid_db")) {
            const auto& g = j.at("snr_grid_db");
            c.snr_grid_db = g.is_string() ? parse_grid(g.get<std::string>()) : g.get<std::vector<double>>();
        }
        if (j.contains("trials")) c.trials = j.at("trials").get<std::int64_t>();
        if (j.contains("min_events")) c.min_events = j.at("min_events").get<std::int64_t>();
        if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
        if (j.contains("methods")) c.methods = j.at("methods").get<std::set<std::string>>();
        if (j.contains("gcq_order")) c.gcq_order = j.at("gcq_order").get<int>();
        if (j.contains("workers")) c.workers = j.at("workers").get<int>();
        if (j.contains("label")) c.label = j.at("label").get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace rissk
