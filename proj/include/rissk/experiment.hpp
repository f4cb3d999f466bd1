#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "rissk/params.hpp"

namespace rissk {

inline constexpr const char* kToolVersion = "0.1.0";

/// Sim points whose analytic value falls below this are emitted without a value.
inline constexpr double kDeepTailThreshold = 1e-8;

struct CurvePoint {
    double snr_db = 0.0;
    std::optional<double> value;  // absent for deep-tail sim points
    double std_error = 0.0;
    std::string method;
};

struct CurveSeries {
    std::string label;
    std::vector<CurvePoint> points;
};

enum class Metric { abep, outage, throughput };

std::string metric_name(Metric m);
Metric parse_metric(const std::string& name);

/// Partial SystemParams; unset fields keep the preset's value.
struct ParamOverrides {
    std::optional<int> n_elements;
    std::optional<int> n_tx;
    std::optional<double> li_level;
    std::optional<EstimationErrorMode> err_mode;

    void apply(SystemParams& p) const;
    bool empty() const;
};

struct ExperimentConfig {
    std::optional<std::string> preset;
    Metric metric = Metric::abep;          // ignored for presets
    std::optional<double> rate_bps;        // outage target rate; default 3
    ParamOverrides overrides;              // without a preset: n_elements, li_level, err_mode required
    std::vector<double> snr_grid_db;       // empty: preset default
    std::optional<std::int64_t> trials;
    std::optional<std::int64_t> min_events;
    std::uint64_t master_seed = 20240607;
    std::optional<std::set<std::string>> methods;  // subset of {sim, exact, gcq, upper, asymptotic}
    int gcq_order = 20;
    int workers = 0;
    std::string label = "custom";          // series label for free-form runs

    /// Throws ConfigError.
    void validate() const;
};

struct ExperimentOutput {
    std::vector<CurveSeries> series;
    nlohmann::json manifest;
};

/// Names of every figure preset.
const std::vector<std::string>& preset_names();

/// Throws ConfigError for invalid configs and NumericalError when a
/// quadrature fails.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Parses an ExperimentConfig from JSON (same field names as the CLI flags,
/// with '-' replaced by '_'). Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Parses "perfect", "fixed:<var>" or "variable:<T>".
EstimationErrorMode parse_error_mode(const std::string& text);
std::string format_error_mode(const EstimationErrorMode& mode);

/// Parses "a:b:step" (inclusive) or a comma-separated list; must be strictly increasing.
std::vector<double> parse_grid(const std::string& text);

nlohmann::json params_to_json(const SystemParams& p);

/// CSV with header snr_db,value,std_error,method,label; numbers in %.17e.
void write_csv(const std::vector<CurveSeries>& series, std::ostream& os);
void emit_csv(const std::vector<CurveSeries>& series, const std::filesystem::path& path);
void emit_csv(const CurveSeries& series, const std::filesystem::path& path);
std::vector<CurveSeries> read_csv(std::istream& is);
std::vector<CurveSeries> read_csv(const std::filesystem::path& path);

}  // namespace rissk
