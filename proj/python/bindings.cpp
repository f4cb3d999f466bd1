#include <pybind11/pybind11.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include "rissk/analytic.hpp"
#include "rissk/errors.hpp"
#include "rissk/experiment.hpp"
#include "rissk/montecarlo.hpp"
#include "rissk/specfun.hpp"

namespace py = pybind11;
using namespace rissk;

namespace {

SystemParams make_params(int n_elements, int n_tx, double snr_db, double li_level, const std::string& err_mode,
                         double noise_power) {
    SystemParams p;
    p.n_elements = n_elements;
    p.n_tx = n_tx;
    p.snr_db = snr_db;
    p.li_level = li_level;
    p.err_mode = parse_error_mode(err_mode);
    p.noise_power = noise_power;
    p.validate();
    return p;
}

TrialPlan make_plan(std::uint64_t seed, std::int64_t trials, std::int64_t min_events, int workers) {
    TrialPlan t;
    t.master_seed = seed;
    t.n_trials = trials;
    t.min_events = min_events;
    t.workers = workers;
    return t;
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& o) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(rissk, m) {
    m.doc() = "RIS-assisted full-duplex space shift keying: analysis and simulation";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init(&make_params), py::arg("n_elements") = 64, py::arg("n_tx") = 2, py::arg("snr_db") = 0.0,
             py::arg("li_level") = 0.0, py::arg("err_mode") = "perfect", py::arg("noise_power") = 1.0)
        .def_readwrite("n_elements", &SystemParams::n_elements)
        .def_readwrite("n_tx", &SystemParams::n_tx)
        .def_readwrite("snr_db", &SystemParams::snr_db)
        .def_readwrite("li_level", &SystemParams::li_level)
        .def_readwrite("noise_power", &SystemParams::noise_power)
        .def_property(
            "err_mode", [](const SystemParams& p) { return format_error_mode(p.err_mode); },
            [](SystemParams& p, const std::string& s) { p.err_mode = parse_error_mode(s); })
        .def("rho", &SystemParams::rho)
        .def("error_variance", &SystemParams::error_variance)
        .def("xi_squared", &SystemParams::xi_squared)
        .def("with_snr_db", &SystemParams::with_snr_db)
        .def("validate", &SystemParams::validate)
        .def("__repr__", [](const SystemParams& p) { return "SystemParams(" + params_to_json(p).dump() + ")"; });

    m.def("q_func", &q_func, py::arg("x"));
    m.def("marcum_q_half", &marcum_q_half, py::arg("a"), py::arg("b"));
    m.def("gcq_integrate", [](const std::function<double(double)>& f, int order) {
        return gcq_integrate(f, GcqRule(order));
    }, py::arg("f"), py::arg("order"));

    m.def("pep_exact", py::overload_cast<const SystemParams&>(&pep_exact), py::arg("params"));
    m.def("pep_gcq", py::overload_cast<const SystemParams&, int>(&pep_gcq), py::arg("params"), py::arg("order"));
    m.def("pep_upper", py::overload_cast<const SystemParams&>(&pep_upper), py::arg("params"));
    m.def("pep_asymptotic", [](const SystemParams& p) { return pep_asymptotic(p).value; }, py::arg("params"));
    m.def("abep", [](const SystemParams& p, const std::string& method, int order) {
        return abep(p, parse_method(method, order));
    }, py::arg("params"), py::arg("method") = "exact", py::arg("gcq_order") = 20);
    m.def("outage_closed", [](const SystemParams& p, double r) { return outage_closed(p, r).value; },
          py::arg("params"), py::arg("rate_bps"));
    m.def("outage_asymptotic", [](const SystemParams& p, double r) { return outage_asymptotic(p, r).value; },
          py::arg("params"), py::arg("rate_bps"));
    m.def("throughput_closed", [](const SystemParams& p, const std::string& method, int order) {
        return throughput_closed(p, parse_method(method, order));
    }, py::arg("params"), py::arg("method") = "exact", py::arg("gcq_order") = 20);
    m.def("hd_baseline", &hd_baseline, py::arg("params"));

    py::class_<EstimateResult>(m, "EstimateResult")
        .def_readonly("trials", &EstimateResult::trials)
        .def_readonly("events", &EstimateResult::events)
        .def_readonly("estimate", &EstimateResult::estimate)
        .def_readonly("std_error", &EstimateResult::std_error)
        .def_readonly("seed", &EstimateResult::seed);

    m.def("run_ber", [](const SystemParams& p, std::int64_t trials, std::uint64_t seed, std::int64_t min_events,
                        int workers) {
        py::gil_scoped_release release;
        return run_ber(p, make_plan(seed, trials, min_events, workers));
    }, py::arg("params"), py::arg("trials"), py::arg("seed") = 1, py::arg("min_events") = 0, py::arg("workers") = 0);
    m.def("run_outage", [](const SystemParams& p, double rate, std::int64_t trials, std::uint64_t seed,
                           int workers) {
        py::gil_scoped_release release;
        return run_outage(p, rate, make_plan(seed, trials, 0, workers));
    }, py::arg("params"), py::arg("rate_bps"), py::arg("trials"), py::arg("seed") = 1, py::arg("workers") = 0);

    m.def("moment_audit", [](int n, std::int64_t samples, std::uint64_t seed, int workers) {
        MomentAudit a;
        {
            py::gil_scoped_release release;
            a = moment_audit(n, samples, seed, workers);
        }
        auto line = [](const MomentLine& l) {
            py::dict d;
            d["empirical"] = l.empirical;
            d["theoretical"] = l.theoretical;
            d["relative_error"] = l.relative_error;
            return d;
        };
        py::dict d;
        d["n_elements"] = a.n_elements;
        d["samples"] = a.samples;
        d["chi_mean"] = line(a.chi_mean);
        d["chi_var"] = line(a.chi_var);
        d["u_mean"] = line(a.u_mean);
        d["u_var"] = line(a.u_var);
        d["product_mean"] = line(a.product_mean);
        d["product_var"] = line(a.product_var);
        d["phasor_mean"] = line(a.phasor_mean);
        d["phasor_var"] = line(a.phasor_var);
        d["u_imag_var"] = a.u_imag_var;
        d["chi_ks_distance"] = a.chi_ks_distance;
        d["gaussian_fit_ok"] = a.gaussian_fit_ok;
        return d;
    }, py::arg("n_elements"), py::arg("samples"), py::arg("seed") = 1, py::arg("workers") = 0);

    m.def("preset_names", &preset_names);

    // Runs an experiment from a dict with the same keys as the JSON config.
    // Returns (rows, manifest) with rows as (snr_db, value, std_error, method, label) tuples.
    m.def("run_experiment", [](const py::object& config) {
        const auto cfg = config_from_json(py_to_json(config));
        ExperimentOutput out;
        {
            py::gil_scoped_release release;
            out = run_experiment(cfg);
        }
        py::list rows;
        for (const auto& s : out.series)
            for (const auto& pt : s.points)
                rows.append(py::make_tuple(pt.snr_db, pt.value ? py::cast(*pt.value) : py::none(), pt.std_error,
                                           pt.method, s.label));
        return py::make_tuple(rows, json_to_py(out.manifest));
    }, py::arg("config"));
}
