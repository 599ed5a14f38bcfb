#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "irsa/bench.hpp"
#include "irsa/chest.hpp"
#include "irsa/cli.hpp"
#include "irsa/de.hpp"
#include "irsa/settings.hpp"
#include "irsa/sic.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace irsa;

namespace {

py::list masses(const DegreeDistribution& d) {
    py::list out;
    for (const auto& m : d.masses()) out.append(py::make_tuple(m.degree, m.probability));
    return out;
}

ThetaTable table_from(const std::vector<double>& values) {
    ThetaTable t;
    t.values = values;
    return t;
}

py::dict de_result_dict(const DeResult& r) {
    py::dict d;
    d["load"] = r.load;
    d["cbar"] = r.cbar;
    d["p_infty"] = r.p_infty;
    d["plr"] = r.plr;
    d["throughput"] = r.throughput;
    d["converged"] = r.converged;
    d["iterations"] = r.iterations;
    d["theta_extended"] = r.theta_extended;
    d["monotone"] = r.monotone;
    d["p_trace"] = r.p_trace;
    d["q_trace"] = r.q_trace;
    return d;
}

MmseForm parse_form(const std::string& s) {
    if (s == "auto") return MmseForm::Auto;
    if (s == "pilot") return MmseForm::PilotSpace;
    if (s == "user") return MmseForm::UserSpace;
    throw std::invalid_argument("form must be auto, pilot or user");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "IRSA with massive MIMO: SIC Monte Carlo, channel estimation and density evolution";

    py::enum_<Estimator>(m, "Estimator")
        .value("MSBL", Estimator::MSBL)
        .value("MMSE", Estimator::MMSE)
        .value("LCMMSE", Estimator::LCMMSE)
        .value("PerfectCSI", Estimator::PerfectCSI);
    py::enum_<Combiner>(m, "Combiner").value("MRC", Combiner::MRC).value("ZF", Combiner::ZF).value("RZF", Combiner::RZF);
    py::enum_<ThetaKind>(m, "ThetaKind")
        .value("Theta1", ThetaKind::Theta1)
        .value("Theta2", ThetaKind::Theta2)
        .value("Gamma", ThetaKind::Gamma)
        .value("Normal", ThetaKind::Normal)
        .value("Deterministic", ThetaKind::Deterministic);

    py::class_<SystemConfig>(m, "SystemConfig")
        .def(py::init<>())
        .def_readwrite("num_res", &SystemConfig::num_res)
        .def_readwrite("num_users", &SystemConfig::num_users)
        .def_readwrite("load", &SystemConfig::load)
        .def_readwrite("num_antennas", &SystemConfig::num_antennas)
        .def_readwrite("pilot_len", &SystemConfig::pilot_len)
        .def_readwrite("pilot_power", &SystemConfig::pilot_power)
        .def_readwrite("data_power", &SystemConfig::data_power)
        .def_readwrite("noise_power", &SystemConfig::noise_power)
        .def_readwrite("cell_edge_snr_db", &SystemConfig::cell_edge_snr_db)
        .def_readwrite("fading_variance", &SystemConfig::fading_variance)
        .def_readwrite("path_loss_exponent", &SystemConfig::path_loss_exponent)
        .def_readwrite("power_control_exponent", &SystemConfig::power_control_exponent)
        .def_readwrite("cell_radius", &SystemConfig::cell_radius)
        .def_readwrite("reference_distance", &SystemConfig::reference_distance)
        .def_readwrite("sinr_threshold", &SystemConfig::sinr_threshold)
        .def_readwrite("msbl_prune_threshold", &SystemConfig::msbl_prune_threshold)
        .def_readwrite("msbl_iters", &SystemConfig::msbl_iters)
        .def_readwrite("msbl_tolerance", &SystemConfig::msbl_tolerance)
        .def_readwrite("rzf_regularizer", &SystemConfig::rzf_regularizer)
        .def_readwrite("max_decode_iters", &SystemConfig::max_decode_iters)
        .def_readwrite("estimator", &SystemConfig::estimator)
        .def_readwrite("combiner", &SystemConfig::combiner)
        .def_readwrite("seed", &SystemConfig::seed)
        .def_property(
            "degree", [](const SystemConfig& c) { return masses(c.degree_distribution); },
            [](SystemConfig& c, const std::string& spec) { c.degree_distribution = parse_degree_distribution(spec); },
            "(degree, probability) pairs; assign a string such as 'soliton:27' or 'regular:3'")
        .def("validate", &SystemConfig::validate)
        .def("resolved_num_users", &SystemConfig::resolved_num_users)
        .def("resolved_noise_power", &SystemConfig::resolved_noise_power);

    m.def("load_config", [](const std::string& name) { return load_settings(resolve_config(name)).system; },
          "name_or_path"_a, "Scenario section of a config file or shipped preset.");
    m.def(
        "list_presets",
        []() {
            py::list out;
            for (const auto& p : list_presets())
                out.append(py::dict("name"_a = p.name, "description"_a = p.description, "path"_a = p.path.string()));
            return out;
        });
    m.def("degree_distribution", [](const std::string& spec) { return masses(parse_degree_distribution(spec)); },
          "spec"_a);

    m.def(
        "simulate",
        [](const SystemConfig& cfg, int trials, std::uint64_t seed, std::uint64_t stream, unsigned threads) {
            MonteCarloSummary s;
            {
                py::gil_scoped_release release;
                s = monte_carlo_throughput(cfg, trials, seed, stream, threads);
            }
            return py::dict("trials"_a = s.trials, "throughput"_a = s.throughput_mean,
                            "throughput_ci95"_a = s.throughput_ci95, "plr"_a = s.plr_mean, "plr_ci95"_a = s.plr_ci95,
                            "throughput_samples"_a = s.throughput_samples, "plr_samples"_a = s.plr_samples);
        },
        "config"_a, "trials"_a, "seed"_a = 1, "stream"_a = 0, "threads"_a = 1);

    m.def("compute_rate", &compute_rate, "throughput"_a, "pilot_len"_a, "packet_len"_a, "sinr_threshold"_a);

    m.def("theta_closed_form", &theta_closed_form, "kind"_a, "r"_a, "num_antennas"_a, "snr"_a, "sinr_threshold"_a);
    m.def(
        "theta_table",
        [](ThetaKind kind, int r_max, int n, double snr, double gamma) {
            return closed_form_theta_table(kind, r_max, n, snr, gamma).values;
        },
        "kind"_a, "r_max"_a, "num_antennas"_a, "snr"_a, "sinr_threshold"_a);
    m.def(
        "empirical_theta",
        [](int r_max, int n, double snr, double gamma, int trials, std::uint64_t seed, Estimator est, Combiner comb,
           int pilot_len, unsigned threads) {
            EmpiricalThetaSpec spec;
            spec.r_max = r_max;
            spec.num_antennas = n;
            spec.snr = snr;
            spec.sinr_threshold = gamma;
            spec.trials = trials;
            spec.estimator = est;
            spec.combiner = comb;
            spec.pilot_len = pilot_len;
            spec.threads = threads;
            py::gil_scoped_release release;
            return estimate_theta_empirical(spec, seed).values;
        },
        "r_max"_a, "num_antennas"_a, "snr"_a, "sinr_threshold"_a, "trials"_a = 10000, "seed"_a = 1,
        "estimator"_a = Estimator::PerfectCSI, "combiner"_a = Combiner::MRC, "pilot_len"_a = 10, "threads"_a = 1);

    m.def(
        "de_fixed_point",
        [](double load, const std::string& degree, const std::vector<double>& theta) {
            return de_result_dict(de_fixed_point(load, parse_degree_distribution(degree), table_from(theta)));
        },
        "load"_a, "degree"_a, "theta"_a);
    m.def(
        "inflection_load",
        [](const std::string& degree, const std::vector<double>& theta, double lo, double hi, double tol) {
            const auto r = inflection_load(parse_degree_distribution(degree), table_from(theta), lo, hi, tol);
            return py::dict("load"_a = r.load, "at_boundary"_a = r.at_boundary, "monotone"_a = r.monotone,
                            "evaluations"_a = r.evaluations);
        },
        "degree"_a, "theta"_a, "lo"_a = 0.05, "hi"_a = 4.0, "tol"_a = 1e-3);

    m.def(
        "mmse_estimate",
        [](const CMatrix& y, const CMatrix& pilots, const std::vector<double>& prior, double n0,
           const std::string& form) {
            const auto e = mmse_estimate(y, pilots, prior, n0, parse_form(form));
            return py::make_tuple(e.estimates, e.error_variances);
        },
        "pilot_signal"_a, "pilots"_a, "prior_variance"_a, "noise_power"_a, "form"_a = "auto",
        "Returns (N x K estimates, error variances).");
    m.def(
        "lcmmse_estimate",
        [](const CMatrix& y, const CMatrix& pilots, const std::vector<std::uint8_t>& active,
           const std::vector<double>& prior, double n0) {
            const auto e = lcmmse_estimate(y, pilots, active, prior, n0);
            return py::make_tuple(e.estimates, e.error_variances);
        },
        "pilot_signal"_a, "pilots"_a, "active"_a, "prior_variance"_a, "noise_power"_a);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = run_cli(args, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        "args"_a, "Runs the irsa tool in-process; returns (exit code, stdout, stderr).");

#ifdef IRSA_VERSION
    m.attr("__version__") = IRSA_VERSION;
#endif
}
