#include "irsa/settings.hpp"

#include <algorithm>
#include <boost/program_options.hpp>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace po = boost::program_options;

namespace irsa {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (trim(s.substr(pos)).size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

}  // namespace

std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::PilotLen: return "pilot_len";
        case SweepAxis::Antennas: return "antennas";
        case SweepAxis::EdgeSnr: return "edge_snr_db";
        case SweepAxis::Load: return "load";
        case SweepAxis::RzfLambda: return "rzf_lambda";
        case SweepAxis::PowerControlZeta: return "power_control_zeta";
        case SweepAxis::NumRes: return "num_res";
    }
    return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view s) {
    for (auto a : {SweepAxis::PilotLen, SweepAxis::Antennas, SweepAxis::EdgeSnr, SweepAxis::Load,
                   SweepAxis::RzfLambda, SweepAxis::PowerControlZeta, SweepAxis::NumRes})
        if (lower(s) == to_string(a)) return a;
    throw std::invalid_argument("unknown sweep axis '" + std::string(s) + "'");
}

std::string_view to_string(ThetaSource s) {
    switch (s) {
        case ThetaSource::Empirical: return "empirical";
        case ThetaSource::Gamma: return "gamma";
        case ThetaSource::Normal: return "normal";
        case ThetaSource::Deterministic: return "deterministic";
        case ThetaSource::Theta12: return "theta12";
        case ThetaSource::Ones: return "ones";
        case ThetaSource::Collision: return "collision";
    }
    return "unknown";
}

ThetaSource parse_theta_source(std::string_view s) {
    for (auto v : {ThetaSource::Empirical, ThetaSource::Gamma, ThetaSource::Normal, ThetaSource::Deterministic,
                   ThetaSource::Theta12, ThetaSource::Ones, ThetaSource::Collision})
        if (lower(s) == to_string(v)) return v;
    throw std::invalid_argument("unknown theta source '" + std::string(s) + "'");
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty entry in number list '" + text + "'");
        out.push_back(to_double(item));
    }
    if (out.empty()) throw std::invalid_argument("empty number list");
    return out;
}

DegreeDistribution parse_degree_distribution(const std::string& text) {
    const std::string t = lower(trim(text));
    auto bad = [&] { return std::invalid_argument("bad degree distribution '" + text + "'"); };
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw bad();
    const std::string kind = t.substr(0, colon);
    const std::string rest = t.substr(colon + 1);
    if (kind == "soliton") return soliton_distribution(static_cast<int>(to_double(rest)));
    if (kind == "regular") return DegreeDistribution::regular(static_cast<int>(to_double(rest)));
    if (kind == "masses") {
        std::vector<DegreeDistribution::Mass> masses;
        std::stringstream ss(rest);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto c = item.find(':');
            if (c == std::string::npos) throw bad();
            masses.push_back({static_cast<int>(to_double(item.substr(0, c))), to_double(item.substr(c + 1))});
        }
        return DegreeDistribution(std::move(masses));
    }
    throw bad();
}

Settings parse_settings(std::istream& in, const std::string& source) {
    po::options_description desc;
    // Every key is read as text so optional-ness is decided by presence.
    for (const char* key : {
             "scenario.num_res", "scenario.num_users", "scenario.load", "scenario.num_antennas",
             "scenario.cell_edge_snr_db", "scenario.noise_power_dbm", "scenario.pilot_power_dbm",
             "scenario.data_power_dbm", "scenario.fading_variance", "scenario.path_loss_exponent",
             "scenario.power_control_exponent", "scenario.cell_radius", "scenario.reference_distance",
             "scenario.degree", "chest.estimator", "chest.pilot_len", "chest.msbl_prune_threshold",
             "chest.msbl_iters", "chest.msbl_tolerance", "detect.combiner", "detect.rzf_regularizer", "sic.sinr_threshold",
             "sic.sinr_threshold_db", "sic.max_decode_iters", "rate.packet_len", "run.seed", "run.trials",
             "run.threads", "sweep.axis", "sweep.values", "de.theta_source", "de.theta_r_max",
             "de.theta_trials", "de.theta_estimator", "de.loads", "de.max_iter", "de.tol", "de.tail_eps",
             "de.tail_policy", "de.inflection", "de.inflection_lo", "de.inflection_hi", "de.inflection_tol",
             "de.trace_out"})
        desc.add_options()(key, po::value<std::string>());

    po::variables_map vm;
    try {
        po::store(po::parse_config_file(in, desc, false), vm);
    } catch (const po::error& e) {
        throw std::invalid_argument(source + ": " + e.what());
    }

    Settings s;
    SystemConfig& c = s.system;
    auto has = [&](const char* k) { return vm.count(k) > 0; };
    auto str = [&](const char* k) { return trim(vm[k].as<std::string>()); };
    auto num = [&](const char* k) {
        try {
            return to_double(str(k));
        } catch (const std::exception&) {
            throw std::invalid_argument(source + ": key '" + k + "' expects a number, got '" + str(k) + "'");
        }
    };
    auto integer = [&](const char* k) {
        const double v = num(k);
        if (v != std::floor(v)) throw std::invalid_argument(source + ": key '" + k + "' expects an integer");
        return static_cast<long long>(v);
    };
    auto flag = [&](const char* k) {
        const std::string v = lower(str(k));
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw std::invalid_argument(source + ": key '" + k + "' expects a boolean");
    };

    try {
        if (has("scenario.num_res")) c.num_res = static_cast<int>(integer("scenario.num_res"));
        if (has("scenario.num_users") && has("scenario.load"))
            throw std::invalid_argument("set only one of scenario.num_users and scenario.load");
        if (has("scenario.num_users")) {
            c.num_users = static_cast<int>(integer("scenario.num_users"));
            c.load.reset();
        }
        if (has("scenario.load")) c.load = num("scenario.load");
        if (has("scenario.num_antennas")) c.num_antennas = static_cast<int>(integer("scenario.num_antennas"));
        if (has("scenario.cell_edge_snr_db") && has("scenario.noise_power_dbm"))
            throw std::invalid_argument("set only one of scenario.cell_edge_snr_db and scenario.noise_power_dbm");
        if (has("scenario.cell_edge_snr_db")) c.cell_edge_snr_db = num("scenario.cell_edge_snr_db");
        if (has("scenario.noise_power_dbm")) {
            c.noise_power = dbm_to_mw(num("scenario.noise_power_dbm"));
            c.cell_edge_snr_db.reset();
        }
        if (has("scenario.pilot_power_dbm")) c.pilot_power = dbm_to_mw(num("scenario.pilot_power_dbm"));
        if (has("scenario.data_power_dbm")) c.data_power = dbm_to_mw(num("scenario.data_power_dbm"));
        if (has("scenario.fading_variance")) c.fading_variance = num("scenario.fading_variance");
        if (has("scenario.path_loss_exponent")) c.path_loss_exponent = num("scenario.path_loss_exponent");
        if (has("scenario.power_control_exponent"))
            c.power_control_exponent = num("scenario.power_control_exponent");
        if (has("scenario.cell_radius")) c.cell_radius = num("scenario.cell_radius");
        if (has("scenario.reference_distance")) c.reference_distance = num("scenario.reference_distance");
        if (has("scenario.degree")) c.degree_distribution = parse_degree_distribution(str("scenario.degree"));

        if (has("chest.estimator")) c.estimator = parse_estimator(str("chest.estimator"));
        if (has("chest.pilot_len")) c.pilot_len = static_cast<int>(integer("chest.pilot_len"));
        if (has("chest.msbl_prune_threshold")) c.msbl_prune_threshold = num("chest.msbl_prune_threshold");
        if (has("chest.msbl_iters")) c.msbl_iters = static_cast<int>(integer("chest.msbl_iters"));
        if (has("chest.msbl_tolerance")) c.msbl_tolerance = num("chest.msbl_tolerance");

        if (has("detect.combiner")) c.combiner = parse_combiner(str("detect.combiner"));
        if (has("detect.rzf_regularizer")) c.rzf_regularizer = num("detect.rzf_regularizer");

        if (has("sic.sinr_threshold") && has("sic.sinr_threshold_db"))
            throw std::invalid_argument("set only one of sic.sinr_threshold and sic.sinr_threshold_db");
        if (has("sic.sinr_threshold")) c.sinr_threshold = num("sic.sinr_threshold");
        if (has("sic.sinr_threshold_db")) c.sinr_threshold = db_to_linear(num("sic.sinr_threshold_db"));
        if (has("sic.max_decode_iters")) c.max_decode_iters = static_cast<int>(integer("sic.max_decode_iters"));

        if (has("rate.packet_len")) s.packet_len = static_cast<int>(integer("rate.packet_len"));

        if (has("run.seed")) {
            const std::string v = str("run.seed");
            std::size_t pos = 0;
            c.seed = std::stoull(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("run.seed expects an unsigned integer");
        }
        if (has("run.trials")) s.trials = static_cast<int>(integer("run.trials"));
        if (has("run.threads")) s.threads = static_cast<unsigned>(integer("run.threads"));

        if (has("sweep.axis")) s.sweep_axis = parse_sweep_axis(str("sweep.axis"));
        if (has("sweep.values")) s.sweep_values = parse_number_list(str("sweep.values"));

        DeSettings& d = s.de;
        if (has("de.theta_source")) d.theta_source = parse_theta_source(str("de.theta_source"));
        if (has("de.theta_r_max")) d.theta_r_max = static_cast<int>(integer("de.theta_r_max"));
        if (has("de.theta_trials")) d.theta_trials = static_cast<int>(integer("de.theta_trials"));
        if (has("de.theta_estimator")) d.theta_estimator = parse_estimator(str("de.theta_estimator"));
        if (has("de.loads")) d.loads = parse_number_list(str("de.loads"));
        if (has("de.max_iter")) d.options.max_iter = static_cast<int>(integer("de.max_iter"));
        if (has("de.tol")) d.options.tol = num("de.tol");
        if (has("de.tail_eps")) d.options.tail_eps = num("de.tail_eps");
        if (has("de.tail_policy")) {
            const std::string v = lower(str("de.tail_policy"));
            if (v == "hold") d.options.tail = TailPolicy::Hold;
            else if (v == "zero") d.options.tail = TailPolicy::Zero;
            else throw std::invalid_argument("de.tail_policy must be hold or zero");
        }
        if (has("de.inflection")) d.find_inflection = flag("de.inflection");
        if (has("de.inflection_lo")) d.inflection_lo = num("de.inflection_lo");
        if (has("de.inflection_hi")) d.inflection_hi = num("de.inflection_hi");
        if (has("de.inflection_tol")) d.inflection_tol = num("de.inflection_tol");
        if (has("de.trace_out")) d.trace_out = str("de.trace_out");
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        if (what.rfind(source, 0) == 0) throw;
        throw std::invalid_argument(source + ": " + what);
    }

    if (s.trials < 1) throw std::invalid_argument(source + ": run.trials must be >= 1");
    if (s.packet_len < c.pilot_len) throw std::invalid_argument(source + ": rate.packet_len must be >= pilot_len");
    c.validate();
    return s;
}

Settings load_settings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path.string() + "'");
    return parse_settings(in, path.string());
}

std::filesystem::path preset_directory() {
    if (const char* env = std::getenv("IRSA_PRESET_DIR")) return env;
#ifdef IRSA_PRESET_DIR
    return IRSA_PRESET_DIR;
#else
    return "presets";
#endif
}

std::vector<PresetInfo> list_presets(const std::filesystem::path& dir) {
    std::vector<PresetInfo> out;
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".ini") continue;
        PresetInfo info{entry.path().stem().string(), "", entry.path()};
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) {
            line = trim(line);
            if (line.empty()) continue;
            if (line[0] == '#' || line[0] == ';') info.description = trim(line.substr(1));
            break;
        }
        out.push_back(std::move(info));
    }
    std::ranges::sort(out, {}, &PresetInfo::name);
    return out;
}

std::filesystem::path resolve_config(const std::string& name_or_path) {
    if (std::filesystem::is_regular_file(name_or_path)) return name_or_path;
    const auto preset = preset_directory() / (name_or_path + ".ini");
    if (std::filesystem::is_regular_file(preset)) return preset;
    throw std::invalid_argument("no config file or preset named '" + name_or_path + "'");
}

EmpiricalThetaSpec theta_spec_from(const Settings& s) {
    const SystemConfig& c = s.system;
    EmpiricalThetaSpec t;
    t.r_max = s.de.theta_r_max;
    t.num_antennas = c.num_antennas;
    t.snr = c.data_power * c.fading_variance / c.resolved_noise_power();
    t.sinr_threshold = c.sinr_threshold;
    t.trials = s.de.theta_trials;
    t.estimator = s.de.theta_estimator.value_or(c.estimator);
    t.combiner = c.combiner;
    t.rzf_regularizer = c.rzf_regularizer;
    t.pilot_len = c.pilot_len;
    t.pilot_power = c.pilot_power;
    t.data_power = c.data_power;
    t.fading_variance = c.fading_variance;
    t.msbl_iters = c.msbl_iters;
    t.msbl_prune_threshold = c.msbl_prune_threshold;
    t.threads = s.threads;
    return t;
}

}  // namespace irsa
