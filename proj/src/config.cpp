#include "irsa/config.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>


namespace irsa {

std::string_view to_string(Estimator e) {
    switch (e) {
        case Estimator::MSBL: return "msbl";
        case Estimator::MMSE: return "mmse";
        case Estimator::LCMMSE: return "lcmmse";
        case Estimator::PerfectCSI: return "perfect";
    }
    return "?";
}

std::string_view to_string(Combiner c) {
    switch (c) {
        case Combiner::MRC: return "mrc";
        case Combiner::ZF: return "zf";
        case Combiner::RZF: return "rzf";
    }
    return "?";
}

Estimator parse_estimator(std::string_view s) {
    if (s == "msbl") return Estimator::MSBL;
    if (s == "mmse") return Estimator::MMSE;
    if (s == "lcmmse") return Estimator::LCMMSE;
    if (s == "perfect" || s == "perfect_csi") return Estimator::PerfectCSI;
    throw std::invalid_argument("unknown estimator '" + std::string(s) + "'");
}

Combiner parse_combiner(std::string_view s) {
    if (s == "mrc") return Combiner::MRC;
    if (s == "zf") return Combiner::ZF;
    if (s == "rzf") return Combiner::RZF;
    throw std::invalid_argument("unknown combiner '" + std::string(s) + "'");
}

DegreeDistribution::DegreeDistribution(std::vector<Mass> masses) : masses_(std::move(masses)) {
    if (masses_.empty()) throw std::invalid_argument("degree distribution is empty");
    std::sort(masses_.begin(), masses_.end(), [](const Mass& a, const Mass& b) { return a.degree < b.degree; });
    double total = 0.0;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        const Mass& m = masses_[i];
        if (m.degree < 2) throw std::invalid_argument("degree distribution needs degrees >= 2");
        if (!(m.probability >= 0.0)) throw std::invalid_argument("negative degree probability");
        if (i > 0 && masses_[i - 1].degree == m.degree)
            throw std::invalid_argument("duplicate degree in distribution");
        total += m.probability;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("degree probabilities must sum to 1");
}

DegreeDistribution DegreeDistribution::regular(int degree) {
    return DegreeDistribution({{degree, 1.0}});
}

int DegreeDistribution::max_degree() const {
    return masses_.empty() ? 0 : masses_.back().degree;
}

double DegreeDistribution::mean() const {
    double acc = 0.0;
    for (const Mass& m : masses_) acc += m.degree * m.probability;
    return acc;
}

double DegreeDistribution::evaluate(double x) const {
    double acc = 0.0;
    for (const Mass& m : masses_) acc += m.probability * std::pow(x, m.degree);
    return acc;
}

void SystemConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("invalid config: " + what); };
    if (num_res < 1) fail("num_res must be >= 1");
    if (num_users.has_value() == load.has_value()) fail("exactly one of num_users and load must be set");
    if (num_users && *num_users < 1) fail("num_users must be >= 1");
    if (load && !(*load > 0.0)) fail("load must be > 0");
    if (resolved_num_users() < 1) fail("load yields zero users");
    if (num_antennas < 1) fail("num_antennas must be >= 1");
    if (pilot_len < 1) fail("pilot_len must be >= 1");
    if (!(pilot_power > 0.0) || !(data_power > 0.0)) fail("powers must be > 0");
    if (noise_power.has_value() == cell_edge_snr_db.has_value())
        fail("exactly one of noise_power and cell_edge_snr_db must be set");
    if (noise_power && !(*noise_power > 0.0)) fail("noise_power must be > 0");
    if (!(fading_variance > 0.0)) fail("fading_variance must be > 0");
    if (!(reference_distance > 0.0) || reference_distance > cell_radius) fail("need 0 < r0 <= r_max");
    if (!(sinr_threshold > 0.0)) fail("sinr_threshold must be > 0");
    if (!(msbl_prune_threshold >= 0.0)) fail("msbl_prune_threshold must be >= 0");
    if (msbl_iters < 1) fail("msbl_iters must be >= 1");
    if (!(msbl_tolerance >= 0.0)) fail("msbl_tolerance must be >= 0");
    if (!(rzf_regularizer >= 0.0)) fail("rzf_regularizer must be >= 0");
    if (max_decode_iters < 1) fail("max_decode_iters must be >= 1");
    if (degree_distribution.empty()) fail("degree distribution missing");
    if (degree_distribution.max_degree() > num_res) fail("max degree exceeds num_res");
}

int SystemConfig::resolved_num_users() const {
    if (num_users) return *num_users;
    if (load) return static_cast<int>(std::llround(*load * num_res));
    return 0;
}

double SystemConfig::resolved_power_control_exponent() const {
    return power_control_exponent.value_or(path_loss_exponent);
}

double SystemConfig::resolved_noise_power() const {
    if (noise_power) return *noise_power;
    const double edge_rx = data_power * fading_variance *
                           std::pow(cell_radius / reference_distance, -resolved_power_control_exponent());
    return edge_rx / db_to_linear(cell_edge_snr_db.value_or(0.0));
}

double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

}  // namespace irsa
