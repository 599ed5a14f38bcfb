#include "irsa/de.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "irsa/chest.hpp"
#include "irsa/parallel.hpp"
#include "irsa/rng.hpp"
#include "irsa/sic.hpp"

namespace irsa {

EdgeDistribution::EdgeDistribution(const DegreeDistribution& dist) {
    if (dist.empty()) throw std::invalid_argument("edge distribution of an empty degree distribution");
    const double mean = dist.mean();
    for (const auto& m : dist.masses())
        if (m.probability > 0.0) coeffs_.emplace_back(m.degree, m.degree * m.probability / mean);
}

double EdgeDistribution::evaluate(double p) const {
    double s = 0.0;
    for (const auto& [d, l] : coeffs_) s += l * std::pow(p, d - 1);
    return s;
}

EdgeDistribution edge_user_distribution(const DegreeDistribution& dist) { return EdgeDistribution(dist); }

namespace {

double theta1(int n, double snr, double gamma) {
    return boost::math::gamma_q(static_cast<double>(n), gamma / snr);
}

double interference_budget(int n, double snr, double gamma) { return 1.0 / gamma - 1.0 / (n * snr); }

double theta2(int n, double snr, double gamma) {
    const double t0 = interference_budget(n, snr, gamma);
    if (t0 < 0.0) return 0.0;
    if (t0 >= 1.0) return 1.0;
    return 1.0 - std::pow(1.0 - t0, n);
}

}  // namespace

double theta_closed_form(ThetaKind kind, int r, int num_antennas, double snr, double sinr_threshold) {
    if (r < 1) throw std::invalid_argument("theta_closed_form: r must be >= 1");
    if (num_antennas < 1) throw std::invalid_argument("theta_closed_form: N must be >= 1");
    if (!(snr > 0.0) || !(sinr_threshold > 0.0))
        throw std::invalid_argument("theta_closed_form: snr and threshold must be positive");
    const int n = num_antennas;
    switch (kind) {
        case ThetaKind::Theta1: return theta1(n, snr, sinr_threshold);
        case ThetaKind::Theta2: return theta2(n, snr, sinr_threshold);
        case ThetaKind::Gamma: {
            if (r == 1) return theta1(n, snr, sinr_threshold);
            if (r == 2) return theta2(n, snr, sinr_threshold);
            const double t0 = interference_budget(n, snr, sinr_threshold);
            if (t0 <= 0.0) return 0.0;
            return boost::math::gamma_p(static_cast<double>(r - 1), n * t0);
        }
        case ThetaKind::Normal: {
            if (r == 1) return theta1(n, snr, sinr_threshold);
            if (r == 2) return theta2(n, snr, sinr_threshold);
            const double t0 = interference_budget(n, snr, sinr_threshold);
            const double mu = 1.0 / (n + 1.0);
            const double sd = std::sqrt(n / ((n + 1.0) * (n + 1.0) * (n + 2.0)));
            const double z = (t0 - (r - 1) * mu) / (std::sqrt(r - 1.0) * sd);
            return 0.5 * std::erfc(-z / std::sqrt(2.0));
        }
        case ThetaKind::Deterministic: {
            const double cutoff = std::floor(n / sinr_threshold - 1.0 / snr + 1.0);
            return static_cast<double>(r) <= cutoff ? 1.0 : 0.0;
        }
    }
    return 0.0;
}

double ThetaTable::at(int r, bool hold) const {
    if (r < 1) throw std::out_of_range("theta index must be >= 1");
    if (r <= r_max()) return values[r - 1];
    if (values.empty() || !hold) return 0.0;
    return values.back();
}

double ThetaTable::std_error(int r) const {
    if (trials < 1) return 0.0;
    const double t = at(r);
    return std::sqrt(t * (1.0 - t) / trials);
}

ThetaTable ThetaTable::constant(int r_max, double value) {
    ThetaTable t;
    t.values.assign(r_max, value);
    t.provenance = ThetaProvenance::ClosedForm12;
    return t;
}

ThetaTable ThetaTable::collision(int r_max) {
    ThetaTable t;
    t.values.assign(r_max, 0.0);
    if (r_max > 0) t.values[0] = 1.0;
    t.provenance = ThetaProvenance::ClosedForm12;
    return t;
}

std::string provenance_label(const ThetaTable& table) {
    switch (table.provenance) {
        case ThetaProvenance::Empirical: {
            std::ostringstream os;
            os << "empirical:" << to_string(table.csi_mode) << ':' << table.trials;
            return os.str();
        }
        case ThetaProvenance::Gamma: return "gamma";
        case ThetaProvenance::Normal: return "normal";
        case ThetaProvenance::Deterministic: return "deterministic";
        case ThetaProvenance::ClosedForm12: return "closed_form12";
    }
    return "unknown";
}

void write_theta_csv(std::ostream& os, const ThetaTable& table) {
    const std::string label = provenance_label(table);
    const double snr_db = table.snr > 0.0 ? linear_to_db(table.snr) : 0.0;
    os << "r,theta,provenance,N,rho0_db,gamma_th\n";
    os << std::setprecision(17);
    for (int r = 1; r <= table.r_max(); ++r)
        os << r << ',' << table.values[r - 1] << ',' << label << ',' << table.num_antennas << ',' << snr_db << ','
           << table.sinr_threshold << '\n';
}

ThetaTable closed_form_theta_table(ThetaKind kind, int r_max, int num_antennas, double snr, double sinr_threshold) {
    if (r_max < 1) throw std::invalid_argument("closed_form_theta_table: r_max must be >= 1");
    ThetaTable t;
    t.num_antennas = num_antennas;
    t.snr = snr;
    t.sinr_threshold = sinr_threshold;
    t.values.resize(r_max);
    switch (kind) {
        case ThetaKind::Theta1:
        case ThetaKind::Theta2:
            t.provenance = ThetaProvenance::ClosedForm12;
            t.values.assign(r_max, 0.0);
            t.values[0] = theta1(num_antennas, snr, sinr_threshold);
            if (r_max > 1) t.values[1] = theta2(num_antennas, snr, sinr_threshold);
            return t;
        case ThetaKind::Gamma: t.provenance = ThetaProvenance::Gamma; break;
        case ThetaKind::Normal: t.provenance = ThetaProvenance::Normal; break;
        case ThetaKind::Deterministic: t.provenance = ThetaProvenance::Deterministic; break;
    }
    for (int r = 1; r <= r_max; ++r)
        t.values[r - 1] = theta_closed_form(kind, r, num_antennas, snr, sinr_threshold);
    return t;
}

namespace {

void validate(const EmpiricalThetaSpec& s) {
    if (s.trials < 1) throw std::invalid_argument("estimate_theta_empirical: trials must be >= 1");
    if (s.r_max < 1) throw std::invalid_argument("estimate_theta_empirical: r_max must be >= 1");
    if (s.num_antennas < 1 || s.pilot_len < 1) throw std::invalid_argument("estimate_theta_empirical: bad dimensions");
    if (!(s.snr > 0.0)) throw std::invalid_argument("estimate_theta_empirical: snr must be positive");
    if (!(s.sinr_threshold >= 0.0)) throw std::invalid_argument("estimate_theta_empirical: negative threshold");
}

}  // namespace

bool intra_re_trial(const EmpiricalThetaSpec& spec, int r, std::uint64_t seed, std::uint64_t trial) {
    Rng rng = make_stream(seed, {static_cast<std::uint64_t>(r), trial});
    const int n = spec.num_antennas;
    const double noise_power = spec.data_power * spec.fading_variance / spec.snr;
    const bool needs_pilots = spec.estimator != Estimator::PerfectCSI;

    CMatrix channels = complex_normal_matrix(rng, n, r, spec.fading_variance);
    CMatrix pilots;
    CMatrix residual;
    if (needs_pilots) {
        pilots = complex_normal_matrix(rng, spec.pilot_len, r, spec.pilot_power);
        residual = complex_normal_matrix(rng, n, spec.pilot_len, noise_power);
        residual.noalias() += channels * pilots.adjoint();
    } else {
        pilots = CMatrix::Zero(1, r);
        residual = CMatrix::Zero(n, 1);
    }

    ReReceiver rx;
    rx.estimator = spec.estimator;
    rx.combiner = spec.combiner;
    rx.rzf_regularizer = spec.rzf_regularizer;
    rx.msbl_iters = spec.msbl_iters;
    rx.msbl_prune_threshold = spec.msbl_prune_threshold;
    rx.data_power = spec.data_power;
    rx.noise_power = noise_power;

    std::vector<int> remaining(r);
    for (int i = 0; i < r; ++i) remaining[i] = i;
    while (!remaining.empty()) {
        const auto k = static_cast<Eigen::Index>(remaining.size());
        CMatrix p(pilots.rows(), k), h(n, k);
        for (Eigen::Index j = 0; j < k; ++j) {
            p.col(j) = pilots.col(remaining[j]);
            h.col(j) = channels.col(remaining[j]);
        }
        const std::vector<std::uint8_t> active(k, 1);
        const std::vector<double> prior(k, spec.fading_variance);
        const auto rho = re_candidate_sinr(rx, residual, p, h, active, prior);
        const auto best = std::max_element(rho.begin(), rho.end()) - rho.begin();
        if (!(rho[best] >= spec.sinr_threshold)) return false;
        const int user = remaining[best];
        if (user == 0) return true;
        if (needs_pilots) residual.noalias() -= channels.col(user) * pilots.col(user).adjoint();
        remaining.erase(remaining.begin() + best);
    }
    return false;
}

ThetaTable estimate_theta_empirical(const EmpiricalThetaSpec& spec, std::uint64_t seed) {
    validate(spec);
    ThetaTable t;
    t.provenance = ThetaProvenance::Empirical;
    t.trials = spec.trials;
    t.csi_mode = spec.estimator;
    t.num_antennas = spec.num_antennas;
    t.snr = spec.snr;
    t.sinr_threshold = spec.sinr_threshold;
    t.values.resize(spec.r_max);
    std::vector<std::uint8_t> success(static_cast<std::size_t>(spec.trials));
    for (int r = 1; r <= spec.r_max; ++r) {
        parallel_for(success.size(), spec.threads,
                     [&](std::size_t j) { success[j] = intra_re_trial(spec, r, seed, j) ? 1 : 0; });
        std::size_t count = 0;
        for (auto s : success) count += s;
        t.values[r - 1] = static_cast<double>(count) / spec.trials;
    }
    return t;
}

double de_update(double q, double cbar, const ThetaTable& theta, const DeOptions& opt, bool* extended) {
    const double x = cbar * q;
    const bool hold = opt.tail == TailPolicy::Hold;
    double term = std::exp(-x);  // Poisson(x) mass at r - 1
    double cdf = 0.0;
    double f = 0.0;
    for (int r = 1;; ++r) {
        if (r > theta.r_max() && extended) *extended = true;
        f += (1.0 - theta.at(r, hold)) * term;
        cdf += term;
        if (1.0 - cdf < opt.tail_eps && static_cast<double>(r) > x) break;
        if (r > 100000) break;
        term *= x / r;
    }
    return std::clamp(f, 0.0, 1.0);
}

DeResult de_fixed_point(double load, const DegreeDistribution& dist, const ThetaTable& theta, const DeOptions& opt) {
    if (load < 0.0) throw std::invalid_argument("de_fixed_point: load must be >= 0");
    if (theta.values.empty()) throw std::invalid_argument("de_fixed_point: empty theta table");
    const EdgeDistribution lambda(dist);
    DeResult res;
    res.load = load;
    res.cbar = load * dist.mean();
    if (load == 0.0) {
        // No users: nothing can be lost.
        res.converged = true;
        if (opt.keep_trace) {
            res.p_trace = {0.0};
            res.q_trace = {1.0};
        }
        return res;
    }

    double q = 1.0;
    double p_prev = 1.0;
    double q_prev = 1.0;
    for (int i = 0; i < opt.max_iter; ++i) {
        bool ext = false;
        const double p = de_update(q, res.cbar, theta, opt, &ext);
        res.theta_extended = res.theta_extended || ext;
        if (opt.keep_trace) {
            res.q_trace.push_back(q);
            res.p_trace.push_back(p);
        }
        if (i > 0 && (p > p_prev + 1e-15 || q > q_prev + 1e-15)) res.monotone = false;
        res.iterations = i + 1;
        res.p_infty = p;
        if (i > 0 && std::abs(p - p_prev) < opt.tol) {
            res.converged = true;
            break;
        }
        p_prev = p;
        q_prev = q;
        q = std::clamp(lambda.evaluate(p), 0.0, 1.0);
    }
    res.plr = dist.evaluate(res.p_infty);
    res.throughput = load * (1.0 - res.plr);
    return res;
}

InflectionResult inflection_load(const DegreeDistribution& dist, const ThetaTable& theta, double lo, double hi,
                                 double tol_load, const DeOptions& opt, double zero_threshold) {
    if (!(lo >= 0.0) || !(hi > lo)) throw std::invalid_argument("inflection_load: need 0 <= lo < hi");
    if (!(tol_load > 0.0)) throw std::invalid_argument("inflection_load: tol must be positive");
    DeOptions o = opt;
    o.keep_trace = false;
    InflectionResult res;
    auto p_at = [&](double load) {
        ++res.evaluations;
        return de_fixed_point(load, dist, theta, o).p_infty;
    };

    constexpr int kProbes = 16;
    double last = -1.0;
    for (int i = 0; i <= kProbes; ++i) {
        const double p = p_at(lo + (hi - lo) * i / kProbes);
        if (p + 1e-9 < last) res.monotone = false;
        last = std::max(last, p);
    }

    if (p_at(hi) < zero_threshold) {
        res.load = hi;
        res.at_boundary = true;
        return res;
    }
    if (p_at(lo) >= zero_threshold) {
        res.load = lo;
        res.at_boundary = true;
        return res;
    }
    double a = lo, b = hi;
    while (b - a > tol_load) {
        const double mid = 0.5 * (a + b);
        (p_at(mid) < zero_threshold ? a : b) = mid;
    }
    res.load = a;
    return res;
}

}  // namespace irsa
