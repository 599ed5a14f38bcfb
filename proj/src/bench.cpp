#include "irsa/bench.hpp"

#include <chrono>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "irsa/sic.hpp"

namespace irsa {

double compute_rate(double throughput, int pilot_len, int packet_len, double sinr_threshold) {
    if (packet_len <= 0) throw std::invalid_argument("compute_rate: packet length must be positive");
    if (pilot_len < 0 || pilot_len > packet_len)
        throw std::invalid_argument("compute_rate: need 0 <= pilot_len <= packet_len");
    if (sinr_threshold < 0.0) throw std::invalid_argument("compute_rate: negative threshold");
    return (1.0 - static_cast<double>(pilot_len) / packet_len) * throughput * std::log2(1.0 + sinr_threshold);
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) return "0";
    return std::string(buf, end);
}

SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value) {
    SystemConfig c = base;
    auto as_int = [&] {
        if (value != std::round(value)) throw std::invalid_argument("axis value must be an integer");
        return static_cast<int>(value);
    };
    switch (axis) {
        case SweepAxis::PilotLen: c.pilot_len = as_int(); break;
        case SweepAxis::Antennas: c.num_antennas = as_int(); break;
        case SweepAxis::EdgeSnr:
            c.cell_edge_snr_db = value;
            c.noise_power.reset();
            break;
        case SweepAxis::Load:
            c.load = value;
            c.num_users.reset();
            break;
        case SweepAxis::RzfLambda: c.rzf_regularizer = value; break;
        case SweepAxis::PowerControlZeta: c.power_control_exponent = value; break;
        case SweepAxis::NumRes: c.num_res = as_int(); break;
    }
    c.validate();
    return c;
}

namespace {

std::string sanitize(std::string s) {
    for (char& ch : s)
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
    return s;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("run_sweep: no axis values");
    if (spec.trials < 1) throw std::invalid_argument("run_sweep: trials must be >= 1");
    std::vector<SweepRow> rows;
    rows.reserve(spec.values.size());
    for (std::size_t j = 0; j < spec.values.size(); ++j) {
        SweepRow row;
        row.axis = std::string(to_string(spec.axis));
        row.value = spec.values[j];
        row.trials = spec.trials;
        const auto start = std::chrono::steady_clock::now();
        try {
            const SystemConfig cfg = apply_axis(spec.base, spec.axis, spec.values[j]);
            const MonteCarloSummary mc = monte_carlo_throughput(cfg, spec.trials, cfg.seed, j, spec.threads);
            row.throughput = mc.throughput_mean;
            row.throughput_ci95 = mc.throughput_ci95;
            row.plr = mc.plr_mean;
            row.plr_ci95 = mc.plr_ci95;
            if (cfg.pilot_len > spec.packet_len) {
                row.rate = row.rate_ci95 = std::numeric_limits<double>::quiet_NaN();
                row.status = "rate_undefined";
            } else {
                // Rate is linear in throughput.
                const double per_unit = compute_rate(1.0, cfg.pilot_len, spec.packet_len, cfg.sinr_threshold);
                row.rate = per_unit * row.throughput;
                row.rate_ci95 = per_unit * row.throughput_ci95;
            }
            if (spec.trials == 1 && row.status == "ok") row.status = "single_trial";
        } catch (const std::exception& e) {
            row.status = "error:" + sanitize(e.what());
            row.throughput = row.throughput_ci95 = row.plr_ci95 = row.rate = row.rate_ci95 = 0.0;
            row.plr = 1.0;
        }
        row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "axis,value,trials,throughput,throughput_ci95,plr,plr_ci95,rate,rate_ci95,status\n";
    for (const auto& r : rows)
        os << r.axis << ',' << format_number(r.value) << ',' << r.trials << ',' << format_number(r.throughput) << ','
           << format_number(r.throughput_ci95) << ',' << format_number(r.plr) << ',' << format_number(r.plr_ci95)
           << ',' << format_number(r.rate) << ',' << format_number(r.rate_ci95) << ',' << r.status << '\n';
}

ThetaTable build_theta(const Settings& s) {
    const EmpiricalThetaSpec spec = theta_spec_from(s);
    const int r_max = s.de.theta_r_max;
    ThetaTable t;
    switch (s.de.theta_source) {
        case ThetaSource::Empirical: return estimate_theta_empirical(spec, s.system.seed);
        case ThetaSource::Gamma:
            return closed_form_theta_table(ThetaKind::Gamma, r_max, spec.num_antennas, spec.snr, spec.sinr_threshold);
        case ThetaSource::Normal:
            return closed_form_theta_table(ThetaKind::Normal, r_max, spec.num_antennas, spec.snr, spec.sinr_threshold);
        case ThetaSource::Deterministic:
            return closed_form_theta_table(ThetaKind::Deterministic, r_max, spec.num_antennas, spec.snr,
                                           spec.sinr_threshold);
        case ThetaSource::Theta12:
            return closed_form_theta_table(ThetaKind::Theta2, r_max, spec.num_antennas, spec.snr, spec.sinr_threshold);
        case ThetaSource::Ones: t = ThetaTable::constant(r_max, 1.0); break;
        case ThetaSource::Collision: t = ThetaTable::collision(r_max); break;
    }
    t.num_antennas = spec.num_antennas;
    t.snr = spec.snr;
    t.sinr_threshold = spec.sinr_threshold;
    return t;
}

DeRun run_de(const Settings& s, const ThetaTable& theta) {
    DeRun run;
    run.theta = theta;
    const DegreeDistribution& dist = s.system.degree_distribution;
    for (double load : s.de.loads) {
        DeRow row;
        row.result = de_fixed_point(load, dist, theta, s.de.options);
        row.rate = s.system.pilot_len > s.packet_len
                       ? std::numeric_limits<double>::quiet_NaN()
                       : compute_rate(row.result.throughput, s.system.pilot_len, s.packet_len, s.system.sinr_threshold);
        run.rows.push_back(std::move(row));
    }
    if (s.de.find_inflection) {
        run.inflection_requested = true;
        run.inflection = inflection_load(dist, theta, s.de.inflection_lo, s.de.inflection_hi, s.de.inflection_tol,
                                         s.de.options);
    }
    return run;
}

void write_de_csv(std::ostream& os, const DeRun& run) {
    os << "load,cbar,p_infty,plr,throughput,rate,converged,iterations,theta_extended,monotone\n";
    for (const auto& row : run.rows) {
        const DeResult& r = row.result;
        os << format_number(r.load) << ',' << format_number(r.cbar) << ',' << format_number(r.p_infty) << ','
           << format_number(r.plr) << ',' << format_number(r.throughput) << ',' << format_number(row.rate) << ','
           << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << (r.theta_extended ? 1 : 0) << ','
           << (r.monotone ? 1 : 0) << '\n';
    }
}

void write_de_trace_csv(std::ostream& os, const DeRun& run) {
    os << "load,iteration,q,p\n";
    for (const auto& row : run.rows) {
        const DeResult& r = row.result;
        for (std::size_t i = 0; i < r.p_trace.size(); ++i)
            os << format_number(r.load) << ',' << i << ',' << format_number(r.q_trace[i]) << ','
               << format_number(r.p_trace[i]) << '\n';
    }
}

}  // namespace irsa
