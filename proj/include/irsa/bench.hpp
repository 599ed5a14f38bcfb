#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "irsa/de.hpp"
#include "irsa/settings.hpp"

namespace irsa {

/// R = (1 - tau/tau_c) T log2(1 + gamma_th) in bits/s/Hz.
double compute_rate(double throughput, int pilot_len, int packet_len, double sinr_threshold);

struct SweepSpec {
    SystemConfig base;
    SweepAxis axis = SweepAxis::Load;
    std::vector<double> values;
    int trials = 1000;
    int packet_len = 100;
    unsigned threads = 1;
};

struct SweepRow {
    std::string axis;
    double value = 0.0;
    int trials = 0;
    double throughput = 0.0;
    double throughput_ci95 = 0.0;
    double plr = 0.0;
    double plr_ci95 = 0.0;
    double rate = 0.0;
    double rate_ci95 = 0.0;
    std::string status = "ok";  ///< "ok", "single_trial" (CI undefined), "rate_undefined" (tau > tau_c) or "error:<reason>"
    double wall_seconds = 0.0;  ///< not written to CSV
};

/// Applies one axis value to a copy of the base config.
SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value);

/// One row per axis value; point j's trial i draws from stream (seed, j, i).
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

/// Columns axis, value, trials, throughput, throughput_ci95, plr, plr_ci95, rate, rate_ci95, status.
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

struct DeRow {
    DeResult result;
    double rate = 0.0;
};

struct DeRun {
    ThetaTable theta;
    std::vector<DeRow> rows;
    bool inflection_requested = false;
    InflectionResult inflection;
};

/// Builds the theta table named by the settings.
ThetaTable build_theta(const Settings& s);

DeRun run_de(const Settings& s, const ThetaTable& theta);

/// Columns load, cbar, p_infty, plr, throughput, rate, converged, iterations, theta_extended, monotone.
void write_de_csv(std::ostream& os, const DeRun& run);
/// Columns load, iteration, q, p.
void write_de_trace_csv(std::ostream& os, const DeRun& run);

/// Shortest round-trip decimal form, so repeated runs print identical text.
std::string format_number(double v);

}  // namespace irsa
