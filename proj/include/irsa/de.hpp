#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "irsa/config.hpp"

namespace irsa {

/// Edge-perspective polynomial lambda(x) = sum_d lambda_d x^(d-1).
class EdgeDistribution {
public:
    explicit EdgeDistribution(const DegreeDistribution& dist);

    /// (d, lambda_d) pairs.
    const std::vector<std::pair<int, double>>& coefficients() const { return coeffs_; }
    double evaluate(double p) const;

private:
    std::vector<std::pair<int, double>> coeffs_;
};

EdgeDistribution edge_user_distribution(const DegreeDistribution& dist);

enum class ThetaKind { Theta1, Theta2, Gamma, Normal, Deterministic };

/// Perfect-CSI MRC approximations of the intra-RE success probability.
/// Gamma and Normal fall back to the exact Theta1 / Theta2 forms for r < 3.
/// `snr` is rho_0 = P sigma_h^2 / N0, linear.
double theta_closed_form(ThetaKind kind, int r, int num_antennas, double snr, double sinr_threshold);

enum class ThetaProvenance { Empirical, Gamma, Normal, Deterministic, ClosedForm12 };

struct ThetaTable {
    std::vector<double> values;  ///< values[r-1] = theta_r
    ThetaProvenance provenance = ThetaProvenance::Empirical;
    int trials = 0;                             ///< empirical only
    Estimator csi_mode = Estimator::PerfectCSI; ///< empirical only
    int num_antennas = 0;
    double snr = 0.0;  ///< rho_0, linear
    double sinr_threshold = 0.0;

    int r_max() const { return static_cast<int>(values.size()); }
    /// theta_r; beyond r_max the last value is held when `hold`, else 0.
    double at(int r, bool hold = true) const;
    /// Binomial standard error of an empirical entry.
    double std_error(int r) const;

    /// Constant table, e.g. theta = 1 (never interference limited).
    static ThetaTable constant(int r_max, double value);
    /// theta_r = 1{r = 1}: classic collision channel.
    static ThetaTable collision(int r_max);
};

std::string provenance_label(const ThetaTable& table);

/// Columns r, theta, provenance, N, rho0_db, gamma_th.
void write_theta_csv(std::ostream& os, const ThetaTable& table);

/// theta_1..theta_rmax from a closed form. Gamma / Normal splice the exact r = 1, 2
/// values; Theta1 / Theta2 give the r <= 2 values and 0 beyond.
ThetaTable closed_form_theta_table(ThetaKind kind, int r_max, int num_antennas, double snr,
                                   double sinr_threshold);

struct EmpiricalThetaSpec {
    int r_max = 40;
    int num_antennas = 16;
    double snr = 10.0;  ///< rho_0, linear
    double sinr_threshold = 10.0;
    int trials = 10000;
    Estimator estimator = Estimator::PerfectCSI;
    Combiner combiner = Combiner::MRC;
    double rzf_regularizer = 1e-2;
    int pilot_len = 10;
    double pilot_power = 100.0;
    double data_power = 100.0;
    double fading_variance = 1.0;
    int msbl_iters = 500;
    double msbl_prune_threshold = 1e-6;
    unsigned threads = 1;
};

/// One RE, r users at equal mean receive power: repeatedly decode the strongest
/// user while it clears the threshold, removing it perfectly. Returns whether
/// user 0 was decoded.
bool intra_re_trial(const EmpiricalThetaSpec& spec, int r, std::uint64_t seed, std::uint64_t trial);

/// Monte Carlo theta table; trial j at degree r draws from stream (seed, r, j).
ThetaTable estimate_theta_empirical(const EmpiricalThetaSpec& spec, std::uint64_t seed);

enum class TailPolicy { Hold, Zero };

struct DeOptions {
    int max_iter = 10000;
    double tol = 1e-10;
    double tail_eps = 1e-12;
    TailPolicy tail = TailPolicy::Hold;
    bool keep_trace = true;
};

struct DeResult {
    double load = 0.0;
    double cbar = 0.0;
    std::vector<double> p_trace;
    std::vector<double> q_trace;
    double p_infty = 0.0;
    double plr = 0.0;
    double throughput = 0.0;
    bool converged = false;
    int iterations = 0;
    bool theta_extended = false;  ///< series needed entries beyond the table
    bool monotone = true;         ///< both traces non-increasing
};

/// f(q) = 1 - e^{-x} sum_r theta_r x^{r-1}/(r-1)!, x = cbar q, summed until the
/// Poisson(x) tail falls below tail_eps.
double de_update(double q, double cbar, const ThetaTable& theta, const DeOptions& opt,
                 bool* extended = nullptr);

DeResult de_fixed_point(double load, const DegreeDistribution& dist, const ThetaTable& theta,
                        const DeOptions& opt = {});

struct InflectionResult {
    double load = 0.0;
    bool at_boundary = false;  ///< no transition inside the range
    bool monotone = true;      ///< p_infty non-decreasing on the probe grid
    int evaluations = 0;
};

/// Largest L in [lo, hi] with p_infty < zero_threshold, by bisection to tol_load.
InflectionResult inflection_load(const DegreeDistribution& dist, const ThetaTable& theta, double lo, double hi,
                                 double tol_load = 1e-3, const DeOptions& opt = {},
                                 double zero_threshold = 1e-4);

}  // namespace irsa
