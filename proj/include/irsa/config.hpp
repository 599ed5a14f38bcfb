#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irsa {

enum class Estimator { MSBL, MMSE, LCMMSE, PerfectCSI };
enum class Combiner { MRC, ZF, RZF };

std::string_view to_string(Estimator e);
std::string_view to_string(Combiner c);
Estimator parse_estimator(std::string_view s);
Combiner parse_combiner(std::string_view s);

/// Node-perspective user degree distribution phi(x) = sum_d phi_d x^d.
class DegreeDistribution {
public:
    struct Mass {
        int degree;
        double probability;
    };

    DegreeDistribution() = default;
    /// Validates: degrees >= 2, probabilities >= 0 summing to 1 within 1e-12.
    explicit DegreeDistribution(std::vector<Mass> masses);

    /// Degree-d regular distribution phi(x) = x^d.
    static DegreeDistribution regular(int degree);

    const std::vector<Mass>& masses() const { return masses_; }
    int max_degree() const;
    /// Average repetition factor phi'(1).
    double mean() const;
    /// phi(x).
    double evaluate(double x) const;
    bool empty() const { return masses_.empty(); }

private:
    std::vector<Mass> masses_;
};

/// Ideal soliton on {1..d_max} with the degree-1 mass dropped and renormalized.
/// Throws std::invalid_argument for d_max < 2. Defined with the scenario sampler.
DegreeDistribution soliton_distribution(int d_max);

/// Physical and protocol parameters of one scenario. Powers are linear (mW).
struct SystemConfig {
    int num_res = 50;
    std::optional<int> num_users;
    std::optional<double> load = 1.0;
    int num_antennas = 16;
    int pilot_len = 10;
    double pilot_power = 100.0;
    double data_power = 100.0;
    std::optional<double> noise_power;
    std::optional<double> cell_edge_snr_db = 10.0;
    double fading_variance = 1.0;
    double path_loss_exponent = 3.76;
    /// Effective path-loss exponent under power control; unset means no power control.
    std::optional<double> power_control_exponent;
    double cell_radius = 1000.0;
    double reference_distance = 100.0;
    double sinr_threshold = 10.0;
    double msbl_prune_threshold = 1e-6;
    int msbl_iters = 500;
    double msbl_tolerance = 1e-4;
    double rzf_regularizer = 1e-2;
    int max_decode_iters = 20;
    DegreeDistribution degree_distribution = soliton_distribution(27);
    Estimator estimator = Estimator::MMSE;
    Combiner combiner = Combiner::RZF;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;

    /// M; from num_users, else round(load * T).
    int resolved_num_users() const;
    /// N0 in mW; derived from the cell-edge SNR when that is given.
    double resolved_noise_power() const;
    /// zeta; defaults to alpha (transmit at nominal power).
    double resolved_power_control_exponent() const;
};

double dbm_to_mw(double dbm);
double db_to_linear(double db);
double linear_to_db(double linear);

}  // namespace irsa
