#include "irsa/scenario.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace irsa {

DegreeDistribution soliton_distribution(int d_max) {
    if (d_max < 2) throw std::invalid_argument("soliton_distribution: d_max must be >= 2");
    std::vector<DegreeDistribution::Mass> masses;
    double total = 0.0;
    for (int d = 2; d <= d_max; ++d) {
        const double w = 1.0 / (static_cast<double>(d) * (d - 1));
        masses.push_back({d, w});
        total += w;
    }
    for (auto& m : masses) m.probability /= total;
    // Re-normalize the sum exactly against rounding drift.
    double sum = 0.0;
    for (const auto& m : masses) sum += m.probability;
    masses.back().probability += 1.0 - sum;
    return DegreeDistribution(std::move(masses));
}

ApmMatrix sample_apm(int num_users, int num_res, const DegreeDistribution& dist, Rng& rng) {
    if (num_users < 0 || num_res < 1) throw std::invalid_argument("sample_apm: bad dimensions");
    if (dist.max_degree() > num_res) throw std::invalid_argument("sample_apm: degree exceeds number of REs");
    std::vector<double> weights;
    for (const auto& m : dist.masses()) weights.push_back(m.probability);
    std::discrete_distribution<int> pick_degree(weights.begin(), weights.end());

    ApmMatrix g = ApmMatrix::Zero(num_res, num_users);
    std::vector<int> slots(num_res);
    for (int m = 0; m < num_users; ++m) {
        const int d = dist.masses()[pick_degree(rng)].degree;
        std::iota(slots.begin(), slots.end(), 0);
        // Partial Fisher-Yates: first d entries are a uniform d-subset.
        for (int i = 0; i < d; ++i) {
            std::uniform_int_distribution<int> u(i, num_res - 1);
            std::swap(slots[i], slots[u(rng)]);
            g(slots[i], m) = 1;
        }
    }
    return g;
}

double path_loss(double r, double r0, double alpha) {
    if (!(r > 0.0)) throw std::invalid_argument("path_loss: r must be > 0");
    return std::pow(r / r0, -alpha);
}

double transmit_power(double r, double r0, double alpha, double zeta, double nominal_power) {
    if (!(r > 0.0)) throw std::invalid_argument("transmit_power: r must be > 0");
    return nominal_power * std::pow(r / r0, alpha - zeta);
}

FrameRealization synthesize_frame(const SystemConfig& cfg, Rng& rng) {
    cfg.validate();
    const int M = cfg.resolved_num_users();
    const int T = cfg.num_res;
    const int N = cfg.num_antennas;
    const int tau = cfg.pilot_len;
    const double N0 = cfg.resolved_noise_power();
    const double zeta = cfg.resolved_power_control_exponent();

    FrameRealization f;
    f.positions.resize(M);
    f.path_loss.resize(M);
    f.transmit_power.resize(M);
    f.effective_gain.resize(M);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int m = 0; m < M; ++m) {
        // Area-uniform over the disk; 1 - u keeps r strictly positive.
        const double r = cfg.cell_radius * std::sqrt(1.0 - unif(rng));
        f.positions[m] = r;
        f.path_loss[m] = path_loss(r, cfg.reference_distance, cfg.path_loss_exponent);
        f.transmit_power[m] =
            transmit_power(r, cfg.reference_distance, cfg.path_loss_exponent, zeta, cfg.data_power);
        f.effective_gain[m] = f.path_loss[m] * f.transmit_power[m] / cfg.data_power;
    }

    f.apm = sample_apm(M, T, cfg.degree_distribution, rng);
    f.pilots = complex_normal_matrix(rng, tau, M, cfg.pilot_power);

    f.channels.resize(T);
    f.noise.resize(T);
    f.pilot_signals.resize(T);
    for (int t = 0; t < T; ++t) {
        CMatrix h = complex_normal_matrix(rng, N, M, 1.0);
        for (int m = 0; m < M; ++m) h.col(m) *= std::sqrt(f.effective_gain[m] * cfg.fading_variance);
        f.channels[t] = std::move(h);
        f.noise[t] = complex_normal_matrix(rng, N, tau, N0);
        CMatrix y = f.noise[t];
        for (int m = 0; m < M; ++m)
            if (f.apm(t, m)) y.noalias() += f.channels[t].col(m) * f.pilots.col(m).adjoint();
        f.pilot_signals[t] = std::move(y);
    }
    return f;
}

}  // namespace irsa
