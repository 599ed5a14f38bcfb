#pragma once

#include <vector>

#include "irsa/config.hpp"
#include "irsa/rng.hpp"
#include "irsa/types.hpp"

namespace irsa {

/// Draws M i.i.d. access patterns: user m samples d_m from dist and picks d_m
/// distinct REs uniformly. Throws if the largest degree exceeds T.
ApmMatrix sample_apm(int num_users, int num_res, const DegreeDistribution& dist, Rng& rng);

/// beta = (r / r0)^(-alpha).
double path_loss(double r, double r0, double alpha);

/// P (r / r0)^(alpha - zeta); zeta = 0 inverts the path loss, zeta = alpha keeps P.
double transmit_power(double r, double r0, double alpha, double zeta, double nominal_power);

/// One sampled frame.
struct FrameRealization {
    std::vector<double> positions;       ///< radial distance r_m [m]
    std::vector<double> path_loss;       ///< geometric beta_m
    std::vector<double> transmit_power;  ///< P_tx,m [mW]
    /// beta_m * P_tx,m / P: the large-scale gain seen by the receiver. Channel
    /// entries have variance effective_gain[m] * sigma_h^2.
    std::vector<double> effective_gain;
    ApmMatrix apm;                       ///< T x M
    CMatrix pilots;                      ///< tau x M, column p_m
    std::vector<CMatrix> channels;       ///< per RE, N x M, column h_tm
    std::vector<CMatrix> noise;          ///< per RE, N x tau
    std::vector<CMatrix> pilot_signals;  ///< per RE, N x tau, sum_m g_tm h_tm p_m^H + noise

    int num_users() const { return static_cast<int>(positions.size()); }
    int num_res() const { return static_cast<int>(apm.rows()); }
};

/// Samples geometry, APM, pilots, channels and received pilot signals.
FrameRealization synthesize_frame(const SystemConfig& cfg, Rng& rng);

}  // namespace irsa
