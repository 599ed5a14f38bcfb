#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irsa/chest.hpp"
#include "irsa/config.hpp"
#include "irsa/types.hpp"

namespace irsa {

/// A = H (H^H H + lambda I)^{-1}. With lambda = 0 the Gram matrix must be
/// invertible; a rank-deficient H then throws std::domain_error.
CMatrix rzf_combiner(const CMatrix& estimates, double lambda);

/// A = H.
CMatrix mrc_combiner(const CMatrix& estimates);

/// A = H (H^H H)^{-1}. When N < K the Gram matrix is singular by construction;
/// falls back to RZF with lambda = 1e-6 * trace(H^H H) / K and logs it.
CMatrix zf_combiner(const CMatrix& estimates);

CMatrix make_combiner(Combiner kind, const CMatrix& estimates, double lambda);

/// SINR components, every power normalized by P.
struct SinrReport {
    double sinr = 0.0;
    double gain = 0.0;
    double mui = 0.0;
    double est = 0.0;
    double fnu = 0.0;
};

struct SinrContext {
    std::span<const std::uint8_t> active;      ///< g_ti per candidate (truth)
    std::span<const std::uint8_t> detected;    ///< ghat_ti; empty for known-APM schemes
    std::span<const double> prior_variance;    ///< beta_i sigma_h^2, enters FNU only
    double data_power = 1.0;
    double noise_power = 1.0;
};

/// SINR of every candidate in an RE for combiner columns aligned with the
/// estimate columns. A zero combiner column yields SINR 0.
std::vector<SinrReport> sinr(const CMatrix& combiner, const EstimateSet& estimates, const SinrContext& ctx);

/// Closed-form MRC SINR (combiner = estimates), known-APM schemes.
std::vector<double> mrc_sinr_closed_form(const EstimateSet& estimates, std::span<const std::uint8_t> active,
                                         double data_power, double noise_power);

/// Closed-form ZF SINR via the inverse Gram matrix diagonal, known-APM schemes.
std::vector<double> zf_sinr_closed_form(const EstimateSet& estimates, std::span<const std::uint8_t> active,
                                        double data_power, double noise_power);

/// Large-N deterministic equivalent of the MRC SINR.
struct DetSinrReport {
    double sinr = 0.0;
    double epsilon = 0.0;
    double sig = 0.0;
    double ncoh = 0.0;
    double coh = 0.0;
};

struct DetSinrInputs {
    Estimator scheme = Estimator::MMSE;
    const CMatrix* kernel = nullptr;  ///< tau x K; unused for LCMMSE
    const CMatrix* pilots = nullptr;  ///< tau x K
    std::span<const std::uint8_t> active;
    std::span<const std::uint8_t> detected;  ///< MSBL only
    std::span<const double> prior_variance;
    std::span<const double> error_variances;
    int num_antennas = 1;
    double data_power = 1.0;
    double noise_power = 1.0;
};

std::vector<DetSinrReport> deterministic_sinr(const DetSinrInputs& in);

}  // namespace irsa
