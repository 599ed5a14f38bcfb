#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "irsa/config.hpp"
#include "irsa/types.hpp"

namespace irsa {

/// Channel estimates for the candidate users of one RE in one decoding
/// iteration. Column j of every matrix / entry j of every vector refers to the
/// same candidate; `users` maps candidates back to global user indices.
struct EstimateSet {
    int re_index = -1;
    int iteration = 0;
    Estimator scheme = Estimator::MMSE;
    std::vector<int> users;

    CMatrix estimates;                    ///< N x K, column = channel estimate
    std::vector<double> error_variances;  ///< delta, error covariance is delta * I_N
    /// tau x K kernel C with estimates = Y C (MSBL: the truth-masked kernel
    /// built from D = diag(ghat * g * beta * sigma^2)). Empty for perfect CSI.
    CMatrix kernel;

    // MSBL only.
    std::vector<std::uint8_t> apm_row_estimate;  ///< ghat
    std::vector<double> hyperparameters;         ///< gamma after the last EM iteration

    std::size_t size() const { return users.size(); }
    bool empty() const { return users.empty(); }
};

enum class MmseForm {
    PilotSpace,  ///< Y (P B P^H + N0 I_tau)^{-1} P B
    UserSpace,   ///< Y P B (P^H P B + N0 I_K)^{-1}
    Auto,        ///< whichever inverse is smaller
};

/// MMSE estimate with known APM. `pilots` holds the tau x K pilots of the users
/// present in the RE, `prior_variance` their beta * sigma_h^2.
EstimateSet mmse_estimate(const CMatrix& pilot_signal, const CMatrix& pilots,
                          std::span<const double> prior_variance, double noise_power,
                          MmseForm form = MmseForm::Auto);

/// Inversion-free estimate h_m = eta_m Y p_m. `active` is g_tm for each candidate;
/// inactive candidates get a zero estimate and zero error variance.
EstimateSet lcmmse_estimate(const CMatrix& pilot_signal, const CMatrix& pilots,
                            std::span<const std::uint8_t> active, std::span<const double> prior_variance,
                            double noise_power);

/// Genie estimate: the true channels, zero error.
EstimateSet perfect_csi_estimate(const CMatrix& true_channels);

struct MsblOptions {
    int max_iters = 500;
    double prune_threshold = 1e-6;
    /// Stop once max_i |gamma_i' - gamma_i| <= tolerance * max_i gamma_i; 0 runs all iterations.
    double tolerance = 1e-4;
    /// Drop hyperparameters from the EM updates once they fall below prune_threshold.
    bool prune_during_iterations = true;
    /// When set, receives the log-likelihood after each EM iteration.
    std::vector<double>* log_likelihood_trace = nullptr;
};

/// Joint activity / channel estimation by multiple sparse Bayesian learning.
/// `pilot_signal_h` is the tau x N conjugate-transposed received signal, `pilots`
/// the pilots of every undecoded user. `true_active` / `true_prior_variance`
/// only enter the error-variance bookkeeping, never the estimator itself.
EstimateSet msbl_estimate(const CMatrix& pilot_signal_h, const CMatrix& pilots, double noise_power,
                          const MsblOptions& options, std::span<const std::uint8_t> true_active,
                          std::span<const double> true_prior_variance);

/// Plug-in estimate Y P Gamma (P^H P Gamma + N0 I)^{-1} for given hyperparameters.
CMatrix msbl_plugin_estimate(const CMatrix& pilot_signal, const CMatrix& pilots, std::span<const double> gamma,
                             double noise_power);

/// Posterior moments of one EM iteration, computed literally (full covariance).
struct MsblState {
    CMatrix covariance;  ///< K x K
    CMatrix means;       ///< K x N, column n = mu_n
    std::vector<double> gamma;
};
MsblState msbl_em_step(const CMatrix& pilot_signal_h, const CMatrix& pilots, std::span<const double> gamma,
                       double noise_power);

/// log p(Ybar; gamma) for the MMV model with prior CN(0, diag(gamma)).
double msbl_log_likelihood(const CMatrix& pilot_signal_h, const CMatrix& pilots, std::span<const double> gamma,
                           double noise_power);

/// beta_hat_i = sum_t ghat_ti gamma_ti / (sigma_h^2 sum_t ghat_ti); empty when a
/// user was never detected. Rows are REs, columns users.
std::vector<std::optional<double>> estimate_path_loss_msbl(const std::vector<std::vector<double>>& gamma,
                                                           const std::vector<std::vector<std::uint8_t>>& ghat,
                                                           double fading_variance);

}  // namespace irsa
