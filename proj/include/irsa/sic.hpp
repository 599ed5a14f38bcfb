#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "irsa/config.hpp"
#include "irsa/scenario.hpp"

namespace irsa {

/// Receiver settings for evaluating one RE.
struct ReReceiver {
    Estimator estimator = Estimator::MMSE;
    Combiner combiner = Combiner::RZF;
    double rzf_regularizer = 1e-2;
    int msbl_iters = 500;
    double msbl_tolerance = 1e-4;
    double msbl_prune_threshold = 1e-6;
    double data_power = 1.0;
    double noise_power = 1.0;

    static ReReceiver from_config(const SystemConfig& cfg);
};

/// SINR of each candidate in one RE. `residual` is the N x tau pilot signal
/// after cancellation, `pilots`/`true_channels` hold the candidates' columns and
/// `active` their true g_t. Known-APM schemes expect only active candidates.
std::vector<double> re_candidate_sinr(const ReReceiver& rx, const CMatrix& residual, const CMatrix& pilots,
                                      const CMatrix& true_channels, std::span<const std::uint8_t> active,
                                      std::span<const double> prior_variance);

struct DecodeLogEntry {
    int iteration;  ///< k, starting at 1
    int re;         ///< RE where the packet cleared the threshold
    int user;
    double sinr;
};

struct DecodeOutcome {
    std::vector<int> decoded_users;  ///< ascending
    std::vector<DecodeLogEntry> log;
    double throughput = 0.0;         ///< decoded packets per RE
    double plr = 1.0;
    int iterations_used = 0;
    int num_users = 0;
    int num_res = 0;
};

/// SIC decoding of one frame under the SINR-threshold model. Within an
/// iteration every packet clearing the threshold in some RE is decoded; the
/// residual pilot signals are then updated with perfect cancellation and the
/// channels re-estimated. Stops after two iterations without progress or k_max.
DecodeOutcome decode_frame(const FrameRealization& frame, const SystemConfig& cfg);

struct MonteCarloSummary {
    int trials = 0;
    double throughput_mean = 0.0;
    double throughput_ci95 = 0.0;  ///< half-width, normal approximation; 0 when trials = 1
    double plr_mean = 0.0;
    double plr_ci95 = 0.0;
    std::vector<double> throughput_samples;
    std::vector<double> plr_samples;
};

/// Mean and 95% CI over i.i.d. frames; trial i draws from stream (seed, stream, i).
MonteCarloSummary monte_carlo_throughput(const SystemConfig& cfg, int num_trials, std::uint64_t seed,
                                         std::uint64_t stream = 0, unsigned threads = 1);

/// Sample mean and 95% normal-approximation half-width.
struct MeanCi {
    double mean = 0.0;
    double ci95 = 0.0;
};
MeanCi mean_ci95(const std::vector<double>& samples);

}  // namespace irsa
