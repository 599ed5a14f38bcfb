#include "irsa/sic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "irsa/chest.hpp"
#include "irsa/detect.hpp"
#include "irsa/parallel.hpp"

namespace irsa {
namespace {

CMatrix gather_columns(const CMatrix& m, const std::vector<int>& cols) {
    CMatrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = m.col(cols[j]);
    return out;
}

}  // namespace

ReReceiver ReReceiver::from_config(const SystemConfig& cfg) {
    ReReceiver rx;
    rx.estimator = cfg.estimator;
    rx.combiner = cfg.combiner;
    rx.rzf_regularizer = cfg.rzf_regularizer;
    rx.msbl_iters = cfg.msbl_iters;
    rx.msbl_tolerance = cfg.msbl_tolerance;
    rx.msbl_prune_threshold = cfg.msbl_prune_threshold;
    rx.data_power = cfg.data_power;
    rx.noise_power = cfg.resolved_noise_power();
    return rx;
}

std::vector<double> re_candidate_sinr(const ReReceiver& rx, const CMatrix& residual, const CMatrix& pilots,
                                      const CMatrix& true_channels, std::span<const std::uint8_t> active,
                                      std::span<const double> prior_variance) {
    if (pilots.cols() == 0) return {};
    EstimateSet est;
    switch (rx.estimator) {
        case Estimator::MMSE: est = mmse_estimate(residual, pilots, prior_variance, rx.noise_power); break;
        case Estimator::LCMMSE:
            est = lcmmse_estimate(residual, pilots, active, prior_variance, rx.noise_power);
            break;
        case Estimator::PerfectCSI: est = perfect_csi_estimate(true_channels); break;
        case Estimator::MSBL: {
            MsblOptions opt;
            opt.max_iters = rx.msbl_iters;
            opt.tolerance = rx.msbl_tolerance;
            opt.prune_threshold = rx.msbl_prune_threshold;
            est = msbl_estimate(residual.adjoint(), pilots, rx.noise_power, opt, active, prior_variance);
            break;
        }
    }

    SinrContext ctx;
    ctx.active = active;
    ctx.data_power = rx.data_power;
    ctx.noise_power = rx.noise_power;

    CMatrix combiner;
    if (rx.estimator == Estimator::MSBL) {
        // The receiver only combines over users it believes present.
        std::vector<int> detected_cols;
        for (std::size_t j = 0; j < est.size(); ++j)
            if (est.apm_row_estimate[j]) detected_cols.push_back(static_cast<int>(j));
        combiner = CMatrix::Zero(est.estimates.rows(), est.estimates.cols());
        if (!detected_cols.empty()) {
            const CMatrix sub =
                make_combiner(rx.combiner, gather_columns(est.estimates, detected_cols), rx.rzf_regularizer);
            for (std::size_t j = 0; j < detected_cols.size(); ++j) combiner.col(detected_cols[j]) = sub.col(j);
        }
        ctx.detected = est.apm_row_estimate;
        ctx.prior_variance = prior_variance;
    } else {
        combiner = make_combiner(rx.combiner, est.estimates, rx.rzf_regularizer);
    }

    const auto reports = sinr(combiner, est, ctx);
    std::vector<double> out(reports.size());
    for (std::size_t j = 0; j < reports.size(); ++j) out[j] = reports[j].sinr;
    return out;
}

DecodeOutcome decode_frame(const FrameRealization& frame, const SystemConfig& cfg) {
    const int num_users = frame.num_users();
    const int num_res = frame.num_res();
    const ReReceiver rx = ReReceiver::from_config(cfg);
    const bool apm_known = cfg.estimator != Estimator::MSBL;

    DecodeOutcome out;
    out.num_users = num_users;
    out.num_res = num_res;
    std::vector<std::uint8_t> undecoded(num_users, 1);
    std::vector<CMatrix> residual = frame.pilot_signals;
    int remaining = num_users;
    // With a known APM an RE untouched by the last cancellations has the same
    // inputs as before and cannot decode anything new.
    std::vector<std::uint8_t> dirty(num_res, 1);

    for (int k = 1; k <= cfg.max_decode_iters && remaining > 0; ++k) {
        out.iterations_used = k;
        std::vector<std::uint8_t> newly(num_users, 0);
        std::vector<int> order;
        for (int t = 0; t < num_res; ++t) {
            if (apm_known && !dirty[t]) continue;
            std::vector<int> users;
            std::vector<std::uint8_t> active;
            std::vector<double> prior;
            for (int m = 0; m < num_users; ++m) {
                if (!undecoded[m] || (apm_known && !frame.apm(t, m))) continue;
                users.push_back(m);
                active.push_back(frame.apm(t, m));
                prior.push_back(frame.effective_gain[m] * cfg.fading_variance);
            }
            if (users.empty()) continue;
            const CMatrix pilots = gather_columns(frame.pilots, users);
            const CMatrix channels = gather_columns(frame.channels[t], users);
            const auto rho = re_candidate_sinr(rx, residual[t], pilots, channels, active, prior);
            for (std::size_t j = 0; j < users.size(); ++j) {
                const int m = users[j];
                if (rho[j] >= cfg.sinr_threshold && !newly[m]) {
                    newly[m] = 1;
                    order.push_back(m);
                    out.log.push_back({k, t, m, rho[j]});
                }
            }
        }
        if (order.empty()) {
            // Nothing changed, so the next sweep would see identical inputs and
            // decode nothing either: the second idle iteration is implied.
            if (k < cfg.max_decode_iters) out.iterations_used = k + 1;
            break;
        }
        std::ranges::fill(dirty, 0);
        for (int m : order) {
            undecoded[m] = 0;
            --remaining;
            for (int t = 0; t < num_res; ++t)
                if (frame.apm(t, m)) {
                    residual[t].noalias() -= frame.channels[t].col(m) * frame.pilots.col(m).adjoint();
                    dirty[t] = 1;
                }
        }
    }

    for (int m = 0; m < num_users; ++m)
        if (!undecoded[m]) out.decoded_users.push_back(m);
    const double decoded = static_cast<double>(out.decoded_users.size());
    out.throughput = decoded / num_res;
    out.plr = 1.0 - decoded / num_users;
    return out;
}

MeanCi mean_ci95(const std::vector<double>& samples) {
    MeanCi r;
    const std::size_t n = samples.size();
    if (n == 0) return r;
    double sum = 0.0;
    for (double x : samples) sum += x;
    r.mean = sum / static_cast<double>(n);
    if (n < 2) return r;
    double ss = 0.0;
    for (double x : samples) ss += (x - r.mean) * (x - r.mean);
    r.ci95 = 1.959963984540054 * std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return r;
}

MonteCarloSummary monte_carlo_throughput(const SystemConfig& cfg, int num_trials, std::uint64_t seed,
                                         std::uint64_t stream, unsigned threads) {
    if (num_trials < 1) throw std::invalid_argument("monte_carlo_throughput: num_trials must be >= 1");
    cfg.validate();
    MonteCarloSummary s;
    s.trials = num_trials;
    s.throughput_samples.assign(num_trials, 0.0);
    s.plr_samples.assign(num_trials, 0.0);
    parallel_for(static_cast<std::size_t>(num_trials), threads, [&](std::size_t i) {
        Rng rng = make_stream(seed, {stream, static_cast<std::uint64_t>(i)});
        const FrameRealization frame = synthesize_frame(cfg, rng);
        const DecodeOutcome d = decode_frame(frame, cfg);
        s.throughput_samples[i] = d.throughput;
        s.plr_samples[i] = d.plr;
    });
    const MeanCi t = mean_ci95(s.throughput_samples);
    const MeanCi p = mean_ci95(s.plr_samples);
    s.throughput_mean = t.mean;
    s.throughput_ci95 = t.ci95;
    s.plr_mean = p.mean;
    s.plr_ci95 = p.ci95;
    return s;
}

}  // namespace irsa
