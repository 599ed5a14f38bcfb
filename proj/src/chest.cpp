#include "irsa/chest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "irsa/linalg.hpp"

namespace irsa {
namespace {

void check_dims(const CMatrix& pilot_signal, const CMatrix& pilots, std::size_t k) {
    if (pilot_signal.cols() != pilots.rows())
        throw std::invalid_argument("pilot signal and pilot matrix disagree on tau");
    if (static_cast<std::size_t>(pilots.cols()) != k)
        throw std::invalid_argument("per-user parameter count does not match pilot columns");
}

// Error variance of estimate Y c_i for every candidate, given the weights w_j
// with which each user's channel actually enters Y. Candidates whose kernel
// column vanishes get `fallback[i]`.
std::vector<double> kernel_error_variances(const CMatrix& kernel, const CMatrix& pilots,
                                           std::span<const double> weights, std::span<const double> prior,
                                           double noise_power, std::span<const double> fallback) {
    const Eigen::Index k = kernel.cols();
    const CMatrix r = pilots.adjoint() * kernel;  // r(j, i) = p_j^H c_i
    std::vector<double> delta(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double c_norm2 = kernel.col(i).squaredNorm();
        if (c_norm2 == 0.0) {
            delta[i] = fallback[i];
            continue;
        }
        double total = noise_power * c_norm2;
        for (Eigen::Index j = 0; j < k; ++j) total += std::norm(r(j, i)) * weights[j];
        const double own = std::norm(r(i, i)) * weights[i];
        double ratio = (total - own) / total;
        ratio = std::clamp(ratio, 0.0, 1.0);
        delta[i] = prior[i] * ratio;
    }
    return delta;
}

// (P W P^H + N0 I)^{-1} P W.
CMatrix pilot_space_kernel(const CMatrix& pilots, std::span<const double> weights, double noise_power) {
    const Eigen::Index k = pilots.cols();
    CMatrix pw = pilots;
    for (Eigen::Index j = 0; j < k; ++j) pw.col(j) *= weights[j];
    CMatrix gram = pw * pilots.adjoint();
    gram.diagonal().array() += noise_power;
    return hpd_solve(gram, pw);
}

// P W (P^H P W + N0 I)^{-1}; the inner matrix is not Hermitian, so LU.
CMatrix user_space_kernel(const CMatrix& pilots, std::span<const double> weights, double noise_power) {
    const Eigen::Index k = pilots.cols();
    CMatrix inner = pilots.adjoint() * pilots;
    for (Eigen::Index j = 0; j < k; ++j) inner.col(j) *= weights[j];
    inner.diagonal().array() += noise_power;
    CMatrix pw = pilots;
    for (Eigen::Index j = 0; j < k; ++j) pw.col(j) *= weights[j];
    // X = PW inner^{-1}  <=>  inner^T X^T = (PW)^T
    return inner.transpose().partialPivLu().solve(pw.transpose()).transpose();
}

CMatrix gamma_covariance(const CMatrix& pilots, std::span<const double> gamma, double noise_power) {
    CMatrix c = pilots * RVector::Map(gamma.data(), static_cast<Eigen::Index>(gamma.size()))
                            .cast<Complex>()
                            .asDiagonal() *
                pilots.adjoint();
    c.diagonal().array() += noise_power;
    return c;
}

}  // namespace

EstimateSet mmse_estimate(const CMatrix& pilot_signal, const CMatrix& pilots, std::span<const double> prior_variance,
                          double noise_power, MmseForm form) {
    check_dims(pilot_signal, pilots, prior_variance.size());
    EstimateSet out;
    out.scheme = Estimator::MMSE;
    const Eigen::Index k = pilots.cols();
    out.users.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) out.users[i] = static_cast<int>(i);
    if (k == 0) return out;

    if (form == MmseForm::Auto) form = pilots.rows() <= k ? MmseForm::PilotSpace : MmseForm::UserSpace;
    out.kernel = form == MmseForm::PilotSpace ? pilot_space_kernel(pilots, prior_variance, noise_power)
                                              : user_space_kernel(pilots, prior_variance, noise_power);
    out.estimates = pilot_signal * out.kernel;
    out.error_variances =
        kernel_error_variances(out.kernel, pilots, prior_variance, prior_variance, noise_power, prior_variance);
    return out;
}

EstimateSet lcmmse_estimate(const CMatrix& pilot_signal, const CMatrix& pilots, std::span<const std::uint8_t> active,
                            std::span<const double> prior_variance, double noise_power) {
    check_dims(pilot_signal, pilots, prior_variance.size());
    if (active.size() != prior_variance.size()) throw std::invalid_argument("lcmmse_estimate: size mismatch");
    EstimateSet out;
    out.scheme = Estimator::LCMMSE;
    const Eigen::Index k = pilots.cols();
    out.users.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) out.users[i] = static_cast<int>(i);
    if (k == 0) return out;

    const CMatrix cross = pilots.adjoint() * pilots;  // (i, m) = p_i^H p_m
    out.kernel = CMatrix::Zero(pilots.rows(), k);
    out.error_variances.assign(k, 0.0);
    for (Eigen::Index m = 0; m < k; ++m) {
        if (!active[m]) continue;
        const double p_norm2 = cross(m, m).real();
        double denom = noise_power * p_norm2;
        for (Eigen::Index i = 0; i < k; ++i)
            if (active[i]) denom += std::norm(cross(i, m)) * prior_variance[i];
        const double own = std::norm(cross(m, m)) * prior_variance[m];
        const double eta = prior_variance[m] * p_norm2 / denom;
        out.kernel.col(m) = eta * pilots.col(m);
        out.error_variances[m] = prior_variance[m] * std::clamp((denom - own) / denom, 0.0, 1.0);
    }
    out.estimates = pilot_signal * out.kernel;
    return out;
}

EstimateSet perfect_csi_estimate(const CMatrix& true_channels) {
    EstimateSet out;
    out.scheme = Estimator::PerfectCSI;
    const Eigen::Index k = true_channels.cols();
    out.users.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) out.users[i] = static_cast<int>(i);
    out.estimates = true_channels;
    out.error_variances.assign(k, 0.0);
    return out;
}

CMatrix msbl_plugin_estimate(const CMatrix& pilot_signal, const CMatrix& pilots, std::span<const double> gamma,
                             double noise_power) {
    check_dims(pilot_signal, pilots, gamma.size());
    return pilot_signal * pilot_space_kernel(pilots, gamma, noise_power);
}

MsblState msbl_em_step(const CMatrix& pilot_signal_h, const CMatrix& pilots, std::span<const double> gamma,
                       double noise_power) {
    const Eigen::Index k = pilots.cols();
    const Eigen::Index n_ant = pilot_signal_h.cols();
    const CMatrix g = RVector::Map(gamma.data(), k).cast<Complex>().asDiagonal();
    const CMatrix c = gamma_covariance(pilots, gamma, noise_power);
    MsblState s;
    s.covariance = g - g * pilots.adjoint() * hpd_solve(c, pilots * g);
    s.means = s.covariance * pilots.adjoint() * pilot_signal_h / noise_power;
    s.gamma.resize(k);
    for (Eigen::Index i = 0; i < k; ++i)
        s.gamma[i] = s.covariance(i, i).real() + s.means.row(i).squaredNorm() / static_cast<double>(n_ant);
    return s;
}

double msbl_log_likelihood(const CMatrix& pilot_signal_h, const CMatrix& pilots, std::span<const double> gamma,
                           double noise_power) {
    const CMatrix c = gamma_covariance(pilots, gamma, noise_power);
    Eigen::LLT<CMatrix> llt(c);
    const CMatrix& l = llt.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i).real());
    const double quad = (pilot_signal_h.adjoint() * llt.solve(pilot_signal_h)).trace().real();
    const double n_ant = static_cast<double>(pilot_signal_h.cols());
    const double tau = static_cast<double>(pilot_signal_h.rows());
    return -n_ant * (tau * std::log(std::numbers::pi) + log_det) - quad;
}

EstimateSet msbl_estimate(const CMatrix& pilot_signal_h, const CMatrix& pilots, double noise_power,
                          const MsblOptions& options, std::span<const std::uint8_t> true_active,
                          std::span<const double> true_prior_variance) {
    const Eigen::Index k = pilots.cols();
    if (pilot_signal_h.rows() != pilots.rows()) throw std::invalid_argument("msbl_estimate: tau mismatch");
    if (static_cast<std::size_t>(k) != true_active.size() || true_active.size() != true_prior_variance.size())
        throw std::invalid_argument("msbl_estimate: size mismatch");
    if (options.max_iters < 1) throw std::invalid_argument("msbl_estimate: max_iters must be >= 1");

    EstimateSet out;
    out.scheme = Estimator::MSBL;
    out.users.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) out.users[i] = static_cast<int>(i);
    if (k == 0) return out;

    const double n_ant = static_cast<double>(pilot_signal_h.cols());
    std::vector<double> gamma(k, 1.0);
    std::vector<Eigen::Index> live(k);
    for (Eigen::Index i = 0; i < k; ++i) live[i] = i;
    // E/M iterations using the tau x tau form: with C = N0 I + P Gamma P^H,
    // Sigma_ii = gamma_i - gamma_i^2 p_i^H C^{-1} p_i and mu = Gamma P^H C^{-1} Ybar.
    for (int j = 0; j < options.max_iters && !live.empty(); ++j) {
        const auto kl = static_cast<Eigen::Index>(live.size());
        CMatrix p(pilots.rows(), kl);
        std::vector<double> g_live(kl);
        for (Eigen::Index a = 0; a < kl; ++a) {
            p.col(a) = pilots.col(live[a]);
            g_live[a] = gamma[live[a]];
        }
        CMatrix scaled = p;
        for (Eigen::Index a = 0; a < kl; ++a) scaled.col(a) *= std::sqrt(g_live[a]);
        CMatrix c = CMatrix::Zero(p.rows(), p.rows());
        c.selfadjointView<Eigen::Lower>().rankUpdate(scaled);
        c.diagonal().array() += noise_power;
        c.triangularView<Eigen::StrictlyUpper>() = c.adjoint();
        Eigen::LLT<CMatrix> llt(c);
        if (llt.info() != Eigen::Success) {
            c.diagonal().array() += 1e-12 * c.trace().real();
            llt.compute(c);
        }
        // With C = L L^H: p_i^H C^{-1} p_i = |L^{-1} p_i|^2 and P^H C^{-1} Ybar = (L^{-1}P)^H (L^{-1}Ybar).
        const auto lower = llt.matrixL();
        const CMatrix w = lower.solve(p);
        const CMatrix v = lower.solve(pilot_signal_h);
        const CMatrix proj = w.adjoint() * v;
        double max_change = 0.0, max_gamma = 0.0;
        for (Eigen::Index a = 0; a < kl; ++a) {
            const double g = g_live[a];
            const double quad = w.col(a).squaredNorm();
            const double sigma_ii = std::max(g - g * g * quad, 0.0);
            const double next = sigma_ii + g * g * proj.row(a).squaredNorm() / n_ant;
            max_change = std::max(max_change, std::abs(next - g));
            max_gamma = std::max(max_gamma, next);
            gamma[live[a]] = next;
        }
        if (options.prune_during_iterations) {
            std::erase_if(live, [&](Eigen::Index i) {
                if (gamma[i] >= options.prune_threshold) return false;
                gamma[i] = 0.0;
                return true;
            });
        }
        if (options.log_likelihood_trace)
            options.log_likelihood_trace->push_back(
                msbl_log_likelihood(pilot_signal_h, pilots, gamma, noise_power));
        if (options.tolerance > 0.0 && max_change <= options.tolerance * max_gamma) break;
    }

    out.hyperparameters = gamma;
    out.apm_row_estimate.resize(k);
    for (Eigen::Index i = 0; i < k; ++i) out.apm_row_estimate[i] = gamma[i] >= options.prune_threshold ? 1 : 0;

    const CMatrix pilot_signal = pilot_signal_h.adjoint();
    out.estimates = pilot_signal * pilot_space_kernel(pilots, gamma, noise_power);

    // Error bookkeeping uses D = diag(ghat * g * beta * sigma^2).
    std::vector<double> d(k), fallback(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        d[i] = (out.apm_row_estimate[i] && true_active[i]) ? true_prior_variance[i] : 0.0;
        fallback[i] = true_active[i] ? true_prior_variance[i] : 0.0;
    }
    out.kernel = pilot_space_kernel(pilots, d, noise_power);
    out.error_variances = kernel_error_variances(out.kernel, pilots, d, true_prior_variance, noise_power, fallback);
    return out;
}

std::vector<std::optional<double>> estimate_path_loss_msbl(const std::vector<std::vector<double>>& gamma,
                                                           const std::vector<std::vector<std::uint8_t>>& ghat,
                                                           double fading_variance) {
    if (gamma.size() != ghat.size()) throw std::invalid_argument("estimate_path_loss_msbl: RE count mismatch");
    const std::size_t users = gamma.empty() ? 0 : gamma.front().size();
    std::vector<std::optional<double>> out(users);
    for (std::size_t i = 0; i < users; ++i) {
        double num = 0.0;
        int count = 0;
        for (std::size_t t = 0; t < gamma.size(); ++t) {
            if (gamma[t].size() != users || ghat[t].size() != users)
                throw std::invalid_argument("estimate_path_loss_msbl: ragged tables");
            if (ghat[t][i]) {
                num += gamma[t][i];
                ++count;
            }
        }
        if (count > 0) out[i] = num / (fading_variance * count);
    }
    return out;
}

}  // namespace irsa
