#include "irsa/detect.hpp"

#include <stdexcept>
#include <string>

#include "irsa/linalg.hpp"

namespace irsa {

CMatrix mrc_combiner(const CMatrix& estimates) { return estimates; }

CMatrix rzf_combiner(const CMatrix& estimates, double lambda) {
    if (!(lambda >= 0.0)) throw std::invalid_argument("rzf_combiner: lambda must be >= 0");
    const Eigen::Index k = estimates.cols();
    if (k == 0) return estimates;
    CMatrix gram = estimates.adjoint() * estimates;
    if (lambda > 0.0) {
        gram.diagonal().array() += lambda;
        return estimates * hpd_inverse(gram);
    }
    if (estimates.rows() < k) throw std::domain_error("rzf_combiner: lambda = 0 needs N >= number of users");
    Eigen::LLT<CMatrix> llt(gram);
    const double trace = gram.diagonal().real().sum();
    bool ok = llt.info() == Eigen::Success && trace > 0.0;
    for (Eigen::Index i = 0; ok && i < k; ++i)
        if (std::norm(llt.matrixLLT()(i, i)) < 1e-12 * trace) ok = false;
    if (!ok) throw std::domain_error("rzf_combiner: estimate matrix is rank deficient");
    return estimates * llt.solve(CMatrix::Identity(k, k));
}

CMatrix zf_combiner(const CMatrix& estimates) {
    const Eigen::Index k = estimates.cols();
    if (k == 0) return estimates;
    if (estimates.rows() >= k) {
        try {
            return rzf_combiner(estimates, 0.0);
        } catch (const std::domain_error&) {
        }
    }
    const double trace = estimates.squaredNorm();
    const double lambda = 1e-6 * trace / static_cast<double>(k);
    log_warning("zf_combiner: Gram matrix singular (N < K or rank deficient), using RZF fallback");
    return rzf_combiner(estimates, lambda > 0.0 ? lambda : 1e-300);
}

CMatrix make_combiner(Combiner kind, const CMatrix& estimates, double lambda) {
    switch (kind) {
        case Combiner::MRC: return mrc_combiner(estimates);
        case Combiner::ZF: return zf_combiner(estimates);
        case Combiner::RZF: return lambda > 0.0 ? rzf_combiner(estimates, lambda) : zf_combiner(estimates);
    }
    throw std::invalid_argument("make_combiner: unknown combiner");
}

std::vector<SinrReport> sinr(const CMatrix& combiner, const EstimateSet& estimates, const SinrContext& ctx) {
    const Eigen::Index k = estimates.estimates.cols();
    if (combiner.cols() != k || static_cast<Eigen::Index>(ctx.active.size()) != k)
        throw std::invalid_argument("sinr: dimension mismatch");
    const bool msbl = !ctx.detected.empty();
    if (msbl && (static_cast<Eigen::Index>(ctx.detected.size()) != k ||
                 static_cast<Eigen::Index>(ctx.prior_variance.size()) != k))
        throw std::invalid_argument("sinr: MSBL context size mismatch");

    auto seen = [&](Eigen::Index i) -> double {
        return (ctx.active[i] && (!msbl || ctx.detected[i])) ? 1.0 : 0.0;
    };
    double est_total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) est_total += seen(i) * estimates.error_variances[i];

    const CMatrix inner = combiner.adjoint() * estimates.estimates;  // (m, i) = a_m^H h_i
    const double noise_term = ctx.noise_power / ctx.data_power;
    std::vector<SinrReport> out(k);
    for (Eigen::Index m = 0; m < k; ++m) {
        const double a_norm2 = combiner.col(m).squaredNorm();
        SinrReport& r = out[m];
        if (a_norm2 == 0.0) continue;
        r.gain = seen(m) * std::norm(inner(m, m)) / a_norm2;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (i == m) continue;
            r.mui += seen(i) * std::norm(inner(m, i)) / a_norm2;
            if (msbl && ctx.active[i] && !ctx.detected[i]) r.fnu += ctx.prior_variance[i];
        }
        r.est = est_total;
        r.sinr = r.gain / (noise_term + r.mui + r.est + r.fnu);
    }
    return out;
}

std::vector<double> mrc_sinr_closed_form(const EstimateSet& estimates, std::span<const std::uint8_t> active,
                                         double data_power, double noise_power) {
    const CMatrix& h = estimates.estimates;
    const Eigen::Index k = h.cols();
    const CMatrix gram = h.adjoint() * h;
    double est = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) est += active[i] * data_power * estimates.error_variances[i];
    std::vector<double> out(k, 0.0);
    for (Eigen::Index m = 0; m < k; ++m) {
        const double norm2 = gram(m, m).real();
        if (norm2 == 0.0) continue;
        double mui = 0.0;
        for (Eigen::Index i = 0; i < k; ++i)
            if (i != m) mui += active[i] * data_power * std::norm(gram(m, i)) / norm2;
        out[m] = data_power * active[m] * norm2 / (noise_power + est + mui);
    }
    return out;
}

std::vector<double> zf_sinr_closed_form(const EstimateSet& estimates, std::span<const std::uint8_t> active,
                                        double data_power, double noise_power) {
    const CMatrix& h = estimates.estimates;
    const Eigen::Index k = h.cols();
    const CMatrix gram_inv = hpd_inverse(h.adjoint() * h);
    double est = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) est += active[i] * data_power * estimates.error_variances[i];
    std::vector<double> out(k);
    for (Eigen::Index m = 0; m < k; ++m) out[m] = data_power * active[m] / ((noise_power + est) * gram_inv(m, m).real());
    return out;
}

std::vector<DetSinrReport> deterministic_sinr(const DetSinrInputs& in) {
    if (in.pilots == nullptr) throw std::invalid_argument("deterministic_sinr: pilots required");
    const CMatrix& pilots = *in.pilots;
    const Eigen::Index k = pilots.cols();
    const bool lcmmse = in.scheme == Estimator::LCMMSE;
    const bool msbl = in.scheme == Estimator::MSBL;
    if (!lcmmse && (in.kernel == nullptr || in.kernel->cols() != k))
        throw std::invalid_argument("deterministic_sinr: kernel required for MMSE/MSBL");
    if (msbl && static_cast<Eigen::Index>(in.detected.size()) != k)
        throw std::invalid_argument("deterministic_sinr: MSBL needs detected flags");

    const CMatrix& basis = lcmmse ? pilots : *in.kernel;
    const CMatrix proj = basis.adjoint() * pilots;  // (m, i) = c_m^H p_i
    const double big_n = static_cast<double>(in.num_antennas);
    std::vector<DetSinrReport> out(k);
    for (Eigen::Index m = 0; m < k; ++m) {
        DetSinrReport& r = out[m];
        const double g = in.active[m];
        const double ghat = msbl ? static_cast<double>(in.detected[m]) : 1.0;
        r.epsilon = in.noise_power * basis.col(m).squaredNorm();
        for (Eigen::Index i = 0; i < k; ++i) r.epsilon += in.active[i] * in.prior_variance[i] * std::norm(proj(m, i));
        if (lcmmse) {
            const double p2 = pilots.col(m).squaredNorm();
            r.sig = g * in.prior_variance[m] * in.prior_variance[m] * p2 * p2;
        } else {
            r.sig = ghat * g * r.epsilon * r.epsilon;
        }
        r.ncoh = ghat * g * in.error_variances[m];
        for (Eigen::Index i = 0; i < k; ++i) {
            if (i == m) continue;
            r.ncoh += in.active[i] * in.prior_variance[i];
            r.coh += in.active[i] * in.prior_variance[i] * in.prior_variance[i] * std::norm(proj(m, i));
        }
        r.coh *= big_n;
        const double denom = r.epsilon * (in.noise_power / in.data_power + r.ncoh) + r.coh;
        r.sinr = denom > 0.0 ? big_n * r.sig / denom : 0.0;
    }
    return out;
}

}  // namespace irsa
