#include "irsa/linalg.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>

namespace irsa {
namespace {

std::atomic<long> g_regularized{0};
std::atomic<bool> g_warned{false};

}  // namespace

void log_warning(const char* message) {
    if (std::getenv("IRSA_QUIET") != nullptr) return;
    std::cerr << "irsa: warning: " << message << '\n';
}

CMatrix hpd_solve(const CMatrix& a, const CMatrix& b) {
    const double trace = a.diagonal().real().sum();
    Eigen::LLT<CMatrix> llt(a);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        const double threshold = 1e-12 * trace;
        const CMatrix& l = llt.matrixLLT();
        for (Eigen::Index i = 0; i < l.rows() && ok; ++i)
            if (std::norm(l(i, i)) < threshold) ok = false;
    }
    if (ok) return llt.solve(b);

    ++g_regularized;
    if (!g_warned.exchange(true)) log_warning("ill-conditioned HPD system regularized by 1e-12*trace*I");
    CMatrix reg = a;
    reg.diagonal().array() += 1e-12 * (trace > 0.0 ? trace : 1.0);
    return Eigen::LLT<CMatrix>(reg).solve(b);
}

CMatrix hpd_inverse(const CMatrix& a) {
    return hpd_solve(a, CMatrix::Identity(a.rows(), a.cols()));
}

long hpd_regularization_count() { return g_regularized.load(); }

}  // namespace irsa
