#pragma once

#include "irsa/types.hpp"

namespace irsa {

/// Solves A X = B for Hermitian positive-definite A via Cholesky. If A is
/// numerically singular (Cholesky fails or a pivot drops below 1e-12 * trace),
/// 1e-12 * trace * I is added and a warning is emitted once per process.
CMatrix hpd_solve(const CMatrix& a, const CMatrix& b);

/// Inverse of a Hermitian positive-definite matrix with the same guard.
CMatrix hpd_inverse(const CMatrix& a);

/// Number of times the regularization guard fired (diagnostics, tests).
long hpd_regularization_count();

/// Writes a warning line to stderr unless IRSA_QUIET is set.
void log_warning(const char* message);

}  // namespace irsa
