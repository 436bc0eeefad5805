#pragma once

// BLAS backend checks.
//
// OpenBLAS 0.3.20 with DYNAMIC_ARCH selects its Cooperlake kernels on recent
// AVX-512 Xeons, and those return wrong results inside the LAPACK eigensolvers
// for n >~ 100. The kernel set is chosen when the library is loaded, so the only
// remedy is OPENBLAS_CORETYPE in the environment of a fresh process.

#include <string>

namespace qpgen::backend {

/// OpenBLAS core name, or "unknown" for other BLAS libraries.
std::string blas_core();

/// Re-executes the current program with OPENBLAS_CORETYPE=SkylakeX when the
/// loaded OpenBLAS picked a kernel set known to be broken and the variable is
/// unset. Returns only when no re-exec was needed (or it failed).
void ensure_blas_backend(char** argv);

/// Diagonalizes a fixed 160 x 160 symmetric matrix once per process and throws
/// NumericError when the residual exceeds 1e-10. Called by the eigensolvers.
void verify_eigensolver();

}  // namespace qpgen::backend
