#include "qpgen/backend.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <mutex>

#include <lapacke.h>

#include "qpgen/errors.hpp"
#include "qpgen/linalg.hpp"

extern "C" char* openblas_get_corename() __attribute__((weak));

namespace qpgen::backend {

std::string blas_core() {
  if (openblas_get_corename == nullptr) return "unknown";
  const char* c = openblas_get_corename();
  return c ? c : "unknown";
}

void ensure_blas_backend(char** argv) {
  if (std::getenv("OPENBLAS_CORETYPE") != nullptr) return;
  const std::string core = blas_core();
  if (core != "Cooperlake" && core != "SapphireRapids") return;
  ::setenv("OPENBLAS_CORETYPE", "SkylakeX", 1);
  ::execv("/proc/self/exe", argv);
}

namespace {

void self_test() {
  constexpr int n = 160;
  RMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = std::sin(0.37 * (i + 1) * (j + 1)) + (i == j ? 0.01 * i : 0.0);
  a = (0.5 * (a + a.transpose())).eval();
  RMatrix v = a;
  RVector w(n);
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data()) != 0)
    throw NumericError("eigensolver self-test: dsyevd failed");
  const double resid = (a * v - v * w.asDiagonal()).cwiseAbs().maxCoeff();
  if (!(resid < 1e-10))
    throw NumericError("eigensolver self-test failed (residual " + std::to_string(resid) +
                       ") with BLAS core '" + blas_core() +
                       "'; set OPENBLAS_CORETYPE=SkylakeX or Haswell");
}

}  // namespace

void verify_eigensolver() {
  static std::once_flag once;
  static bool ok = false;
  std::call_once(once, [] {
    try {
      self_test();
      ok = true;
    } catch (...) {
    }
  });
  if (!ok) self_test();
}

}  // namespace qpgen::backend
