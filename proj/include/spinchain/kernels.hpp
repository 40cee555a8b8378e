#pragma once
#include <complex>
#include <cstddef>
#include <string>

// Low-level complex-double kernels used by the contraction engine and the
// sampling inner loops. Two implementations exist: a portable scalar
// reference and an AVX2+FMA variant compiled in its own translation unit.
// The active backend is picked once at startup from CPUID, overridable via
// the SPINCHAIN_KERNELS environment variable ("scalar" or "avx2").

namespace spinchain::kernels {

using cxd = std::complex<double>;

// C (m x n) += A (m x k) * B (k x n), all row-major, no aliasing.
// When `accumulate` is false, C is overwritten instead.
void cgemm(const cxd* a, const cxd* b, cxd* c,
           std::size_t m, std::size_t k, std::size_t n, bool accumulate);

// Sum of |x_i|^2.
double sum_abs2(const cxd* x, std::size_t n);

// y += alpha * x
void caxpy(cxd alpha, const cxd* x, cxd* y, std::size_t n);

// Name of the backend in use ("scalar" or "avx2").
const std::string& active_backend();

// Internal: the raw implementations, exposed so the equivalence tests can
// drive both regardless of which one dispatch picked.
namespace detail {
void cgemm_scalar(const cxd*, const cxd*, cxd*, std::size_t, std::size_t, std::size_t, bool);
double sum_abs2_scalar(const cxd*, std::size_t);
void caxpy_scalar(cxd, const cxd*, cxd*, std::size_t);
bool avx2_compiled();
bool avx2_usable();
void cgemm_avx2(const cxd*, const cxd*, cxd*, std::size_t, std::size_t, std::size_t, bool);
double sum_abs2_avx2(const cxd*, std::size_t);
void caxpy_avx2(cxd, const cxd*, cxd*, std::size_t);
}  // namespace detail

}  // namespace spinchain::kernels
