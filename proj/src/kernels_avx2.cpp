// AVX2+FMA variants. This is the only translation unit built with -mavx2;
// if the toolchain can't do that, the stubs at the bottom keep the link
// intact and dispatch falls back to scalar.
#include "spinchain/kernels.hpp"

#include <cstring>

#ifdef SPINCHAIN_BUILD_AVX2
#include <immintrin.h>
#endif

namespace spinchain::kernels::detail {

#ifdef SPINCHAIN_BUILD_AVX2

bool avx2_compiled() { return true; }

bool avx2_usable() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

// Complex multiply-accumulate over pairs of interleaved complex doubles:
// each 256-bit lane holds [re0, im0, re1, im1].
void cgemm_avx2(const cxd* a, const cxd* b, cxd* c,
                std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    if (!accumulate) std::memset(static_cast<void*>(c), 0, m * n * sizeof(cxd));
    const std::size_t n2 = n & ~std::size_t(1);  // complex pairs
    for (std::size_t i = 0; i < m; ++i) {
        const cxd* arow = a + i * k;
        double* crow = reinterpret_cast<double*>(c + i * n);
        for (std::size_t p = 0; p < k; ++p) {
            const cxd av = arow[p];
            if (av == cxd(0.0, 0.0)) continue;
            const __m256d are = _mm256_set1_pd(av.real());
            const __m256d aim = _mm256_set1_pd(av.imag());
            const double* brow = reinterpret_cast<const double*>(b + p * n);
            std::size_t j = 0;
            for (; j < n2; j += 2) {
                const __m256d bv = _mm256_loadu_pd(brow + 2 * j);
                const __m256d bsw = _mm256_permute_pd(bv, 0x5);
                const __m256d cv = _mm256_loadu_pd(crow + 2 * j);
                // (ar*br - ai*bi, ar*bi + ai*br) via fmaddsub
                const __m256d prod = _mm256_fmaddsub_pd(are, bv, _mm256_mul_pd(aim, bsw));
                _mm256_storeu_pd(crow + 2 * j, _mm256_add_pd(cv, prod));
            }
            if (j < n) {
                cxd* ctail = c + i * n + j;
                const cxd* btail = b + p * n + j;
                *ctail += av * *btail;
            }
        }
    }
}

double sum_abs2_avx2(const cxd* x, std::size_t n) {
    const double* xd = reinterpret_cast<const double*>(x);
    const std::size_t total = 2 * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= total; i += 4) {
        const __m256d v = _mm256_loadu_pd(xd + i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    double out = lanes[0] + lanes[1] + lanes[2] + lanes[3];
    for (; i < total; ++i) out += xd[i] * xd[i];
    return out;
}

void caxpy_avx2(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    const __m256d are = _mm256_set1_pd(alpha.real());
    const __m256d aim = _mm256_set1_pd(alpha.imag());
    const double* xd = reinterpret_cast<const double*>(x);
    double* yd = reinterpret_cast<double*>(y);
    const std::size_t n2 = n & ~std::size_t(1);
    std::size_t j = 0;
    for (; j < n2; j += 2) {
        const __m256d xv = _mm256_loadu_pd(xd + 2 * j);
        const __m256d xsw = _mm256_permute_pd(xv, 0x5);
        const __m256d yv = _mm256_loadu_pd(yd + 2 * j);
        const __m256d prod = _mm256_fmaddsub_pd(are, xv, _mm256_mul_pd(aim, xsw));
        _mm256_storeu_pd(yd + 2 * j, _mm256_add_pd(yv, prod));
    }
    for (; j < n; ++j) y[j] += alpha * x[j];
}

#else  // !SPINCHAIN_BUILD_AVX2

bool avx2_compiled() { return false; }
bool avx2_usable() { return false; }

void cgemm_avx2(const cxd* a, const cxd* b, cxd* c,
                std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    cgemm_scalar(a, b, c, m, k, n, accumulate);
}
double sum_abs2_avx2(const cxd* x, std::size_t n) { return sum_abs2_scalar(x, n); }
void caxpy_avx2(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    caxpy_scalar(alpha, x, y, n);
}

#endif

}  // namespace spinchain::kernels::detail
