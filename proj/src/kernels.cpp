#include "spinchain/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace spinchain::kernels {

namespace detail {

// Reference GEMM. Loop order i-k-j keeps B and C rows streaming; good
// enough as a correctness baseline and for machines without AVX2.
void cgemm_scalar(const cxd* a, const cxd* b, cxd* c,
                  std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    if (!accumulate) std::memset(static_cast<void*>(c), 0, m * n * sizeof(cxd));
    for (std::size_t i = 0; i < m; ++i) {
        const cxd* arow = a + i * k;
        cxd* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const cxd av = arow[p];
            if (av == cxd(0.0, 0.0)) continue;
            const cxd* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

double sum_abs2_scalar(const cxd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return acc;
}

void caxpy_scalar(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace detail

namespace {

enum class Backend { scalar, avx2 };

Backend pick_backend() {
    if (const char* env = std::getenv("SPINCHAIN_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && detail::avx2_compiled() && detail::avx2_usable())
            return Backend::avx2;
        return Backend::scalar;
    }
    return (detail::avx2_compiled() && detail::avx2_usable()) ? Backend::avx2
                                                              : Backend::scalar;
}

Backend g_backend = pick_backend();
const std::string g_names[2] = {"scalar", "avx2"};

}  // namespace

const std::string& active_backend() {
    return g_names[g_backend == Backend::avx2 ? 1 : 0];
}

void cgemm(const cxd* a, const cxd* b, cxd* c,
           std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    if (g_backend == Backend::avx2)
        detail::cgemm_avx2(a, b, c, m, k, n, accumulate);
    else
        detail::cgemm_scalar(a, b, c, m, k, n, accumulate);
}

double sum_abs2(const cxd* x, std::size_t n) {
    return g_backend == Backend::avx2 ? detail::sum_abs2_avx2(x, n)
                                      : detail::sum_abs2_scalar(x, n);
}

void caxpy(cxd alpha, const cxd* x, cxd* y, std::size_t n) {
    if (g_backend == Backend::avx2)
        detail::caxpy_avx2(alpha, x, y, n);
    else
        detail::caxpy_scalar(alpha, x, y, n);
}

}  // namespace spinchain::kernels
