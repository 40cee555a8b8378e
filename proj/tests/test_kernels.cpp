#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <complex>
#include <vector>

#include "spinchain/kernels.hpp"
#include "spinchain/rng.hpp"

using spinchain::Rng;
using namespace spinchain::kernels;

namespace {

std::vector<cxd> random_block(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cxd> out(n);
    for (auto& v : out) v = cxd(rng.normal(), rng.normal());
    return out;
}

// Textbook triple loop; the reference every backend must reproduce.
void naive_gemm(const cxd* a, const cxd* b, cxd* c,
                std::size_t m, std::size_t k, std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            cxd acc = accumulate ? c[i * n + j] : cxd(0.0);
            for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
            c[i * n + j] = acc;
        }
}

double max_err(const std::vector<cxd>& x, const std::vector<cxd>& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

}  // namespace

TEST_CASE("cgemm matches the naive triple loop across shapes") {
    // Shapes chosen to hit the vector remainder paths: vector width is 2
    // complex doubles, so odd n and n=1 exercise the scalar tail.
    const std::size_t shapes[][3] = {{1, 1, 1}, {2, 3, 2},  {5, 7, 3},  {8, 8, 8},
                                     {13, 1, 9}, {4, 16, 1}, {17, 11, 19}, {32, 24, 40}};
    std::uint64_t seed = 101;
    for (const auto& sh : shapes) {
        const std::size_t m = sh[0], k = sh[1], n = sh[2];
        CAPTURE(m);
        CAPTURE(k);
        CAPTURE(n);
        const auto a = random_block(m * k, seed++);
        const auto b = random_block(k * n, seed++);
        for (bool acc : {false, true}) {
            auto c_ref = random_block(m * n, seed);
            auto c_got = c_ref;
            naive_gemm(a.data(), b.data(), c_ref.data(), m, k, n, acc);
            cgemm(a.data(), b.data(), c_got.data(), m, k, n, acc);
            CHECK(max_err(c_ref, c_got) < 1e-12);
        }
        ++seed;
    }
}

TEST_CASE("cgemm is bilinear") {
    const std::size_t m = 6, k = 5, n = 4;
    const auto a1 = random_block(m * k, 7);
    const auto a2 = random_block(m * k, 8);
    const auto b = random_block(k * n, 9);
    const cxd alpha(0.3, -1.1);

    std::vector<cxd> lhs(m * n), r1(m * n), r2(m * n);
    std::vector<cxd> a_comb(m * k);
    for (std::size_t i = 0; i < m * k; ++i) a_comb[i] = a1[i] + alpha * a2[i];
    cgemm(a_comb.data(), b.data(), lhs.data(), m, k, n, false);
    cgemm(a1.data(), b.data(), r1.data(), m, k, n, false);
    cgemm(a2.data(), b.data(), r2.data(), m, k, n, false);
    for (std::size_t i = 0; i < m * n; ++i) r1[i] += alpha * r2[i];
    CHECK(max_err(lhs, r1) < 1e-12);
}

TEST_CASE("sum_abs2 and caxpy agree with direct evaluation") {
    for (std::size_t n : {std::size_t(1), std::size_t(2), std::size_t(3),
                          std::size_t(17), std::size_t(256), std::size_t(1001)}) {
        const auto x = random_block(n, 1000 + n);
        double direct = 0.0;
        for (const auto& v : x) direct += std::norm(v);
        CHECK(sum_abs2(x.data(), n) == doctest::Approx(direct).epsilon(1e-13));

        auto y = random_block(n, 2000 + n);
        auto y_ref = y;
        const cxd alpha(-0.7, 0.4);
        caxpy(alpha, x.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i) y_ref[i] += alpha * x[i];
        CHECK(max_err(y, y_ref) < 1e-13);
    }
}

TEST_CASE("scalar and AVX2 backends produce identical results") {
    if (!detail::avx2_compiled() || !detail::avx2_usable()) {
        MESSAGE("AVX2 backend unavailable on this host; dispatch check only");
        CHECK(active_backend() == "scalar");
        return;
    }
    std::uint64_t seed = 300;
    for (const auto& sh : {std::array<std::size_t, 3>{3, 4, 5},
                           std::array<std::size_t, 3>{16, 16, 16},
                           std::array<std::size_t, 3>{21, 13, 7}}) {
        const auto a = random_block(sh[0] * sh[1], seed++);
        const auto b = random_block(sh[1] * sh[2], seed++);
        std::vector<cxd> cs(sh[0] * sh[2]), cv(sh[0] * sh[2]);
        detail::cgemm_scalar(a.data(), b.data(), cs.data(), sh[0], sh[1], sh[2], false);
        detail::cgemm_avx2(a.data(), b.data(), cv.data(), sh[0], sh[1], sh[2], false);
        // FMA reassociation cannot change results by more than a few ulps at
        // these sizes; near-equality is the contract dispatch relies on.
        CHECK(max_err(cs, cv) < 1e-13);
    }
    const auto x = random_block(777, seed++);
    CHECK(detail::sum_abs2_scalar(x.data(), x.size()) ==
          doctest::Approx(detail::sum_abs2_avx2(x.data(), x.size())).epsilon(1e-14));

    auto y1 = random_block(777, seed);
    auto y2 = y1;
    detail::caxpy_scalar(cxd(0.2, 0.9), x.data(), y1.data(), x.size());
    detail::caxpy_avx2(cxd(0.2, 0.9), x.data(), y2.data(), x.size());
    CHECK(max_err(y1, y2) < 1e-14);
}

TEST_CASE("backend dispatch reports a known name") {
    const auto& name = active_backend();
    const bool known = name == "scalar" || name == "avx2";
    CHECK(known);
    if (name == "avx2") CHECK(detail::avx2_usable());
}
