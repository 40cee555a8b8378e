#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spinchain/pauli.hpp"
#include "spinchain/rng.hpp"
#include "spinchain/tensor.hpp"

using namespace spinchain;

namespace {

DenseTensor random_tensor(Shape shape, std::uint64_t seed) {
    DenseTensor t(std::move(shape));
    Rng rng(seed);
    for (std::size_t i = 0; i < t.size(); ++i) t.data()[i] = cxd(rng.normal(), rng.normal());
    return t;
}

DenseTensor identity(std::size_t n) {
    DenseTensor t({n, n});
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
}

// Contract by explicit index loops, independent of the GEMM path.
cxd naive_entry(const DenseTensor& a, const DenseTensor& b, const AxisPairs& pairs,
                const std::vector<std::size_t>& afree, const std::vector<std::size_t>& bfree,
                std::vector<std::size_t> out_idx) {
    std::vector<std::size_t> ia(a.rank()), ib(b.rank());
    std::size_t pos = 0;
    for (std::size_t ax : afree) ia[ax] = out_idx[pos++];
    for (std::size_t ax : bfree) ib[ax] = out_idx[pos++];
    std::vector<std::size_t> extents;
    for (const auto& [pa, pb] : pairs) extents.push_back(a.shape()[pa]);
    std::vector<std::size_t> ctr(pairs.size(), 0);
    cxd sum = 0.0;
    while (true) {
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            ia[pairs[p].first] = ctr[p];
            ib[pairs[p].second] = ctr[p];
        }
        std::size_t fa = 0, fb = 0;
        for (std::size_t d = 0; d < a.rank(); ++d) fa = fa * a.shape()[d] + ia[d];
        for (std::size_t d = 0; d < b.rank(); ++d) fb = fb * b.shape()[d] + ib[d];
        sum += a.data()[fa] * b.data()[fb];
        std::size_t p = pairs.size();
        while (p > 0 && ++ctr[p - 1] == extents[p - 1]) ctr[--p] = 0;
        if (p == 0) break;
    }
    return sum;
}

}  // namespace

TEST_SUITE("contract") {

TEST_CASE("identity matrix acts as identity") {
    const auto v = random_tensor({5}, 1);
    const auto out = contract(identity(5), v, {{1, 0}});
    CHECK(max_abs_diff(out, v) < 1e-15);
}

TEST_CASE("matrix product special case") {
    DenseTensor a({2, 3}), b({3, 2});
    for (std::size_t i = 0; i < 6; ++i) {
        a.data()[i] = cxd(double(i), 0.5);
        b.data()[i] = cxd(1.0, -double(i));
    }
    const auto c = contract(a, b, {{1, 0}});
    REQUIRE(c.shape() == Shape{2, 2});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            cxd want = 0.0;
            for (std::size_t k = 0; k < 3; ++k) want += a(i, k) * b(k, j);
            CHECK(std::abs(c(i, j) - want) < 1e-14);
        }
}

TEST_CASE("full self-contraction gives the squared Frobenius norm") {
    const auto a = random_tensor({2, 2}, 3);
    const auto s = contract(a, a.conjugated(), {{0, 0}, {1, 1}});
    REQUIRE(s.rank() == 0);
    double want = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) want += std::norm(a.data()[i]);
    CHECK(std::abs(s.data()[0] - cxd(want)) < 1e-12);
}

TEST_CASE("agrees with explicit loops on random tensors") {
    struct Case {
        Shape sa, sb;
        AxisPairs pairs;
        std::vector<std::size_t> afree, bfree;
    };
    const Case cases[] = {
        {{3, 4, 5}, {5, 2}, {{2, 0}}, {0, 1}, {1}},
        {{2, 6, 3}, {3, 6, 4}, {{1, 1}, {2, 0}}, {0}, {2}},
        {{4, 4}, {4, 4, 2}, {{0, 1}, {1, 0}}, {}, {2}},
        {{2, 3, 2, 3}, {3, 3}, {{1, 0}, {3, 1}}, {0, 2}, {}},
    };
    std::uint64_t seed = 40;
    for (const auto& cs : cases) {
        const auto a = random_tensor(cs.sa, seed++);
        const auto b = random_tensor(cs.sb, seed++);
        const auto got = contract(a, b, cs.pairs);

        Shape want_shape;
        for (auto ax : cs.afree) want_shape.push_back(cs.sa[ax]);
        for (auto ax : cs.bfree) want_shape.push_back(cs.sb[ax]);
        REQUIRE(got.shape() == want_shape);

        // Spot-check every entry (outputs here are small).
        std::vector<std::size_t> idx(want_shape.size(), 0);
        for (std::size_t flat = 0; flat < got.size(); ++flat) {
            std::size_t rem = flat;
            for (std::size_t d = want_shape.size(); d-- > 0;) {
                idx[d] = rem % want_shape[d];
                rem /= want_shape[d];
            }
            const cxd want = naive_entry(a, b, cs.pairs, cs.afree, cs.bfree, idx);
            CHECK(std::abs(got.data()[flat] - want) <= 1e-12 * (1.0 + std::abs(want)));
        }
    }
}

TEST_CASE("extent mismatch and repeated axes are rejected") {
    const auto a = random_tensor({2, 3}, 90);
    const auto b = random_tensor({4, 2}, 91);
    CHECK_THROWS_AS(contract(a, b, {{1, 0}}), dimension_error);
    CHECK_THROWS_AS(contract(a, b, {{0, 1}, {0, 1}}), dimension_error);
    CHECK_THROWS_AS(contract(a, b, {{5, 0}}), dimension_error);
}

}  // TEST_SUITE contract

TEST_SUITE("svd") {

TEST_CASE("diagonal input truncates by magnitude") {
    DenseTensor m({3, 3});
    m(0, 0) = 3.0;
    m(1, 1) = 2.0;
    m(2, 2) = 1.0;
    const auto r = svd_truncated(m, 2, 0.0);
    REQUIRE(r.s.size() == 2);
    CHECK(r.s[0] == doctest::Approx(3.0));
    CHECK(r.s[1] == doctest::Approx(2.0));
    CHECK(r.discarded_weight == doctest::Approx(1.0 / 14.0));
}

TEST_CASE("identity has a flat spectrum and zero discarded weight") {
    const auto r = svd_truncated(identity(4), 4, 0.0);
    REQUIRE(r.s.size() == 4);
    for (double s : r.s) CHECK(s == doctest::Approx(1.0));
    CHECK(r.discarded_weight == 0.0);
}

TEST_CASE("rank-1 outer product has a single singular value") {
    const auto u = random_tensor({6}, 5);
    const auto v = random_tensor({4}, 6);
    DenseTensor m({6, 4});
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 4; ++j) m(i, j) = u.data()[i] * std::conj(v.data()[j]);
    const auto r = svd_truncated(m, 4, 0.0);
    CHECK(r.s[0] == doctest::Approx(u.norm() * v.norm()).epsilon(1e-12));
    for (std::size_t k = 1; k < r.s.size(); ++k) CHECK(r.s[k] < 1e-13 * r.s[0]);
}

TEST_CASE("reconstruction at full rank") {
    for (Shape shape : {Shape{7, 7}, Shape{12, 5}, Shape{5, 12}, Shape{3, 64}}) {
        const auto m = random_tensor(shape, 70 + shape[0]);
        const auto r = svd_truncated(m, std::min(shape[0], shape[1]), 0.0);
        DenseTensor us = r.u;
        for (std::size_t i = 0; i < us.shape()[0]; ++i)
            for (std::size_t k = 0; k < r.s.size(); ++k)
                us(i, k) *= r.s[k];
        const auto rec = contract(us, r.vh, {{1, 0}});
        CHECK(max_abs_diff(rec, m) < 1e-10 * m.norm());
    }
}

TEST_CASE("factors are isometries") {
    const auto m = random_tensor({9, 6}, 77);
    const auto r = svd_truncated(m, 6, 0.0);
    const auto utu = contract(r.u.conjugated(), r.u, {{0, 0}});
    const auto vvh = contract(r.vh, r.vh.conjugated(), {{1, 1}});
    CHECK(max_abs_diff(utu, identity(r.s.size())) < 1e-12);
    CHECK(max_abs_diff(vvh, identity(r.s.size())) < 1e-12);
}

TEST_CASE("strongly rectangular inputs stay exact") {
    // Wide and tall shapes cross into the Gram-matrix fast path; the
    // reconstruction and isometry contracts must not degrade there.
    for (Shape shape : {Shape{16, 4096}, Shape{4096, 16}, Shape{8, 8192}}) {
        const auto m = random_tensor(shape, 500 + shape[1]);
        const std::size_t full = std::min(shape[0], shape[1]);
        const auto r = svd_truncated(m, full, 0.0);
        REQUIRE(r.s.size() == full);
        CHECK(std::is_sorted(r.s.rbegin(), r.s.rend()));

        DenseTensor us = r.u;
        for (std::size_t i = 0; i < us.shape()[0]; ++i)
            for (std::size_t k = 0; k < r.s.size(); ++k) us(i, k) *= r.s[k];
        const auto rec = contract(us, r.vh, {{1, 0}});
        CHECK(max_abs_diff(rec, m) < 1e-10 * m.norm());

        // The short-side factor is the one downstream canonical forms lean on.
        const auto& short_factor = shape[0] <= shape[1] ? r.u : r.vh;
        const auto gram = shape[0] <= shape[1]
                              ? contract(short_factor.conjugated(), short_factor, {{0, 0}})
                              : contract(short_factor, short_factor.conjugated(), {{1, 1}});
        CHECK(max_abs_diff(gram, identity(full)) < 1e-11);
    }
}

TEST_CASE("cutoff drops the tail and reports the weight") {
    DenseTensor m({4, 4});
    const double vals[] = {1.0, 0.1, 1e-6, 1e-9};
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = vals[i];
    const auto r = svd_truncated(m, 4, 1e-4);
    REQUIRE(r.s.size() == 2);
    double tail = 1e-12 + 1e-18, total = 1.0 + 0.01 + tail;
    CHECK(r.discarded_weight == doctest::Approx(tail / total).epsilon(1e-6));
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(svd_truncated(random_tensor({2, 2, 2}, 1), 2, 0.0), dimension_error);
    CHECK_THROWS_AS(svd_truncated(random_tensor({2, 2}, 1), 0, 0.0), dimension_error);
    CHECK_THROWS_AS(svd_truncated(random_tensor({2, 2}, 1), 2, -1.0), dimension_error);
}

}  // TEST_SUITE svd

TEST_SUITE("eigh") {

TEST_CASE("diagonal and Pauli matrices") {
    DenseTensor d({2, 2});
    d(0, 0) = 0.25;
    d(1, 1) = 0.75;
    auto r = eigh(d);
    CHECK(r.values[0] == doctest::Approx(0.25));
    CHECK(r.values[1] == doctest::Approx(0.75));

    auto rx = eigh(pauli_matrix('X'));
    CHECK(rx.values[0] == doctest::Approx(-1.0));
    CHECK(rx.values[1] == doctest::Approx(1.0));
    // Eigenvectors are (|0⟩ ∓ |1⟩)/√2 up to phase; check components in
    // magnitude and the eigen-equation directly.
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(std::abs(rx.vectors(0, k)) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(std::abs(rx.vectors(1, k)) == doctest::Approx(1.0 / std::sqrt(2.0)));
    }

    auto rz = eigh(DenseTensor({2, 2}));
    CHECK(rz.values[0] == 0.0);
    CHECK(rz.values[1] == 0.0);
}

TEST_CASE("reconstruction on random Hermitian matrices") {
    for (std::size_t n : {std::size_t(2), std::size_t(5), std::size_t(16)}) {
        auto a = random_tensor({n, n}, 900 + n);
        DenseTensor h({n, n});
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
        const auto r = eigh(h);
        CHECK(std::is_sorted(r.values.begin(), r.values.end()));

        DenseTensor ve = r.vectors;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) ve(i, k) *= r.values[k];
        const auto rec = contract(ve, r.vectors.conjugated(), {{1, 1}});
        CHECK(max_abs_diff(rec, h) < 1e-10 * (1.0 + h.norm()));

        const auto vv = contract(r.vectors.conjugated(), r.vectors, {{0, 0}});
        CHECK(max_abs_diff(vv, identity(n)) < 1e-12);
    }
}

TEST_CASE("non-Hermitian input is rejected") {
    auto a = random_tensor({3, 3}, 17);
    a(0, 1) += cxd(1.0, 0.0);  // break the symmetry decisively
    CHECK_THROWS_AS(eigh(a), contract_violation);
    CHECK_THROWS_AS(eigh(random_tensor({2, 3}, 18)), dimension_error);
}

}  // TEST_SUITE eigh
