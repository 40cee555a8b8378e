#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "spinchain/exact.hpp"
#include "spinchain/magic.hpp"
#include "spinchain/models.hpp"
#include "spinchain/mps.hpp"
#include "spinchain/rng.hpp"

using namespace spinchain;

namespace {

constexpr double kLog43 = 0.28768207245178085;  // log(4/3)

MatrixProductState t_state_chain(std::size_t L) {
    // θ=π/4 equatorial chain (|0⟩+e^{iπ/4}|1⟩)/√2 per site: Pauli weight on
    // I, X, Y with per-site SRE log(4/3).
    return theta_product_state(M_PI / 4.0, L);
}

MatrixProductState real_t_state() {
    // The real magic maximizer cos(π/8)|0⟩ + sin(π/8)|1⟩: ⟨X⟩ = ⟨Z⟩ = 1/√2,
    // ⟨Y⟩ = 0 — same SRE as the equatorial state, different Pauli support.
    return product_mps({{std::cos(M_PI / 8.0), std::sin(M_PI / 8.0)}});
}

// Upper 1e-3 quantile of chi-square via the Wilson–Hilferty cube
// approximation; adequate for the df ≥ 20 used below.
double chi2_crit_1e3(double df) {
    const double z = 3.090232;  // Φ⁻¹(0.999)
    const double a = 2.0 / (9.0 * df);
    const double c = 1.0 - a + z * std::sqrt(a);
    return df * c * c * c;
}

}  // namespace

TEST_CASE("pauli_sample draws the exact distribution") {
    SUBCASE("computational basis state draws only I/Z words uniformly") {
        const std::size_t L = 4;
        auto m = canonicalize(product_mps(std::vector<std::vector<cxd>>(L, {1.0, 0.0})), 0);
        Rng rng(5);
        for (int i = 0; i < 64; ++i) {
            const auto s = pauli_sample(m, rng);
            CHECK(s.probability == doctest::Approx(1.0 / 16.0).epsilon(1e-10));
            CHECK(s.weight == doctest::Approx(1.0).epsilon(1e-10));
            for (char c : s.string.letters) CHECK((c == 'I' || c == 'Z'));
        }
    }
    SUBCASE("single-qubit magic state letter frequencies") {
        auto m = real_t_state();
        Rng rng(6);
        std::array<int, 4> counts{0, 0, 0, 0};
        const int n = 100000;
        for (int i = 0; i < n; ++i) {
            const auto s = pauli_sample(m, rng);
            switch (s.string.letters[0]) {
                case 'I': ++counts[0]; break;
                case 'X': ++counts[1]; break;
                case 'Y': ++counts[2]; break;
                default: ++counts[3]; break;
            }
        }
        // Ξ = (1/2, 1/4, 0, 1/4); 3σ binomial bands.
        const std::array<double, 4> expect{0.5, 0.25, 0.0, 0.25};
        for (int a = 0; a < 4; ++a) {
            const double p = expect[a];
            const double band = 3.0 * std::sqrt(std::max(p * (1.0 - p), 1e-12) * n);
            CHECK(std::abs(counts[a] - p * n) <= band + 1e-9);
        }
        CHECK(counts[2] == 0);  // ⟨Y⟩ = 0 exactly: Y must never be drawn
    }
    SUBCASE("per-draw probability matches the statevector backend") {
        const auto m = canonicalize(random_mps(6, 2, 4, 91), 0);
        const auto sv = to_statevector(m);
        Rng rng(7);
        for (int i = 0; i < 200; ++i) {
            const auto s = pauli_sample(m, rng);
            const double e = pauli_expectation(sv, s.string);
            const double exact = e * e / 64.0;  // Ξ(σ) = ⟨P⟩²/2^L
            CHECK(std::abs(s.probability - exact) < 1e-10);
            CHECK(s.weight == doctest::Approx(64.0 * s.probability).epsilon(1e-12));
        }
    }
}

TEST_CASE("sampled strings pass chi-square goodness of fit") {
    SUBCASE("theta product state, analytic cell probabilities") {
        const std::size_t L = 3;
        auto m = t_state_chain(L);
        Rng rng(8);
        std::map<std::size_t, int> counts;
        const int n = 100000;
        for (int i = 0; i < n; ++i) ++counts[pauli_sample(m, rng).string.to_index()];
        // Per site Ξ = (1/2, 1/4, 1/4, 0): 27 cells with nonzero mass.
        const std::array<double, 4> xi{0.5, 0.25, 0.25, 0.0};
        double chi2 = 0.0;
        int cells = 0;
        for (std::size_t idx = 0; idx < 64; ++idx) {
            double p = 1.0;
            std::size_t rest = idx;
            for (std::size_t site = 0; site < L; ++site) {
                p *= xi[rest & 3];
                rest >>= 2;
            }
            const auto it = counts.find(idx);
            const double obs = it == counts.end() ? 0.0 : double(it->second);
            if (p == 0.0) {
                CHECK(obs == 0.0);  // zero-probability words must never appear
                continue;
            }
            const double exp_count = p * n;
            chi2 += (obs - exp_count) * (obs - exp_count) / exp_count;
            ++cells;
        }
        CHECK(cells == 27);
        CHECK(chi2 < chi2_crit_1e3(double(cells - 1)));
    }
    SUBCASE("random MPS against the exact Pauli spectrum") {
        const std::size_t L = 3;
        const auto m = canonicalize(random_mps(L, 2, 4, 92), 0);
        const auto xi = pauli_spectrum(to_statevector(m));
        Rng rng(9);
        std::vector<int> counts(xi.size(), 0);
        const int n = 100000;
        for (int i = 0; i < n; ++i) ++counts[pauli_sample(m, rng).string.to_index()];
        // Merge cells with small expectation into a tail bucket to keep the
        // chi-square approximation honest.
        double chi2 = 0.0, tail_exp = 0.0, tail_obs = 0.0;
        int cells = 0;
        for (std::size_t idx = 0; idx < xi.size(); ++idx) {
            const double exp_count = xi[idx] * n;
            if (exp_count < 10.0) {
                tail_exp += exp_count;
                tail_obs += counts[idx];
                continue;
            }
            chi2 += (counts[idx] - exp_count) * (counts[idx] - exp_count) / exp_count;
            ++cells;
        }
        if (tail_exp > 0.0) {
            chi2 += (tail_obs - tail_exp) * (tail_obs - tail_exp) / tail_exp;
            ++cells;
        }
        REQUIRE(cells >= 20);
        CHECK(chi2 < chi2_crit_1e3(double(cells - 1)));
    }
}

TEST_CASE("monte carlo estimator") {
    SUBCASE("stabilizer input collapses to zero with zero error") {
        auto m = product_mps(std::vector<std::vector<cxd>>(6, {1.0, 0.0}));
        const auto est = sre_sampled(m, 2.0, 10000, 31);
        CHECK(std::abs(est.value) < 1e-12);
        CHECK(est.std_error < 1e-12);
        CHECK(est.method == SreMethod::sampling);
        CHECK(est.n_samples == 10000);
    }
    SUBCASE("magic product chain hits the additive closed value") {
        const auto est = sre_sampled(t_state_chain(8), 2.0, 100000, 33);
        CHECK(est.std_error > 0.0);
        CHECK(est.std_error < 1e-2);
        CHECK(std::abs(est.value - 8.0 * kLog43) < 3.0 * est.std_error);
    }
    SUBCASE("critical ground state against the exact backend") {
        ModelSpec spec;
        spec.family = ModelFamily::xy;
        spec.L = 10;
        spec.parameters = {{"J", 2.0}, {"gamma", 0.7}, {"h", 1.0}};
        const auto gs = dmrg_ground_state(build_mpo(spec), 32, 1e-10, 30, 23);
        const auto m = compress_state(gs.state, 16, 1e-12);
        const double exact = sre_exact(to_statevector(m), 2.0).m_alpha;
        const auto est = sre_sampled(m, 2.0, 30000, 35);
        CHECK(est.std_error <= 2e-2);
        CHECK(std::abs(est.value - exact) < 3.0 * est.std_error);
    }
    SUBCASE("alpha=1 stream agrees with the exact Shannon form") {
        const auto m = t_state_chain(4);
        const double exact = sre_exact(to_statevector(m), 1.0).m_alpha;
        const auto est = sre_sampled(m, 1.0, 20000, 37);
        CHECK(std::abs(est.value - exact) < 3.0 * std::max(est.std_error, 1e-3));
    }
}

TEST_CASE("pauli-basis MPS") {
    SUBCASE("single-site amplitudes on (I,X,Y,Z)") {
        auto zero = product_mps({{1.0, 0.0}});
        const auto p0 = to_statevector(build_pauli_mps(zero));
        const double r = 1.0 / std::sqrt(2.0);
        CHECK(std::abs(p0.amplitudes[0] - cxd(r)) < 1e-12);
        CHECK(std::abs(p0.amplitudes[1]) < 1e-12);
        CHECK(std::abs(p0.amplitudes[2]) < 1e-12);
        CHECK(std::abs(p0.amplitudes[3] - cxd(r)) < 1e-12);

        const auto pt = to_statevector(build_pauli_mps(real_t_state()));
        CHECK(std::abs(pt.amplitudes[0] - cxd(r)) < 1e-12);
        CHECK(std::abs(pt.amplitudes[1] - cxd(0.5)) < 1e-12);
        CHECK(std::abs(pt.amplitudes[2]) < 1e-12);
        CHECK(std::abs(pt.amplitudes[3] - cxd(0.5)) < 1e-12);

        const auto pe = to_statevector(build_pauli_mps(t_state_chain(1)));
        CHECK(std::abs(pe.amplitudes[0] - cxd(r)) < 1e-12);
        CHECK(std::abs(pe.amplitudes[1] - cxd(0.5)) < 1e-12);
        CHECK(std::abs(pe.amplitudes[2] - cxd(0.5)) < 1e-12);
        CHECK(std::abs(pe.amplitudes[3]) < 1e-12);
    }
    SUBCASE("amplitudes are normalized Pauli expectations, exhaustively") {
        const auto m = canonicalize(random_mps(4, 2, 3, 93), 0);
        const auto sv = to_statevector(m);
        const auto pauli = to_statevector(build_pauli_mps(m));
        const double scale = 1.0 / std::sqrt(16.0);
        for (std::size_t idx = 0; idx < 256; ++idx) {
            const double e = pauli_expectation(sv, PauliString::from_index(idx, 4));
            CHECK(std::abs(pauli.amplitudes[idx] - cxd(e * scale)) < 1e-10);
        }
    }
    SUBCASE("ghz pauli state: unit norm, flat 4-fold spectrum") {
        const auto p = build_pauli_mps(ghz_mps(3));
        CHECK(mps_norm(p) == doctest::Approx(1.0).epsilon(1e-12));
        const auto s = schmidt_spectrum(canonicalize(p, 1), 1);
        REQUIRE(s.probabilities.size() == 4);
        for (double w : s.probabilities) CHECK(w == doctest::Approx(0.25).epsilon(1e-8));
    }
    SUBCASE("spectrum product law at every cut") {
        const auto m = canonicalize(random_mps(6, 2, 3, 94), 3);
        const auto p = build_pauli_mps(m);
        for (std::size_t cut : {1ul, 3ul, 5ul}) {
            const auto src = schmidt_spectrum(canonicalize(m, cut), cut);
            const auto dst = schmidt_spectrum(canonicalize(p, cut), cut);
            std::vector<double> law;
            for (double a : src.probabilities)
                for (double b : src.probabilities) law.push_back(a * b);
            std::sort(law.begin(), law.end(), std::greater<>());
            REQUIRE(dst.probabilities.size() == law.size());
            for (std::size_t k = 0; k < law.size(); ++k)
                CHECK(std::abs(dst.probabilities[k] - law[k]) < 1e-8);
        }
    }
    SUBCASE("compressed construction reports its loss") {
        const auto m = canonicalize(random_mps(6, 2, 4, 95), 0);
        const auto lossless = build_pauli_mps_compressed(m, 64, 0.0);
        CHECK(lossless.discarded_weight < 1e-14);
        CHECK(std::abs(overlap(lossless.state, build_pauli_mps(m))) ==
              doctest::Approx(1.0).epsilon(1e-9));
        const auto lossy = build_pauli_mps_compressed(m, 4, 0.0);
        CHECK(lossy.state.max_bond_dim() <= 4);
        CHECK(lossy.discarded_weight > 0.0);
    }
}

TEST_CASE("replica estimator") {
    SUBCASE("stabilizer states give exactly zero") {
        std::vector<MatrixProductState> stabilizers;
        stabilizers.push_back(product_mps(std::vector<std::vector<cxd>>(10, {1.0, 0.0})));
        stabilizers.push_back(ghz_mps(8));
        stabilizers.push_back(cluster_ising_exact_mps(-1.0, 12));
        for (const auto& s : stabilizers) {
            const auto est = sre_replica(s, 2, 64, 1e-12);
            CHECK(std::abs(est.value) < 1e-10);
            CHECK(est.value > -1e-10);
            CHECK(est.method == SreMethod::replica);
            CHECK(!est.truncation_warning);
        }
    }
    SUBCASE("additive chain at L=20 is exact at bond dimension one") {
        const auto est = sre_replica(t_state_chain(20), 2, 16, 1e-12);
        CHECK(std::abs(est.value - 20.0 * kLog43) < 1e-9);
    }
    SUBCASE("cluster chain at the magic maximum, L=48") {
        const double g_star = 3.0 - 2.0 * std::sqrt(2.0);
        const auto est = sre_replica(cluster_ising_exact_mps(g_star, 48), 2, 64, 1e-12);
        CHECK(std::abs(est.value / 48.0 - kLog43) < 5e-3);
        CHECK(std::abs(est.value / 48.0 - m2_closed_form_cluster_ising(g_star)) < 5e-3);
    }
    SUBCASE("n=3 replica against the exact backend") {
        const auto m = canonicalize(random_mps(5, 2, 2, 96), 0);
        const double exact = sre_exact(to_statevector(m), 3.0).m_alpha;
        const auto est = sre_replica(m, 3, 4096, 0.0);
        CHECK(std::abs(est.value - exact) < 1e-9);
    }
    SUBCASE("starved bond budget raises the truncation flag") {
        const auto m = canonicalize(random_mps(8, 2, 6, 97), 0);
        const auto est = sre_replica(m, 2, 3, 1e-12, 1e-9);
        CHECK(est.truncation_warning);
        CHECK(est.discarded_weight > 1e-9);
        CHECK(est.chi_used <= 3);
    }
    SUBCASE("invariant under single-site clifford rotations") {
        // H then S on every site maps the magic chain to another product
        // state with identical per-site SRE.
        const auto base = t_state_chain(6);
        MatrixProductState rotated = base;
        DenseTensor hs({2, 2});  // S·H
        const double r = 1.0 / std::sqrt(2.0);
        hs(0, 0) = r;
        hs(0, 1) = r;
        hs(1, 0) = cxd(0.0, r);
        hs(1, 1) = cxd(0.0, -r);
        for (auto& t : rotated.site_tensors) t = contract(t, hs, {{1, 1}}).permuted({0, 2, 1});
        const auto a = sre_replica(base, 2, 16, 1e-12);
        const auto b = sre_replica(rotated, 2, 16, 1e-12);
        CHECK(std::abs(a.value - b.value) < 1e-10);
    }
}

TEST_CASE("three-route agreement on random states") {
    Rng pick(98);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t L = 4 + pick.uniform_int(4);       // 4..7
        const std::size_t chi = 2 + pick.uniform_int(5);     // 2..6
        const auto m = canonicalize(random_mps(L, 2, chi, 100 + trial), 0);
        CAPTURE(L);
        CAPTURE(chi);
        const double exact = sre_exact(to_statevector(m), 2.0).m_alpha;
        const auto rep = sre_replica(m, 2, 4096, 0.0);
        CHECK(std::abs(rep.value - exact) < 1e-9);
        const auto smp = sre_sampled(m, 2.0, 10000, 200 + trial);
        CHECK(std::abs(smp.value - exact) < 3.0 * smp.std_error);
    }
}

TEST_CASE("closed-form curves") {
    SUBCASE("cluster line") {
        CHECK(m2_closed_form_cluster_ising(0.0) == 0.0);
        CHECK(std::abs(m2_closed_form_cluster_ising(1.0)) < 1e-15);
        CHECK(std::abs(m2_closed_form_cluster_ising(-1.0)) < 1e-15);
        const double g_star = 3.0 - 2.0 * std::sqrt(2.0);
        CHECK(m2_closed_form_cluster_ising(g_star) == doctest::Approx(kLog43).epsilon(1e-12));
        CHECK(m2_closed_form_cluster_ising(-g_star) == doctest::Approx(kLog43).epsilon(1e-12));
        // Hand-evaluated spot value at g = 1/2: log(5.0625/4.5625).
        CHECK(m2_closed_form_cluster_ising(0.5) ==
              doctest::Approx(std::log(5.0625 / 4.5625)).epsilon(1e-12));
        // Even in g, and the maximum really is a local maximum.
        CHECK(m2_closed_form_cluster_ising(-0.37) ==
              doctest::Approx(m2_closed_form_cluster_ising(0.37)).epsilon(1e-13));
        CHECK(m2_closed_form_cluster_ising(g_star) >
              m2_closed_form_cluster_ising(g_star + 1e-3));
        CHECK(m2_closed_form_cluster_ising(g_star) >
              m2_closed_form_cluster_ising(g_star - 1e-3));
    }
    SUBCASE("circle product-state line") {
        CHECK(std::abs(m_alpha_closed_form_cgs(0.0, 2.0)) < 1e-15);
        CHECK(std::abs(m_alpha_closed_form_cgs(1.0, 2.0)) < 1e-15);
        CHECK(m_alpha_closed_form_cgs(1.0 / 3.0, 2.0) ==
              doctest::Approx(kLog43).epsilon(1e-12));
        // The analytic per-site curve matches the exact backend on the
        // actual product state, for several couplings and both branches.
        for (double gamma : {0.2, 0.5, 0.8}) {
            const auto m = cgs_product_state(gamma, 5);
            const double per_site = sre_exact(to_statevector(m), 2.0).m_alpha / 5.0;
            CHECK(std::abs(per_site - m_alpha_closed_form_cgs(gamma, 2.0)) < 1e-10);
        }
        // α=3 against the printed general-α form evaluated by hand at γ=1/3:
        // (1/(1−3))·log[(1 + sin⁶θ + cos⁶θ)/8] − log 2 with θ=π/4.
        const double expect3 = -0.5 * std::log((1.0 + 0.25) / 8.0) - std::log(2.0);
        CHECK(m_alpha_closed_form_cgs(1.0 / 3.0, 3.0) ==
              doctest::Approx(expect3).epsilon(1e-12));
    }
}
