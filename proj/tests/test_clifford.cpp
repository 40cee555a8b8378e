#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "spinchain/clifford.hpp"
#include "spinchain/exact.hpp"
#include "spinchain/models.hpp"
#include "spinchain/mps.hpp"
#include "spinchain/pauli.hpp"
#include "spinchain/rng.hpp"
#include "spinchain/state.hpp"

using namespace spinchain;

namespace {

// σ_a ⊗ σ_b as a 4×4 matrix, idx = 4a + b over the (I,X,Y,Z) codes.
DenseTensor two_site_pauli(std::size_t idx) {
    const auto p = pauli_matrix(int(idx / 4));
    const auto q = pauli_matrix(int(idx % 4));
    DenseTensor out({4, 4});
    for (std::size_t a0 = 0; a0 < 2; ++a0)
        for (std::size_t a1 = 0; a1 < 2; ++a1)
            for (std::size_t b0 = 0; b0 < 2; ++b0)
                for (std::size_t b1 = 0; b1 < 2; ++b1)
                    out(a0 * 2 + a1, b0 * 2 + b1) = p(a0, b0) * q(a1, b1);
    return out;
}

// True iff conjugation by u maps every two-qubit Pauli to a single signed
// Pauli: for each generator image, exactly one coefficient of magnitude 1 in
// the Pauli expansion, all others < tol.
bool is_clifford_gate(const DenseTensor& u, double tol = 1e-10) {
    for (std::size_t gen = 0; gen < 16; ++gen) {
        const auto p = two_site_pauli(gen);
        // u p u†
        const auto up = contract(u, p, {{1, 0}});
        const auto upu = contract(up, u.conjugated(), {{1, 1}});
        int big = 0;
        for (std::size_t k = 0; k < 16; ++k) {
            const auto q = two_site_pauli(k);
            // Tr(q† upu)/4
            cxd tr = 0.0;
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = 0; b < 4; ++b) tr += std::conj(q(a, b)) * upu(a, b);
            const double mag = std::abs(tr) / 4.0;
            if (mag > tol && mag < 1.0 - tol) return false;
            if (mag >= 1.0 - tol) ++big;
        }
        if (big != 1) return false;
    }
    return true;
}

StateVector theta_statevector(double theta, std::size_t L) {
    return to_statevector(theta_product_state(theta, L));
}

}  // namespace

TEST_CASE("group sampling") {
    CHECK(two_qubit_clifford_count() == 11520);
    Rng rng(41);
    SUBCASE("every draw is unitary and Clifford") {
        for (int i = 0; i < 300; ++i) {
            const auto u = random_two_qubit_clifford(rng);
            REQUIRE(u.shape() == std::vector<std::size_t>({4, 4}));
            // Unitarity: u†u = 1.
            const auto g = contract(u.conjugated(), u, {{0, 0}});
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t b = 0; b < 4; ++b)
                    CHECK(std::abs(g(a, b) - cxd(a == b ? 1.0 : 0.0)) < 1e-12);
            CHECK(is_clifford_gate(u));
        }
    }
    SUBCASE("draws spread over the group") {
        // Fingerprint each draw by the signed images of X₁ and Z₁; 300 draws
        // from 11520 elements must produce many distinct fingerprints and
        // include the identity's fingerprint rarely if ever — a coarse
        // uniformity smoke test, not a full distribution test.
        std::set<std::vector<int>> prints;
        for (int i = 0; i < 300; ++i) {
            const auto u = random_two_qubit_clifford(rng);
            std::vector<int> fp;
            for (std::size_t gen : {4ul, 12ul}) {  // X⊗I and Z⊗I generators
                const auto p = two_site_pauli(gen);
                const auto upu =
                    contract(contract(u, p, {{1, 0}}), u.conjugated(), {{1, 1}});
                for (std::size_t k = 0; k < 16; ++k) {
                    const auto q = two_site_pauli(k);
                    cxd tr = 0.0;
                    for (std::size_t a = 0; a < 4; ++a)
                        for (std::size_t b = 0; b < 4; ++b)
                            tr += std::conj(q(a, b)) * upu(a, b);
                    if (std::abs(tr) / 4.0 > 0.5) {
                        fp.push_back(int(k));
                        fp.push_back(tr.real() > 0 ? 1 : -1);
                    }
                }
            }
            prints.insert(fp);
        }
        CHECK(prints.size() > 150);
    }
}

TEST_CASE("brickwork layers") {
    SUBCASE("norm and stabilizer closure") {
        Rng rng(42);
        auto sv = theta_statevector(0.0, 6);  // |+⟩⊗6, a stabilizer state
        for (int layer = 0; layer < 30; ++layer) {
            sv = apply_clifford_layer(sv, layer % 2, rng);
            CHECK(std::abs(sv.norm() - 1.0) < 1e-12);
            const auto sre = sre_exact(sv, 2.0);
            CHECK(std::abs(sre.m_alpha) < 1e-10);
        }
    }
    SUBCASE("magic is conserved layer by layer") {
        Rng rng(43);
        auto sv = theta_statevector(M_PI / 4.0, 6);
        const double m2 = sre_exact(sv, 2.0).m_alpha;
        for (int layer = 0; layer < 20; ++layer) {
            sv = apply_clifford_layer(sv, layer % 2, rng);
            CHECK(std::abs(sre_exact(sv, 2.0).m_alpha - m2) < 1e-9);
        }
    }
    SUBCASE("parity controls the pairing") {
        // An even layer on L=4 acts as U₀₁ ⊗ U₂₃: starting from a product
        // state, the cut between sites 1 and 2 stays unentangled.
        Rng rng(44);
        const auto sv = apply_clifford_layer(theta_statevector(0.3, 4), 0, rng);
        const auto spec = rdm_spectrum(sv, 0, 2);
        double s = 0.0;
        for (double p : spec)
            if (p > 1e-14) s -= p * std::log(p);
        CHECK(s < 1e-10);
    }
}

TEST_CASE("orbit protocol") {
    SUBCASE("stabilizer angle stays exactly flat") {
        const auto orbit = run_orbit(0.0, 6, 40, 20, 45);
        CHECK(orbit.mean_F < 1e-10);
        CHECK(orbit.mean_CE < 1e-10);
        CHECK(orbit.max_logLambda < 1e-10);
        CHECK(std::abs(orbit.m2_initial) < 1e-12);
        CHECK(std::abs(orbit.m_lin_initial) < 1e-12);
    }
    SUBCASE("initial-state metadata matches the exact backend") {
        const auto orbit = run_orbit(M_PI / 4.0, 6, 10, 8, 46);
        const auto sre = sre_exact(theta_statevector(M_PI / 4.0, 6), 2.0);
        CHECK(orbit.m2_initial == doctest::Approx(sre.m_alpha).epsilon(1e-12));
        CHECK(orbit.m_lin_initial == doctest::Approx(sre.m_lin).epsilon(1e-12));
        CHECK(orbit.theta == doctest::Approx(M_PI / 4.0));
        CHECK(orbit.n_layers == 10);
        CHECK(orbit.n_realizations == 8);
        // Aggregate sanity: maxima dominate means, everything nonnegative.
        CHECK(orbit.max_logLambda >= orbit.mean_logLambda - 1e-12);
        CHECK(orbit.max_CE >= orbit.mean_CE - 1e-12);
        CHECK(orbit.mean_F >= 0.0);
    }
    SUBCASE("more initial magic, more orbit antiflatness") {
        const auto low = run_orbit(M_PI / 8.0, 8, 60, 40, 47);
        const auto high = run_orbit(M_PI / 4.0, 8, 60, 40, 47);
        CHECK(high.m_lin_initial > low.m_lin_initial);
        CHECK(high.mean_F > low.mean_F);
    }
    SUBCASE("orbit-mean antiflatness is proportional to initial linear SRE") {
        // Five angles spanning stabilizer to maximal magic; a straight line
        // through the origin must explain the orbit means.
        const std::vector<double> thetas{0.0, M_PI / 8.0, M_PI / 4.0, 3.0 * M_PI / 8.0,
                                         M_PI / 2.0};
        std::vector<double> x, y;
        for (double t : thetas) {
            const auto orbit = run_orbit(t, 8, 60, 40, 48);
            x.push_back(orbit.m_lin_initial);
            y.push_back(orbit.mean_F);
        }
        // θ = π/2 is the Y-basis stabilizer point: both coordinates collapse.
        CHECK(std::abs(x.back()) < 1e-12);
        CHECK(y.back() < 1e-10);
        // Least squares through the origin, then R² against the mean.
        double sxy = 0.0, sxx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += x[i] * y[i];
            sxx += x[i] * x[i];
            sy += y[i];
        }
        const double slope = sxy / sxx;
        const double ybar = sy / double(y.size());
        double ss_res = 0.0, ss_tot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            ss_res += (y[i] - slope * x[i]) * (y[i] - slope * x[i]);
            ss_tot += (y[i] - ybar) * (y[i] - ybar);
        }
        CHECK(1.0 - ss_res / ss_tot > 0.99);
        CHECK(slope > 0.0);
    }
}
