#pragma once
// Stabilizer Rényi entropy on matrix-product states by two independent
// algorithms — perfect Pauli sampling down the chain, and the replica route
// through the Pauli-basis MPS — plus the analytic per-site curves they are
// checked against. All SRE values are in nats.

#include <cstdint>
#include <string>

#include "spinchain/mps.hpp"
#include "spinchain/pauli.hpp"
#include "spinchain/rng.hpp"

namespace spinchain {

struct PauliSample {
    PauliString string;
    double probability = 0.0;  // exact Π(σ) of the drawn word
    double weight = 0.0;       // d·Π(σ) = 2^N·Ξ(σ), the estimator payload
};

enum class SreMethod { exact_sum, sampling, replica, closed_form };

std::string sre_method_name(SreMethod method);

struct SreEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 for deterministic methods
    SreMethod method = SreMethod::exact_sum;
    std::size_t n_samples = 0;        // sampling metadata
    std::size_t chi_used = 0;         // replica metadata
    double discarded_weight = 0.0;    // replica compression loss, accumulated
    bool truncation_warning = false;  // discarded_weight exceeded the budget
};

// Draw one Pauli word with probability exactly Ξ(σ) via the chain rule over
// sites; O(Nχ³). The state is right-canonicalized internally if needed.
PauliSample pauli_sample(const MatrixProductState& m, Rng& rng);

// Monte-Carlo M_α from n_samples independent draws (per-draw RNG streams
// derived from the seed), jackknife standard error. α=1 uses the matching
// E[−log(d·Ξ)] − log d estimator.
SreEstimate sre_sampled(const MatrixProductState& m, double alpha,
                        std::size_t n_samples, std::uint64_t seed);

// Pauli-basis MPS with physical extent 4 and bond extent χ²; amplitude at
// word α equals ⟨ψ|P_α|ψ⟩/√(2^N).
MatrixProductState build_pauli_mps(const MatrixProductState& m);

// As above but compressed on the fly (chi_max, cutoff) instead of exact χ².
struct PauliMpsResult {
    MatrixProductState state;
    double discarded_weight = 0.0;
};
PauliMpsResult build_pauli_mps_compressed(const MatrixProductState& m,
                                          std::size_t chi_max, double cutoff);

// Replica M_n = (1/(1−n))·log⟨P⁽ⁿ⁾|P⁽ⁿ⁾⟩ − N·log 2 with |P⁽ⁿ⁾⟩ = W^{n−1}|P⟩,
// W the diagonal Pauli-basis MPO; compressed after every application with the
// given cutoff. Exact when chi_max ≥ χ^{2n}.
SreEstimate sre_replica(const MatrixProductState& m, unsigned n, std::size_t chi_max,
                        double cutoff, double discarded_budget = 1e-6);

// Per-site 2-SRE of the cluster ground state along the solvable line:
// −log((1 + 14g² + g⁴)/(1+|g|)⁴); zero at g ∈ {−1,0,1}, maxima at ±(3−2√2).
double m2_closed_form_cluster_ising(double g);

// Per-site SRE of the separability-circle product state:
// (1−α)⁻¹ log[(1 + sin^{2α}θ_γ + cos^{2α}θ_γ)/2^α] − log 2.
double m_alpha_closed_form_cgs(double gamma, double alpha);

}  // namespace spinchain
