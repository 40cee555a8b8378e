#pragma once
// Exact backend for small systems: dense Hamiltonians, exact ground states,
// and the brute-force 4^N Pauli-sum stabilizer Rényi entropy that every
// estimator is validated against.

#include <cstddef>
#include <vector>

#include "spinchain/models.hpp"
#include "spinchain/state.hpp"
#include "spinchain/tensor.hpp"

namespace spinchain {

// Dense 2^L × 2^L Hermitian matrix equal to the literal term sum of the
// model; guarded to L ≤ 14.
DenseTensor build_dense_hamiltonian(const ModelSpec& spec);

struct GroundStateExact {
    double energy = 0.0;
    StateVector state;
    // Gap E₁−E₀; degenerate flags gap < 1e-10, where the returned vector is an
    // arbitrary basis choice within the ground space.
    double gap = 0.0;
    bool degenerate = false;
};

GroundStateExact ground_state_exact(const DenseTensor& h);

// The full distribution Ξ_P = ⟨ψ|P|ψ⟩²/2^N over Pauli words in base-4 order
// (site 0 most significant); O(N·4^N) via sitewise Pauli transforms, N ≤ 12.
std::vector<double> pauli_spectrum(const StateVector& state);

struct SreExactResult {
    double m_alpha = 0.0;  // (1−α)⁻¹ log ΣΞ^α − log d   (α→1: Shannon − log d)
    double m_lin = 0.0;    // 1 − d·ΣΞ²
};

// α=1 is accepted and uses the Shannon limit form.
SreExactResult sre_exact(const StateVector& state, double alpha);

}  // namespace spinchain
