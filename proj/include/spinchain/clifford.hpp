#pragma once
// Uniform sampling from the two-qubit Clifford group (canonical enumeration,
// not Haar projection), brickwork Clifford layers on statevectors, and the
// Clifford-orbit protocol: evolve θ product states, track half-chain
// antiflatness and capacity, and relate orbit means to stabilizer linear
// entropy of the initial state.

#include <cstdint>
#include <cstddef>

#include "spinchain/rng.hpp"
#include "spinchain/state.hpp"
#include "spinchain/tensor.hpp"

namespace spinchain {

// Number of distinct two-qubit Clifford unitaries modulo global phase (11520).
std::size_t two_qubit_clifford_count();

// Uniform draw from the group; exactly unitary, maps Paulis to signed Paulis.
DenseTensor random_two_qubit_clifford(Rng& rng);

// One brickwork layer: independent random two-qubit Cliffords on pairs
// (0,1),(2,3),... for even parity, (1,2),(3,4),... for odd.
StateVector apply_clifford_layer(const StateVector& state, int parity, Rng& rng);

struct OrbitResult {
    double theta = 0.0;
    std::size_t n_layers = 0;
    std::size_t n_realizations = 0;
    // Time-and-realization means of half-chain quantities.
    double mean_F = 0.0;
    double mean_logLambda = 0.0;
    double mean_CE = 0.0;
    // Per-realization trajectory maxima, then averaged over realizations.
    double max_logLambda = 0.0;
    double max_CE = 0.0;
    // Exact-backend invariants of the initial product state.
    double m2_initial = 0.0;
    double m_lin_initial = 0.0;
};

// Evolve ⊗(|0⟩+e^{iθ}|1⟩)/√2 through alternating brickwork layers for each
// realization, recording half-chain F, log Λ, C_E after every layer.
OrbitResult run_orbit(double theta, std::size_t L, std::size_t n_layers,
                      std::size_t n_realizations, std::uint64_t seed);

}  // namespace spinchain
