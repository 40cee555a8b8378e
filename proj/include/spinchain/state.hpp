#pragma once
// Exact statevectors and the operations that act on them directly: gates,
// Pauli expectations, and reduced density matrices. Site 0 is the most
// significant bit of an amplitude index, matching the Pauli word order.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spinchain/pauli.hpp"
#include "spinchain/tensor.hpp"

namespace spinchain {

struct StateVector {
    std::size_t n_qubits = 0;
    std::vector<cxd> amplitudes;

    StateVector() = default;
    explicit StateVector(std::size_t n)
        : n_qubits(n), amplitudes(std::size_t(1) << n, cxd(0.0)) {}
    StateVector(std::size_t n, std::vector<cxd> amps);

    std::size_t dim() const { return amplitudes.size(); }
    double norm() const;
    void normalize();

    static StateVector basis_state(std::size_t n, std::uint64_t index);
};

cxd inner(const StateVector& a, const StateVector& b);  // ⟨a|b⟩

// Apply a 1- or 2-site unitary. For two sites the gate is 4×4 with row/column
// index (bit of sites[0], bit of sites[1]); unitarity is checked to 1e-10.
StateVector apply_gate(const StateVector& state, const DenseTensor& gate,
                       const std::vector<std::size_t>& sites);

// ⟨ψ|P|ψ⟩ for a Pauli word; always real for normalized ψ.
double pauli_expectation(const StateVector& state, const PauliString& p);

// ρ_A for the contiguous region [begin, end); empty → scalar 1, full → |ψ⟩⟨ψ|.
DenseTensor reduced_density_matrix(const StateVector& state, std::size_t begin,
                                   std::size_t end);

// Eigenvalues of ρ_A sorted nonincreasing, with negatives in [−1e-12, 0)
// clipped to zero and the spectrum renormalized.
std::vector<double> rdm_spectrum(const StateVector& state, std::size_t begin,
                                 std::size_t end);

}  // namespace spinchain
