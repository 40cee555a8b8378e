#pragma once
// The five spin-chain Hamiltonians as declarative term lists (shared by the
// dense builder and the MPO compiler so the two realizations agree term by
// term), plus the analytic reference states: separability-circle product
// states, θ product states, the bond-dimension-2 cluster ground state, GHZ.

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "spinchain/mps.hpp"
#include "spinchain/tensor.hpp"

namespace spinchain {

enum class ModelFamily { heisenberg_xxz, xy, xy_dm, cluster_ising, cluster_xy };

ModelFamily family_from_string(const std::string& name);
std::string family_to_string(ModelFamily family);

struct ModelSpec {
    ModelFamily family = ModelFamily::xy;
    std::size_t L = 0;
    // Named reals; only the declared family's parameters may be present.
    // Accepted names per family:
    //   heisenberg_xxz: J, gamma, delta, h
    //   xy:             J, gamma, h
    //   xy_dm:          J, gamma, D, h
    //   cluster_ising:  g_zz, g_x, g_zxz
    //   cluster_xy:     h, lambda_x, lambda_y
    std::map<std::string, double> parameters;

    double param(const std::string& name) const;
    double param_or(const std::string& name, double fallback) const;
};

// Throws spec_error naming the offending key when parameters don't match the
// family, or when L is too small for the family's term ranges.
void validate_model(const ModelSpec& spec);

// One additive term: coefficient times a product of single-site Paulis at
// strictly increasing sites.
struct PauliTerm {
    double coeff = 0.0;
    std::vector<std::pair<std::size_t, char>> factors;  // (site, letter)
};

// The literal printed sum for the model: bond sums run over j = 1..L−1 and
// three-site windows over fully interior positions (open boundaries).
std::vector<PauliTerm> hamiltonian_terms(const ModelSpec& spec);

// Compile the term list into an MPO with minimal bond dimension for the term
// structure (shared-suffix finite-state construction).
MatrixProductOperator build_mpo(const ModelSpec& spec);

// Couplings (g_zz, g_x, g_zxz) = (2(1−g²), (1+g)², (g−1)²) along the exactly
// solvable line of the cluster Ising family.
std::array<double, 3> solvable_trajectory(double g);

// A cluster_ising ModelSpec on the solvable line at parameter g.
ModelSpec cluster_trajectory_model(double g, std::size_t L);

// Bond-dimension-2 ground state on the solvable trajectory, normalized after
// boundary closure; translation-invariant bulk tensors with prefactor
// 1/√(1+|g|) and entries sign(g)·√|g| and √|g|.
MatrixProductState cluster_ising_exact_mps(double g, std::size_t L);

// Staggered product ground state on the XY separability circle:
// per site (cos(θ_γ/2), (−1)^i sin(θ_γ/2)) with cos θ_γ = √((1−γ)/(1+γ)).
// The circle hosts two such branches exchanged by a global spin flip;
// second_branch selects the partner (sign-flipped staggered component).
MatrixProductState cgs_product_state(double gamma, std::size_t L,
                                     bool second_branch = false);

// ⊗ (|0⟩ + e^{iθ}|1⟩)/√2.
MatrixProductState theta_product_state(double theta, std::size_t L);

// (|0...0⟩ + |1...1⟩)/√2 as a χ=2 MPS.
MatrixProductState ghz_mps(std::size_t L);

// h_sep(γ) = √(1−γ²), the field on the separability circle.
double separability_field(double gamma);

}  // namespace spinchain
