#pragma once
// Matrix-product states and operators: canonical forms, two-site DMRG with a
// Lanczos local solver, Schmidt spectra, MPO application with compression,
// statevector conversion, and a binary cache format.

#include <cstdint>
#include <string>
#include <vector>

#include "spinchain/state.hpp"
#include "spinchain/tensor.hpp"

namespace spinchain {

struct MatrixProductState {
    // Rank-3 site tensors (left-bond × physical × right-bond); boundary bonds
    // have extent 1. Physical extent is 2 for spins, 4 for Pauli-basis states.
    std::vector<DenseTensor> site_tensors;
    // Site index of the canonical center, or -1 when no form is maintained.
    std::ptrdiff_t canonical_center = -1;

    std::size_t length() const { return site_tensors.size(); }
    std::size_t phys_dim(std::size_t site) const { return site_tensors[site].shape()[1]; }
    // Bond b sits between sites b-1 and b; b ranges over 0..L.
    std::size_t bond_dim(std::size_t bond) const;
    std::size_t max_bond_dim() const;
};

struct MatrixProductOperator {
    // Rank-4 site tensors (left-bond × phys-out × phys-in × right-bond).
    std::vector<DenseTensor> site_tensors;

    std::size_t length() const { return site_tensors.size(); }
};

struct SchmidtSpectrum {
    std::vector<double> probabilities;  // nonincreasing, Σ = 1
};

// Gauge the state into mixed-canonical form about `center`; normalizes.
MatrixProductState canonicalize(const MatrixProductState& m, std::size_t center);

struct DmrgOptions {
    std::size_t chi_max = 64;
    double energy_tol = 1e-10;
    std::size_t max_sweeps = 30;
    std::uint64_t seed = 0;
    // Bond-dimension schedule: start at chi_start, double each sweep until
    // chi_max is reached.
    std::size_t chi_start = 16;
    std::size_t lanczos_max_iter = 25;
    double svd_cutoff = 1e-12;
    // Optional initial state (e.g. a symmetry-broken product state selecting
    // a branch of a near-degenerate ground space). Null → seeded random init.
    const MatrixProductState* warm_start = nullptr;
    // Multi-state targeting: every local problem gains the energy penalty
    // ortho_weight·Σ|⟨o_k|ψ⟩|², pushing the result orthogonal to these states.
    // Standard uses: excited states (pass the ground state) and selection of a
    // symmetry-broken branch (pass the conjugate branch) when the parity
    // splitting is resolvable, where an unconstrained solver would relax into
    // the even-parity cat combination instead.
    std::vector<MatrixProductState> orthogonal_to;
    double ortho_weight = 10.0;
};

struct DmrgResult {
    double energy = 0.0;
    MatrixProductState state;
    bool converged = false;
    std::size_t sweeps_used = 0;
    // Gap between the two lowest Ritz values at the central bond on the final
    // sweep; gap_flag marks a near-degenerate ground space (< 1e-8), where the
    // returned branch is selection-dependent.
    double gap_estimate = 0.0;
    bool gap_flag = false;
};

DmrgResult dmrg_ground_state(const MatrixProductOperator& h, std::size_t chi_max,
                             double energy_tol, std::size_t max_sweeps,
                             std::uint64_t seed);
DmrgResult dmrg_ground_state(const MatrixProductOperator& h, const DmrgOptions& opts);

// Squared Schmidt coefficients at bond `cut` (1..L−1), sorted nonincreasing.
SchmidtSpectrum schmidt_spectrum(const MatrixProductState& m, std::size_t cut);

struct ApplyMpoResult {
    MatrixProductState state;
    double discarded_weight = 0.0;
};

// op·m, zip-up contraction with on-the-fly compression to chi_max/cutoff.
// The result is NOT normalized (an MPO need not preserve norm).
ApplyMpoResult apply_mpo(const MatrixProductOperator& op, const MatrixProductState& m,
                         std::size_t chi_max, double cutoff);

// ⟨m|op|m⟩ for Hermitian op; imaginary residue beyond 1e-8 is an error.
double expectation(const MatrixProductState& m, const MatrixProductOperator& op);

// Variational truncation to chi_max/cutoff (two gauge sweeps); preserves the
// norm of the input and reports the accumulated discarded weight.
MatrixProductState compress_state(const MatrixProductState& m, std::size_t chi_max,
                                  double cutoff, double* discarded = nullptr);

cxd overlap(const MatrixProductState& a, const MatrixProductState& b);  // ⟨a|b⟩
double mps_norm(const MatrixProductState& m);

// Full contraction to amplitudes; guarded to L ≤ 14 at physical extent 2
// (and the equivalent total dimension otherwise).
StateVector to_statevector(const MatrixProductState& m);

MatrixProductState random_mps(std::size_t L, std::size_t phys, std::size_t chi,
                              std::uint64_t seed);
MatrixProductState product_mps(const std::vector<std::vector<cxd>>& site_vectors);

// Binary cache: fixed header (magic, version, L, physical and bond extents,
// canonical center) followed by row-major complex-double payloads.
void save_mps(const MatrixProductState& m, const std::string& path);
MatrixProductState load_mps(const std::string& path);

}  // namespace spinchain
