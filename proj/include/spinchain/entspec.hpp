#pragma once
// Entanglement-spectrum measures on a Schmidt spectrum: von Neumann and
// Rényi entropies, capacity of entanglement, density-matrix moments, and the
// antiflatness family F = p₃ − p₂², Λ = p₃/p₂², log Λ = 2(S₂ − S₃).

#include <vector>

#include "spinchain/mps.hpp"

namespace spinchain {

// Validate and normalize raw probabilities into a spectrum (sorted
// nonincreasing); entries below 1e-14 are kept but excluded from log terms.
SchmidtSpectrum make_spectrum(std::vector<double> probabilities);

double entropy(const SchmidtSpectrum& s);                 // −Σ λ log λ
double renyi(const SchmidtSpectrum& s, double n);         // (1−n)⁻¹ log Σ λⁿ
double capacity(const SchmidtSpectrum& s);                // Σ λ log²λ − (Σ λ log λ)²
double moments(const SchmidtSpectrum& s, unsigned k);     // Σ λᵏ, k ≥ 2

struct Antiflatness {
    double F = 0.0;          // p₃ − p₂²
    double Lambda = 1.0;     // p₃ / p₂²
    double logLambda = 0.0;  // log Λ
};

Antiflatness antiflatness(const SchmidtSpectrum& s);

struct SpectralPanel {
    double S = 0.0;
    double S2 = 0.0;
    double S3 = 0.0;
    double CE = 0.0;
    double p2 = 1.0;
    double p3 = 1.0;
    double F = 0.0;
    double Lambda = 1.0;
    double logLambda = 0.0;
};

SpectralPanel spectral_panel(const SchmidtSpectrum& s);

}  // namespace spinchain
