#include "spinchain/clifford.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "spinchain/entspec.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/exact.hpp"

namespace spinchain {

namespace {

using Mat4 = std::array<cxd, 16>;

Mat4 matmul(const Mat4& a, const Mat4& b) {
    Mat4 c{};
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) {
            const cxd aik = a[i * 4 + k];
            if (aik == cxd(0.0)) continue;
            for (int j = 0; j < 4; ++j) c[i * 4 + j] += aik * b[k * 4 + j];
        }
    return c;
}

Mat4 kron2(const cxd a[4], const cxd b[4]) {
    Mat4 out{};
    for (int i1 = 0; i1 < 2; ++i1)
        for (int j1 = 0; j1 < 2; ++j1)
            for (int i2 = 0; i2 < 2; ++i2)
                for (int j2 = 0; j2 < 2; ++j2)
                    out[(i1 * 2 + i2) * 4 + (j1 * 2 + j2)] =
                        a[i1 * 2 + j1] * b[i2 * 2 + j2];
    return out;
}

// Remove the global phase: rotate so the first entry with |z| > 1e-8 becomes
// positive real. Entries of two-qubit Cliffords are well separated, so a 1e-6
// rounding of the rotated matrix is a collision-free dictionary key.
Mat4 phase_canonical(const Mat4& m) {
    cxd phase(1.0);
    for (const cxd& z : m)
        if (std::abs(z) > 1e-8) {
            phase = z / std::abs(z);
            break;
        }
    Mat4 out;
    for (int i = 0; i < 16; ++i) out[i] = m[i] / phase;
    return out;
}

std::string matrix_key(const Mat4& m) {
    std::string key;
    key.reserve(16 * 16);
    char buf[20];
    for (const cxd& z : m) {
        const long re = std::lround(z.real() * 1e6);
        const long im = std::lround(z.imag() * 1e6);
        std::snprintf(buf, sizeof buf, "%ld,%ld;", re, im);
        key += buf;
    }
    return key;
}

const std::vector<Mat4>& clifford_table() {
    static const std::vector<Mat4> table = [] {
        const double is2 = 1.0 / std::sqrt(2.0);
        const cxd h[4] = {is2, is2, is2, -is2};
        const cxd s[4] = {1.0, 0.0, 0.0, cxd(0.0, 1.0)};
        const cxd id[4] = {1.0, 0.0, 0.0, 1.0};
        std::vector<Mat4> gens = {kron2(h, id), kron2(id, h), kron2(s, id),
                                  kron2(id, s)};
        Mat4 cnot01{};  // control = first tensor factor
        cnot01[0 * 4 + 0] = cnot01[1 * 4 + 1] = 1.0;
        cnot01[2 * 4 + 3] = cnot01[3 * 4 + 2] = 1.0;
        Mat4 cnot10{};
        cnot10[0 * 4 + 0] = cnot10[3 * 4 + 1] = 1.0;
        cnot10[2 * 4 + 2] = cnot10[1 * 4 + 3] = 1.0;
        gens.push_back(cnot01);
        gens.push_back(cnot10);

        std::vector<Mat4> out;
        std::unordered_map<std::string, std::size_t> seen;
        std::deque<std::size_t> frontier;
        Mat4 identity{};
        for (int i = 0; i < 4; ++i) identity[i * 4 + i] = 1.0;
        const Mat4 canon = phase_canonical(identity);
        seen.emplace(matrix_key(canon), 0);
        out.push_back(canon);
        frontier.push_back(0);
        while (!frontier.empty()) {
            const Mat4 cur = out[frontier.front()];
            frontier.pop_front();
            for (const Mat4& g : gens) {
                const Mat4 next = phase_canonical(matmul(g, cur));
                const std::string key = matrix_key(next);
                if (seen.emplace(key, out.size()).second) {
                    frontier.push_back(out.size());
                    out.push_back(next);
                }
            }
        }
        if (out.size() != 11520)
            throw numeric_error("two-qubit Clifford enumeration produced " +
                                std::to_string(out.size()) + " elements, expected 11520");
        return out;
    }();
    return table;
}

}  // namespace

std::size_t two_qubit_clifford_count() { return clifford_table().size(); }

DenseTensor random_two_qubit_clifford(Rng& rng) {
    const auto& table = clifford_table();
    const std::uint64_t idx = rng.uniform_int(table.size());
    DenseTensor out({4, 4});
    for (std::size_t i = 0; i < 16; ++i) out.data()[i] = table[idx][i];
    return out;
}

StateVector apply_clifford_layer(const StateVector& state, int parity, Rng& rng) {
    const std::size_t n = state.n_qubits;
    StateVector out = state;
    for (std::size_t q = static_cast<std::size_t>(parity & 1); q + 1 < n; q += 2) {
        const DenseTensor u = random_two_qubit_clifford(rng);
        out = apply_gate(out, u, {q, q + 1});
    }
    return out;
}

OrbitResult run_orbit(double theta, std::size_t L, std::size_t n_layers,
                      std::size_t n_realizations, std::uint64_t seed) {
    if (L < 2 || L > 14) throw dimension_error("orbit protocol supports 2 <= L <= 14");
    if (n_layers == 0 || n_realizations == 0)
        throw dimension_error("orbit protocol needs layers and realizations");

    // ⊗(|0⟩ + e^{iθ}|1⟩)/√2: amplitude e^{iθ·popcount} / 2^{L/2}.
    StateVector init(L);
    const double amp = std::pow(2.0, -0.5 * static_cast<double>(L));
    for (std::uint64_t s = 0; s < init.dim(); ++s) {
        const int ones = __builtin_popcountll(s);
        init.amplitudes[s] = std::polar(amp, theta * static_cast<double>(ones));
    }

    OrbitResult res;
    res.theta = theta;
    res.n_layers = n_layers;
    res.n_realizations = n_realizations;
    const SreExactResult initial = sre_exact(init, 2.0);
    res.m2_initial = initial.m_alpha;
    res.m_lin_initial = initial.m_lin;

    const std::size_t half = L / 2;
    double sum_f = 0.0, sum_loglam = 0.0, sum_ce = 0.0;
    double sum_max_loglam = 0.0, sum_max_ce = 0.0;

    for (std::size_t rep = 0; rep < n_realizations; ++rep) {
        Rng rng(substream_seed(seed, rep));
        StateVector state = init;
        double max_loglam = -std::numeric_limits<double>::infinity();
        double max_ce = -std::numeric_limits<double>::infinity();
        for (std::size_t layer = 0; layer < n_layers; ++layer) {
            state = apply_clifford_layer(state, static_cast<int>(layer % 2), rng);
            SchmidtSpectrum spec;
            spec.probabilities = rdm_spectrum(state, 0, half);
            const Antiflatness af = antiflatness(spec);
            const double ce = capacity(spec);
            sum_f += af.F;
            sum_loglam += af.logLambda;
            sum_ce += ce;
            max_loglam = std::max(max_loglam, af.logLambda);
            max_ce = std::max(max_ce, ce);
        }
        sum_max_loglam += max_loglam;
        sum_max_ce += max_ce;
    }

    const double steps =
        static_cast<double>(n_layers) * static_cast<double>(n_realizations);
    res.mean_F = sum_f / steps;
    res.mean_logLambda = sum_loglam / steps;
    res.mean_CE = sum_ce / steps;
    res.max_logLambda = sum_max_loglam / static_cast<double>(n_realizations);
    res.max_CE = sum_max_ce / static_cast<double>(n_realizations);
    return res;
}

}  // namespace spinchain
