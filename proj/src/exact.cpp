#include "spinchain/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "spinchain/kernels.hpp"

namespace spinchain {

namespace {

constexpr std::size_t kMaxDenseQubits = 14;
constexpr std::size_t kMaxPauliSumQubits = 12;

// Bit position of a site in an amplitude index (site 0 most significant).
inline std::size_t site_bit(std::size_t n, std::size_t site) { return n - 1 - site; }

}  // namespace

StateVector::StateVector(std::size_t n, std::vector<cxd> amps)
    : n_qubits(n), amplitudes(std::move(amps)) {
    if (amplitudes.size() != (std::size_t(1) << n))
        throw dimension_error("amplitude count does not match qubit count");
}

double StateVector::norm() const {
    return std::sqrt(kernels::sum_abs2(amplitudes.data(), amplitudes.size()));
}

void StateVector::normalize() {
    const double n = norm();
    if (!(n > 0.0)) throw numeric_error("cannot normalize a zero state");
    for (cxd& a : amplitudes) a /= n;
}

StateVector StateVector::basis_state(std::size_t n, std::uint64_t index) {
    StateVector s(n);
    s.amplitudes.at(index) = 1.0;
    return s;
}

cxd inner(const StateVector& a, const StateVector& b) {
    if (a.n_qubits != b.n_qubits) throw dimension_error("inner: qubit counts differ");
    cxd acc(0.0);
    for (std::size_t i = 0; i < a.dim(); ++i)
        acc += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    return acc;
}

StateVector apply_gate(const StateVector& state, const DenseTensor& gate,
                       const std::vector<std::size_t>& sites) {
    const std::size_t n = state.n_qubits;
    if (sites.empty() || sites.size() > 2)
        throw dimension_error("apply_gate supports 1 or 2 sites");
    for (std::size_t s : sites)
        if (s >= n) throw dimension_error("gate site out of range");
    if (sites.size() == 2 && sites[0] == sites[1])
        throw dimension_error("gate sites must be distinct");
    const std::size_t g = sites.size() == 1 ? 2 : 4;
    if (gate.rank() != 2 || gate.shape()[0] != g || gate.shape()[1] != g)
        throw dimension_error("gate matrix has the wrong shape");

    // Unitarity: max |(G†G − I)_ij| < 1e-10.
    double dev = 0.0;
    for (std::size_t i = 0; i < g; ++i)
        for (std::size_t j = 0; j < g; ++j) {
            cxd acc(0.0);
            for (std::size_t k = 0; k < g; ++k)
                acc += std::conj(gate.data()[k * g + i]) * gate.data()[k * g + j];
            dev = std::max(dev, std::abs(acc - (i == j ? cxd(1.0) : cxd(0.0))));
        }
    if (dev >= 1e-10) throw contract_violation("apply_gate: gate is not unitary");

    StateVector out = state;
    if (sites.size() == 1) {
        const std::size_t mask = std::size_t(1) << site_bit(n, sites[0]);
        const cxd g00 = gate.data()[0], g01 = gate.data()[1];
        const cxd g10 = gate.data()[2], g11 = gate.data()[3];
        for (std::size_t idx = 0; idx < state.dim(); ++idx) {
            if (idx & mask) continue;
            const cxd a0 = state.amplitudes[idx];
            const cxd a1 = state.amplitudes[idx | mask];
            out.amplitudes[idx] = g00 * a0 + g01 * a1;
            out.amplitudes[idx | mask] = g10 * a0 + g11 * a1;
        }
        return out;
    }
    const std::size_t m1 = std::size_t(1) << site_bit(n, sites[0]);
    const std::size_t m2 = std::size_t(1) << site_bit(n, sites[1]);
    for (std::size_t idx = 0; idx < state.dim(); ++idx) {
        if ((idx & m1) || (idx & m2)) continue;
        const std::size_t part[4] = {idx, idx | m2, idx | m1, idx | m1 | m2};
        cxd in[4];
        for (int k = 0; k < 4; ++k) in[k] = state.amplitudes[part[k]];
        for (int r = 0; r < 4; ++r) {
            cxd acc(0.0);
            for (int c = 0; c < 4; ++c) acc += gate.data()[r * 4 + c] * in[c];
            out.amplitudes[part[r]] = acc;
        }
    }
    return out;
}

double pauli_expectation(const StateVector& state, const PauliString& p) {
    const std::size_t n = state.n_qubits;
    if (p.size() != n) throw dimension_error("Pauli string length does not match state");
    std::size_t flip = 0, yz = 0;
    int y_count = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t bit = std::size_t(1) << site_bit(n, j);
        switch (p.code(j)) {
            case 1: flip |= bit; break;
            case 2: flip |= bit; yz |= bit; ++y_count; break;
            case 3: yz |= bit; break;
            default: break;
        }
    }
    // P|s⟩ = i^{|Y|}·(−1)^{popcount(s & yz)}·|s ⊕ flip⟩ up to the per-site
    // factors collected above.
    cxd acc(0.0);
    for (std::size_t s = 0; s < state.dim(); ++s) {
        const double sign = (std::popcount(s & yz) & 1) ? -1.0 : 1.0;
        acc += std::conj(state.amplitudes[s ^ flip]) * state.amplitudes[s] * sign;
    }
    static const cxd i_pow[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
    acc *= i_pow[y_count & 3];
    return acc.real();
}

DenseTensor reduced_density_matrix(const StateVector& state, std::size_t begin,
                                   std::size_t end) {
    const std::size_t n = state.n_qubits;
    if (begin > end || end > n) throw dimension_error("invalid region bounds");
    const std::size_t dl = std::size_t(1) << begin;
    const std::size_t dm = std::size_t(1) << (end - begin);
    const std::size_t dr = std::size_t(1) << (n - end);
    DenseTensor rho({dm, dm});
    for (std::size_t l = 0; l < dl; ++l)
        for (std::size_t a = 0; a < dm; ++a)
            for (std::size_t b = 0; b < dm; ++b) {
                cxd acc(0.0);
                const cxd* pa = state.amplitudes.data() + (l * dm + a) * dr;
                const cxd* pb = state.amplitudes.data() + (l * dm + b) * dr;
                for (std::size_t r = 0; r < dr; ++r) acc += pa[r] * std::conj(pb[r]);
                rho(a, b) += acc;
            }
    return rho;
}

std::vector<double> rdm_spectrum(const StateVector& state, std::size_t begin,
                                 std::size_t end) {
    const DenseTensor rho = reduced_density_matrix(state, begin, end);
    EighResult eg = eigh(rho);
    std::vector<double> vals(eg.values.rbegin(), eg.values.rend());
    double total = 0.0;
    for (double& v : vals) {
        if (v < -1e-12)
            throw numeric_error("reduced density matrix has a negative eigenvalue: " +
                                std::to_string(v));
        if (v < 0.0) v = 0.0;
        total += v;
    }
    if (!(total > 0.0)) throw numeric_error("reduced density matrix has zero trace");
    for (double& v : vals) v /= total;
    return vals;
}

DenseTensor build_dense_hamiltonian(const ModelSpec& spec) {
    if (spec.L > kMaxDenseQubits)
        throw resource_error("dense Hamiltonian limited to L <= " +
                             std::to_string(kMaxDenseQubits));
    const auto terms = hamiltonian_terms(spec);
    const std::size_t n = spec.L;
    const std::size_t dim = std::size_t(1) << n;
    DenseTensor h({dim, dim});
    for (const auto& t : terms) {
        std::size_t flip = 0, yz = 0;
        int y_count = 0;
        for (const auto& [site, letter] : t.factors) {
            const std::size_t bit = std::size_t(1) << site_bit(n, site);
            switch (pauli_code(letter)) {
                case 1: flip |= bit; break;
                case 2: flip |= bit; yz |= bit; ++y_count; break;
                case 3: yz |= bit; break;
                default: break;
            }
        }
        static const cxd i_pow[4] = {cxd(1, 0), cxd(0, 1), cxd(-1, 0), cxd(0, -1)};
        const cxd base = i_pow[y_count & 3] * t.coeff;
        for (std::size_t c = 0; c < dim; ++c) {
            const double sign = (std::popcount(c & yz) & 1) ? -1.0 : 1.0;
            h.data()[(c ^ flip) * dim + c] += base * sign;
        }
    }
    return h;
}

GroundStateExact ground_state_exact(const DenseTensor& h) {
    if (h.rank() != 2 || h.shape()[0] != h.shape()[1])
        throw dimension_error("Hamiltonian must be a square matrix");
    const std::size_t dim = h.shape()[0];
    std::size_t n = 0;
    while ((std::size_t(1) << n) < dim) ++n;
    if ((std::size_t(1) << n) != dim)
        throw dimension_error("Hamiltonian dimension is not a power of two");

    EighResult eg = eigh(h);
    GroundStateExact out;
    out.energy = eg.values[0];
    out.gap = dim > 1 ? eg.values[1] - eg.values[0] : 0.0;
    out.degenerate = dim > 1 && out.gap < 1e-10;
    out.state = StateVector(n);
    for (std::size_t i = 0; i < dim; ++i)
        out.state.amplitudes[i] = eg.vectors.data()[i * dim + 0];
    out.state.normalize();
    return out;
}

std::vector<double> pauli_spectrum(const StateVector& state) {
    const std::size_t n = state.n_qubits;
    if (n > kMaxPauliSumQubits)
        throw resource_error("exact Pauli sum limited to N <= " +
                             std::to_string(kMaxPauliSumQubits));
    const double nrm2 = kernels::sum_abs2(state.amplitudes.data(), state.amplitudes.size());
    if (std::abs(nrm2 - 1.0) > 1e-8)
        throw contract_violation("pauli_spectrum expects a normalized state");

    const std::size_t N4 = std::size_t(1) << (2 * n);
    // Work tensor, initially ρ(s, s') = ψ_s · conj(ψ_{s'}); each step merges
    // one (s_j, s'_j) index pair into a Pauli index a_j at the front block.
    std::vector<cxd> cur(N4), next(N4);
    {
        const std::size_t d = state.dim();
        for (std::size_t s = 0; s < d; ++s)
            for (std::size_t t = 0; t < d; ++t)
                cur[s * d + t] = state.amplitudes[s] * std::conj(state.amplitudes[t]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t A = std::size_t(1) << (2 * j);        // finished Pauli block
        const std::size_t R = std::size_t(1) << (n - 1 - j);    // remaining s sites
        const std::size_t RR = R * R;
        const cxd ii(0.0, 1.0);
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t src_off = a * 4 * RR;
            const std::size_t dst_off = a * 4 * RR;
            for (std::size_t r = 0; r < R; ++r) {
                const cxd* p00 = cur.data() + src_off + (2 * r) * R;         // s=0, s'=0
                const cxd* p01 = cur.data() + src_off + (2 * r + 1) * R;     // s=0, s'=1
                const cxd* p10 = cur.data() + src_off + (2 * R + 2 * r) * R; // s=1, s'=0
                const cxd* p11 = cur.data() + src_off + (2 * R + 2 * r + 1) * R;
                cxd* qi = next.data() + dst_off + (0 * R + r) * R;
                cxd* qx = next.data() + dst_off + (1 * R + r) * R;
                cxd* qy = next.data() + dst_off + (2 * R + r) * R;
                cxd* qz = next.data() + dst_off + (3 * R + r) * R;
                for (std::size_t rp = 0; rp < R; ++rp) {
                    const cxd x00 = p00[rp], x01 = p01[rp], x10 = p10[rp], x11 = p11[rp];
                    qi[rp] = x00 + x11;
                    qx[rp] = x01 + x10;
                    qy[rp] = ii * (x01 - x10);
                    qz[rp] = x00 - x11;
                }
            }
        }
        cur.swap(next);
    }
    const double d = static_cast<double>(state.dim());
    std::vector<double> xi(N4);
    for (std::size_t a = 0; a < N4; ++a) {
        const double e = cur[a].real();
        xi[a] = e * e / d;
    }
    return xi;
}

SreExactResult sre_exact(const StateVector& state, double alpha) {
    if (!(alpha > 0.0)) throw contract_violation("sre_exact requires alpha > 0");
    const std::vector<double> xi = pauli_spectrum(state);
    const double d = static_cast<double>(state.dim());
    double sum_sq = 0.0;
    for (double v : xi) sum_sq += v * v;
    SreExactResult out;
    out.m_lin = 1.0 - d * sum_sq;
    if (std::abs(alpha - 1.0) < 1e-12) {
        double shannon = 0.0;
        for (double v : xi)
            if (v > 0.0) shannon -= v * std::log(v);
        out.m_alpha = shannon - std::log(d);
    } else if (std::abs(alpha - 2.0) < 1e-12) {
        out.m_alpha = -std::log(d * sum_sq);
    } else {
        double sum_a = 0.0;
        for (double v : xi)
            if (v > 0.0) sum_a += std::pow(v, alpha);
        out.m_alpha = std::log(sum_a) / (1.0 - alpha) - std::log(d);
    }
    return out;
}

}  // namespace spinchain
