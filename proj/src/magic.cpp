#include "spinchain/magic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spinchain/errors.hpp"
#include "spinchain/kernels.hpp"

namespace spinchain {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

// 2×2 Pauli matrices as flat row-major arrays, indexed [row*2+col].
struct PauliEntries {
    cxd e[4];
};

PauliEntries pauli_entries(std::size_t code) {
    switch (code) {
        case 0: return {{1.0, 0.0, 0.0, 1.0}};
        case 1: return {{0.0, 1.0, 1.0, 0.0}};
        case 2: return {{0.0, cxd(0.0, -1.0), cxd(0.0, 1.0), 0.0}};
        default: return {{1.0, 0.0, 0.0, -1.0}};
    }
}

// Frobenius norm squared.
double fnorm2(const std::vector<cxd>& v) {
    return kernels::sum_abs2(v.data(), v.size());
}

}  // namespace

std::string sre_method_name(SreMethod method) {
    switch (method) {
        case SreMethod::exact_sum: return "exact_sum";
        case SreMethod::sampling: return "sampling";
        case SreMethod::replica: return "replica";
        case SreMethod::closed_form: return "closed_form";
    }
    throw dimension_error("unknown SRE method");
}

PauliSample pauli_sample(const MatrixProductState& m, Rng& rng) {
    const MatrixProductState* src = &m;
    MatrixProductState holder;
    if (m.canonical_center != 0) {
        holder = canonicalize(m, 0);
        src = &holder;
    }
    const std::size_t L = src->length();
    std::string letters(L, 'I');
    double log_prob = 0.0;

    // Running conditional operator, (l × l) over the bond left of the current
    // site; starts as the 1×1 identity on the open boundary.
    std::vector<cxd> env = {cxd(1.0)};
    std::size_t env_dim = 1;

    for (std::size_t j = 0; j < L; ++j) {
        const DenseTensor& a = src->site_tensors[j];
        if (a.shape()[1] != 2)
            throw dimension_error("Pauli sampling requires physical extent 2");
        const std::size_t l = a.shape()[0], r = a.shape()[2];

        // Contiguous copies of the physical slices and their transposes.
        std::vector<cxd> at[2];  // A_sᵀ, (r × l)
        for (std::size_t s = 0; s < 2; ++s) {
            at[s].resize(r * l);
            for (std::size_t i = 0; i < l; ++i)
                for (std::size_t k = 0; k < r; ++k) at[s][k * l + i] = a(i, s, k);
        }
        std::vector<cxd> ac[2];  // conj(A_p), (l × r)
        for (std::size_t p = 0; p < 2; ++p) {
            ac[p].resize(l * r);
            for (std::size_t i = 0; i < l; ++i)
                for (std::size_t k = 0; k < r; ++k)
                    ac[p][i * r + k] = std::conj(a(i, p, k));
        }

        // K_s = A_sᵀ·env (r × l), then H_sp = K_s·conj(A_p) (r × r).
        std::vector<cxd> ks(r * l), h[2][2];
        for (std::size_t s = 0; s < 2; ++s) {
            kernels::cgemm(at[s].data(), env.data(), ks.data(), r, env_dim, l, false);
            for (std::size_t p = 0; p < 2; ++p) {
                h[s][p].assign(r * r, cxd(0.0));
                kernels::cgemm(ks.data(), ac[p].data(), h[s][p].data(), r, l, r, false);
            }
        }

        // Candidate updated operators for each Pauli letter.
        std::vector<cxd> cand[4];
        double pi[4];
        for (std::size_t x = 0; x < r * r; ++x) {
            const cxd q00 = h[0][0][x], q01 = h[0][1][x];
            const cxd q10 = h[1][0][x], q11 = h[1][1][x];
            if (x == 0)
                for (auto& c : cand) c.resize(r * r);
            cand[0][x] = q00 + q11;
            cand[1][x] = q01 + q10;
            cand[2][x] = cxd(0.0, 1.0) * (q01 - q10);
            cand[3][x] = q00 - q11;
        }
        double total = 0.0;
        for (std::size_t c = 0; c < 4; ++c) {
            pi[c] = 0.5 * fnorm2(cand[c]);
            total += pi[c];
        }
        if (std::abs(total - 1.0) > 1e-8)
            throw contract_violation(
                "conditional Pauli distribution does not sum to 1 (canonical form "
                "broken): total = " + std::to_string(total));
        for (double& p : pi) p /= total;

        const double u = rng.uniform();
        std::size_t drawn = 3;
        double cum = 0.0;
        for (std::size_t c = 0; c < 4; ++c) {
            cum += pi[c];
            if (u < cum) {
                drawn = c;
                break;
            }
        }
        while (pi[drawn] <= 0.0 && drawn > 0) --drawn;  // guard against u ≈ 1

        letters[j] = kPauliLetters[drawn];
        log_prob += std::log(pi[drawn]);
        const double scale = 1.0 / std::sqrt(2.0 * pi[drawn]);
        env = std::move(cand[drawn]);
        for (cxd& x : env) x *= scale;
        env_dim = r;
    }

    PauliSample out;
    out.string = PauliString(letters);
    out.probability = std::exp(log_prob);
    out.weight = std::ldexp(std::exp(log_prob), static_cast<int>(L));
    return out;
}

SreEstimate sre_sampled(const MatrixProductState& m, double alpha,
                        std::size_t n_samples, std::uint64_t seed) {
    if (n_samples < 100) throw dimension_error("need at least 100 samples");
    if (!(alpha >= 1.0)) throw dimension_error("sampling estimator needs alpha >= 1");
    const MatrixProductState rc =
        m.canonical_center == 0 ? m : canonicalize(m, 0);
    const bool shannon = std::abs(alpha - 1.0) < 1e-12;

    // Per-draw payloads: −log(d·Ξ) at α=1, (d·Ξ)^{α−1} otherwise.
    std::vector<double> t(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        Rng rng(substream_seed(seed, i));
        const PauliSample s = pauli_sample(rc, rng);
        t[i] = shannon ? -std::log(s.weight) : std::pow(s.weight, alpha - 1.0);
    }

    const double n = static_cast<double>(n_samples);
    double sum = 0.0;
    for (double x : t) sum += x;
    auto assemble = [&](double mean) {
        return shannon ? mean : std::log(mean) / (1.0 - alpha);
    };

    SreEstimate out;
    out.method = SreMethod::sampling;
    out.n_samples = n_samples;
    out.value = assemble(sum / n);

    // Jackknife over draws.
    double jsum = 0.0;
    std::vector<double> loo(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        loo[i] = assemble((sum - t[i]) / (n - 1.0));
        jsum += loo[i];
    }
    const double jmean = jsum / n;
    double var = 0.0;
    for (double x : loo) var += (x - jmean) * (x - jmean);
    out.std_error = std::sqrt(var * (n - 1.0) / n);
    return out;
}

MatrixProductState build_pauli_mps(const MatrixProductState& m) {
    const std::size_t L = m.length();
    const std::size_t chi = m.max_bond_dim();
    if (chi > 22)
        throw resource_error("exact Pauli-basis construction needs chi <= 22; "
                             "use the compressed builder");
    MatrixProductState out;
    out.site_tensors.reserve(L);
    for (std::size_t j = 0; j < L; ++j) {
        const DenseTensor& a = m.site_tensors[j];
        if (a.shape()[1] != 2)
            throw dimension_error("Pauli-basis construction requires physical extent 2");
        const std::size_t l = a.shape()[0], r = a.shape()[2];
        DenseTensor b({l * l, 4, r * r});
        for (std::size_t code = 0; code < 4; ++code) {
            const PauliEntries pm = pauli_entries(code);
            for (std::size_t s = 0; s < 2; ++s) {
                for (std::size_t p = 0; p < 2; ++p) {
                    // Row p, column s: the conjugated chain carries the bra.
                    const cxd coeff = pm.e[p * 2 + s] * kInvSqrt2;
                    if (coeff == cxd(0.0)) continue;
                    for (std::size_t li = 0; li < l; ++li)
                        for (std::size_t lj = 0; lj < l; ++lj)
                            for (std::size_t ri = 0; ri < r; ++ri)
                                for (std::size_t rj = 0; rj < r; ++rj)
                                    b(li * l + lj, code, ri * r + rj) +=
                                        coeff * a(li, s, ri) * std::conj(a(lj, p, rj));
                }
            }
        }
        out.site_tensors.push_back(std::move(b));
    }
    out.canonical_center = -1;
    return out;
}

PauliMpsResult build_pauli_mps_compressed(const MatrixProductState& m,
                                          std::size_t chi_max, double cutoff) {
    const MatrixProductState src =
        m.canonical_center == 0 ? m : canonicalize(m, 0);
    const std::size_t L = src.length();
    PauliMpsResult result;
    result.state.site_tensors.resize(L);
    double discarded = 0.0;

    // Zip-up without ever materializing the χ²-bond tensors: the carry keeps
    // separate bra/ket bond axes of the source state.
    DenseTensor carry({1, 1, 1});  // (new-bond, ket-bond, bra-bond)
    carry(0, 0, 0) = 1.0;
    for (std::size_t j = 0; j < L; ++j) {
        const DenseTensor& a = src.site_tensors[j];
        if (a.shape()[1] != 2)
            throw dimension_error("Pauli-basis construction requires physical extent 2");
        const std::size_t r = a.shape()[2];
        DenseTensor t1 = contract(carry, a, {{1, 0}});               // (c, lb, s, r)
        DenseTensor t2 = contract(t1, a.conjugated(), {{1, 0}});     // (c, s, r, p, rb)
        const std::size_t c = t2.shape()[0];
        DenseTensor merged({c, 4, r, r});
        for (std::size_t code = 0; code < 4; ++code) {
            const PauliEntries pm = pauli_entries(code);
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t p = 0; p < 2; ++p) {
                    const cxd coeff = pm.e[p * 2 + s] * kInvSqrt2;
                    if (coeff == cxd(0.0)) continue;
                    for (std::size_t ci = 0; ci < c; ++ci)
                        for (std::size_t ri = 0; ri < r; ++ri) {
                            cxd* dst = merged.data() + ((ci * 4 + code) * r + ri) * r;
                            const cxd* srcp =
                                t2.data() + (((ci * 2 + s) * r + ri) * 2 + p) * r;
                            kernels::caxpy(coeff, srcp, dst, r);
                        }
                }
        }
        if (j + 1 == L) {
            result.state.site_tensors[j] = std::move(merged).reshaped({c, 4, r * r});
        } else {
            SvdResult svd = svd_truncated(std::move(merged).reshaped({c * 4, r * r}),
                                          chi_max, cutoff);
            const std::size_t k = svd.s.size();
            discarded += svd.discarded_weight;
            result.state.site_tensors[j] = std::move(svd.u).reshaped({c, 4, k});
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t x = 0; x < r * r; ++x)
                    svd.vh.data()[i * r * r + x] *= svd.s[i];
            carry = std::move(svd.vh).reshaped({k, r, r});
        }
    }
    // Back sweep, as in MPO application: restore right-isometric form.
    for (std::size_t j = L - 1; j > 0; --j) {
        auto& t = result.state.site_tensors[j];
        const std::size_t l = t.shape()[0], d = t.shape()[1], r = t.shape()[2];
        SvdResult svd = svd_truncated(std::move(t).reshaped({l, d * r}), chi_max, cutoff);
        const std::size_t k = svd.s.size();
        discarded += svd.discarded_weight;
        result.state.site_tensors[j] = std::move(svd.vh).reshaped({k, d, r});
        for (std::size_t i = 0; i < svd.u.shape()[0]; ++i)
            for (std::size_t x = 0; x < k; ++x) svd.u.data()[i * k + x] *= svd.s[x];
        result.state.site_tensors[j - 1] =
            contract(result.state.site_tensors[j - 1], svd.u, {{2, 0}});
    }
    result.state.canonical_center = 0;
    result.discarded_weight = discarded;
    return result;
}

SreEstimate sre_replica(const MatrixProductState& m, unsigned n, std::size_t chi_max,
                        double cutoff, double discarded_budget) {
    if (n < 2) throw dimension_error("replica order must be at least 2");
    const std::size_t L = m.length();
    PauliMpsResult p = build_pauli_mps_compressed(m, chi_max, cutoff);
    double discarded = p.discarded_weight;

    // Diagonal MPO in the Pauli basis whose diagonal is |P(ψ)⟩ itself.
    MatrixProductOperator w;
    w.site_tensors.reserve(L);
    for (const DenseTensor& b : p.state.site_tensors) {
        const std::size_t l = b.shape()[0], r = b.shape()[2];
        DenseTensor wt({l, 4, 4, r});
        for (std::size_t li = 0; li < l; ++li)
            for (std::size_t a = 0; a < 4; ++a)
                for (std::size_t ri = 0; ri < r; ++ri)
                    wt(li, a, a, ri) = b(li, a, ri);
        w.site_tensors.push_back(std::move(wt));
    }

    MatrixProductState cur = p.state;
    std::size_t chi_used = cur.max_bond_dim();
    for (unsigned k = 1; k < n; ++k) {
        ApplyMpoResult applied = apply_mpo(w, cur, chi_max, cutoff);
        cur = std::move(applied.state);
        discarded += applied.discarded_weight;
        chi_used = std::max(chi_used, cur.max_bond_dim());
    }

    const double norm2 = overlap(cur, cur).real();
    if (!(norm2 > 0.0))
        throw numeric_error("replica overlap collapsed to zero; state too compressed");
    SreEstimate out;
    out.method = SreMethod::replica;
    out.value = std::log(norm2) / (1.0 - static_cast<double>(n)) -
                static_cast<double>(L) * std::log(2.0);
    out.chi_used = chi_used;
    out.discarded_weight = discarded;
    out.truncation_warning = discarded > discarded_budget;
    return out;
}

double m2_closed_form_cluster_ising(double g) {
    const double g2 = g * g;
    const double num = 1.0 + 14.0 * g2 + g2 * g2;
    const double den = std::pow(1.0 + std::abs(g), 4.0);
    return -std::log(num / den);
}

double m_alpha_closed_form_cgs(double gamma, double alpha) {
    if (!(gamma >= 0.0 && gamma <= 1.0))
        throw dimension_error("gamma must lie in [0, 1]");
    if (std::abs(alpha - 1.0) < 1e-12)
        throw dimension_error("closed form is defined for alpha != 1");
    const double c = std::sqrt(std::max(0.0, (1.0 - gamma) / (1.0 + gamma)));
    const double theta = std::acos(std::min(1.0, c));
    const double s2 = std::sin(theta) * std::sin(theta);
    const double c2 = std::cos(theta) * std::cos(theta);
    const double bracket =
        (1.0 + std::pow(s2, alpha) + std::pow(c2, alpha)) / std::pow(2.0, alpha);
    return std::log(bracket) / (1.0 - alpha) - std::log(2.0);
}

}  // namespace spinchain
