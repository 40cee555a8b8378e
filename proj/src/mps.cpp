#include "spinchain/mps.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "spinchain/kernels.hpp"
#include "spinchain/rng.hpp"

namespace spinchain {

namespace {

constexpr std::size_t kMaxStatevectorDim = 16384;  // 2^14

// Scale row i of a (k × n) matrix tensor by s[i].
void scale_rows(DenseTensor& m, const std::vector<double>& s) {
    const std::size_t k = m.shape()[0], n = m.shape()[1];
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < n; ++j) m.data()[i * n + j] *= s[i];
}

void scale_cols(DenseTensor& m, const std::vector<double>& s) {
    const std::size_t r = m.shape()[0], k = m.shape()[1];
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < k; ++j) m.data()[i * k + j] *= s[j];
}

// Environment conventions: a left environment at bond b has axes
// (bra-bond, mpo-bond, ket-bond) over the bond left of site b; a right
// environment at bond b covers sites b..L−1 with the same axis order.
DenseTensor left_env_update(const DenseTensor& env, const DenseTensor& a,
                            const DenseTensor& w) {
    DenseTensor t1 = contract(env, a, {{2, 0}});                    // (l', w, s, r)
    DenseTensor t2 = contract(t1, w, {{1, 0}, {2, 2}});             // (l', r, s', w')
    DenseTensor t3 = contract(a.conjugated(), t2, {{0, 0}, {1, 2}});// (r', r, w')
    return t3.permuted({0, 2, 1});                                  // (r', w', r)
}

DenseTensor right_env_update(const DenseTensor& env, const DenseTensor& a,
                             const DenseTensor& w) {
    DenseTensor t1 = contract(a, env, {{2, 2}});                    // (l, s, r', wr)
    DenseTensor t2 = contract(t1, w, {{1, 2}, {3, 3}});             // (l, r', wl, s')
    DenseTensor t3 = contract(a.conjugated(), t2, {{1, 3}, {2, 1}});// (l', l, wl)
    return t3.permuted({0, 2, 1});                                  // (l', wl, l)
}

DenseTensor two_site_heff_apply(const DenseTensor& lenv, const DenseTensor& w1,
                                const DenseTensor& w2, const DenseTensor& renv,
                                const DenseTensor& theta) {
    DenseTensor t1 = contract(lenv, theta, {{2, 0}});         // (a', w, s1, s2, b)
    DenseTensor t2 = contract(t1, w1, {{1, 0}, {2, 2}});      // (a', s2, b, s1', wm)
    DenseTensor t3 = contract(t2, w2, {{1, 2}, {4, 0}});      // (a', b, s1', s2', wr)
    DenseTensor t4 = contract(t3, renv, {{1, 2}, {4, 1}});    // (a', s1', s2', b')
    return t4;
}

cxd cdotc(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    cxd acc(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double vnorm(const std::vector<cxd>& a) {
    return std::sqrt(kernels::sum_abs2(a.data(), a.size()));
}

struct LanczosOutcome {
    double e0 = 0.0;
    double e1 = std::numeric_limits<double>::quiet_NaN();  // NaN if unresolved
    std::vector<cxd> vec;
    std::size_t iterations = 0;
};

// Lanczos with full reorthogonalization for the lowest eigenpair of a
// Hermitian operator given as a matvec closure.
template <typename MatVec>
LanczosOutcome lanczos_ground(const MatVec& matvec, std::vector<cxd> v0,
                              std::size_t max_iter, Rng& rng) {
    const std::size_t dim = v0.size();
    double n0 = vnorm(v0);
    if (!(n0 > 1e-14)) {
        for (auto& x : v0) x = cxd(rng.normal(), rng.normal());
        n0 = vnorm(v0);
    }
    for (auto& x : v0) x /= n0;

    std::vector<std::vector<cxd>> basis;
    std::vector<double> alpha, beta;
    basis.push_back(std::move(v0));

    double prev_e0 = std::numeric_limits<double>::infinity();
    LanczosOutcome out;
    max_iter = std::max<std::size_t>(2, std::min(max_iter, dim));

    for (std::size_t k = 0; k < max_iter; ++k) {
        std::vector<cxd> w = matvec(basis[k]);
        const double a_k = cdotc(basis[k], w).real();
        alpha.push_back(a_k);
        // w -= a_k v_k + b_{k-1} v_{k-1}, then full reorthogonalization.
        kernels::caxpy(cxd(-a_k), basis[k].data(), w.data(), dim);
        if (k > 0) kernels::caxpy(cxd(-beta[k - 1]), basis[k - 1].data(), w.data(), dim);
        for (const auto& v : basis) {
            const cxd ov = cdotc(v, w);
            if (std::abs(ov) > 0.0) kernels::caxpy(-ov, v.data(), w.data(), dim);
        }

        // Solve the current (k+1)-dim tridiagonal problem.
        const std::size_t m = alpha.size();
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const double e0 = es.eigenvalues()(0);
        out.e0 = e0;
        out.e1 = m > 1 ? es.eigenvalues()(1) : std::numeric_limits<double>::quiet_NaN();
        out.iterations = m;

        const double b_k = vnorm(w);
        const double scale = std::max(1.0, std::abs(e0));
        const bool value_settled = std::abs(prev_e0 - e0) < 1e-13 * scale;
        const bool space_exhausted = b_k < 1e-13 * scale || m == dim;
        prev_e0 = e0;
        if (value_settled || space_exhausted || k + 1 == max_iter) {
            out.vec.assign(dim, cxd(0.0));
            for (std::size_t i = 0; i < m; ++i)
                kernels::caxpy(cxd(es.eigenvectors()(i, 0)), basis[i].data(), out.vec.data(),
                               dim);
            const double n = vnorm(out.vec);
            for (auto& x : out.vec) x /= n;
            return out;
        }
        for (auto& x : w) x /= b_k;
        beta.push_back(b_k);
        basis.push_back(std::move(w));
    }
    return out;  // unreachable
}

}  // namespace

std::size_t MatrixProductState::bond_dim(std::size_t bond) const {
    if (bond > length()) throw dimension_error("bond index out of range");
    if (bond == length()) return site_tensors.back().shape()[2];
    return site_tensors[bond].shape()[0];
}

std::size_t MatrixProductState::max_bond_dim() const {
    std::size_t m = 1;
    for (const auto& t : site_tensors) m = std::max(m, t.shape()[2]);
    return m;
}

MatrixProductState canonicalize(const MatrixProductState& m, std::size_t center) {
    const std::size_t L = m.length();
    if (center >= L) throw dimension_error("canonical center out of range");
    MatrixProductState out = m;
    for (std::size_t j = 0; j < center; ++j) {
        const auto& sh = out.site_tensors[j].shape();
        const std::size_t l = sh[0], d = sh[1], r = sh[2];
        SvdResult svd = svd_truncated(out.site_tensors[j].reshaped({l * d, r}),
                                      std::min(l * d, r), 0.0);
        const std::size_t k = svd.s.size();
        out.site_tensors[j] = std::move(svd.u).reshaped({l, d, k});
        scale_rows(svd.vh, svd.s);
        out.site_tensors[j + 1] = contract(svd.vh, out.site_tensors[j + 1], {{1, 0}});
    }
    for (std::size_t j = L - 1; j > center; --j) {
        const auto& sh = out.site_tensors[j].shape();
        const std::size_t l = sh[0], d = sh[1], r = sh[2];
        SvdResult svd = svd_truncated(out.site_tensors[j].reshaped({l, d * r}),
                                      std::min(l, d * r), 0.0);
        const std::size_t k = svd.s.size();
        out.site_tensors[j] = std::move(svd.vh).reshaped({k, d, r});
        scale_cols(svd.u, svd.s);
        out.site_tensors[j - 1] = contract(out.site_tensors[j - 1], svd.u, {{2, 0}});
    }
    const double nrm = out.site_tensors[center].norm();
    if (!(nrm > 1e-300)) throw numeric_error("cannot canonicalize a zero-norm state");
    out.site_tensors[center].scale(1.0 / nrm);
    out.canonical_center = static_cast<std::ptrdiff_t>(center);
    return out;
}

cxd overlap(const MatrixProductState& a, const MatrixProductState& b) {
    const std::size_t L = a.length();
    if (b.length() != L) throw dimension_error("overlap: lengths differ");
    DenseTensor env({1, 1});
    env(0, 0) = 1.0;
    for (std::size_t j = 0; j < L; ++j) {
        if (a.phys_dim(j) != b.phys_dim(j))
            throw dimension_error("overlap: physical extents differ");
        DenseTensor t1 = contract(env, b.site_tensors[j], {{1, 0}});  // (la', s, rb)
        env = contract(a.site_tensors[j].conjugated(), t1, {{0, 0}, {1, 1}});  // (ra', rb)
    }
    return env(0, 0);
}

double mps_norm(const MatrixProductState& m) {
    const double n2 = overlap(m, m).real();
    return n2 > 0.0 ? std::sqrt(n2) : 0.0;
}

StateVector to_statevector(const MatrixProductState& m) {
    const std::size_t L = m.length();
    std::size_t total = 1;
    std::size_t n_qubits = 0;
    for (std::size_t j = 0; j < L; ++j) {
        const std::size_t d = m.phys_dim(j);
        if (d == 0 || (d & (d - 1)) != 0)
            throw dimension_error("statevector conversion needs power-of-two extents");
        if (total > kMaxStatevectorDim / d)
            throw resource_error("state too large for dense conversion");
        total *= d;
        for (std::size_t q = d; q > 1; q /= 2) ++n_qubits;
    }
    DenseTensor acc({1, 1});
    acc(0, 0) = 1.0;
    std::size_t rows = 1;
    for (std::size_t j = 0; j < L; ++j) {
        acc = contract(acc, m.site_tensors[j], {{1, 0}});  // (rows, d, chi')
        rows *= m.phys_dim(j);
        acc = std::move(acc).reshaped({rows, acc.shape()[2]});
    }
    StateVector out(n_qubits);
    for (std::size_t i = 0; i < total; ++i) out.amplitudes[i] = acc.data()[i];
    return out;
}

MatrixProductState random_mps(std::size_t L, std::size_t phys, std::size_t chi,
                              std::uint64_t seed) {
    if (L == 0 || phys == 0 || chi == 0) throw dimension_error("random_mps: empty shape");
    Rng rng(seed);
    // Bond extents capped by the exact Schmidt rank growth from both ends.
    std::vector<std::size_t> bonds(L + 1, 1);
    for (std::size_t b = 1; b < L; ++b) {
        std::size_t cap = 1;
        const std::size_t steps = std::min(b, L - b);
        for (std::size_t k = 0; k < steps && cap < chi; ++k) cap *= phys;
        bonds[b] = std::min(chi, cap);
    }
    MatrixProductState m;
    for (std::size_t j = 0; j < L; ++j) {
        DenseTensor t({bonds[j], phys, bonds[j + 1]});
        for (std::size_t i = 0; i < t.size(); ++i)
            t.data()[i] = cxd(rng.normal(), rng.normal());
        m.site_tensors.push_back(std::move(t));
    }
    return canonicalize(m, 0);
}

MatrixProductState product_mps(const std::vector<std::vector<cxd>>& site_vectors) {
    if (site_vectors.empty()) throw dimension_error("product_mps: no sites");
    MatrixProductState m;
    for (const auto& v : site_vectors) {
        if (v.empty()) throw dimension_error("product_mps: empty site vector");
        DenseTensor t({1, v.size(), 1});
        double n2 = 0.0;
        for (const cxd& x : v) n2 += std::norm(x);
        if (!(n2 > 0.0)) throw numeric_error("product_mps: zero site vector");
        const double n = std::sqrt(n2);
        for (std::size_t s = 0; s < v.size(); ++s) t(0, s, 0) = v[s] / n;
        m.site_tensors.push_back(std::move(t));
    }
    m.canonical_center = 0;
    return m;
}

SchmidtSpectrum schmidt_spectrum(const MatrixProductState& m, std::size_t cut) {
    const std::size_t L = m.length();
    if (cut == 0 || cut >= L)
        throw dimension_error("cut must be an internal bond (1..L-1)");
    MatrixProductState c = canonicalize(m, cut);
    const auto& sh = c.site_tensors[cut].shape();
    SvdResult svd = svd_truncated(c.site_tensors[cut].reshaped({sh[0], sh[1] * sh[2]}),
                                  std::min(sh[0], sh[1] * sh[2]), 0.0);
    SchmidtSpectrum out;
    double total = 0.0;
    for (double s : svd.s) total += s * s;
    out.probabilities.reserve(svd.s.size());
    for (double s : svd.s) out.probabilities.push_back(s * s / total);
    return out;
}

ApplyMpoResult apply_mpo(const MatrixProductOperator& op, const MatrixProductState& m,
                         std::size_t chi_max, double cutoff) {
    const std::size_t L = m.length();
    if (op.length() != L) throw dimension_error("apply_mpo: lengths differ");
    ApplyMpoResult result;
    result.state.site_tensors.resize(L);
    double discarded = 0.0;

    // Zip-up pass: carry (new-bond × mpo-bond × old-bond), truncating as we go.
    DenseTensor carry({1, 1, 1});
    carry(0, 0, 0) = 1.0;
    for (std::size_t j = 0; j < L; ++j) {
        const DenseTensor& w = op.site_tensors[j];
        if (w.shape()[2] != m.phys_dim(j))
            throw dimension_error("apply_mpo: physical extents differ");
        // Working buffers scale as carry·(mpo bond)·(state bond)·d; refuse
        // sizes that cannot fit rather than letting the allocator take the
        // process down (reachable through Pauli-basis replica runs on states
        // with large bonds).
        constexpr std::size_t kZipBudget = 100000000;  // complex entries
        const std::size_t c0 = carry.shape()[0], r0 = m.site_tensors[j].shape()[2];
        const std::size_t t1_elems = c0 * w.shape()[0] * m.phys_dim(j) * r0;
        const std::size_t t2_elems = c0 * r0 * w.shape()[1] * w.shape()[3];
        if (t1_elems > kZipBudget || t2_elems > kZipBudget)
            throw resource_error(
                "operator application needs a contraction buffer beyond the memory "
                "budget; reduce the operator or state bond dimension");
        DenseTensor t1 = contract(carry, m.site_tensors[j], {{2, 0}});  // (c, w, s, r)
        DenseTensor t2 = contract(t1, w, {{1, 0}, {2, 2}});             // (c, r, s', wr)
        t2 = t2.permuted({0, 2, 3, 1});                                 // (c, s', wr, r)
        const std::size_t c = t2.shape()[0], dout = t2.shape()[1];
        const std::size_t wr = t2.shape()[2], r = t2.shape()[3];
        if (j + 1 == L) {
            result.state.site_tensors[j] = std::move(t2).reshaped({c, dout, wr * r});
        } else {
            SvdResult svd =
                svd_truncated(std::move(t2).reshaped({c * dout, wr * r}), chi_max, cutoff);
            const std::size_t k = svd.s.size();
            discarded += svd.discarded_weight;
            result.state.site_tensors[j] = std::move(svd.u).reshaped({c, dout, k});
            scale_rows(svd.vh, svd.s);
            carry = std::move(svd.vh).reshaped({k, wr, r});
        }
    }
    // Back sweep right-to-left: restores right-isometric form after the
    // zip-up truncations; the overall scale stays on site 0 (no
    // normalization — the operator need not preserve norm).
    for (std::size_t j = L - 1; j > 0; --j) {
        auto& t = result.state.site_tensors[j];
        const std::size_t l = t.shape()[0], d = t.shape()[1], r = t.shape()[2];
        SvdResult svd = svd_truncated(std::move(t).reshaped({l, d * r}), chi_max, cutoff);
        const std::size_t k = svd.s.size();
        discarded += svd.discarded_weight;
        result.state.site_tensors[j] = std::move(svd.vh).reshaped({k, d, r});
        scale_cols(svd.u, svd.s);
        result.state.site_tensors[j - 1] =
            contract(result.state.site_tensors[j - 1], svd.u, {{2, 0}});
    }
    result.state.canonical_center = 0;
    result.discarded_weight = discarded;
    return result;
}

MatrixProductState compress_state(const MatrixProductState& m, std::size_t chi_max,
                                  double cutoff, double* discarded) {
    const std::size_t L = m.length();
    const double norm_in = mps_norm(m);
    // Left-orthogonalize exactly, then truncate on a right-moving-left sweep.
    MatrixProductState out = canonicalize(m, L - 1);
    double lost = 0.0;
    for (std::size_t j = L - 1; j > 0; --j) {
        auto& t = out.site_tensors[j];
        const std::size_t l = t.shape()[0], d = t.shape()[1], r = t.shape()[2];
        SvdResult svd = svd_truncated(std::move(t).reshaped({l, d * r}), chi_max, cutoff);
        const std::size_t k = svd.s.size();
        lost += svd.discarded_weight;
        out.site_tensors[j] = std::move(svd.vh).reshaped({k, d, r});
        scale_cols(svd.u, svd.s);
        out.site_tensors[j - 1] = contract(out.site_tensors[j - 1], svd.u, {{2, 0}});
    }
    const double norm_now = out.site_tensors[0].norm();
    if (norm_now > 1e-300) out.site_tensors[0].scale(norm_in / norm_now);
    out.canonical_center = 0;
    if (discarded) *discarded = lost;
    return out;
}

double expectation(const MatrixProductState& m, const MatrixProductOperator& op) {
    const std::size_t L = m.length();
    if (op.length() != L) throw dimension_error("expectation: lengths differ");
    DenseTensor env({1, 1, 1});
    env(0, 0, 0) = 1.0;
    for (std::size_t j = 0; j < L; ++j)
        env = left_env_update(env, m.site_tensors[j], op.site_tensors[j]);
    const cxd v = env(0, 0, 0);
    if (std::abs(v.imag()) > 1e-8)
        throw contract_violation("expectation value has a non-negligible imaginary part");
    return v.real();
}

void save_mps(const MatrixProductState& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    const char magic[8] = {'S', 'P', 'N', 'M', 'P', 'S', '1', '\0'};
    f.write(magic, 8);
    auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(m.length());
    const std::int64_t cc = m.canonical_center;
    f.write(reinterpret_cast<const char*>(&cc), 8);
    for (const auto& t : m.site_tensors) {
        put_u64(t.shape()[0]);
        put_u64(t.shape()[1]);
        put_u64(t.shape()[2]);
    }
    for (const auto& t : m.site_tensors)
        f.write(reinterpret_cast<const char*>(t.data()),
                static_cast<std::streamsize>(t.size() * sizeof(cxd)));
    if (!f) throw io_error("write failed for '" + path + "'");
}

MatrixProductState load_mps(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open '" + path + "'");
    char magic[8];
    f.read(magic, 8);
    if (!f || std::memcmp(magic, "SPNMPS1", 7) != 0)
        throw io_error("'" + path + "' is not a state cache file");
    auto get_u64 = [&]() {
        std::uint64_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    const std::uint64_t L = get_u64();
    std::int64_t cc = 0;
    f.read(reinterpret_cast<char*>(&cc), 8);
    if (!f || L == 0 || L > 1'000'000) throw io_error("corrupt state cache header");
    std::vector<Shape> shapes(L);
    for (auto& sh : shapes) {
        const std::uint64_t l = get_u64(), d = get_u64(), r = get_u64();
        sh = {static_cast<std::size_t>(l), static_cast<std::size_t>(d),
              static_cast<std::size_t>(r)};
    }
    if (!f) throw io_error("corrupt state cache header");
    MatrixProductState m;
    std::size_t prev_r = 1;
    for (std::size_t j = 0; j < L; ++j) {
        if (shapes[j][0] != prev_r) throw io_error("corrupt state cache: bond mismatch");
        prev_r = shapes[j][2];
        DenseTensor t(shapes[j]);
        f.read(reinterpret_cast<char*>(t.data()),
               static_cast<std::streamsize>(t.size() * sizeof(cxd)));
        m.site_tensors.push_back(std::move(t));
    }
    if (!f || prev_r != 1) throw io_error("corrupt state cache payload");
    m.canonical_center = cc;
    return m;
}

DmrgResult dmrg_ground_state(const MatrixProductOperator& h, std::size_t chi_max,
                             double energy_tol, std::size_t max_sweeps,
                             std::uint64_t seed) {
    DmrgOptions opts;
    opts.chi_max = chi_max;
    opts.energy_tol = energy_tol;
    opts.max_sweeps = max_sweeps;
    opts.seed = seed;
    return dmrg_ground_state(h, opts);
}

namespace {

// Overlap environments between a constraint state |o⟩ (conjugated) and the
// working state |ψ⟩, used by the orthogonality penalty. Left covers sites
// 0..b−1 as (o-bond × ψ-bond); right covers sites b..L−1 likewise.
DenseTensor ortho_env_left(const DenseTensor& env, const DenseTensor& o_site,
                           const DenseTensor& psi_site) {
    DenseTensor t = contract(env, o_site.conjugated(), {{0, 0}});  // (p, s, q')
    return contract(t, psi_site, {{0, 0}, {1, 1}});                // (q', p')
}

DenseTensor ortho_env_right(const DenseTensor& env, const DenseTensor& o_site,
                            const DenseTensor& psi_site) {
    DenseTensor t = contract(o_site.conjugated(), env, {{2, 0}});  // (q, s, p')
    return contract(t, psi_site, {{1, 1}, {2, 2}});                // (q, p)
}

}  // namespace

DmrgResult dmrg_ground_state(const MatrixProductOperator& h, const DmrgOptions& opts) {
    const std::size_t L = h.length();
    if (L < 2) throw dimension_error("ground-state search needs L >= 2");
    if (opts.chi_max < 2) throw dimension_error("chi_max must be at least 2");
    const std::size_t d = h.site_tensors[0].shape()[1];

    MatrixProductState psi;
    if (opts.warm_start) {
        psi = canonicalize(*opts.warm_start, 0);
    } else {
        psi = random_mps(L, d, std::min(opts.chi_start, opts.chi_max), opts.seed);
    }
    Rng rng(opts.seed ^ 0x5ca1ab1e);

    const std::size_t n_ortho = opts.orthogonal_to.size();
    for (const MatrixProductState& o : opts.orthogonal_to)
        if (o.length() != L || o.site_tensors[0].shape()[1] != d)
            throw dimension_error("orthogonality-target state does not match the chain");

    // Environments per bond: renv[b] covers sites b..L−1, lenv[b] sites 0..b−1.
    std::vector<DenseTensor> lenv(L + 1), renv(L + 1);
    lenv[0] = DenseTensor({1, 1, 1});
    lenv[0](0, 0, 0) = 1.0;
    renv[L] = DenseTensor({1, 1, 1});
    renv[L](0, 0, 0) = 1.0;
    for (std::size_t b = L; b-- > 1;)
        renv[b] = right_env_update(renv[b + 1], psi.site_tensors[b], h.site_tensors[b]);

    // Overlap environments per constraint state, same bond indexing.
    std::vector<std::vector<DenseTensor>> olenv(n_ortho), orenv(n_ortho);
    DenseTensor unit({1, 1});
    unit(0, 0) = 1.0;
    for (std::size_t k = 0; k < n_ortho; ++k) {
        olenv[k].assign(L + 1, DenseTensor({1, 1}));
        orenv[k].assign(L + 1, DenseTensor({1, 1}));
        olenv[k][0] = unit;
        orenv[k][L] = unit;
        for (std::size_t b = L; b-- > 1;)
            orenv[k][b] = ortho_env_right(orenv[k][b + 1],
                                          opts.orthogonal_to[k].site_tensors[b],
                                          psi.site_tensors[b]);
    }

    // Warm starts continue at full bond dimension; cold starts follow the
    // doubling schedule.
    std::size_t chi_now = opts.warm_start ? opts.chi_max
                                          : std::min(opts.chi_start, opts.chi_max);
    const std::size_t central_bond = (L - 2) / 2;

    DmrgResult result;
    result.gap_estimate = std::numeric_limits<double>::quiet_NaN();
    double prev_energy = std::numeric_limits<double>::infinity();
    double energy = 0.0;

    auto optimize_bond = [&](std::size_t i, bool moving_right) {
        DenseTensor theta =
            contract(psi.site_tensors[i], psi.site_tensors[i + 1], {{2, 0}});
        const Shape th_shape = theta.shape();  // (a, d, d, b)
        const DenseTensor& w1 = h.site_tensors[i];
        const DenseTensor& w2 = h.site_tensors[i + 1];
        const DenseTensor& le = lenv[i];
        const DenseTensor& re = renv[i + 2];

        // Constraint vectors u_k in the two-site basis: ⟨u_k, θ⟩ = ⟨o_k|ψ(θ)⟩,
        // so the penalty term w·u_k⟨u_k,·⟩ realizes w·|⟨o_k|ψ⟩|².
        std::vector<std::vector<cxd>> ortho_vecs;
        ortho_vecs.reserve(n_ortho);
        for (std::size_t k = 0; k < n_ortho; ++k) {
            const DenseTensor& o1 = opts.orthogonal_to[k].site_tensors[i];
            const DenseTensor& o2 = opts.orthogonal_to[k].site_tensors[i + 1];
            DenseTensor t = contract(olenv[k][i], o1.conjugated(), {{0, 0}});  // (a,s,q)
            t = contract(t, o2.conjugated(), {{2, 0}});                        // (a,s,s',q')
            t = contract(t, orenv[k][i + 2], {{3, 0}});                        // (a,s,s',b)
            DenseTensor u = t.conjugated();
            ortho_vecs.push_back(std::move(u).values());
        }
        auto matvec = [&](const std::vector<cxd>& v) {
            DenseTensor t(th_shape, v);
            DenseTensor out = two_site_heff_apply(le, w1, w2, re, t);
            std::vector<cxd>& ov = out.values();
            for (const std::vector<cxd>& u : ortho_vecs) {
                cxd c = 0.0;
                for (std::size_t j = 0; j < u.size(); ++j) c += std::conj(u[j]) * v[j];
                c *= opts.ortho_weight;
                for (std::size_t j = 0; j < u.size(); ++j) ov[j] += c * u[j];
            }
            return out.values();
        };
        LanczosOutcome lz = lanczos_ground(matvec, theta.values(), opts.lanczos_max_iter, rng);
        if (i == central_bond && std::isfinite(lz.e1))
            result.gap_estimate = lz.e1 - lz.e0;

        DenseTensor opt(th_shape, std::move(lz.vec));
        SvdResult svd = svd_truncated(
            std::move(opt).reshaped({th_shape[0] * d, d * th_shape[3]}), chi_now,
            opts.svd_cutoff);
        const std::size_t k = svd.s.size();
        double kept = 0.0;
        for (double s : svd.s) kept += s * s;
        const double rescale = 1.0 / std::sqrt(kept);
        for (double& s : svd.s) s *= rescale;

        if (moving_right) {
            psi.site_tensors[i] = std::move(svd.u).reshaped({th_shape[0], d, k});
            scale_rows(svd.vh, svd.s);
            psi.site_tensors[i + 1] = std::move(svd.vh).reshaped({k, d, th_shape[3]});
            lenv[i + 1] = left_env_update(lenv[i], psi.site_tensors[i], w1);
            for (std::size_t kk = 0; kk < n_ortho; ++kk)
                olenv[kk][i + 1] =
                    ortho_env_left(olenv[kk][i], opts.orthogonal_to[kk].site_tensors[i],
                                   psi.site_tensors[i]);
            psi.canonical_center = static_cast<std::ptrdiff_t>(i + 1);
        } else {
            psi.site_tensors[i + 1] = std::move(svd.vh).reshaped({k, d, th_shape[3]});
            scale_cols(svd.u, svd.s);
            psi.site_tensors[i] = std::move(svd.u).reshaped({th_shape[0], d, k});
            renv[i + 1] = right_env_update(renv[i + 2], psi.site_tensors[i + 1], w2);
            for (std::size_t kk = 0; kk < n_ortho; ++kk)
                orenv[kk][i + 1] = ortho_env_right(orenv[kk][i + 2],
                                                   opts.orthogonal_to[kk].site_tensors[i + 1],
                                                   psi.site_tensors[i + 1]);
            psi.canonical_center = static_cast<std::ptrdiff_t>(i);
        }
        return lz.e0;
    };

    for (std::size_t sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
        for (std::size_t i = 0; i + 1 < L; ++i) energy = optimize_bond(i, true);
        for (std::size_t i = L - 1; i-- > 0;) energy = optimize_bond(i, false);
        result.sweeps_used = sweep;

        if (energy > prev_energy + std::max(1e-9, 1e-12 * std::abs(prev_energy)))
            throw numeric_error("variational energy increased between sweeps: " +
                                std::to_string(prev_energy) + " -> " +
                                std::to_string(energy));
        const bool schedule_done = chi_now >= opts.chi_max;
        if (sweep >= 2 && schedule_done &&
            std::abs(prev_energy - energy) < opts.energy_tol) {
            result.converged = true;
            break;
        }
        prev_energy = energy;
        chi_now = std::min(chi_now * 2, opts.chi_max);
    }

    // With penalties active the local eigenvalue includes the penalty shift;
    // report the bare ⟨ψ|H|ψ⟩ in that case.
    result.energy = n_ortho ? expectation(psi, h) : energy;
    result.state = std::move(psi);
    result.gap_flag = std::isfinite(result.gap_estimate) && result.gap_estimate < 1e-8;
    return result;
}

}  // namespace spinchain
