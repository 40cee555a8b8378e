#include "spinchain/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <tuple>

#include "spinchain/pauli.hpp"

namespace spinchain {

namespace {

const std::map<std::string, ModelFamily> kFamilyNames = {
    {"heisenberg_xxz", ModelFamily::heisenberg_xxz},
    {"xy", ModelFamily::xy},
    {"xy_dm", ModelFamily::xy_dm},
    {"cluster_ising", ModelFamily::cluster_ising},
    {"cluster_xy", ModelFamily::cluster_xy},
};

const std::vector<std::string>& family_params(ModelFamily family) {
    static const std::vector<std::string> xxz = {"J", "gamma", "delta", "h"};
    static const std::vector<std::string> xy = {"J", "gamma", "h"};
    static const std::vector<std::string> xy_dm = {"J", "gamma", "D", "h"};
    static const std::vector<std::string> cluster_ising = {"g_zz", "g_x", "g_zxz"};
    static const std::vector<std::string> cluster_xy = {"h", "lambda_x", "lambda_y"};
    switch (family) {
        case ModelFamily::heisenberg_xxz: return xxz;
        case ModelFamily::xy: return xy;
        case ModelFamily::xy_dm: return xy_dm;
        case ModelFamily::cluster_ising: return cluster_ising;
        case ModelFamily::cluster_xy: return cluster_xy;
    }
    throw spec_error("unknown model family", "model.family");
}

bool has_three_site_terms(ModelFamily family) {
    return family == ModelFamily::cluster_ising || family == ModelFamily::cluster_xy;
}

// Suffix of a term's factors at sites >= base, with site offsets made
// relative to base; identical suffixes share one MPO bond state.
std::string suffix_key(const std::vector<std::pair<std::size_t, char>>& factors,
                       std::size_t base) {
    std::string key;
    for (const auto& [site, op] : factors) {
        if (site < base) continue;
        key += std::to_string(site - base);
        key += op;
        key += ';';
    }
    return key;
}

}  // namespace

ModelFamily family_from_string(const std::string& name) {
    auto it = kFamilyNames.find(name);
    if (it == kFamilyNames.end())
        throw spec_error("unknown model family '" + name + "'", "model.family");
    return it->second;
}

std::string family_to_string(ModelFamily family) {
    for (const auto& [name, f] : kFamilyNames)
        if (f == family) return name;
    return "?";
}

double ModelSpec::param(const std::string& name) const {
    auto it = parameters.find(name);
    if (it == parameters.end())
        throw spec_error("missing model parameter '" + name + "'", "model." + name);
    return it->second;
}

double ModelSpec::param_or(const std::string& name, double fallback) const {
    auto it = parameters.find(name);
    return it == parameters.end() ? fallback : it->second;
}

void validate_model(const ModelSpec& spec) {
    const auto& allowed = family_params(spec.family);
    for (const auto& [name, value] : spec.parameters) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
            throw spec_error("parameter '" + name + "' does not belong to family " +
                                 family_to_string(spec.family),
                             "model." + name);
    }
    for (const auto& name : allowed)
        if (!spec.parameters.count(name))
            throw spec_error("family " + family_to_string(spec.family) +
                                 " requires parameter '" + name + "'",
                             "model." + name);
    const std::size_t min_L = has_three_site_terms(spec.family) ? 3 : 2;
    if (spec.L < min_L)
        throw spec_error("L=" + std::to_string(spec.L) + " too small for family " +
                             family_to_string(spec.family),
                         "model.L");
}

std::vector<PauliTerm> hamiltonian_terms(const ModelSpec& spec) {
    validate_model(spec);
    const std::size_t L = spec.L;
    std::vector<PauliTerm> terms;
    auto bond = [&](double c, char a, char b) {
        if (c == 0.0) return;
        for (std::size_t j = 0; j + 1 < L; ++j)
            terms.push_back({c, {{j, a}, {j + 1, b}}});
    };
    auto field = [&](double c, char a) {
        if (c == 0.0) return;
        for (std::size_t j = 0; j < L; ++j) terms.push_back({c, {{j, a}}});
    };
    auto window3 = [&](double c, char a, char b, char d) {
        if (c == 0.0) return;
        for (std::size_t j = 0; j + 2 < L; ++j)
            terms.push_back({c, {{j, a}, {j + 1, b}, {j + 2, d}}});
    };

    switch (spec.family) {
        case ModelFamily::heisenberg_xxz: {
            const double J = spec.param("J"), g = spec.param("gamma");
            const double d = spec.param("delta"), h = spec.param("h");
            bond(-J * (1.0 - g) / 4.0, 'X', 'X');
            bond(-J * (1.0 + g) / 4.0, 'Y', 'Y');
            bond(-J * d / 4.0, 'Z', 'Z');
            field(-h, 'Z');
            break;
        }
        case ModelFamily::xy: {
            const double J = spec.param("J"), g = spec.param("gamma"), h = spec.param("h");
            bond(J * (1.0 + g) / 4.0, 'X', 'X');
            bond(J * (1.0 - g) / 4.0, 'Y', 'Y');
            field(-h, 'Z');
            break;
        }
        case ModelFamily::xy_dm: {
            const double J = spec.param("J"), g = spec.param("gamma");
            const double D = spec.param("D"), h = spec.param("h");
            bond(J * (1.0 - g) / 2.0, 'X', 'X');
            bond(J * (1.0 + g) / 2.0, 'Y', 'Y');
            bond(J * D, 'X', 'Y');
            bond(-J * D, 'Y', 'X');
            field(-h, 'Z');
            break;
        }
        case ModelFamily::cluster_ising: {
            bond(-spec.param("g_zz"), 'Z', 'Z');
            field(-spec.param("g_x"), 'X');
            window3(spec.param("g_zxz"), 'Z', 'X', 'Z');
            break;
        }
        case ModelFamily::cluster_xy: {
            window3(-1.0, 'X', 'Z', 'X');
            field(-spec.param("h"), 'Z');
            bond(spec.param("lambda_y"), 'Y', 'Y');
            bond(spec.param("lambda_x"), 'X', 'X');
            break;
        }
    }
    return terms;
}

MatrixProductOperator build_mpo(const ModelSpec& spec) {
    const auto terms = hamiltonian_terms(spec);
    const std::size_t L = spec.L;

    // Bond states: S (no factor placed yet), one state per distinct pending
    // suffix, F (term finished). Suffixes are shared across terms, which is
    // what keeps the bond dimension minimal for the term structure.
    std::vector<std::map<std::string, std::size_t>> suffixes(L + 1);
    for (const auto& t : terms) {
        if (t.factors.size() < 2) continue;
        const std::size_t first = t.factors.front().first;
        const std::size_t last = t.factors.back().first;
        for (std::size_t b = first + 1; b <= last; ++b)
            suffixes[b].emplace(suffix_key(t.factors, b), 0);
    }
    std::vector<std::size_t> dim(L + 1);
    std::vector<std::ptrdiff_t> s_row(L + 1, -1), f_row(L + 1, -1);
    for (std::size_t b = 0; b <= L; ++b) {
        std::size_t next = 0;
        if (b < L) s_row[b] = static_cast<std::ptrdiff_t>(next++);
        for (auto& [key, idx] : suffixes[b]) {
            (void)key;
            idx = next++;
        }
        if (b >= 1) f_row[b] = static_cast<std::ptrdiff_t>(next++);
        dim[b] = next;
    }

    MatrixProductOperator mpo;
    for (std::size_t j = 0; j < L; ++j)
        mpo.site_tensors.emplace_back(Shape{dim[j], 2, 2, dim[j + 1]});

    auto add = [&](std::size_t j, std::size_t row, std::size_t col, char letter,
                   double coeff) {
        const DenseTensor op = pauli_matrix(letter);
        DenseTensor& w = mpo.site_tensors[j];
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b)
                w(row, a, b, col) += coeff * op(a, b);
    };

    for (std::size_t j = 0; j < L; ++j) {
        if (s_row[j] >= 0 && s_row[j + 1] >= 0)
            add(j, static_cast<std::size_t>(s_row[j]), static_cast<std::size_t>(s_row[j + 1]),
                'I', 1.0);
        if (f_row[j] >= 0 && f_row[j + 1] >= 0)
            add(j, static_cast<std::size_t>(f_row[j]), static_cast<std::size_t>(f_row[j + 1]),
                'I', 1.0);
    }

    // A suffix state fully determines the operator content to its right, so
    // transitions out of suffix states are written once; transitions out of S
    // accumulate (distinct terms legitimately add there).
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> placed;
    for (const auto& t : terms) {
        const auto& f = t.factors;
        const std::size_t j1 = f.front().first;
        if (f.size() == 1) {
            add(j1, static_cast<std::size_t>(s_row[j1]),
                static_cast<std::size_t>(f_row[j1 + 1]), f.front().second, t.coeff);
            continue;
        }
        const std::size_t jk = f.back().first;
        add(j1, static_cast<std::size_t>(s_row[j1]), suffixes[j1 + 1].at(suffix_key(f, j1 + 1)),
            f.front().second, t.coeff);
        for (std::size_t j = j1 + 1; j <= jk; ++j) {
            const std::size_t row = suffixes[j].at(suffix_key(f, j));
            const std::size_t col = (j == jk) ? static_cast<std::size_t>(f_row[j + 1])
                                              : suffixes[j + 1].at(suffix_key(f, j + 1));
            char letter = 'I';
            for (const auto& [site, op] : f)
                if (site == j) letter = op;
            if (placed.emplace(j, row, col).second) add(j, row, col, letter, 1.0);
        }
    }
    return mpo;
}

std::array<double, 3> solvable_trajectory(double g) {
    return {2.0 * (1.0 - g * g), (1.0 + g) * (1.0 + g), (g - 1.0) * (g - 1.0)};
}

ModelSpec cluster_trajectory_model(double g, std::size_t L) {
    const auto c = solvable_trajectory(g);
    ModelSpec spec;
    spec.family = ModelFamily::cluster_ising;
    spec.L = L;
    spec.parameters = {{"g_zz", c[0]}, {"g_x", c[1]}, {"g_zxz", c[2]}};
    return spec;
}

MatrixProductState cluster_ising_exact_mps(double g, std::size_t L) {
    if (L < 2) throw dimension_error("cluster MPS needs L >= 2");
    const double a = std::sqrt(std::abs(g));
    const double sgn = (g > 0.0) - (g < 0.0);
    const double pref = 1.0 / std::sqrt(1.0 + std::abs(g));
    // Bulk tensors, physical index s, matrices over (left, right):
    //   A(1) = pref · [[1, sgn·√|g|], [0, 0]]
    //   A(0) = pref · [[0, 0], [√|g|, 1]]
    auto bulk_entry = [&](std::size_t l, std::size_t s, std::size_t r) -> double {
        if (s == 1) {
            if (l == 0 && r == 0) return pref;
            if (l == 0 && r == 1) return pref * sgn * a;
            return 0.0;
        }
        if (l == 1 && r == 0) return pref * a;
        if (l == 1 && r == 1) return pref;
        return 0.0;
    };

    MatrixProductState m;
    m.site_tensors.reserve(L);
    // Boundary closure: row vector (1,1) folded into the first site, column
    // vector (1,0) into the last; this closure reproduces the additive
    // per-site SRE of the bulk without edge corrections.
    DenseTensor first({1, 2, 2});
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t r = 0; r < 2; ++r)
            first(0, s, r) = bulk_entry(0, s, r) + bulk_entry(1, s, r);
    m.site_tensors.push_back(std::move(first));
    for (std::size_t j = 1; j + 1 < L; ++j) {
        DenseTensor t({2, 2, 2});
        for (std::size_t l = 0; l < 2; ++l)
            for (std::size_t s = 0; s < 2; ++s)
                for (std::size_t r = 0; r < 2; ++r) t(l, s, r) = bulk_entry(l, s, r);
        m.site_tensors.push_back(std::move(t));
    }
    DenseTensor last({2, 2, 1});
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t s = 0; s < 2; ++s) last(l, s, 0) = bulk_entry(l, s, 0);
    m.site_tensors.push_back(std::move(last));

    const double nrm = mps_norm(m);
    if (!(nrm > 0.0)) throw numeric_error("cluster MPS closed to zero norm");
    m.site_tensors.front().scale(1.0 / nrm);
    return m;
}

MatrixProductState cgs_product_state(double gamma, std::size_t L, bool second_branch) {
    if (gamma < 0.0 || gamma > 1.0)
        throw spec_error("gamma must lie in [0,1]", "model.gamma");
    const double c = std::sqrt((1.0 - gamma) / (1.0 + gamma));
    const double theta = std::acos(std::min(1.0, std::max(0.0, c)));
    const double flip = second_branch ? -1.0 : 1.0;
    std::vector<std::vector<cxd>> sites(L);
    for (std::size_t i = 0; i < L; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        sites[i] = {cxd(std::cos(theta / 2.0)), cxd(flip * sign * std::sin(theta / 2.0))};
    }
    return product_mps(sites);
}

MatrixProductState theta_product_state(double theta, std::size_t L) {
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<std::vector<cxd>> sites(L);
    for (std::size_t i = 0; i < L; ++i)
        sites[i] = {cxd(r), std::exp(cxd(0.0, theta)) * r};
    return product_mps(sites);
}

MatrixProductState ghz_mps(std::size_t L) {
    if (L < 2) throw dimension_error("GHZ needs L >= 2");
    MatrixProductState m;
    DenseTensor first({1, 2, 2});
    first(0, 0, 0) = 1.0;
    first(0, 1, 1) = 1.0;
    m.site_tensors.push_back(std::move(first));
    for (std::size_t j = 1; j + 1 < L; ++j) {
        DenseTensor t({2, 2, 2});
        t(0, 0, 0) = 1.0;
        t(1, 1, 1) = 1.0;
        m.site_tensors.push_back(std::move(t));
    }
    DenseTensor last({2, 2, 1});
    const double r = 1.0 / std::sqrt(2.0);
    last(0, 0, 0) = r;
    last(1, 1, 0) = r;
    m.site_tensors.push_back(std::move(last));
    return m;
}

double separability_field(double gamma) {
    if (gamma < 0.0 || gamma > 1.0)
        throw spec_error("gamma must lie in [0,1]", "model.gamma");
    return std::sqrt(1.0 - gamma * gamma);
}

}  // namespace spinchain
