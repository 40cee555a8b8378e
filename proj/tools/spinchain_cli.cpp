// Command-line surface: ground states, measure panels, sweeps, SRE estimates,
// Clifford orbits, and scaling fits. Exit codes: 0 success, 2 malformed
// input/config (with the offending key), 3 numerical or I/O failure.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinchain/clifford.hpp"
#include "spinchain/entspec.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/exact.hpp"
#include "spinchain/magic.hpp"
#include "spinchain/models.hpp"
#include "spinchain/mps.hpp"
#include "spinchain/scan.hpp"

namespace {

using namespace spinchain;

std::ostream& out() {
    static bool prepared = [] {
        std::cout.imbue(std::locale::classic());
        std::cout << std::setprecision(12);
        return true;
    }();
    (void)prepared;
    return std::cout;
}

std::map<std::string, double> parse_assignments(const std::vector<std::string>& sets) {
    std::map<std::string, double> params;
    for (const auto& item : sets) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw spec_error("expected name=value", "--set " + item);
        const std::string name = item.substr(0, eq);
        try {
            std::size_t pos = 0;
            const double v = std::stod(item.substr(eq + 1), &pos);
            if (pos != item.size() - eq - 1) throw std::invalid_argument("trailing");
            params[name] = v;
        } catch (const std::exception&) {
            throw spec_error("expected name=value with a numeric value",
                             "--set " + item);
        }
    }
    return params;
}

std::size_t parse_cut(const std::string& cut, std::size_t L) {
    if (cut == "half") return L / 2;
    try {
        std::size_t pos = 0;
        const unsigned long v = std::stoul(cut, &pos);
        if (pos != cut.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw spec_error("cut must be 'half' or a bond index", "--cut");
    }
}

int run_gs(const std::string& family, std::size_t L,
           const std::vector<std::string>& sets, std::size_t chi, double tol,
           std::size_t sweeps, std::uint64_t seed, const std::string& output) {
    ModelSpec spec;
    spec.family = family_from_string(family);
    spec.L = L;
    spec.parameters = parse_assignments(sets);
    validate_model(spec);

    DmrgOptions opts;
    opts.chi_max = chi;
    opts.energy_tol = tol;
    opts.max_sweeps = sweeps;
    opts.seed = seed;
    const DmrgResult res = dmrg_ground_state(build_mpo(spec), opts);

    out() << "energy = " << res.energy << "\n"
          << "converged = " << (res.converged ? "true" : "false") << "\n"
          << "sweeps = " << res.sweeps_used << "\n"
          << "gap_estimate = " << res.gap_estimate << "\n"
          << "gap_flag = " << (res.gap_flag ? "true" : "false") << "\n"
          << "max_bond = " << res.state.max_bond_dim() << "\n";
    if (!output.empty()) {
        save_mps(res.state, output);
        out() << "state = " << output << "\n";
    }
    return 0;
}

int run_measure(const std::string& state_path, const std::string& cut_arg) {
    const MatrixProductState m = load_mps(state_path);
    const std::size_t cut = parse_cut(cut_arg, m.length());
    const SpectralPanel p = spectral_panel(schmidt_spectrum(m, cut));
    out() << "cut = " << cut << "\n"
          << "S = " << p.S << "\n"
          << "S2 = " << p.S2 << "\n"
          << "S3 = " << p.S3 << "\n"
          << "CE = " << p.CE << "\n"
          << "p2 = " << p.p2 << "\n"
          << "p3 = " << p.p3 << "\n"
          << "F = " << p.F << "\n"
          << "Lambda = " << p.Lambda << "\n"
          << "logLambda = " << p.logLambda << "\n";
    return 0;
}

int run_scan_cmd(const std::string& config_path) {
    const ScanConfig cfg = load_scan_config(config_path);
    if (cfg.output_path.empty())
        throw spec_error("scan runs need an output file", "output_path");
    // Claim the output before computing anything.
    std::ofstream f(cfg.output_path, std::ios::trunc);
    if (!f) throw io_error("cannot open '" + cfg.output_path + "' for writing");
    const std::vector<ScanRecord> records = run_scan(cfg);
    write_scan_csv(records, cfg, f);
    if (!f) throw io_error("write failed for '" + cfg.output_path + "'");
    out() << "rows = " << records.size() << "\n"
          << "output = " << cfg.output_path << "\n";
    return 0;
}

int run_sre(const std::string& state_path, const std::string& method, double n,
            std::size_t samples, std::uint64_t seed, std::size_t chi, double cutoff) {
    const MatrixProductState m = load_mps(state_path);
    if (method == "exact") {
        const SreExactResult r = sre_exact(to_statevector(m), n);
        out() << "M_" << n << " = " << r.m_alpha << " (method=exact_sum, M_lin="
              << r.m_lin << ")\n";
    } else if (method == "sampling") {
        const SreEstimate r = sre_sampled(m, n, samples, seed);
        out() << "M_" << n << " = " << r.value << " (method=sampling, std_error="
              << r.std_error << ", n_samples=" << r.n_samples << ")\n";
    } else if (method == "replica") {
        if (std::abs(n - std::round(n)) > 1e-9 || n < 2.0)
            throw spec_error("replica order must be an integer >= 2", "--n");
        const SreEstimate r =
            sre_replica(m, static_cast<unsigned>(std::lround(n)), chi, cutoff);
        out() << "M_" << n << " = " << r.value << " (method=replica, chi_used="
              << r.chi_used << ", discarded_weight=" << r.discarded_weight
              << (r.truncation_warning ? ", TRUNCATION WARNING" : "") << ")\n";
    } else {
        throw spec_error("method must be exact, sampling, or replica", "--method");
    }
    return 0;
}

int run_orbit_cmd(const std::vector<double>& thetas, std::size_t L,
                  std::size_t layers, std::size_t realizations, std::uint64_t seed,
                  const std::string& output) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12);
    os << "theta,L,n_layers,n_realizations,mean_F,mean_logLambda,mean_CE,"
          "max_logLambda,max_CE,m2_initial,m_lin_initial\n";
    for (double theta : thetas) {
        const OrbitResult r = run_orbit(theta, L, layers, realizations, seed);
        os << r.theta << "," << L << "," << r.n_layers << "," << r.n_realizations
           << "," << r.mean_F << "," << r.mean_logLambda << "," << r.mean_CE << ","
           << r.max_logLambda << "," << r.max_CE << "," << r.m2_initial << ","
           << r.m_lin_initial << "\n";
    }
    if (output.empty()) {
        out() << os.str();
    } else {
        std::ofstream f(output, std::ios::trunc);
        if (!f) throw io_error("cannot open '" + output + "' for writing");
        f << os.str();
        if (!f) throw io_error("write failed for '" + output + "'");
        out() << "output = " << output << "\n";
    }
    return 0;
}

int run_fit(const std::string& input, const std::string& column,
            const std::string& form_name) {
    const CsvTable table = read_csv(input);
    const std::size_t lcol = table.column_index("L");
    const std::size_t ycol = table.column_index(column);
    std::vector<std::pair<double, double>> points;
    for (const auto& row : table.rows) {
        if (row.size() <= std::max(lcol, ycol))
            throw io_error("short row in '" + input + "'");
        points.emplace_back(std::stod(row[lcol]), std::stod(row[ycol]));
    }
    const FitResult res = fit_scaling(points, fit_form_from_string(form_name));
    out() << "slope = " << res.slope << "\n"
          << "intercept = " << res.intercept << "\n"
          << "r_squared = " << res.r_squared << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spin-chain complexity toolkit"};
    app.require_subcommand(1);

    // gs
    auto* gs = app.add_subcommand("gs", "compute and cache a DMRG ground state");
    std::string gs_family;
    std::size_t gs_L = 0;
    std::vector<std::string> gs_sets;
    std::size_t gs_chi = 64, gs_sweeps = 30;
    double gs_tol = 1e-10;
    std::uint64_t gs_seed = 1;
    std::string gs_output;
    gs->add_option("--family", gs_family, "model family")->required();
    gs->add_option("--L", gs_L, "chain length")->required();
    gs->add_option("--set", gs_sets, "model parameter name=value (repeatable)");
    gs->add_option("--chi", gs_chi, "maximum bond dimension");
    gs->add_option("--tol", gs_tol, "energy convergence tolerance");
    gs->add_option("--sweeps", gs_sweeps, "maximum sweeps");
    gs->add_option("--seed", gs_seed, "random-init seed");
    gs->add_option("--output", gs_output, "state cache file to write");

    // measure
    auto* measure = app.add_subcommand("measure", "spectrum panel on a cached state");
    std::string me_state, me_cut = "half";
    measure->add_option("--state", me_state, "state cache file")->required();
    measure->add_option("--cut", me_cut, "bond index or 'half'");

    // scan
    auto* scan = app.add_subcommand("scan", "run a sweep from a config file");
    std::string sc_config;
    scan->add_option("--config", sc_config, "scan config file")->required();

    // sre
    auto* sre = app.add_subcommand("sre", "stabilizer Renyi entropy of a cached state");
    std::string sr_state, sr_method = "exact";
    double sr_n = 2.0, sr_cutoff = 1e-12;
    std::size_t sr_samples = 10000, sr_chi = 256;
    std::uint64_t sr_seed = 1;
    sre->add_option("--state", sr_state, "state cache file")->required();
    sre->add_option("--method", sr_method, "exact | sampling | replica");
    sre->add_option("--n", sr_n, "Renyi index");
    sre->add_option("--samples", sr_samples, "sample count (sampling)");
    sre->add_option("--seed", sr_seed, "sampling seed");
    sre->add_option("--chi", sr_chi, "replica bond cap");
    sre->add_option("--cutoff", sr_cutoff, "replica compression cutoff");

    // orbit
    auto* orbit = app.add_subcommand("orbit", "Clifford-orbit antiflatness protocol");
    std::vector<double> or_thetas;
    std::size_t or_L = 8, or_layers = 200, or_real = 200;
    std::uint64_t or_seed = 1;
    std::string or_output;
    orbit->add_option("--theta", or_thetas, "initial-state angles (repeatable)")
        ->required();
    orbit->add_option("--L", or_L, "number of qubits");
    orbit->add_option("--layers", or_layers, "brickwork layers per realization");
    orbit->add_option("--realizations", or_real, "independent circuit realizations");
    orbit->add_option("--seed", or_seed, "base seed");
    orbit->add_option("--output", or_output, "CSV file (stdout if omitted)");

    // fit
    auto* fit = app.add_subcommand("fit", "finite-size-scaling fit on a CSV column");
    std::string fi_input, fi_column, fi_form = "logL";
    fit->add_option("--input", fi_input, "CSV file from a scan")->required();
    fit->add_option("--column", fi_column, "value column name")->required();
    fit->add_option("--form", fi_form, "linear | logL | logL_squared");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (gs->parsed())
            return run_gs(gs_family, gs_L, gs_sets, gs_chi, gs_tol, gs_sweeps, gs_seed,
                          gs_output);
        if (measure->parsed()) return run_measure(me_state, me_cut);
        if (scan->parsed()) return run_scan_cmd(sc_config);
        if (sre->parsed())
            return run_sre(sr_state, sr_method, sr_n, sr_samples, sr_seed, sr_chi,
                           sr_cutoff);
        if (orbit->parsed())
            return run_orbit_cmd(or_thetas, or_L, or_layers, or_real, or_seed,
                                 or_output);
        if (fit->parsed()) return run_fit(fi_input, fi_column, fi_form);
    } catch (const spec_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const dimension_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
