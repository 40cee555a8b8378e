#include "spinchain/scan.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <locale>
#include <ostream>
#include <set>
#include <sstream>

#include "spinchain/entspec.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/magic.hpp"
#include "spinchain/mps.hpp"

namespace spinchain {

namespace {

const std::set<std::string> kPanelMeasures = {"S",  "S2",     "S3",       "CE",
                                              "F",  "Lambda", "logLambda"};

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::stringstream ss(s);
    while (std::getline(ss, cur, ',')) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

double parse_double(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw spec_error("expected a number, got '" + value + "'", key);
    }
}

std::size_t parse_size(const std::string& value, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size() || v < 0) throw std::invalid_argument("bad");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw spec_error("expected a nonnegative integer, got '" + value + "'", key);
    }
}

std::string format_double_key(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

MeasureRequest parse_measure(const std::string& item) {
    MeasureRequest req;
    const auto open = item.find('(');
    if (open == std::string::npos) {
        req.name = item;
        if (kPanelMeasures.count(req.name) == 0 && req.name != "M2_replica")
            throw spec_error("unknown measure '" + item + "'", "measures");
        if (req.name == "M2_sampled")
            throw spec_error("M2_sampled needs a sample count, e.g. M2_sampled(1000)",
                             "measures");
        return req;
    }
    if (item.back() != ')' || item.substr(0, open) != "M2_sampled")
        throw spec_error("unknown measure '" + item + "'", "measures");
    req.name = "M2_sampled";
    req.n_samples = parse_size(trim(item.substr(open + 1, item.size() - open - 2)),
                               "measures");
    if (req.n_samples < 100)
        throw spec_error("M2_sampled needs at least 100 samples", "measures");
    return req;
}

}  // namespace

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double SweepAxis::value_at(std::size_t i) const {
    if (i >= steps) throw dimension_error("sweep index out of range");
    if (steps == 1) return start;
    return start + (stop - start) * static_cast<double>(i) /
                       static_cast<double>(steps - 1);
}

std::string MeasureRequest::label() const {
    if (n_samples == 0) return name;
    return name + "(" + std::to_string(n_samples) + ")";
}

ScanConfig parse_scan_config_text(const std::string& text) {
    ScanConfig cfg;
    cfg.config_hash = fnv1a_hash(text);
    bool saw_sweep2 = false;
    SweepAxis sweep2;

    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw spec_error("expected key = value, got '" + line + "'", line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw spec_error("expected key = value, got '" + line + "'", key);

        if (key == "model.family") {
            cfg.family = family_from_string(value);
        } else if (key.rfind("model.", 0) == 0) {
            cfg.base_params[key.substr(6)] = parse_double(value, key);
        } else if (key == "sweep.param") {
            cfg.sweep.param = value;
        } else if (key == "sweep.start") {
            cfg.sweep.start = parse_double(value, key);
        } else if (key == "sweep.stop") {
            cfg.sweep.stop = parse_double(value, key);
        } else if (key == "sweep.steps") {
            cfg.sweep.steps = parse_size(value, key);
        } else if (key == "sweep2.param") {
            sweep2.param = value;
            saw_sweep2 = true;
        } else if (key == "sweep2.start") {
            sweep2.start = parse_double(value, key);
            saw_sweep2 = true;
        } else if (key == "sweep2.stop") {
            sweep2.stop = parse_double(value, key);
            saw_sweep2 = true;
        } else if (key == "sweep2.steps") {
            sweep2.steps = parse_size(value, key);
            saw_sweep2 = true;
        } else if (key == "sweep2.mode") {
            if (value != "grid" && value != "paired")
                throw spec_error("sweep2.mode must be grid or paired", key);
            cfg.sweep2_mode = value;
        } else if (key == "sweep2.derive") {
            if (value != "separability_field")
                throw spec_error("unknown derivation '" + value + "'", key);
            cfg.sweep2_derive = value;
        } else if (key == "sizes") {
            cfg.sizes.clear();
            for (const auto& item : split_list(value))
                cfg.sizes.push_back(parse_size(item, key));
        } else if (key == "chi_max") {
            cfg.chi_max = parse_size(value, key);
        } else if (key == "energy_tol") {
            cfg.energy_tol = parse_double(value, key);
        } else if (key == "max_sweeps") {
            cfg.max_sweeps = parse_size(value, key);
        } else if (key == "chi_start") {
            cfg.chi_start = parse_size(value, key);
        } else if (key == "warm_start") {
            if (value != "none" && value != "sweep" && value != "cgs")
                throw spec_error("warm_start must be none, sweep, or cgs", key);
            cfg.warm_start = value;
        } else if (key == "measures") {
            cfg.measures.clear();
            for (const auto& item : split_list(value))
                cfg.measures.push_back(parse_measure(item));
        } else if (key == "cut") {
            if (value == "half") {
                cfg.cut_half = true;
                cfg.cut = 0;
            } else {
                cfg.cut_half = false;
                cfg.cut = parse_size(value, key);
            }
        } else if (key == "seed") {
            cfg.seed = parse_size(value, key);
        } else if (key == "output_path") {
            cfg.output_path = value;
        } else if (key == "replica_chi_max") {
            cfg.replica_chi_max = parse_size(value, key);
        } else if (key == "replica_cutoff") {
            cfg.replica_cutoff = parse_double(value, key);
        } else if (key == "replica_state_chi") {
            cfg.replica_state_chi = parse_size(value, key);
        } else {
            throw spec_error("unknown configuration key", key);
        }
    }

    if (cfg.sweep.param.empty())
        throw spec_error("a sweep parameter is required", "sweep.param");
    if (cfg.sweep.steps < 1) throw spec_error("steps must be >= 1", "sweep.steps");
    if (cfg.sizes.empty()) throw spec_error("at least one size is required", "sizes");
    if (cfg.chi_max < 2) throw spec_error("chi_max must be >= 2", "chi_max");

    if (saw_sweep2) {
        if (sweep2.param.empty())
            throw spec_error("sweep2 needs a parameter name", "sweep2.param");
        if (!cfg.sweep2_derive.empty()) {
            cfg.sweep2_mode = "paired";
            sweep2.steps = cfg.sweep.steps;
        } else if (cfg.sweep2_mode == "paired" && sweep2.steps != cfg.sweep.steps) {
            throw spec_error("paired sweeps need equal step counts", "sweep2.steps");
        }
        if (sweep2.steps < 1) throw spec_error("steps must be >= 1", "sweep2.steps");
        cfg.sweep2 = sweep2;
    } else if (!cfg.sweep2_derive.empty()) {
        throw spec_error("sweep2.derive needs sweep2.param", "sweep2.param");
    }

    if (cfg.warm_start == "sweep" && cfg.sweep2 && cfg.sweep2_mode == "grid")
        throw spec_error("warm_start=sweep requires a single sweep axis", "warm_start");
    if (cfg.warm_start == "cgs" && cfg.family != ModelFamily::xy)
        throw spec_error("warm_start=cgs applies to the xy family only", "warm_start");

    // Early model validation at the first grid point.
    ModelSpec probe;
    probe.family = cfg.family;
    probe.L = cfg.sizes.front();
    probe.parameters = cfg.base_params;
    probe.parameters[cfg.sweep.param] = cfg.sweep.value_at(0);
    if (cfg.sweep2) {
        probe.parameters[cfg.sweep2->param] =
            cfg.sweep2_derive.empty() ? cfg.sweep2->value_at(0) : 0.0;
    }
    validate_model(probe);
    if (!cfg.cut_half) {
        for (std::size_t L : cfg.sizes)
            if (cfg.cut == 0 || cfg.cut >= L)
                throw spec_error("cut must be an internal bond for every size", "cut");
    }
    return cfg;
}

ScanConfig load_scan_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_scan_config_text(buf.str());
}

std::vector<ScanRecord> run_scan(const ScanConfig& cfg) {
    std::vector<ScanRecord> records;
    const std::size_t steps2 =
        (cfg.sweep2 && cfg.sweep2_mode == "grid") ? cfg.sweep2->steps : 1;

    std::size_t grid_index = 0;
    for (std::size_t L : cfg.sizes) {
        MatrixProductState chain_state;  // warm_start=sweep carrier at this L
        bool have_chain = false;
        for (std::size_t i = 0; i < cfg.sweep.steps; ++i) {
            for (std::size_t k = 0; k < steps2; ++k) {
                const auto t0 = std::chrono::steady_clock::now();
                std::map<std::string, double> params = cfg.base_params;
                params[cfg.sweep.param] = cfg.sweep.value_at(i);
                if (cfg.sweep2) {
                    if (!cfg.sweep2_derive.empty()) {
                        // separability_field: h = √(1−γ²) from the swept γ.
                        const auto g = params.find("gamma");
                        if (g == params.end())
                            throw spec_error("separability_field needs gamma",
                                             "sweep2.derive");
                        params[cfg.sweep2->param] = separability_field(g->second);
                    } else if (cfg.sweep2_mode == "paired") {
                        params[cfg.sweep2->param] = cfg.sweep2->value_at(i);
                    } else {
                        params[cfg.sweep2->param] = cfg.sweep2->value_at(k);
                    }
                }

                ModelSpec spec;
                spec.family = cfg.family;
                spec.L = L;
                spec.parameters = params;
                validate_model(spec);

                // Point seed from the physical identity of the point, so a
                // single-point config reproduces the full-scan row exactly.
                std::string ident = family_to_string(cfg.family);
                for (const auto& [name, value] : params)
                    ident += "|" + name + "=" + format_double_key(value);
                ident += "|L=" + std::to_string(L);
                ident += "|seed=" + std::to_string(cfg.seed);

                DmrgOptions opts;
                opts.chi_max = cfg.chi_max;
                opts.energy_tol = cfg.energy_tol;
                opts.max_sweeps = cfg.max_sweeps;
                opts.chi_start = cfg.chi_start;
                opts.seed = fnv1a_hash(ident);
                MatrixProductState warm;
                if (cfg.warm_start == "sweep" && have_chain) {
                    opts.warm_start = &chain_state;
                } else if (cfg.warm_start == "cgs") {
                    // Start on one product branch and penalize overlap with its
                    // spin-flipped partner: where the parity splitting is still
                    // resolvable the unconstrained optimum is the cat
                    // combination, not the symmetry-broken state these rows
                    // are meant to probe.
                    warm = cgs_product_state(params.at("gamma"), L);
                    opts.warm_start = &warm;
                    opts.orthogonal_to.push_back(
                        cgs_product_state(params.at("gamma"), L, true));
                }

                const DmrgResult gs = dmrg_ground_state(build_mpo(spec), opts);
                if (cfg.warm_start == "sweep") {
                    chain_state = gs.state;
                    have_chain = true;
                }

                ScanRecord rec;
                rec.grid_index = grid_index++;
                rec.params = params;
                rec.L = L;
                rec.energy = gs.energy;
                rec.gap_estimate = gs.gap_estimate;
                rec.gap_flag = gs.gap_flag;
                rec.converged = gs.converged;

                const std::size_t cut = cfg.cut_half ? L / 2 : cfg.cut;
                bool have_panel = false;
                SpectralPanel panel;
                for (std::size_t mi = 0; mi < cfg.measures.size(); ++mi) {
                    const MeasureRequest& req = cfg.measures[mi];
                    double value = 0.0, err = 0.0;
                    if (kPanelMeasures.count(req.name)) {
                        if (!have_panel) {
                            panel = spectral_panel(schmidt_spectrum(gs.state, cut));
                            have_panel = true;
                        }
                        if (req.name == "S") value = panel.S;
                        else if (req.name == "S2") value = panel.S2;
                        else if (req.name == "S3") value = panel.S3;
                        else if (req.name == "CE") value = panel.CE;
                        else if (req.name == "F") value = panel.F;
                        else if (req.name == "Lambda") value = panel.Lambda;
                        else value = panel.logLambda;
                    } else if (req.name == "M2_replica") {
                        const MatrixProductState* src = &gs.state;
                        MatrixProductState reduced;
                        if (gs.state.max_bond_dim() > cfg.replica_state_chi) {
                            reduced = compress_state(gs.state, cfg.replica_state_chi,
                                                     cfg.replica_cutoff);
                            src = &reduced;
                        }
                        value = sre_replica(*src, 2, cfg.replica_chi_max,
                                            cfg.replica_cutoff)
                                    .value;
                    } else {  // M2_sampled(n)
                        // Seed shared across the whole grid (common random
                        // numbers): smooth in the swept parameter, and a
                        // single-point rerun still matches its scan row.
                        const std::uint64_t mseed = fnv1a_hash(
                            family_to_string(cfg.family) + "|L=" + std::to_string(L) +
                            "|seed=" + std::to_string(cfg.seed) +
                            "|measure=" + std::to_string(mi));
                        const SreEstimate est =
                            sre_sampled(gs.state, 2.0, req.n_samples, mseed);
                        value = est.value;
                        err = est.std_error;
                    }
                    if (!std::isfinite(value))
                        throw numeric_error("measure " + req.label() +
                                            " produced a non-finite value");
                    rec.values.push_back(value);
                    rec.std_errors.push_back(err);
                }
                rec.wall_time =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
                records.push_back(std::move(rec));
            }
        }
    }
    return records;
}

void write_scan_csv(const std::vector<ScanRecord>& records, const ScanConfig& cfg,
                    std::ostream& out) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(12);

    char hash_hex[20];
    std::snprintf(hash_hex, sizeof hash_hex, "%016llx",
                  static_cast<unsigned long long>(cfg.config_hash));
    os << "# artifact_version=" << kArtifactVersion << "\n";
    os << "# config_hash=" << hash_hex << "\n";
    os << "# seed=" << cfg.seed << "\n";

    std::vector<std::string> param_names;
    if (!records.empty())
        for (const auto& [name, value] : records.front().params)
            param_names.push_back(name);

    os << "grid_index,L";
    for (const auto& name : param_names) os << "," << name;
    os << ",energy,gap_estimate,gap_flag,converged";
    for (const auto& req : cfg.measures) {
        os << "," << req.label();
        if (req.stochastic()) os << "," << req.label() << "_err";
    }
    os << ",wall_time\n";

    for (const auto& rec : records) {
        os << rec.grid_index << "," << rec.L;
        for (const auto& name : param_names) os << "," << rec.params.at(name);
        os << "," << rec.energy << "," << rec.gap_estimate << ","
           << (rec.gap_flag ? 1 : 0) << "," << (rec.converged ? 1 : 0);
        for (std::size_t mi = 0; mi < cfg.measures.size(); ++mi) {
            os << "," << rec.values[mi];
            if (cfg.measures[mi].stochastic()) os << "," << rec.std_errors[mi];
        }
        os << "," << rec.wall_time << "\n";
    }
    out << os.str();
}

void write_scan_csv_file(const std::vector<ScanRecord>& records, const ScanConfig& cfg,
                         const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw io_error("cannot open '" + path + "' for writing");
    write_scan_csv(records, cfg, f);
    if (!f) throw io_error("write failed for '" + path + "'");
}

FitForm fit_form_from_string(const std::string& name) {
    if (name == "linear") return FitForm::linear;
    if (name == "logL") return FitForm::logL;
    if (name == "logL_squared") return FitForm::logL_squared;
    throw spec_error("unknown fit form '" + name + "'", "fit.form");
}

FitResult fit_scaling(const std::vector<std::pair<double, double>>& points,
                      FitForm form) {
    std::set<double> distinct;
    for (const auto& [L, value] : points) distinct.insert(L);
    if (distinct.size() < 3)
        throw spec_error("scaling fits need at least 3 distinct sizes", "fit.points");

    std::vector<double> x(points.size()), y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double L = points[i].first;
        if (!(L > 0)) throw spec_error("sizes must be positive", "fit.points");
        switch (form) {
            case FitForm::linear: x[i] = L; break;
            case FitForm::logL: x[i] = std::log(L); break;
            case FitForm::logL_squared: x[i] = std::log(L) * std::log(L); break;
        }
        y[i] = points[i].second;
    }

    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300)
        throw numeric_error("degenerate design matrix in scaling fit");

    FitResult res;
    res.slope = (n * sxy - sx * sy) / denom;
    res.intercept = (sy - res.slope * sx) / n;

    const double ymean = sy / n;
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit = res.slope * x[i] + res.intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - ymean) * (y[i] - ymean);
    }
    res.r_squared = ss_tot > 1e-300 ? 1.0 - ss_res / ss_tot
                                    : (ss_res < 1e-300 ? 1.0 : 0.0);
    return res;
}

std::size_t CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw spec_error("column '" + name + "' not present in the CSV", "fit.column");
}

CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw io_error("cannot open '" + path + "'");
    CsvTable table;
    std::string line;
    while (std::getline(f, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
        if (table.header.empty())
            table.header = std::move(cells);
        else
            table.rows.push_back(std::move(cells));
    }
    if (table.header.empty()) throw io_error("'" + path + "' contains no header row");
    return table;
}

}  // namespace spinchain
