#pragma once
// Batch driver: parameter sweeps over models with the full measure panel per
// point, finite-size-scaling fits, and deterministic CSV output.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinchain/models.hpp"

namespace spinchain {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct SweepAxis {
    std::string param;
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 1;  // number of grid points (≥ 1)

    double value_at(std::size_t i) const;
};

struct MeasureRequest {
    // One of: S, S2, S3, CE, F, Lambda, logLambda, M2_replica, M2_sampled(n).
    std::string name;
    std::size_t n_samples = 0;  // only for M2_sampled

    bool stochastic() const { return n_samples > 0; }
    std::string label() const;  // e.g. "M2_sampled(500)" for the CSV header
};

struct ScanConfig {
    ModelFamily family = ModelFamily::xy;
    std::map<std::string, double> base_params;  // non-swept model parameters
    SweepAxis sweep;
    std::optional<SweepAxis> sweep2;
    // grid: full outer product; paired: lockstep with sweep (equal steps).
    std::string sweep2_mode = "grid";
    // Optional derived second parameter: "separability_field" sets h from the
    // swept gamma pointwise (overrides sweep2 values).
    std::string sweep2_derive;
    std::vector<std::size_t> sizes;
    std::size_t chi_max = 64;
    double energy_tol = 1e-10;
    std::size_t max_sweeps = 30;
    std::size_t chi_start = 16;
    // "none": every grid point starts from the seeded random state (points
    // are exactly independent); "sweep": reuse the previous point's state
    // along the sweep axis at fixed L (faster, keeps the same branch).
    std::string warm_start = "none";
    std::vector<MeasureRequest> measures;
    std::size_t cut = 0;      // 0 with cut_half=true means half chain
    bool cut_half = true;
    std::uint64_t seed = 1;
    std::string output_path;
    std::size_t replica_chi_max = 256;
    double replica_cutoff = 1e-12;
    // Bond cap applied to the ground state before the replica route; the
    // Pauli-basis construction scales with the square of the source bond, and
    // the working buffers with its cube, so the default is sized to keep peak
    // memory in the low gigabytes.
    std::size_t replica_state_chi = 16;
    // FNV-1a hash of the config text, recorded in the CSV metadata header.
    std::uint64_t config_hash = 0;
};

// Parse the flat key=value config format (dotted sections, '#' comments).
// Unknown or malformed keys throw spec_error carrying the offending key path.
ScanConfig parse_scan_config_text(const std::string& text);
ScanConfig load_scan_config(const std::string& path);

struct ScanRecord {
    std::size_t grid_index = 0;
    std::map<std::string, double> params;  // all model parameters at the point
    std::size_t L = 0;
    double energy = 0.0;
    double gap_estimate = 0.0;
    bool gap_flag = false;
    bool converged = true;
    // Measure values in the order requested; stochastic entries also carry a
    // standard error.
    std::vector<double> values;
    std::vector<double> std_errors;  // aligned with values; 0 if deterministic
    double wall_time = 0.0;
};

std::vector<ScanRecord> run_scan(const ScanConfig& cfg);

// Deterministic CSV: '#' metadata lines (artifact version, config hash,
// seed), one header row, then one row per record; wall_time is always the
// last column so byte comparisons can strip it.
void write_scan_csv(const std::vector<ScanRecord>& records, const ScanConfig& cfg,
                    std::ostream& out);
void write_scan_csv_file(const std::vector<ScanRecord>& records, const ScanConfig& cfg,
                         const std::string& path);

enum class FitForm { linear, logL, logL_squared };

FitForm fit_form_from_string(const std::string& name);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// Least-squares fit of value against {L, log L, log² L} with intercept;
// requires at least 3 distinct L values.
FitResult fit_scaling(const std::vector<std::pair<double, double>>& points, FitForm form);

// Minimal CSV reader for the `fit` subcommand: skips '#' lines, splits the
// header row and data rows on commas.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column_index(const std::string& name) const;  // throws spec_error
};
CsvTable read_csv(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& text);

}  // namespace spinchain
