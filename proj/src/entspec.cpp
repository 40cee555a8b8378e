#include "spinchain/entspec.hpp"

#include <algorithm>
#include <cmath>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

constexpr double kLogFloor = 1e-14;  // weights below this stay out of log terms

double moment_sum(const SchmidtSpectrum& s, double n) {
    double acc = 0.0;
    for (double p : s.probabilities) acc += std::pow(p, n);
    return acc;
}

}  // namespace

SchmidtSpectrum make_spectrum(std::vector<double> probabilities) {
    if (probabilities.empty()) throw dimension_error("empty spectrum");
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p > -1e-12) || !std::isfinite(p))
            throw numeric_error("spectrum has a negative or non-finite weight");
        total += std::max(p, 0.0);
    }
    if (!(total > 0.0)) throw numeric_error("spectrum has zero total weight");
    for (double& p : probabilities) p = std::max(p, 0.0) / total;
    std::sort(probabilities.begin(), probabilities.end(), std::greater<double>());
    SchmidtSpectrum out;
    out.probabilities = std::move(probabilities);
    return out;
}

double entropy(const SchmidtSpectrum& s) {
    double acc = 0.0;
    for (double p : s.probabilities)
        if (p > kLogFloor) acc -= p * std::log(p);
    return acc;
}

double renyi(const SchmidtSpectrum& s, double n) {
    if (!(n > 0.0)) throw dimension_error("Renyi index must be positive");
    if (std::abs(n - 1.0) < 1e-12) return entropy(s);
    double acc = 0.0;
    for (double p : s.probabilities)
        if (p > kLogFloor || n >= 1.0) acc += std::pow(p, n);
    return std::log(acc) / (1.0 - n);
}

double capacity(const SchmidtSpectrum& s) {
    double mean = 0.0, sq = 0.0;
    for (double p : s.probabilities) {
        if (p <= kLogFloor) continue;
        const double lp = std::log(p);
        mean -= p * lp;
        sq += p * lp * lp;
    }
    return sq - mean * mean;
}

double moments(const SchmidtSpectrum& s, unsigned k) {
    if (k < 2) throw dimension_error("moment order must be at least 2");
    return moment_sum(s, static_cast<double>(k));
}

Antiflatness antiflatness(const SchmidtSpectrum& s) {
    const double p2 = moment_sum(s, 2.0);
    const double p3 = moment_sum(s, 3.0);
    Antiflatness out;
    out.F = p3 - p2 * p2;
    out.Lambda = p3 / (p2 * p2);
    out.logLambda = std::log(out.Lambda);
    return out;
}

SpectralPanel spectral_panel(const SchmidtSpectrum& s) {
    SpectralPanel out;
    out.S = entropy(s);
    out.S2 = renyi(s, 2.0);
    out.S3 = renyi(s, 3.0);
    out.CE = capacity(s);
    out.p2 = moment_sum(s, 2.0);
    out.p3 = moment_sum(s, 3.0);
    out.F = out.p3 - out.p2 * out.p2;
    out.Lambda = out.p3 / (out.p2 * out.p2);
    out.logLambda = std::log(out.Lambda);
    return out;
}

}  // namespace spinchain
