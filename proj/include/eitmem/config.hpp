// Sub-ensemble system description: m homogeneous bins approximating an
// inhomogeneously coupled atomic ensemble.  Couplings are in units where
// frequencies are measured against g0*sqrt(N) and time against its inverse;
// all couplings are real and nonnegative (resonant, phase-matched fields,
// phases absorbed into the collective mode definitions).

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace eitmem {

struct SubEnsembleConfig {
    int m = 0;                              // number of sub-ensembles
    std::vector<std::int64_t> atom_counts;  // N_sigma, all >= 1
    std::vector<double> probe_couplings;    // g_sigma (== g0 + deltas[s], exactly)
    std::vector<double> control_weights;    // w_sigma; Omega_sigma(t) = w_sigma * f(t)
    double g0 = 0.0;                        // atom-weighted mean probe coupling
    double omega0_weight = 0.0;             // atom-weighted mean control weight
    std::vector<double> deltas;             // g_sigma - g0
    std::vector<double> lambdas_weight;     // w_sigma - omega0_weight
    std::int64_t total_atoms = 0;

    int dim() const { return 2 * m + 1; }  // photon + m A-modes + m C-modes

    // g_sigma * sqrt(N_sigma), the photon<->A_sigma coupling (1-based sigma)
    double gN(int sigma) const {
        return probe_couplings[sigma - 1] *
               std::sqrt(static_cast<double>(atom_counts[sigma - 1]));
    }

    double g0_sqrtN() const {
        return g0 * std::sqrt(static_cast<double>(total_atoms));
    }

    bool homogeneous() const {
        for (double d : deltas)
            if (d != 0.0) return false;
        for (double l : lambdas_weight)
            if (l != 0.0) return false;
        return true;
    }

    // Builds a validated config.  The homogeneous references are the
    // atom-weighted means; the stored couplings are re-derived as
    // reference + deviation so the round-trip identity g_sigma == g0 +
    // delta_sigma holds exactly (the re-derivation moves inputs by at
    // most one ulp).
    static SubEnsembleConfig from_couplings(std::vector<std::int64_t> atom_counts,
                                            std::vector<double> probe_couplings,
                                            std::vector<double> control_weights) {
        SubEnsembleConfig c;
        c.m = static_cast<int>(atom_counts.size());
        if (c.m < 1) throw std::invalid_argument("config: need at least one sub-ensemble");
        if (probe_couplings.size() != atom_counts.size() ||
            control_weights.size() != atom_counts.size())
            throw std::invalid_argument("config: atom_counts, probe_couplings, control_weights must have equal length");

        c.total_atoms = 0;
        bool any_probe = false;
        for (int s = 0; s < c.m; ++s) {
            if (atom_counts[s] < 1)
                throw std::invalid_argument("config: atom count must be >= 1 (bin " + std::to_string(s) + ")");
            if (probe_couplings[s] < 0.0 || !std::isfinite(probe_couplings[s]))
                throw std::invalid_argument("config: probe coupling must be finite and >= 0");
            if (control_weights[s] <= 0.0 || !std::isfinite(control_weights[s]))
                throw std::invalid_argument("config: control weight must be finite and > 0");
            if (probe_couplings[s] > 0.0) any_probe = true;
            c.total_atoms += atom_counts[s];
        }
        if (!any_probe)
            throw std::invalid_argument("config: at least one probe coupling must be positive");

        const double n_total = static_cast<double>(c.total_atoms);
        double gsum = 0.0, wsum = 0.0;
        for (int s = 0; s < c.m; ++s) {
            gsum += static_cast<double>(atom_counts[s]) * probe_couplings[s];
            wsum += static_cast<double>(atom_counts[s]) * control_weights[s];
        }
        c.g0 = gsum / n_total;
        c.omega0_weight = wsum / n_total;

        c.atom_counts = std::move(atom_counts);
        c.deltas.resize(c.m);
        c.lambdas_weight.resize(c.m);
        c.probe_couplings.resize(c.m);
        c.control_weights.resize(c.m);
        for (int s = 0; s < c.m; ++s) {
            c.deltas[s] = probe_couplings[s] - c.g0;
            c.lambdas_weight[s] = control_weights[s] - c.omega0_weight;
            c.probe_couplings[s] = c.g0 + c.deltas[s];
            c.control_weights[s] = c.omega0_weight + c.lambdas_weight[s];
            if (c.control_weights[s] <= 0.0)
                throw std::invalid_argument("config: control weight must stay > 0");
        }
        return c;
    }
};

using ProfileSample = std::pair<double, double>;  // (position, value)

// Coarse-grains sampled coupling profiles into m equal-length spatial bins.
// N_sigma follows a uniform atom density over the common interval, with
// division remainders assigned left to right; g_sigma and w_sigma are the
// plain averages of the samples falling in each bin.
inline SubEnsembleConfig discretize_profiles(const std::vector<ProfileSample>& g_samples,
                                             const std::vector<ProfileSample>& w_samples,
                                             std::int64_t total_atoms, int m) {
    if (total_atoms <= 0) throw std::domain_error("discretize: total_atoms must be positive");
    if (m < 1) throw std::invalid_argument("discretize: m must be >= 1");
    if (total_atoms < m) throw std::invalid_argument("discretize: total_atoms must be >= m");
    if (static_cast<int>(g_samples.size()) < m || static_cast<int>(w_samples.size()) < m)
        throw std::invalid_argument("profile resolution below bin count");

    auto span = [](const std::vector<ProfileSample>& s) {
        double lo = s.front().first, hi = s.front().first;
        for (const auto& [z, v] : s) {
            (void)v;
            lo = std::min(lo, z);
            hi = std::max(hi, z);
        }
        return std::pair<double, double>{lo, hi};
    };
    const auto [glo, ghi] = span(g_samples);
    const auto [wlo, whi] = span(w_samples);
    const double z0 = std::max(glo, wlo);
    const double z1 = std::min(ghi, whi);
    if (!(z1 > z0) && m > 1)
        throw std::invalid_argument("discretize: samples do not cover a common interval");

    auto bin_average = [&](const std::vector<ProfileSample>& samples, const char* what) {
        std::vector<double> sum(m, 0.0);
        std::vector<std::int64_t> count(m, 0);
        const double width = (z1 - z0) / m;
        for (const auto& [z, v] : samples) {
            if (z < z0 || z > z1) continue;
            int b = (m == 1 || width == 0.0)
                        ? 0
                        : std::min(m - 1, static_cast<int>((z - z0) / width));
            sum[b] += v;
            count[b] += 1;
        }
        std::vector<double> avg(m);
        for (int b = 0; b < m; ++b) {
            if (count[b] == 0)
                throw std::invalid_argument(std::string("profile resolution below bin count (") +
                                            what + ", bin " + std::to_string(b) + ")");
            avg[b] = sum[b] / static_cast<double>(count[b]);
        }
        return avg;
    };

    std::vector<double> g = bin_average(g_samples, "probe");
    std::vector<double> w = bin_average(w_samples, "control");

    std::vector<std::int64_t> counts(m, total_atoms / m);
    const std::int64_t rem = total_atoms % m;
    for (std::int64_t b = 0; b < rem; ++b) counts[static_cast<std::size_t>(b)] += 1;

    return SubEnsembleConfig::from_couplings(std::move(counts), std::move(g), std::move(w));
}

// System source: either an explicit sub-ensemble config or sampled coupling
// profiles to be discretized.  Profile-backed specs can be re-binned, which
// is what the sub-ensemble-count sweep needs.
struct ProfileSpec {
    std::vector<ProfileSample> g_samples;
    std::vector<ProfileSample> w_samples;
    std::int64_t total_atoms = 0;
    int bins = 1;
};

struct SystemSpec {
    std::optional<SubEnsembleConfig> explicit_config;
    std::optional<ProfileSpec> profiles;

    static SystemSpec from_config(SubEnsembleConfig c) {
        SystemSpec s;
        s.explicit_config = std::move(c);
        return s;
    }
    static SystemSpec from_profiles(ProfileSpec p) {
        SystemSpec s;
        s.profiles = std::move(p);
        return s;
    }

    bool rebinnable() const { return profiles.has_value(); }

    SubEnsembleConfig realize() const {
        if (explicit_config) return *explicit_config;
        if (profiles)
            return discretize_profiles(profiles->g_samples, profiles->w_samples,
                                       profiles->total_atoms, profiles->bins);
        throw std::invalid_argument("system: neither couplings nor profiles given");
    }

    SubEnsembleConfig realize_with_bins(int m) const {
        if (!profiles)
            throw std::domain_error("system: sub-ensemble sweep requires profile samples");
        return discretize_profiles(profiles->g_samples, profiles->w_samples,
                                   profiles->total_atoms, m);
    }
};

}  // namespace eitmem
