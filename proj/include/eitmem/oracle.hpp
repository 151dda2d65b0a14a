// Exact few-atom three-level simulation of the un-bosonized interaction,
// restricted to a low total-excitation sector.  Validates the collective
// operator algebra and the bosonic replacement against the mode-space model.
//
// Basis: product states |n>_photon (x) |s_1..s_N>, s in {b, a, c}, with
// n + #a + #c <= n_exc and n <= n_max.  The Hamiltonian conserves the total
// excitation, so the sector is exact for any initial state inside it.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "config.hpp"
#include "fock_sector.hpp"
#include "propagator.hpp"
#include "schedule.hpp"

namespace eitmem {

struct DimensionError : std::runtime_error {
    std::size_t dimension;
    DimensionError(const std::string& msg, std::size_t dim)
        : std::runtime_error(msg), dimension(dim) {}
};

inline constexpr int kMaxOracleAtoms = 12;
inline constexpr std::size_t kMaxOracleStates = 50000;

struct ExactRegister {
    int atom_count = 0;
    std::vector<double> probe_couplings;   // g_j
    std::vector<double> control_weights;   // w_j
    std::vector<double> phases;            // per-atom phase, default 0
    int n_max = 1;                         // photon truncation
    int n_exc = 1;                         // total-excitation cap

    void validate() const {
        if (atom_count < 1 || atom_count > kMaxOracleAtoms)
            throw std::invalid_argument("oracle: atom count must be in [1, " +
                                        std::to_string(kMaxOracleAtoms) + "]");
        if (static_cast<int>(probe_couplings.size()) != atom_count ||
            static_cast<int>(control_weights.size()) != atom_count)
            throw std::invalid_argument("oracle: per-atom coupling lists must have length N");
        if (!phases.empty() && static_cast<int>(phases.size()) != atom_count)
            throw std::invalid_argument("oracle: phase list must be empty or length N");
        if (n_max < 0 || n_max > 15) throw std::invalid_argument("oracle: n_max must be in [0, 15]");
        if (n_exc < 0) throw std::invalid_argument("oracle: n_exc must be >= 0");
    }

    double phase(int j) const { return phases.empty() ? 0.0 : phases[j]; }

    static ExactRegister homogeneous(int n_atoms, double g, double w, int n_max = 1,
                                     int n_exc = 1) {
        ExactRegister r;
        r.atom_count = n_atoms;
        r.probe_couplings.assign(n_atoms, g);
        r.control_weights.assign(n_atoms, w);
        r.n_max = n_max;
        r.n_exc = n_exc;
        r.validate();
        return r;
    }
};

// Sector-restricted product basis with base-3 atom codes (0=b, 1=a, 2=c).
struct ExactBasis {
    struct State {
        int n_photon;
        std::uint32_t code;
    };
    int atom_count = 0;
    int n_max = 0;
    int n_exc = 0;
    std::vector<State> states;
    std::unordered_map<std::uint64_t, int> lookup;

    static int atom_state(std::uint32_t code, int j) {
        static const std::uint32_t pow3[13] = {1, 3, 9, 27, 81, 243, 729, 2187, 6561,
                                               19683, 59049, 177147, 531441};
        return static_cast<int>((code / pow3[j]) % 3);
    }

    static std::uint32_t with_atom_state(std::uint32_t code, int j, int s) {
        static const std::uint32_t pow3[13] = {1, 3, 9, 27, 81, 243, 729, 2187, 6561,
                                               19683, 59049, 177147, 531441};
        const int old = atom_state(code, j);
        return code + static_cast<std::uint32_t>(s - old) * pow3[j];
    }

    static std::uint64_t key(int n_photon, std::uint32_t code) {
        return (static_cast<std::uint64_t>(code) << 4) | static_cast<std::uint64_t>(n_photon);
    }

    int dim() const { return static_cast<int>(states.size()); }

    int find(int n_photon, std::uint32_t code) const {
        auto it = lookup.find(key(n_photon, code));
        return it == lookup.end() ? -1 : it->second;
    }

    int excitation(int i) const {
        const State& s = states[i];
        int flips = 0;
        for (int j = 0; j < atom_count; ++j)
            if (atom_state(s.code, j) != 0) ++flips;
        return s.n_photon + flips;
    }

    static ExactBasis build(const ExactRegister& reg) {
        reg.validate();
        ExactBasis b;
        b.atom_count = reg.atom_count;
        b.n_max = reg.n_max;
        b.n_exc = reg.n_exc;

        const int n = reg.atom_count;
        std::vector<int> pick;
        // Enumerate flip subsets by size, then species assignments, then
        // the compatible photon numbers.
        auto emit = [&](std::uint32_t code, int flips) {
            const int photon_cap = std::min(reg.n_max, reg.n_exc - flips);
            for (int np = 0; np <= photon_cap; ++np) {
                if (b.states.size() >= kMaxOracleStates)
                    throw DimensionError("oracle: dimension over budget (> " +
                                             std::to_string(kMaxOracleStates) + " states)",
                                         b.states.size() + 1);
                b.lookup[key(np, code)] = static_cast<int>(b.states.size());
                b.states.push_back({np, code});
            }
        };
        auto assign_species = [&](auto&& self, std::uint32_t code, std::size_t at,
                                  int flips) -> void {
            if (at == pick.size()) {
                emit(code, flips);
                return;
            }
            self(self, with_atom_state(code, pick[at], 1), at + 1, flips);
            self(self, with_atom_state(code, pick[at], 2), at + 1, flips);
        };
        auto choose = [&](auto&& self, int start, int remaining) -> void {
            if (remaining == 0) {
                assign_species(assign_species, 0, 0, static_cast<int>(pick.size()));
                return;
            }
            for (int j = start; j <= n - remaining; ++j) {
                pick.push_back(j);
                self(self, j + 1, remaining - 1);
                pick.pop_back();
            }
        };
        for (int flips = 0; flips <= std::min(n, reg.n_exc); ++flips) choose(choose, 0, flips);
        return b;
    }
};

// H(t) = G + f(t) W on the sector basis:
//   G = sum_j g_j (e^{i phi_j} sigma_ab^j a + h.c.)        (photon absorption)
//   W = sum_j w_j (e^{i phi_j} sigma_ac^j + h.c.)          (unit control envelope)
struct ExactHamiltonian {
    ExactBasis basis;
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd W;
};

inline ExactHamiltonian build_exact(const ExactRegister& reg) {
    ExactHamiltonian H;
    H.basis = ExactBasis::build(reg);
    const int d = H.basis.dim();
    Eigen::MatrixXcd g_half = Eigen::MatrixXcd::Zero(d, d);
    Eigen::MatrixXcd w_half = Eigen::MatrixXcd::Zero(d, d);

    for (int col = 0; col < d; ++col) {
        const auto& s = H.basis.states[col];
        for (int j = 0; j < reg.atom_count; ++j) {
            const int sj = ExactBasis::atom_state(s.code, j);
            const std::complex<double> ph = std::polar(1.0, reg.phase(j));
            if (sj == 0 && s.n_photon >= 1) {
                // sigma_ab^j a : absorb a photon, flip b -> a
                const int row = H.basis.find(s.n_photon - 1,
                                             ExactBasis::with_atom_state(s.code, j, 1));
                if (row >= 0)
                    g_half(row, col) += reg.probe_couplings[j] * ph *
                                        std::sqrt(static_cast<double>(s.n_photon));
            }
            if (sj == 2) {
                // sigma_ac^j : flip c -> a
                const int row = H.basis.find(s.n_photon,
                                             ExactBasis::with_atom_state(s.code, j, 1));
                if (row >= 0) w_half(row, col) += reg.control_weights[j] * ph;
            }
        }
    }
    H.G = g_half + g_half.adjoint().eval();
    H.W = w_half + w_half.adjoint().eval();
    return H;
}

// Contiguous atom partition into m groups.
inline std::vector<std::pair<int, int>> partition_ranges(const ExactRegister& reg,
                                                         const std::vector<int>& group_sizes) {
    if (group_sizes.empty()) throw std::domain_error("oracle: empty partition");
    int off = 0;
    std::vector<std::pair<int, int>> ranges;
    for (int size : group_sizes) {
        if (size < 1) throw std::domain_error("oracle: empty group in partition");
        ranges.emplace_back(off, off + size);
        off += size;
    }
    if (off != reg.atom_count)
        throw std::invalid_argument("oracle: partition must cover all atoms exactly once");
    return ranges;
}

// Collective operators per group on the sector basis.  A and C carry the
// 1/sqrt(N_sigma) normalization; the raw variants are the bare flip sums
// (integer entries at zero phase), and T_plus/T_minus are unnormalized.
struct CollectiveOps {
    std::vector<Eigen::MatrixXcd> A, C;          // normalized lowering ops
    std::vector<Eigen::MatrixXcd> A_raw, C_raw;  // unnormalized lowering ops
    std::vector<Eigen::MatrixXcd> T_plus, T_minus;
    std::vector<Eigen::MatrixXcd> T_z;           // diagonal, (n_a - n_c)/2 per group
};

inline CollectiveOps collective_operators(const ExactBasis& basis, const ExactRegister& reg,
                                          const std::vector<int>& group_sizes) {
    const auto ranges = partition_ranges(reg, group_sizes);
    const int d = basis.dim();
    CollectiveOps ops;

    for (const auto& [begin, end] : ranges) {
        const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(end - begin));
        Eigen::MatrixXcd a_raw = Eigen::MatrixXcd::Zero(d, d);
        Eigen::MatrixXcd c_raw = Eigen::MatrixXcd::Zero(d, d);
        Eigen::MatrixXcd t_minus = Eigen::MatrixXcd::Zero(d, d);
        Eigen::MatrixXcd t_z = Eigen::MatrixXcd::Zero(d, d);

        for (int col = 0; col < d; ++col) {
            const auto& s = basis.states[col];
            int na = 0, nc = 0;
            for (int j = begin; j < end; ++j) {
                const int sj = ExactBasis::atom_state(s.code, j);
                const std::complex<double> ph = std::polar(1.0, -reg.phase(j));
                if (sj == 1) {
                    ++na;
                    const int row = basis.find(s.n_photon,
                                               ExactBasis::with_atom_state(s.code, j, 0));
                    if (row >= 0) a_raw(row, col) += ph;  // sigma_ba: a -> b
                    const int row2 = basis.find(s.n_photon,
                                                ExactBasis::with_atom_state(s.code, j, 2));
                    if (row2 >= 0) t_minus(row2, col) += ph;  // sigma_ca: a -> c
                }
                if (sj == 2) {
                    ++nc;
                    const int row = basis.find(s.n_photon,
                                               ExactBasis::with_atom_state(s.code, j, 0));
                    if (row >= 0) c_raw(row, col) += ph;  // sigma_bc: c -> b
                }
            }
            t_z(col, col) = 0.5 * static_cast<double>(na - nc);
        }

        ops.A.push_back(a_raw * inv_sqrt);
        ops.C.push_back(c_raw * inv_sqrt);
        ops.A_raw.push_back(a_raw);
        ops.C_raw.push_back(std::move(c_raw));
        ops.T_minus.push_back(t_minus);
        ops.T_plus.push_back(t_minus.adjoint());
        ops.T_z.push_back(std::move(t_z));
    }
    return ops;
}

// Sub-ensemble config induced by a partition: group sizes and group-mean
// couplings (the coarse-graining that defines the bosonic model).
inline SubEnsembleConfig coarse_grain(const ExactRegister& reg,
                                      const std::vector<int>& group_sizes) {
    const auto ranges = partition_ranges(reg, group_sizes);
    std::vector<std::int64_t> counts;
    std::vector<double> g, w;
    for (const auto& [begin, end] : ranges) {
        double gs = 0.0, ws = 0.0;
        for (int j = begin; j < end; ++j) {
            gs += reg.probe_couplings[j];
            ws += reg.control_weights[j];
        }
        const double n = static_cast<double>(end - begin);
        counts.push_back(end - begin);
        g.push_back(gs / n);
        w.push_back(ws / n);
    }
    return SubEnsembleConfig::from_couplings(std::move(counts), std::move(g), std::move(w));
}

struct ComparisonSample {
    double t = 0.0;
    double deviation = 0.0;      // || P psi_exact - psi_bosonic ||
    double leak_outside = 0.0;   // weight outside the per-group collective subspace
};

struct ComparisonReport {
    SubEnsembleConfig derived_config;
    int photon_number = 1;
    double max_deviation = 0.0;
    double final_overlap = 0.0;  // |<embedded bosonic final | exact final>|
    double max_leak_outside = 0.0;
    std::vector<ComparisonSample> trajectory;
};

// Propagates the exact register and the coarse-grained bosonic model through
// the same control schedule and reports how far apart they stay.  The exact
// state is projected onto the embedded collective (symmetric-per-group)
// basis; n_photons = 2 exercises the genuine low-excitation corrections.
inline ComparisonReport compare_to_bosonic(const ExactRegister& reg,
                                           const std::vector<int>& group_sizes,
                                           const ControlSchedule& schedule, int n_photons = 1,
                                           double refine_tol = kRefineTol) {
    reg.validate();
    schedule.validate();
    if (schedule.direction == Direction::roundtrip)
        throw std::invalid_argument("compare_to_bosonic: use a storage or retrieval leg");
    if (n_photons < 1 || n_photons > reg.n_max || n_photons > reg.n_exc)
        throw std::invalid_argument("compare_to_bosonic: photon number outside register sector");

    const SubEnsembleConfig config = coarse_grain(reg, group_sizes);
    const int modes = config.dim();

    // Bosonic side: n-excitation sector lift of the mode-space generator.
    const EnvelopeGenerator mode_gen = make_generator(config, schedule, false);
    const FockSector sector = FockSector::build(modes, n_photons);
    EnvelopeGenerator bos_gen;
    bos_gen.G = sector.lift(mode_gen.G);
    bos_gen.W = sector.lift(mode_gen.W);
    bos_gen.f = mode_gen.f;
    bos_gen.duration = mode_gen.duration;
    Eigen::VectorXcd bos0 = Eigen::VectorXcd::Zero(sector.dim());
    bos0[sector.photon_column()] = 1.0;

    // Exact side.
    const ExactHamiltonian exact = build_exact(reg);
    EnvelopeGenerator ex_gen;
    ex_gen.G = exact.G;
    ex_gen.W = exact.W;
    ex_gen.f = mode_gen.f;
    ex_gen.duration = mode_gen.duration;
    const std::uint32_t ground = 0;
    const int start = exact.basis.find(n_photons, ground);
    if (start < 0) throw std::invalid_argument("compare_to_bosonic: initial state not in sector");
    Eigen::VectorXcd ex0 = Eigen::VectorXcd::Zero(exact.basis.dim());
    ex0[start] = 1.0;

    const double fmax = schedule.peak * config.g0_sqrtN();
    auto propagate = [&](const EnvelopeGenerator& gen, const Eigen::VectorXcd& psi0) {
        auto run_at = [&](long long n) { return detail::run_state(gen, psi0, n, kDefaultSamples); };
        auto output_of = [](const detail::StateRun& r) { return r.states.back(); };
        const long long n0 = detail::auto_steps(gen, fmax, kDefaultSamples);
        return detail::refine<detail::StateRun>(run_at, output_of, n0, kUnitarityTol, refine_tol,
                                                "oracle-compare");
    };
    const detail::StateRun bos_run = propagate(bos_gen, bos0);
    const detail::StateRun ex_run = propagate(ex_gen, ex0);

    // Embedded collective basis, one vector per sector occupation tuple:
    // normalized products of collective raising operators on the vacuum.
    const CollectiveOps ops = collective_operators(exact.basis, reg, group_sizes);
    const int vac = exact.basis.find(0, ground);
    Eigen::MatrixXcd photon_raise = Eigen::MatrixXcd::Zero(exact.basis.dim(), exact.basis.dim());
    for (int col = 0; col < exact.basis.dim(); ++col) {
        const auto& s = exact.basis.states[col];
        const int row = exact.basis.find(s.n_photon + 1, s.code);
        if (row >= 0)
            photon_raise(row, col) = std::sqrt(static_cast<double>(s.n_photon + 1));
    }

    std::vector<Eigen::VectorXcd> embedded(sector.dim());
    std::vector<bool> present(sector.dim(), false);
    const int m = static_cast<int>(group_sizes.size());
    for (int i = 0; i < sector.dim(); ++i) {
        const std::vector<int>& occ = sector.occupations[i];
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(exact.basis.dim());
        v[vac] = 1.0;
        for (int rep = 0; rep < occ[0]; ++rep) v = photon_raise * v;
        for (int s = 0; s < m; ++s) {
            for (int rep = 0; rep < occ[1 + s]; ++rep) v = ops.A[s].adjoint() * v;
            for (int rep = 0; rep < occ[1 + m + s]; ++rep) v = ops.C[s].adjoint() * v;
        }
        const double norm = v.norm();
        if (norm > 1e-12) {
            embedded[i] = v / norm;
            present[i] = true;
        }
    }

    ComparisonReport report;
    report.derived_config = config;
    report.photon_number = n_photons;
    report.trajectory.reserve(ex_run.times.size());
    for (std::size_t k = 0; k < ex_run.times.size(); ++k) {
        const Eigen::VectorXcd& psi = ex_run.states[k];
        const Eigen::VectorXcd& bos = bos_run.states[k];
        Eigen::VectorXcd p = Eigen::VectorXcd::Zero(sector.dim());
        double projected = 0.0;
        double dev2 = 0.0;
        for (int i = 0; i < sector.dim(); ++i) {
            if (present[i]) {
                p[i] = embedded[i].dot(psi);
                projected += std::norm(p[i]);
                dev2 += std::norm(p[i] - bos[i]);
            } else {
                dev2 += std::norm(bos[i]);
            }
        }
        ComparisonSample sample;
        sample.t = ex_run.times[k];
        sample.deviation = std::sqrt(dev2);
        sample.leak_outside = std::max(0.0, psi.squaredNorm() - projected);
        report.max_deviation = std::max(report.max_deviation, sample.deviation);
        report.max_leak_outside = std::max(report.max_leak_outside, sample.leak_outside);
        if (k + 1 == ex_run.times.size())
            report.final_overlap = std::abs(bos.dot(p));
        report.trajectory.push_back(sample);
    }
    return report;
}

}  // namespace eitmem
