// Randomized invariant suites behind the `verify` command.  Each suite draws
// deterministic cases from a seeded generator, reports its worst defect, and
// hands back the first failing case (if any) for replay.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "dynamics.hpp"
#include "hamiltonian.hpp"
#include "mixing.hpp"
#include "oracle.hpp"
#include "propagator.hpp"
#include "schedule.hpp"

namespace eitmem {

struct VerifyCase {
    SubEnsembleConfig config;
    double f = 0.0;
    std::optional<ControlSchedule> schedule;
};

struct CheckOutcome {
    bool ok = true;
    double defect = 0.0;
    std::string why;
};

struct SuiteResult {
    std::string name;
    bool passed = true;
    long cases = 0;
    double worst_defect = 0.0;
    std::string detail;
    std::optional<VerifyCase> counterexample;
};

// ---- random configs --------------------------------------------------------

// Wild algebra-range config: m in [1, max_m], N_sigma log-uniform up to 1e6,
// g in (0, 2] with occasional zeroed bins, w in (0, 2].
inline SubEnsembleConfig random_config(std::mt19937_64& rng, int max_m = 8) {
    std::uniform_int_distribution<int> m_dist(1, max_m);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int m = m_dist(rng);
    std::vector<std::int64_t> counts(m);
    std::vector<double> g(m), w(m);
    for (int s = 0; s < m; ++s) {
        counts[s] = static_cast<std::int64_t>(std::pow(10.0, 6.0 * u01(rng)));
        counts[s] = std::max<std::int64_t>(1, counts[s]);
        g[s] = 1e-3 + (2.0 - 1e-3) * u01(rng);
        w[s] = 0.05 + (2.0 - 0.05) * u01(rng);
    }
    if (m > 1 && u01(rng) < 0.15) {
        // exercise the phi = pi/2 continuation: zero out a leading block
        const int zeros = 1 + static_cast<int>(u01(rng) * (m - 1));
        for (int s = 0; s < zeros && s < m - 1; ++s) g[s] = 0.0;
    }
    return SubEnsembleConfig::from_couplings(std::move(counts), std::move(g), std::move(w));
}

// Dynamics-range config: unit-convention couplings (g0 sqrtN = 1) with
// bounded relative spread s on both fields.
inline SubEnsembleConfig random_dynamic_config(std::mt19937_64& rng, int max_m = 4,
                                               double max_spread = 0.5) {
    std::uniform_int_distribution<int> m_dist(1, max_m);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int m = m_dist(rng);
    std::vector<std::int64_t> counts(m);
    std::int64_t total = 0;
    for (int s = 0; s < m; ++s) {
        counts[s] = 10 + static_cast<std::int64_t>(u01(rng) * 1990);
        total += counts[s];
    }
    const double base = 1.0 / std::sqrt(static_cast<double>(total));
    const double s_g = max_spread * u01(rng);
    const double s_w = max_spread * u01(rng);
    std::vector<double> g(m), w(m);
    for (int s = 0; s < m; ++s) {
        g[s] = base * (1.0 + s_g * (2.0 * u01(rng) - 1.0));
        w[s] = 1.0 + s_w * (2.0 * u01(rng) - 1.0);
    }
    return SubEnsembleConfig::from_couplings(std::move(counts), std::move(g), std::move(w));
}

// ---- literal mixing-angle formulas (product form, for cross-checks) --------

inline double tan_theta_literal(const SubEnsembleConfig& c, double f) {
    double num = 0.0, den = 1.0;
    for (int j = 1; j <= c.m; ++j) {
        double prod = 1.0;
        for (int k = 1; k <= c.m; ++k) {
            const double omega = c.control_weights[k - 1] * f;
            if (k != j) prod *= omega * omega;
        }
        num += c.gN(j) * c.gN(j) * prod;
        den *= c.control_weights[j - 1] * f;
    }
    return std::sqrt(num) / den;
}

inline double tan_phi_literal(const SubEnsembleConfig& c, double f, int j) {
    double num = c.gN(j + 1);
    for (int k = 1; k <= j; ++k) num *= c.control_weights[k - 1] * f;
    double den = 0.0;
    for (int k = 1; k <= j; ++k) {
        double prod = 1.0;
        for (int s = 1; s <= j + 1; ++s) {
            if (s == k) continue;
            const double omega = c.control_weights[s - 1] * f;
            prod *= omega * omega;
        }
        den += c.gN(k) * c.gN(k) * prod;
    }
    return num / std::sqrt(den);
}

// ---- single-case checks ----------------------------------------------------

inline CheckOutcome check_dark_kernel_case(const SubEnsembleConfig& c, double f) {
    CheckOutcome out;
    const ModeVector v = dark_mode_vector(c, f);
    for (int s = 1; s <= c.m; ++s)
        if (v.A(s) != std::complex<double>(0.0, 0.0)) {
            out.ok = false;
            out.why = "A-component not exactly zero";
            return out;
        }
    const Eigen::MatrixXd h = hamiltonian_matrix(c, f);
    const double kernel = (h * v.amplitudes.real()).norm();
    const double norm_defect = std::abs(v.norm() - 1.0);
    out.defect = std::max(kernel, norm_defect);
    if (kernel > 1e-12) {
        out.ok = false;
        out.why = "||h v_dark|| = " + std::to_string(kernel);
    } else if (norm_defect > 1e-12) {
        out.ok = false;
        out.why = "dark-mode norm defect = " + std::to_string(norm_defect);
    }
    return out;
}

inline CheckOutcome check_mixing_angles_case(const SubEnsembleConfig& c, double f) {
    CheckOutcome out;
    const MixingAngles a = mixing_angles(c, f);

    if (f == 0.0) {
        out.ok = a.theta == std::numbers::pi / 2;
        if (!out.ok) out.why = "theta(0) != pi/2";
        return out;
    }

    const double t_lit = tan_theta_literal(c, f);
    const double t_here = std::tan(a.theta);
    const double theta_dev = std::abs(t_here - t_lit) / std::max(1.0, std::abs(t_lit));
    out.defect = theta_dev;
    if (theta_dev > 1e-10) {
        out.ok = false;
        out.why = "tan(theta) deviates from the product formula by " + std::to_string(theta_dev);
        return out;
    }
    for (int j = 1; j < c.m; ++j) {
        double prefix = 0.0;
        for (int k = 1; k <= j; ++k) prefix += c.gN(k) * c.gN(k);
        if (prefix == 0.0) {
            if (a.phis[j - 1] != std::numbers::pi / 2) {
                out.ok = false;
                out.why = "phi_" + std::to_string(j) + " != pi/2 at vanishing denominator";
                return out;
            }
            continue;
        }
        const double p_lit = tan_phi_literal(c, f, j);
        const double p_here = std::tan(a.phis[j - 1]);
        const double dev = std::abs(p_here - p_lit) / std::max(1.0, std::abs(p_lit));
        out.defect = std::max(out.defect, dev);
        if (dev > 1e-10) {
            out.ok = false;
            out.why = "tan(phi_" + std::to_string(j) + ") deviates by " + std::to_string(dev);
            return out;
        }
    }

    // theta monotone decreasing in f
    const MixingAngles a2 = mixing_angles(c, 2.0 * f);
    if (a2.theta > a.theta) {
        out.ok = false;
        out.why = "theta not monotone decreasing in f";
    }
    return out;
}

inline CheckOutcome check_split_case(const SubEnsembleConfig& c, double f, bool expect_bitexact) {
    CheckOutcome out;
    const Eigen::MatrixXd h = hamiltonian_matrix(c, f);
    const auto [h0, h1] = split_hamiltonian(c, f);
    const double residual = (h0 + h1 - h).cwiseAbs().maxCoeff();
    out.defect = residual;
    if (expect_bitexact ? residual != 0.0 : residual > 1e-14) {
        out.ok = false;
        out.why = "h0 + h1 - h residual = " + std::to_string(residual);
        return out;
    }
    if (c.homogeneous() && h1.cwiseAbs().maxCoeff() != 0.0) {
        out.ok = false;
        out.why = "homogeneous config but h1 != 0";
        return out;
    }
    // h1 may only carry photon-row and control couplings
    const int m = c.m;
    for (int r = 0; r < h1.rows(); ++r)
        for (int col = 0; col < h1.cols(); ++col) {
            const bool photon_block = (r == 0 && col >= 1 && col <= m) ||
                                      (col == 0 && r >= 1 && r <= m);
            const bool control_block = (r >= 1 && r <= m && col == r + m) ||
                                       (col >= 1 && col <= m && r == col + m);
            if (!photon_block && !control_block && h1(r, col) != 0.0) {
                out.ok = false;
                out.why = "h1 has support outside the coupling blocks";
                return out;
            }
        }
    return out;
}

inline CheckOutcome check_propagator_case(const SubEnsembleConfig& c,
                                          const ControlSchedule& schedule) {
    CheckOutcome out;
    const Propagator prop = evolve_modes(c, schedule);
    out.defect = prop.unitarity_defect;
    if (prop.unitarity_defect > kUnitarityTol) {
        out.ok = false;
        out.why = "unitarity defect " + std::to_string(prop.unitarity_defect);
        return out;
    }
    for (const Eigen::MatrixXcd& u : prop.matrices) {
        const double dev = std::abs(u.col(0).norm() - 1.0);
        out.defect = std::max(out.defect, dev);
        if (dev > 1e-10) {
            out.ok = false;
            out.why = "excitation-number drift " + std::to_string(dev);
            return out;
        }
    }
    if (c.homogeneous()) {
        const Propagator prop0 = evolve_modes(c, schedule, 0, /*use_homogeneous=*/true);
        const double diff = (prop.final() - prop0.final()).cwiseAbs().maxCoeff();
        if (diff != 0.0) {
            out.ok = false;
            out.why = "homogeneous U and U0 differ (code paths diverged)";
        }
    }
    return out;
}

inline CheckOutcome check_leakage_case(const SubEnsembleConfig& c,
                                       const ControlSchedule& schedule) {
    CheckOutcome out;
    const LeakageReport r = leakage(c, schedule, InputState::single_photon());
    out.defect = r.xi;
    if (r.xi < 0.0 || r.xi > 1.0 + 1e-12) {
        out.ok = false;
        out.why = "xi outside [0, 1]: " + std::to_string(r.xi);
        return out;
    }
    if (std::abs((1.0 - std::norm(r.overlap)) - r.xi) > 1e-14 && r.xi > 0.0) {
        out.ok = false;
        out.why = "xi does not match 1 - |overlap|^2";
        return out;
    }
    if (c.homogeneous() && r.xi > 1e-12) {
        out.ok = false;
        out.why = "homogeneous config leaked xi = " + std::to_string(r.xi);
    }
    return out;
}

// xi is a unit-convention invariant: scaling every Hamiltonian frequency by
// s with time scaled by 1/s leaves it unchanged.  With g and w both scaled
// by s, the peak ratio must drop by s (the envelope scale already follows
// g0 sqrtN, and the control weight carries its own factor), giving
// Omega'(t) = s Omega(st) and g' sqrtN = s g sqrtN.
inline CheckOutcome check_rescaling_case(const SubEnsembleConfig& c,
                                         const ControlSchedule& schedule, double scale) {
    CheckOutcome out;
    const LeakageReport base = leakage(c, schedule, InputState::single_photon());

    std::vector<double> g(c.probe_couplings), w(c.control_weights);
    for (double& x : g) x *= scale;
    for (double& x : w) x *= scale;
    const SubEnsembleConfig scaled = SubEnsembleConfig::from_couplings(c.atom_counts, g, w);
    ControlSchedule sched2 = schedule;
    sched2.ramp_time = schedule.ramp_time / scale;
    sched2.peak = schedule.peak / scale;
    const LeakageReport other = leakage(scaled, sched2, InputState::single_photon());

    out.defect = std::abs(base.xi - other.xi);
    if (out.defect > 1e-7) {
        out.ok = false;
        out.why = "xi not invariant under coupling/time rescaling: |dxi| = " +
                  std::to_string(out.defect);
    }
    return out;
}

inline CheckOutcome check_reversibility_case(const SubEnsembleConfig& c,
                                             const ControlSchedule& schedule) {
    CheckOutcome out;
    ControlSchedule sto = schedule;
    sto.direction = Direction::storage;
    ControlSchedule ret = schedule;
    ret.direction = Direction::retrieval;
    const RoundtripReport r =
        roundtrip_fidelity(c, sto, 0.0, ret, InputState::single_photon());
    out.defect = 1.0 - r.fidelity;
    if (r.mid_xi > 0.3) {
        out.ok = false;
        out.why = "mid-storage leakage beyond the tested range: " + std::to_string(r.mid_xi);
        return out;
    }
    if (1.0 - r.fidelity > 1e-3) {
        out.ok = false;
        out.why = "roundtrip infidelity " + std::to_string(1.0 - r.fidelity) +
                  " with mid xi " + std::to_string(r.mid_xi);
    }
    return out;
}

inline CheckOutcome check_oracle_algebra_case(int n_atoms, const std::vector<int>& partition,
                                              std::mt19937_64& rng) {
    CheckOutcome out;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    ExactRegister reg;
    reg.atom_count = n_atoms;
    reg.n_max = 1;
    reg.n_exc = 2;
    for (int j = 0; j < n_atoms; ++j) {
        reg.probe_couplings.push_back(0.2 + u01(rng));
        reg.control_weights.push_back(0.5 + u01(rng));
    }
    const ExactHamiltonian H = build_exact(reg);

    const double herm = (H.G - H.G.adjoint()).cwiseAbs().maxCoeff() +
                        (H.W - H.W.adjoint()).cwiseAbs().maxCoeff();
    if (herm != 0.0) {
        out.ok = false;
        out.why = "H not exactly Hermitian";
        return out;
    }
    // excitation block structure: no matrix element between sectors
    for (int r = 0; r < H.basis.dim(); ++r)
        for (int col = 0; col < H.basis.dim(); ++col)
            if ((H.G(r, col) != std::complex<double>(0.0, 0.0) ||
                 H.W(r, col) != std::complex<double>(0.0, 0.0)) &&
                H.basis.excitation(r) != H.basis.excitation(col)) {
                out.ok = false;
                out.why = "H mixes excitation sectors";
                return out;
            }

    // su(2) per group with Tz = sum (sigma_aa - sigma_cc)/2:
    //   [T+_i, T-_j] = 2 delta_ij Tz_j,  [Tz_i, T+-_j] = +- delta_ij T+-_j
    // (integer matrix arithmetic at zero phases, so bit-exact)
    const CollectiveOps ops = collective_operators(H.basis, reg, partition);
    const int m = static_cast<int>(partition.size());
    const Eigen::MatrixXcd zero = Eigen::MatrixXcd::Zero(H.basis.dim(), H.basis.dim());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const Eigen::MatrixXcd comm_pm =
                ops.T_plus[i] * ops.T_minus[j] - ops.T_minus[j] * ops.T_plus[i];
            const Eigen::MatrixXcd expect_pm = (i == j) ? (2.0 * ops.T_z[j]).eval() : zero;
            const double dev_pm = (comm_pm - expect_pm).cwiseAbs().maxCoeff();

            const Eigen::MatrixXcd comm_zp =
                ops.T_z[i] * ops.T_plus[j] - ops.T_plus[j] * ops.T_z[i];
            const Eigen::MatrixXcd expect_zp = (i == j) ? ops.T_plus[j] : zero;
            const double dev_zp = (comm_zp - expect_zp).cwiseAbs().maxCoeff();

            out.defect = std::max({out.defect, dev_pm, dev_zp});
            if (dev_pm != 0.0 || dev_zp != 0.0) {
                out.ok = false;
                out.why = "group commutators deviate from the su(2) relations (bit-exact check)";
                return out;
            }
        }
    return out;
}

// ---- suites ----------------------------------------------------------------

namespace detail {

inline void fold(SuiteResult& suite, const CheckOutcome& out, const VerifyCase& vc) {
    suite.cases += 1;
    suite.worst_defect = std::max(suite.worst_defect, out.defect);
    if (!out.ok && suite.passed) {
        suite.passed = false;
        suite.detail = out.why;
        suite.counterexample = vc;
    }
}

}  // namespace detail

inline SuiteResult suite_dark_kernel(std::uint64_t seed, int cases = 1000) {
    SuiteResult s{"dark-kernel"};
    std::mt19937_64 rng(seed ^ 0x1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < cases; ++i) {
        const SubEnsembleConfig c = random_config(rng);
        const double f = (i % 5 == 0) ? 0.0 : 10.0 * u01(rng);
        detail::fold(s, check_dark_kernel_case(c, f), {c, f, std::nullopt});
    }
    return s;
}

inline SuiteResult suite_mixing_angles(std::uint64_t seed, int cases = 500) {
    SuiteResult s{"mixing-angles"};
    std::mt19937_64 rng(seed ^ 0x2);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < cases; ++i) {
        const SubEnsembleConfig c = random_config(rng);
        const double f = (i % 7 == 0) ? 0.0 : 0.05 + 10.0 * u01(rng);
        detail::fold(s, check_mixing_angles_case(c, f), {c, f, std::nullopt});
    }
    return s;
}

inline SuiteResult suite_split_identity(std::uint64_t seed, int cases = 500) {
    SuiteResult s{"split-identity"};
    std::mt19937_64 rng(seed ^ 0x3);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < cases; ++i) {
        // bounded spread keeps every entry within a factor two of its
        // reference, where the subtraction h - h0 is exact
        const SubEnsembleConfig c = random_dynamic_config(rng, 8, 0.45);
        const double f = 10.0 * u01(rng);
        detail::fold(s, check_split_case(c, f, /*expect_bitexact=*/true), {c, f, std::nullopt});
    }
    return s;
}

inline SuiteResult suite_propagator(std::uint64_t seed, int cases = 5) {
    SuiteResult s{"propagator"};
    std::mt19937_64 rng(seed ^ 0x4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < cases; ++i) {
        SubEnsembleConfig c = random_dynamic_config(rng, 3, 0.5);
        if (i == 0) {  // pin one homogeneous case for the U == U0 identity
            c = random_dynamic_config(rng, 3, 0.0);
        }
        ControlSchedule sched;
        sched.direction = (i % 2 == 0) ? Direction::storage : Direction::retrieval;
        sched.ramp_time = 8.0 + 8.0 * u01(rng);
        sched.peak = 2.0 + 8.0 * u01(rng);
        detail::fold(s, check_propagator_case(c, sched), {c, 0.0, sched});
    }
    return s;
}

inline SuiteResult suite_leakage(std::uint64_t seed, int cases = 4) {
    SuiteResult s{"leakage"};
    std::mt19937_64 rng(seed ^ 0x5);
    for (int i = 0; i < cases; ++i) {
        const SubEnsembleConfig c =
            (i == 0) ? random_dynamic_config(rng, 3, 0.0) : random_dynamic_config(rng, 3, 0.5);
        ControlSchedule sched;
        sched.direction = Direction::storage;
        sched.ramp_time = 40.0;
        sched.peak = 20.0;
        detail::fold(s, check_leakage_case(c, sched), {c, 0.0, sched});
    }
    return s;
}

inline SuiteResult suite_rescaling(std::uint64_t seed, int cases = 2) {
    SuiteResult s{"rescaling"};
    std::mt19937_64 rng(seed ^ 0x8);
    for (int i = 0; i < cases; ++i) {
        const SubEnsembleConfig c = random_dynamic_config(rng, 2, 0.4);
        ControlSchedule sched;
        sched.direction = Direction::storage;
        sched.ramp_time = 30.0;
        sched.peak = 10.0;
        detail::fold(s, check_rescaling_case(c, sched, 2.0), {c, 0.0, sched});
    }
    return s;
}

inline SuiteResult suite_oracle_algebra(std::uint64_t seed) {
    SuiteResult s{"oracle-algebra"};
    std::mt19937_64 rng(seed ^ 0x6);
    const std::vector<std::pair<int, std::vector<int>>> cases = {
        {3, {3}}, {5, {2, 3}}, {8, {3, 5}}, {8, {8}}};
    for (const auto& [n, partition] : cases)
        detail::fold(s, check_oracle_algebra_case(n, partition, rng),
                     {SubEnsembleConfig::from_couplings({1}, {1.0}, {1.0}), 0.0, std::nullopt});
    return s;
}

inline SuiteResult suite_reversibility(std::uint64_t seed, int cases = 2) {
    SuiteResult s{"reversibility"};
    std::mt19937_64 rng(seed ^ 0x7);
    for (int i = 0; i < cases; ++i) {
        const SubEnsembleConfig c = random_dynamic_config(rng, 2, 0.5);
        ControlSchedule sched;
        sched.direction = Direction::roundtrip;
        sched.ramp_time = 200.0;
        sched.peak = 20.0;
        detail::fold(s, check_reversibility_case(c, sched), {c, 0.0, sched});
    }
    return s;
}

inline std::vector<SuiteResult> run_verify_suites(std::uint64_t seed) {
    return {suite_dark_kernel(seed), suite_mixing_angles(seed),  suite_split_identity(seed),
            suite_propagator(seed),  suite_leakage(seed),        suite_rescaling(seed),
            suite_oracle_algebra(seed), suite_reversibility(seed)};
}

// Replays a serialized counterexample through its suite's single-case check.
inline CheckOutcome replay_case(const std::string& suite, const VerifyCase& vc) {
    if (suite == "dark-kernel") return check_dark_kernel_case(vc.config, vc.f);
    if (suite == "mixing-angles") return check_mixing_angles_case(vc.config, vc.f);
    if (suite == "split-identity") return check_split_case(vc.config, vc.f, true);
    if (suite == "propagator") {
        if (!vc.schedule) throw std::invalid_argument("replay: propagator case needs a schedule");
        return check_propagator_case(vc.config, *vc.schedule);
    }
    if (suite == "leakage") {
        if (!vc.schedule) throw std::invalid_argument("replay: leakage case needs a schedule");
        return check_leakage_case(vc.config, *vc.schedule);
    }
    if (suite == "rescaling") {
        if (!vc.schedule) throw std::invalid_argument("replay: rescaling case needs a schedule");
        return check_rescaling_case(vc.config, *vc.schedule, 2.0);
    }
    if (suite == "reversibility") {
        if (!vc.schedule)
            throw std::invalid_argument("replay: reversibility case needs a schedule");
        return check_reversibility_case(vc.config, *vc.schedule);
    }
    throw std::invalid_argument("replay: unknown suite '" + suite + "'");
}

}  // namespace eitmem
