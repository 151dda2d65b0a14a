// Fixed-photon-number lift of a quadratic, number-conserving mode
// Hamiltonian.  For single-particle h over d modes, the n-excitation sector
// basis is the set of occupation tuples (n_0..n_{d-1}) with sum n, and the
// lifted matrix represents sum_{ij} h_ij b_i^dag b_j there.  Lifting is
// linear, so the envelope structure G + f(t) W carries over term by term.
// Used as the brute-force route against the closed-form overlaps and for
// few-photon model comparisons.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "propagator.hpp"

namespace eitmem {

struct FockSector {
    int modes = 0;
    int excitations = 0;
    std::vector<std::vector<int>> occupations;       // basis tuples
    std::map<std::vector<int>, int> index;

    static FockSector build(int modes, int excitations) {
        if (modes < 1 || excitations < 0)
            throw std::invalid_argument("FockSector: need modes >= 1, excitations >= 0");
        FockSector s;
        s.modes = modes;
        s.excitations = excitations;
        std::vector<int> occ(modes, 0);
        enumerate(s, occ, 0, excitations);
        for (int i = 0; i < static_cast<int>(s.occupations.size()); ++i)
            s.index[s.occupations[i]] = i;
        return s;
    }

    int dim() const { return static_cast<int>(occupations.size()); }

    // Basis index of |n, 0, ..., 0> (all excitations in mode 0).
    int photon_column() const {
        std::vector<int> occ(modes, 0);
        occ[0] = excitations;
        return index.at(occ);
    }

    // Lift of sum_{ij} h_ij b_i^dag b_j to this sector.
    Eigen::MatrixXcd lift(const Eigen::MatrixXcd& h) const {
        if (h.rows() != modes || h.cols() != modes)
            throw std::invalid_argument("FockSector::lift: dimension mismatch");
        const int n = dim();
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
        for (int col = 0; col < n; ++col) {
            const std::vector<int>& occ = occupations[col];
            for (int j = 0; j < modes; ++j) {
                if (occ[j] == 0) continue;
                for (int i = 0; i < modes; ++i) {
                    if (h(i, j) == std::complex<double>(0.0, 0.0)) continue;
                    if (i == j) {
                        H(col, col) += h(j, j) * static_cast<double>(occ[j]);
                        continue;
                    }
                    std::vector<int> moved = occ;
                    moved[j] -= 1;
                    moved[i] += 1;
                    const double amp = std::sqrt(static_cast<double>(occ[j]) *
                                                 static_cast<double>(moved[i]));
                    H(index.at(moved), col) += h(i, j) * amp;
                }
            }
        }
        return H;
    }

  private:
    static void enumerate(FockSector& s, std::vector<int>& occ, int mode, int remaining) {
        if (mode == s.modes - 1) {
            occ[mode] = remaining;
            s.occupations.push_back(occ);
            return;
        }
        for (int k = remaining; k >= 0; --k) {
            occ[mode] = k;
            enumerate(s, occ, mode + 1, remaining - k);
        }
        occ[mode] = 0;
    }
};

// Propagates |n, 0, ..., 0> through the sector lift of G + f(t) W with the
// same stepper and refinement gates as the mode-space propagator.  Returns
// the final sector state.
inline Eigen::VectorXcd propagate_fock_sector(const FockSector& sector,
                                              const EnvelopeGenerator& gen_modes,
                                              double refine_tol = kRefineTol) {
    EnvelopeGenerator gen;
    gen.G = sector.lift(gen_modes.G);
    gen.W = sector.lift(gen_modes.W);
    gen.f = gen_modes.f;
    gen.duration = gen_modes.duration;

    Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(sector.dim());
    psi0[sector.photon_column()] = 1.0;

    double fmax = 0.0;
    const int probes = 64;
    for (int i = 0; i <= probes; ++i)
        fmax = std::max(fmax, gen.f(gen.duration * i / probes));

    auto run_at = [&](long long n) { return detail::run_state(gen, psi0, n, kDefaultSamples); };
    auto output_of = [](const detail::StateRun& r) { return r.states.back(); };
    const long long n0 = detail::auto_steps(gen, fmax, kDefaultSamples);
    const detail::StateRun run = detail::refine<detail::StateRun>(run_at, output_of, n0,
                                                                  kUnitarityTol, refine_tol,
                                                                  "fock-sector");
    return run.states.back();
}

}  // namespace eitmem
