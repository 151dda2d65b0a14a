// Single-excitation matrices of the bosonized interaction Hamiltonian and
// its homogeneous/inhomogeneous split.  The full generator is linear in the
// control envelope, h(f) = G + f*W, which the propagator exploits.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "config.hpp"

namespace eitmem {

// h(f) = G + f*W with G the photon<->A couplings and W the unit-envelope
// control couplings A<->C.  Both are real symmetric.
struct CouplingBlocks {
    Eigen::MatrixXd G;  // G[0][s] = G[s][0] = g_s sqrt(N_s)
    Eigen::MatrixXd W;  // W[s][m+s] = W[m+s][s] = w_s
};

inline CouplingBlocks coupling_blocks(const SubEnsembleConfig& c, bool use_homogeneous = false) {
    const int m = c.m, d = c.dim();
    CouplingBlocks b{Eigen::MatrixXd::Zero(d, d), Eigen::MatrixXd::Zero(d, d)};
    for (int s = 1; s <= m; ++s) {
        const double sqn = std::sqrt(static_cast<double>(c.atom_counts[s - 1]));
        const double g = use_homogeneous ? c.g0 * sqn : c.gN(s);
        const double w = use_homogeneous ? c.omega0_weight : c.control_weights[s - 1];
        b.G(0, s) = b.G(s, 0) = g;
        b.W(s, m + s) = b.W(m + s, s) = w;
    }
    return b;
}

inline Eigen::MatrixXd hamiltonian_matrix(const SubEnsembleConfig& c, double f) {
    if (f < 0.0 || !std::isfinite(f))
        throw std::invalid_argument("hamiltonian_matrix: control envelope must be finite and >= 0");
    const CouplingBlocks b = coupling_blocks(c);
    return b.G + f * b.W;
}

// h0 from the uniform references (g0, omega0_weight), h1 = h - h0 so the
// identity h0 + h1 == h is definitional.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> split_hamiltonian(const SubEnsembleConfig& c,
                                                                     double f) {
    const Eigen::MatrixXd h = hamiltonian_matrix(c, f);
    const CouplingBlocks b0 = coupling_blocks(c, /*use_homogeneous=*/true);
    Eigen::MatrixXd h0 = b0.G + f * b0.W;
    Eigen::MatrixXd h1 = h - h0;
    return {std::move(h0), std::move(h1)};
}

}  // namespace eitmem
