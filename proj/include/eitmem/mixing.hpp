// Mixing angles of the non-symmetric dark mode and the dark mode itself.
//
// With Omega_sigma = w_sigma * f, the angle formulas reduce to functions of
// the control-relative couplings v_sigma = g_sigma*sqrt(N_sigma)/w_sigma:
//
//   tan(theta)  = |v| / f
//   tan(phi_j)  = v_{j+1} / sqrt(v_1^2 + ... + v_j^2)
//
// so the phi chain is independent of f and the f = 0 limit is the continuous
// extension theta = pi/2.  The chain products telescope to the normalized
// v vector, which is what makes the dark mode annihilate the Hamiltonian.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "config.hpp"
#include "mode_vector.hpp"

namespace eitmem {

struct MixingAngles {
    double theta = 0.0;              // in [0, pi/2]
    std::vector<double> phis;        // m-1 entries, each in [0, pi/2]
};

namespace detail {

// Control-relative coupling weights v_sigma = g_sigma sqrt(N_sigma) / w_sigma.
inline std::vector<double> control_relative_weights(const SubEnsembleConfig& c) {
    std::vector<double> v(c.m);
    for (int s = 1; s <= c.m; ++s) v[s - 1] = c.gN(s) / c.control_weights[s - 1];
    return v;
}

// (cos, sin) of each phi_j with the exact pi/2 convention when the prefix
// norm vanishes (all earlier g_k sqrt(N_k) zero).
inline void phi_trig(const std::vector<double>& v, std::vector<double>& cphi,
                     std::vector<double>& sphi) {
    const int m = static_cast<int>(v.size());
    cphi.assign(m > 0 ? m - 1 : 0, 1.0);
    sphi.assign(m > 0 ? m - 1 : 0, 0.0);
    double prefix = v.empty() ? 0.0 : std::abs(v[0]);  // sqrt(sum of v_k^2, k<=j)
    for (int j = 0; j + 1 < m; ++j) {
        const double next = std::hypot(prefix, v[j + 1]);
        if (next == 0.0) {
            cphi[j] = 0.0;  // phi_j = pi/2 by convention
            sphi[j] = 1.0;
        } else {
            cphi[j] = prefix / next;
            sphi[j] = v[j + 1] / next;
        }
        prefix = next;
    }
}

}  // namespace detail

inline MixingAngles mixing_angles(const SubEnsembleConfig& config, double f) {
    if (f < 0.0 || !std::isfinite(f))
        throw std::invalid_argument("mixing_angles: control envelope must be finite and >= 0");
    const std::vector<double> v = detail::control_relative_weights(config);
    double vnorm = 0.0;
    for (double x : v) vnorm = std::hypot(vnorm, x);
    if (vnorm == 0.0 && f == 0.0)
        throw std::domain_error("degenerate: no coupling");

    MixingAngles a;
    a.theta = (f == 0.0) ? std::numbers::pi / 2 : std::atan(vnorm / f);

    std::vector<double> cphi, sphi;
    detail::phi_trig(v, cphi, sphi);
    a.phis.resize(cphi.size());
    for (std::size_t j = 0; j < cphi.size(); ++j) a.phis[j] = std::atan2(sphi[j], cphi[j]);
    return a;
}

// Dark-mode amplitude vector:
//   a component      cos(theta)
//   A_sigma          0
//   C_1              -sin(theta) * prod_{j=1..m-1} cos(phi_j)
//   C_k (k >= 2)     -sin(theta) * sin(phi_{k-1}) * prod_{j=k..m-1} cos(phi_j)
inline ModeVector dark_mode_vector(const SubEnsembleConfig& config, double f) {
    if (f < 0.0 || !std::isfinite(f))
        throw std::invalid_argument("dark_mode_vector: control envelope must be finite and >= 0");
    const std::vector<double> v = detail::control_relative_weights(config);
    double vnorm = 0.0;
    for (double x : v) vnorm = std::hypot(vnorm, x);
    if (vnorm == 0.0 && f == 0.0)
        throw std::domain_error("degenerate: no coupling");

    // Exact endpoints: f = 0 gives (cos, sin) = (0, 1).
    const double hyp = std::hypot(f, vnorm);
    const double ctheta = (vnorm == 0.0) ? 1.0 : f / hyp;
    const double stheta = (vnorm == 0.0) ? 0.0 : vnorm / hyp;

    std::vector<double> cphi, sphi;
    detail::phi_trig(v, cphi, sphi);

    const int m = config.m;
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(2 * m + 1);
    amps[0] = ctheta;
    // suffix[k] = prod_{j=k..m-1} cos(phi_j), 1-based k, suffix[m] = 1
    std::vector<double> suffix(static_cast<std::size_t>(m) + 1, 1.0);
    for (int k = m - 1; k >= 1; --k) suffix[k] = cphi[k - 1] * suffix[k + 1];
    amps[m + 1] = -stheta * suffix[1];
    for (int k = 2; k <= m; ++k) amps[m + k] = -stheta * sphi[k - 2] * suffix[k];

    return ModeVector(m, std::move(amps), true);
}

}  // namespace eitmem
