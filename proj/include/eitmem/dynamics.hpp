// Storage and retrieval maps plus the exact state-overlap machinery.
//
// The dynamics is quadratic and number-conserving, so an input that occupies
// only the photon mode evolves into a state fully described by the image of
// the single-excitation basis vector e0: a Fock superposition sum_n C_n |n>
// becomes sum_n C_n (b_u^dag)^n / sqrt(n!) |vac> with u = U e0, a coherent
// alpha becomes the multimode coherent state alpha*u.  Overlaps between two
// such states reduce to closed forms in z = u0^dag u:
//
//   Fock superposition:  <psi0|psi> = sum_n |C_n|^2 z^n
//   coherent:            <psi0|psi> = exp(-|alpha|^2 (1 - z))

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "config.hpp"
#include "input_state.hpp"
#include "propagator.hpp"
#include "schedule.hpp"

namespace eitmem {

inline std::complex<double> overlap_fock(const Eigen::VectorXcd& coefficients,
                                         const Eigen::VectorXcd& u, const Eigen::VectorXcd& u0) {
    if (std::abs(u.norm() - 1.0) > 1e-10 || std::abs(u0.norm() - 1.0) > 1e-10)
        throw std::domain_error("overlap_fock: mode vectors must be normalized");
    if (std::abs(coefficients.squaredNorm() - 1.0) > 1e-12)
        throw std::domain_error("overlap_fock: Fock coefficients must be normalized");
    const std::complex<double> z = (u0 / u0.norm()).dot(u / u.norm());
    std::complex<double> acc = 0.0;
    std::complex<double> zn = 1.0;
    for (int n = 0; n < coefficients.size(); ++n) {
        acc += std::norm(coefficients[n]) * zn;
        zn *= z;
    }
    return acc;
}

// <beta|gamma> for multimode coherent states.
inline std::complex<double> coherent_overlap(const Eigen::VectorXcd& beta,
                                             const Eigen::VectorXcd& gamma) {
    return std::exp(-0.5 * beta.squaredNorm() - 0.5 * gamma.squaredNorm() + beta.dot(gamma));
}

// Overlap of the states built along unit vectors u_ket and u_bra from the
// same photonic input.
inline std::complex<double> state_overlap(const InputState& input, const Eigen::VectorXcd& u_ket,
                                          const Eigen::VectorXcd& u_bra) {
    if (input.kind == InputState::Kind::coherent) {
        const std::complex<double> z = (u_bra / u_bra.norm()).dot(u_ket / u_ket.norm());
        return std::exp(-std::norm(input.alpha) * (1.0 - z));
    }
    return overlap_fock(input.fock_coefficients, u_ket, u_bra);
}

// End-of-storage record: the true and homogeneous-reference images of the
// photon mode, from which every n-photon and coherent quantity follows.
struct StoredState {
    SubEnsembleConfig config;
    ControlSchedule schedule;
    InputState input;
    Eigen::VectorXcd u;   // U(T) e0
    Eigen::VectorXcd u0;  // U0(T) e0
    std::complex<double> z{1.0, 0.0};  // u0^dag u, normalized

    // Coherent amplitudes alpha_k = alpha * u_k (true / reference).
    Eigen::VectorXcd coherent_amplitudes() const { return input.alpha * u; }
    Eigen::VectorXcd reference_amplitudes() const { return input.alpha * u0; }
};

inline StoredState storage_map(const SubEnsembleConfig& config, const ControlSchedule& schedule,
                               const InputState& input, long long initial_steps = 0) {
    if (schedule.direction != Direction::storage)
        throw std::invalid_argument("storage_map: schedule direction must be storage");
    input.validate();

    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(config.dim());
    e0[0] = 1.0;
    const Propagator prop = evolve_modes(config, schedule, initial_steps, false);
    const Propagator prop0 = config.homogeneous()
                                 ? prop
                                 : evolve_modes(config, schedule, initial_steps, true);

    StoredState s{config, schedule, input, prop.final() * e0, prop0.final() * e0,
                  {0.0, 0.0}};
    s.z = (s.u0 / s.u0.norm()).dot(s.u / s.u.norm());
    return s;
}

struct RetrievalResult {
    Eigen::VectorXcd released;       // retrieval propagator applied to the stored vector
    double photon_weight = 0.0;      // |released[0]|^2 / ||released||^2
    std::complex<double> photon_amplitude{0.0, 0.0};
};

inline RetrievalResult retrieval_map(const SubEnsembleConfig& config,
                                     const ControlSchedule& schedule,
                                     const Eigen::VectorXcd& stored,
                                     long long initial_steps = 0) {
    if (schedule.direction != Direction::retrieval)
        throw std::invalid_argument("retrieval_map: schedule direction must be retrieval");
    if (stored.size() != config.dim())
        throw std::domain_error("retrieval_map: stored vector dimension does not match config");

    const Propagator prop = evolve_modes(config, schedule, initial_steps, false);
    RetrievalResult r;
    r.released = prop.final() * stored;
    r.photon_amplitude = r.released[0];
    r.photon_weight = std::norm(r.released[0]) / r.released.squaredNorm();
    return r;
}

inline RetrievalResult retrieval_map(const SubEnsembleConfig& config,
                                     const ControlSchedule& schedule, const StoredState& stored,
                                     long long initial_steps = 0) {
    return retrieval_map(config, schedule, stored.u, initial_steps);
}

}  // namespace eitmem
