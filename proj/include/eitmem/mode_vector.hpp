#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace eitmem {

// Complex amplitude vector over the 2m+1 bosonic modes.
// Layout: index 0 = photon mode a, 1..m = A_sigma, m+1..2m = C_sigma.
struct ModeVector {
    Eigen::VectorXcd amplitudes;
    int m = 0;
    bool normalized = false;

    ModeVector() = default;
    ModeVector(int m_, Eigen::VectorXcd amps, bool normed = false)
        : amplitudes(std::move(amps)), m(m_), normalized(normed) {
        if (amplitudes.size() != 2 * m + 1)
            throw std::invalid_argument("ModeVector: amplitude length must be 2m+1");
    }

    std::complex<double> photon() const { return amplitudes[0]; }
    std::complex<double> A(int sigma) const { return amplitudes[sigma]; }          // 1-based
    std::complex<double> C(int sigma) const { return amplitudes[m + sigma]; }      // 1-based
    double norm() const { return amplitudes.norm(); }
};

}  // namespace eitmem
