#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace eitmem {

// Initial probe-field state: a photon-number superposition sum_n C_n |n>
// or a coherent state |alpha>.  The atoms always start in the collective
// ground state.
struct InputState {
    enum class Kind { fock_superposition, coherent };
    Kind kind = Kind::fock_superposition;
    Eigen::VectorXcd fock_coefficients;  // index n = photon number
    std::complex<double> alpha{0.0, 0.0};

    static InputState single_photon() {
        InputState s;
        s.fock_coefficients = Eigen::VectorXcd::Zero(2);
        s.fock_coefficients[1] = 1.0;
        return s;
    }

    static InputState fock_number(int n) {
        if (n < 0) throw std::invalid_argument("input: photon number must be >= 0");
        InputState s;
        s.fock_coefficients = Eigen::VectorXcd::Zero(n + 1);
        s.fock_coefficients[n] = 1.0;
        return s;
    }

    static InputState fock(std::vector<std::complex<double>> coeffs) {
        InputState s;
        s.fock_coefficients = Eigen::Map<Eigen::VectorXcd>(coeffs.data(),
                                                           static_cast<int>(coeffs.size()));
        s.validate();
        return s;
    }

    static InputState coherent(std::complex<double> alpha) {
        InputState s;
        s.kind = Kind::coherent;
        s.alpha = alpha;
        return s;
    }

    void validate() const {
        if (kind == Kind::fock_superposition) {
            if (fock_coefficients.size() == 0)
                throw std::invalid_argument("input: empty Fock coefficient list");
            if (std::abs(fock_coefficients.squaredNorm() - 1.0) > 1e-12)
                throw std::invalid_argument("input: Fock coefficients must be normalized");
        }
    }

    // Largest photon number with nonzero amplitude (coherent: unbounded, -1).
    int max_photons() const {
        if (kind == Kind::coherent) return -1;
        for (int n = static_cast<int>(fock_coefficients.size()) - 1; n >= 0; --n)
            if (fock_coefficients[n] != std::complex<double>(0.0, 0.0)) return n;
        return 0;
    }
};

}  // namespace eitmem
