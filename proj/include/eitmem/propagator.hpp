// Time-ordered propagation of i dU/dt = h(t) U for generators that are
// linear in the control envelope, h(t) = G + f(t) W.
//
// Each step takes the exponential of the fourth-order Magnus exponent at the
// two-point Gauss nodes.  Because [G + f2 W, G + f1 W] = (f1 - f2) [G, W],
// the commutator term costs one precomputed matrix:
//
//   U(t+dt, t) = exp(-i M),
//   M = dt (G + (f1+f2)/2 W) + i (sqrt(3) dt^2 / 12)(f2 - f1) [G, W]
//
// M is Hermitian, so every step is unitary up to the accuracy of the matrix
// exponential (Pade scaling-and-squaring for small dimensions, a scaled
// Taylor product applied to the state vector for large ones).  Step counts
// are doubled until the unitarity defect and the output-vector change
// between refinements pass their gates.

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"
#include "hamiltonian.hpp"
#include "schedule.hpp"

namespace eitmem {

struct PropagationError : std::runtime_error {
    double last_defect;
    double last_delta;
    PropagationError(const std::string& msg, double defect, double delta)
        : std::runtime_error(msg), last_defect(defect), last_delta(delta) {}
};

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kRefineTol = 1e-9;
inline constexpr int kMaxDoublings = 12;
inline constexpr int kDefaultSamples = 257;  // saved U(t) checkpoints per phase

// Generator H(t) = G + f(t) W over t in [0, duration].
struct EnvelopeGenerator {
    Eigen::MatrixXcd G;
    Eigen::MatrixXcd W;
    std::function<double(double)> f;
    double duration = 0.0;
};

struct Propagator {
    std::vector<double> times;                // sample times, front() == 0
    std::vector<Eigen::MatrixXcd> matrices;   // U(times[i]); matrices[0] == I
    double unitarity_defect = 0.0;            // max over samples of ||U^H U - I||_F
    long long steps = 0;                      // accepted step count
    const Eigen::MatrixXcd& final() const { return matrices.back(); }
};

namespace detail {

inline long long round_up_multiple(long long n, long long k) {
    return ((n + k - 1) / k) * k;
}

// exp(A) v for skew-Hermitian A via scaled Taylor products; norm-preserving
// to machine precision because each factor is a converged series.
inline Eigen::VectorXcd expm_multiply(const Eigen::MatrixXcd& A, Eigen::VectorXcd v) {
    const double anorm = A.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    double scale = 1.0;
    while (anorm * scale > 0.5 && squarings < 40) {
        scale *= 0.5;
        ++squarings;
    }
    const Eigen::MatrixXcd B = A * scale;
    const long long reps = 1LL << squarings;
    for (long long r = 0; r < reps; ++r) {
        Eigen::VectorXcd term = v;
        Eigen::VectorXcd acc = v;
        for (int k = 1; k <= 40; ++k) {
            term = (B * term) / static_cast<double>(k);
            acc += term;
            if (term.norm() <= 1e-17 * acc.norm()) break;
        }
        v = std::move(acc);
    }
    return v;
}

// Magnus exponent for one step, multiplied by -i (ready for exp()).
struct MagnusStepper {
    const EnvelopeGenerator& gen;
    Eigen::MatrixXcd K;  // [G, W]

    explicit MagnusStepper(const EnvelopeGenerator& g) : gen(g), K(g.G * g.W - g.W * g.G) {}

    Eigen::MatrixXcd exponent(double t, double dt) const {
        static constexpr double c1 = 0.5 - 0.28867513459481287;  // 1/2 -+ sqrt(3)/6
        static constexpr double c2 = 0.5 + 0.28867513459481287;
        const double f1 = gen.f(t + c1 * dt);
        const double f2 = gen.f(t + c2 * dt);
        const std::complex<double> i(0.0, 1.0);
        // -i M = -i dt (G + fbar W) + (sqrt(3) dt^2 / 12)(f2 - f1) K
        Eigen::MatrixXcd A = (-i * dt) * (gen.G + (0.5 * (f1 + f2)) * gen.W);
        const double kappa = std::sqrt(3.0) / 12.0 * dt * dt * (f2 - f1);
        if (kappa != 0.0) A += kappa * K;
        return A;
    }
};

struct UnitaryRun {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> matrices;
    double defect = 0.0;
    long long steps = 0;
};

inline UnitaryRun run_unitary(const EnvelopeGenerator& gen, long long steps, int samples) {
    const int d = static_cast<int>(gen.G.rows());
    const long long stride = steps / (samples - 1);
    const double dt = gen.duration / static_cast<double>(steps);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(d, d);

    MagnusStepper stepper(gen);
    UnitaryRun run;
    run.steps = steps;
    run.times.reserve(samples);
    run.matrices.reserve(samples);
    run.times.push_back(0.0);
    run.matrices.push_back(id);

    Eigen::MatrixXcd U = id;
    for (long long k = 0; k < steps; ++k) {
        const double t = gen.duration * static_cast<double>(k) / static_cast<double>(steps);
        U = stepper.exponent(t, dt).exp() * U;
        if ((k + 1) % stride == 0) {
            run.times.push_back(gen.duration * static_cast<double>(k + 1) /
                                static_cast<double>(steps));
            run.matrices.push_back(U);
            run.defect = std::max(run.defect, (U.adjoint() * U - id).norm());
        }
    }
    return run;
}

struct StateRun {
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    double defect = 0.0;  // max over samples of | ||psi|| - ||psi0|| |
    long long steps = 0;
};

inline StateRun run_state(const EnvelopeGenerator& gen, const Eigen::VectorXcd& psi0,
                          long long steps, int samples) {
    const long long stride = steps / (samples - 1);
    const double dt = gen.duration / static_cast<double>(steps);
    const bool dense_exp = gen.G.rows() <= 64;

    MagnusStepper stepper(gen);
    StateRun run;
    run.steps = steps;
    run.times.reserve(samples);
    run.states.reserve(samples);
    run.times.push_back(0.0);
    run.states.push_back(psi0);

    const double norm0 = psi0.norm();
    Eigen::VectorXcd psi = psi0;
    for (long long k = 0; k < steps; ++k) {
        const double t = gen.duration * static_cast<double>(k) / static_cast<double>(steps);
        const Eigen::MatrixXcd A = stepper.exponent(t, dt);
        psi = dense_exp ? Eigen::VectorXcd(A.exp() * psi) : expm_multiply(A, psi);
        if ((k + 1) % stride == 0) {
            run.times.push_back(gen.duration * static_cast<double>(k + 1) /
                                static_cast<double>(steps));
            run.states.push_back(psi);
            run.defect = std::max(run.defect, std::abs(psi.norm() - norm0));
        }
    }
    return run;
}

// Initial step count targeting ||h|| dt ~ 0.4, rounded so the sample grid
// divides the step grid.
inline long long auto_steps(const EnvelopeGenerator& gen, double fmax, int samples) {
    const double hnorm = gen.G.norm() + fmax * gen.W.norm();
    const double wanted = gen.duration * std::max(4.0, hnorm) / 0.4;
    const long long base = samples - 1;
    return round_up_multiple(std::max<long long>(base, static_cast<long long>(wanted) + 1), base);
}

template <class Run, class RunFn, class OutputFn>
Run refine(RunFn run_at, OutputFn output_of, long long n0, double defect_tol, double delta_tol,
           const char* what) {
    Run prev = run_at(n0);
    double delta = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < kMaxDoublings; ++pass) {
        Run next = run_at(2 * n0);
        delta = (output_of(next) - output_of(prev)).norm();
        if (delta < delta_tol && next.defect <= defect_tol) return next;
        n0 *= 2;
        prev = std::move(next);
    }
    throw PropagationError(std::string("propagation not converged (") + what + ")", prev.defect,
                           delta);
}

}  // namespace detail

// Phase generator for one leg of a schedule (storage or retrieval profile).
inline EnvelopeGenerator make_generator(const SubEnsembleConfig& config,
                                        const ControlSchedule& leg, bool use_homogeneous) {
    const CouplingBlocks blocks = coupling_blocks(config, use_homogeneous);
    const double fmax = leg.peak * config.g0_sqrtN();
    EnvelopeGenerator gen;
    gen.G = blocks.G.cast<std::complex<double>>();
    gen.W = blocks.W.cast<std::complex<double>>();
    gen.f = [leg, fmax](double t) { return fmax * leg.envelope01(t); };
    gen.duration = leg.ramp_time;
    return gen;
}

// Propagator over a full schedule.  Roundtrip schedules are composed as
// storage, an exact-identity hold (the stored state has no control-coupled
// support at f = 0), then retrieval applied on top of the storage map.
inline Propagator evolve_modes(const SubEnsembleConfig& config, const ControlSchedule& schedule,
                               long long initial_steps = 0, bool use_homogeneous = false,
                               int samples = kDefaultSamples) {
    schedule.validate();
    if (initial_steps != 0 && initial_steps < 10)
        throw std::invalid_argument("evolve_modes: initial step count must be >= 10");
    const double fmax = schedule.peak * config.g0_sqrtN();

    auto refine_phase = [&](Direction dir, const Eigen::VectorXcd& probe) {
        ControlSchedule leg = schedule;
        leg.direction = dir;
        leg.hold = 0.0;
        const EnvelopeGenerator gen = make_generator(config, leg, use_homogeneous);
        long long n0 = initial_steps != 0
                           ? detail::round_up_multiple(initial_steps, samples - 1)
                           : detail::auto_steps(gen, fmax, samples);
        auto run_at = [&](long long n) { return detail::run_unitary(gen, n, samples); };
        auto output_of = [&](const detail::UnitaryRun& r) {
            return Eigen::VectorXcd(r.matrices.back() * probe);
        };
        return detail::refine<detail::UnitaryRun>(run_at, output_of, n0, kUnitarityTol, kRefineTol,
                                                  to_string(dir).c_str());
    };

    const int d = config.dim();
    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(d);
    e0[0] = 1.0;

    Propagator prop;
    if (schedule.direction != Direction::roundtrip) {
        detail::UnitaryRun run = refine_phase(schedule.direction, e0);
        prop.times = std::move(run.times);
        prop.matrices = std::move(run.matrices);
        prop.unitarity_defect = run.defect;
        prop.steps = run.steps;
        return prop;
    }

    detail::UnitaryRun sto = refine_phase(Direction::storage, e0);
    const Eigen::MatrixXcd u_mid = sto.matrices.back();
    detail::UnitaryRun ret = refine_phase(Direction::retrieval, Eigen::VectorXcd(u_mid * e0));

    prop.times = sto.times;
    prop.matrices = sto.matrices;
    const double t1 = schedule.ramp_time + schedule.hold;
    if (schedule.hold > 0.0) {
        prop.times.push_back(t1);
        prop.matrices.push_back(u_mid);
    }
    for (std::size_t i = 1; i < ret.times.size(); ++i) {
        prop.times.push_back(t1 + ret.times[i]);
        prop.matrices.push_back(ret.matrices[i] * u_mid);
    }
    prop.unitarity_defect = std::max(sto.defect, ret.defect);
    prop.steps = sto.steps + ret.steps;
    return prop;
}

}  // namespace eitmem
