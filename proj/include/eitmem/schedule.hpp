// Time-dependent control envelopes.  The stored peak is the ratio
// Omega_max / (g0 sqrt(N)); the physical envelope f(t) is obtained by
// scaling the unit profile with peak * g0 sqrt(N) of the config at hand,
// so adiabaticity thresholds do not depend on the unit convention.

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eitmem {

enum class Direction { storage, retrieval, roundtrip };
enum class EnvelopeShape { raised_cosine, linear, tanh_ramp };

inline std::string to_string(Direction d) {
    switch (d) {
        case Direction::storage: return "storage";
        case Direction::retrieval: return "retrieval";
        case Direction::roundtrip: return "roundtrip";
    }
    return "?";
}

inline std::string to_string(EnvelopeShape s) {
    switch (s) {
        case EnvelopeShape::raised_cosine: return "raised-cosine";
        case EnvelopeShape::linear: return "linear";
        case EnvelopeShape::tanh_ramp: return "tanh";
    }
    return "?";
}

struct ControlSchedule {
    Direction direction = Direction::storage;
    double ramp_time = 0.0;  // T
    double peak = 0.0;       // Omega_max / (g0 sqrt(N))
    EnvelopeShape shape = EnvelopeShape::raised_cosine;
    double hold = 0.0;       // roundtrip only: f = 0 dwell between the ramps

    void validate() const {
        if (!(ramp_time > 0.0) || !std::isfinite(ramp_time))
            throw std::invalid_argument("schedule: ramp_time must be positive");
        if (!(peak > 0.0) || !std::isfinite(peak))
            throw std::invalid_argument("schedule: peak must be positive");
        if (hold < 0.0 || !std::isfinite(hold))
            throw std::invalid_argument("schedule: hold must be >= 0");
    }

    double duration() const {
        return direction == Direction::roundtrip ? 2.0 * ramp_time + hold : ramp_time;
    }

    // Unit profile in [0, 1].  Storage runs peak -> 0 over [0, T]; retrieval
    // is the mirror image; roundtrip is storage, hold at zero, retrieval.
    double envelope01(double t) const {
        const double T = ramp_time;
        switch (direction) {
            case Direction::storage: return ramp_down01(t / T);
            case Direction::retrieval: return ramp_down01(1.0 - t / T);
            case Direction::roundtrip:
                if (t <= T) return ramp_down01(t / T);
                if (t <= T + hold) return 0.0;
                return ramp_down01(1.0 - (t - T - hold) / T);
        }
        return 0.0;
    }

  private:
    // Monotone profile with value 1 at x = 0 and exactly 0 at x >= 1.
    double ramp_down01(double x) const {
        if (x <= 0.0) return 1.0;
        if (x >= 1.0) return 0.0;
        switch (shape) {
            case EnvelopeShape::raised_cosine: {
                const double c = std::cos(std::numbers::pi * x / 2.0);
                return c * c;
            }
            case EnvelopeShape::linear: return 1.0 - x;
            case EnvelopeShape::tanh_ramp: {
                const double s = 2.5;  // steepness; endpoints pinned exactly below
                const double th = std::tanh(s);
                return (std::tanh(s * (1.0 - 2.0 * x)) + th) / (2.0 * th);
            }
        }
        return 0.0;
    }
};

}  // namespace eitmem
