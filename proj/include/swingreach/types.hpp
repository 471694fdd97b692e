#pragma once

#include <cmath>

namespace swingreach {

/// A point of the (delta, omega) phase plane: rotor angle [rad] and
/// rotor speed deviation [rad/s]. Used both as a dynamical state and
/// as a grid-space location.
struct State {
    double delta = 0.0;
    double omega = 0.0;

    bool operator==(const State&) const = default;
};

/// Time derivative of a State.
struct Deriv {
    double ddelta = 0.0;  // rad/s
    double domega = 0.0;  // rad/s^2
};

/// Breaker controlling the connection of the local load.
/// Closed: load term active. Open: load disconnected.
enum class RelayStatus { Closed, Open };

inline bool is_finite(const State& s) {
    return std::isfinite(s.delta) && std::isfinite(s.omega);
}

}  // namespace swingreach
