#pragma once

#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "swingreach/types.hpp"

namespace swingreach {

/// Physical constants of the single-machine infinite-bus rotor model.
/// Defaults are the study values used throughout the scenario runner.
struct SmibParams {
    double inertia = 0.026;             // M, s^2/rad
    double damping = 0.12;              // D
    double mech_power = 1.0;            // P_m, p.u.
    double max_electric_power = 1.35;   // P_E, p.u.
    double local_load = 0.4;            // P_L, p.u.

    /// Throws std::invalid_argument on nonphysical values.
    void validate() const;

    /// Net constant torque input for the given relay status.
    double net_power(RelayStatus relay) const {
        return mech_power - (relay == RelayStatus::Closed ? local_load : 0.0);
    }

    bool operator==(const SmibParams&) const = default;
};

/// Rectangular operating envelope around the nominal point.
struct SafeBounds {
    double delta_nominal = 0.0;
    double omega_nominal = 0.0;
    double delta_half_width = std::numbers::pi / 2.0;
    double omega_half_width = 6.0;

    /// Nominal angle at the closed-relay stable equilibrium, nominal
    /// speed deviation zero.
    static SafeBounds centered_on_equilibrium(const SmibParams& params);

    double delta_lo() const { return delta_nominal - delta_half_width; }
    double delta_hi() const { return delta_nominal + delta_half_width; }
    double omega_lo() const { return omega_nominal - omega_half_width; }
    double omega_hi() const { return omega_nominal + omega_half_width; }
};

/// Rotor dynamics: delta' = omega,
/// omega' = (P_m - D*omega - P_E*sin(delta) - P_L*[relay closed] + d) / M.
Deriv rhs(const State& x, const SmibParams& params, RelayStatus relay, double d);

struct EquilibriumPair {
    State stable;
    State unstable;
};

/// Real parts of the two rotor Jacobian eigenvalues at x.
std::pair<double, double> jacobian_real_parts(const State& x, const SmibParams& params);

/// Stable and unstable rest points for the given relay status,
/// classified by Jacobian eigenvalues. Throws std::domain_error when
/// the net torque exceeds the maximum electric power (no rest point).
EquilibriumPair equilibria(const SmibParams& params, RelayStatus relay);

/// Closed-interval membership in the safe envelope.
bool in_safe_set(const State& x, const SafeBounds& bounds);

using DisturbancePolicy = std::function<double(double t, const State& x)>;
using RelaySchedule = std::function<RelayStatus(double t)>;

struct Sample {
    double t = 0.0;
    State state;
    double d = 0.0;
    RelayStatus relay = RelayStatus::Closed;
};

struct Trajectory {
    std::vector<Sample> samples;
    bool divergent = false;  // integration hit a non-finite state and was truncated

    const Sample& back() const { return samples.back(); }
};

/// One classical 4th-order step with d and relay held constant.
State rk4_step(const State& x, const SmibParams& params, RelayStatus relay, double d,
               double dt);

/// Fixed-step integration; d and relay are sampled at each step start
/// and held for the step. The result has floor(T/dt)+1 samples unless
/// the state turns non-finite, which truncates the run and sets the
/// divergent flag.
Trajectory simulate(const State& x0, const SmibParams& params,
                    const DisturbancePolicy& d_policy, const RelaySchedule& relay_schedule,
                    double horizon, double dt);

constexpr auto zero_disturbance = [](double, const State&) { return 0.0; };

inline RelaySchedule fixed_relay(RelayStatus status) {
    return [status](double) { return status; };
}

}  // namespace swingreach
