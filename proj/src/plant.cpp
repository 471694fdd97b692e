#include "swingreach/plant.hpp"

#include <cmath>
#include <stdexcept>

namespace swingreach {

void SmibParams::validate() const {
    if (!(inertia > 0.0)) throw std::invalid_argument("SmibParams: inertia must be positive");
    if (!(damping >= 0.0)) throw std::invalid_argument("SmibParams: damping must be nonnegative");
    if (!(max_electric_power > 0.0)) {
        throw std::invalid_argument("SmibParams: max electric power must be positive");
    }
    if (!(local_load >= 0.0)) throw std::invalid_argument("SmibParams: local load must be nonnegative");
    if (!std::isfinite(mech_power)) throw std::invalid_argument("SmibParams: mech power must be finite");
}

SafeBounds SafeBounds::centered_on_equilibrium(const SmibParams& params) {
    SafeBounds b;
    b.delta_nominal = equilibria(params, RelayStatus::Closed).stable.delta;
    return b;
}

Deriv rhs(const State& x, const SmibParams& params, RelayStatus relay, double d) {
    const double load = relay == RelayStatus::Closed ? params.local_load : 0.0;
    const double accel = (params.mech_power - params.damping * x.omega -
                          params.max_electric_power * std::sin(x.delta) - load + d) /
                         params.inertia;
    return {x.omega, accel};
}

std::pair<double, double> jacobian_real_parts(const State& x, const SmibParams& params) {
    // J = [[0, 1], [-P_E cos(delta)/M, -D/M]]; eigenvalues solve
    // lambda^2 + c*lambda + k = 0 with c = D/M, k = P_E cos(delta)/M.
    const double c = params.damping / params.inertia;
    const double k = params.max_electric_power * std::cos(x.delta) / params.inertia;
    const double disc = c * c - 4.0 * k;
    if (disc < 0.0) {
        return {-c / 2.0, -c / 2.0};
    }
    const double root = std::sqrt(disc);
    return {(-c - root) / 2.0, (-c + root) / 2.0};
}

EquilibriumPair equilibria(const SmibParams& params, RelayStatus relay) {
    params.validate();
    const double net = params.net_power(relay);
    const double ratio = net / params.max_electric_power;
    if (std::abs(ratio) > 1.0) {
        throw std::domain_error("equilibria: net torque exceeds maximum electric power");
    }
    const State low{std::asin(ratio), 0.0};
    const State high{std::numbers::pi - std::asin(ratio), 0.0};
    // The branch with cos(delta) > 0 has both eigenvalue real parts
    // negative (for D > 0); the other is a saddle.
    const bool low_stable = jacobian_real_parts(low, params).second <= 0.0;
    return low_stable ? EquilibriumPair{low, high} : EquilibriumPair{high, low};
}

bool in_safe_set(const State& x, const SafeBounds& bounds) {
    return std::abs(x.delta - bounds.delta_nominal) <= bounds.delta_half_width &&
           std::abs(x.omega - bounds.omega_nominal) <= bounds.omega_half_width;
}

State rk4_step(const State& x, const SmibParams& params, RelayStatus relay, double d,
               double dt) {
    const Deriv k1 = rhs(x, params, relay, d);
    const Deriv k2 = rhs({x.delta + 0.5 * dt * k1.ddelta, x.omega + 0.5 * dt * k1.domega},
                         params, relay, d);
    const Deriv k3 = rhs({x.delta + 0.5 * dt * k2.ddelta, x.omega + 0.5 * dt * k2.domega},
                         params, relay, d);
    const Deriv k4 = rhs({x.delta + dt * k3.ddelta, x.omega + dt * k3.domega},
                         params, relay, d);
    return {x.delta + dt / 6.0 * (k1.ddelta + 2.0 * k2.ddelta + 2.0 * k3.ddelta + k4.ddelta),
            x.omega + dt / 6.0 * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega)};
}

Trajectory simulate(const State& x0, const SmibParams& params,
                    const DisturbancePolicy& d_policy, const RelaySchedule& relay_schedule,
                    double horizon, double dt) {
    params.validate();
    if (!(dt > 0.0) || !(horizon >= dt)) {
        throw std::invalid_argument("simulate: need dt > 0 and horizon >= dt");
    }
    const long steps = static_cast<long>(std::floor(horizon / dt));
    Trajectory traj;
    traj.samples.reserve(steps + 1);
    State x = x0;
    for (long k = 0; k <= steps; ++k) {
        const double t = k * dt;
        if (!is_finite(x)) {
            traj.divergent = true;
            break;
        }
        const double d = d_policy(t, x);
        const RelayStatus relay = relay_schedule(t);
        traj.samples.push_back({t, x, d, relay});
        if (k < steps) x = rk4_step(x, params, relay, d, dt);
    }
    return traj;
}

}  // namespace swingreach
