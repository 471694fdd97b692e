#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "swingreach/grid.hpp"
#include "swingreach/hjsolver.hpp"
#include "swingreach/plant.hpp"
#include "swingreach/reachability.hpp"

namespace swingreach {

/// Bang-bang disturbance selectors driven by the interpolated omega
/// gradient of a value field. With input gain (0, 1/M) the switching
/// test reduces to the sign of dV/domega; ties at zero take the upper
/// endpoint for keep-out and the lower for keep-in.
///
/// These point queries rebuild the field gradient per call; trajectory
/// loops should use make_policy, which precomputes it once.
double d_star_keep_out(const State& x, const ScalarField& value_field,
                       const SmibParams& params, const DisturbanceBound& dbound);
double d_star_keep_in(const State& x, const ScalarField& value_field,
                      const SmibParams& params, const DisturbanceBound& dbound);

/// Disturbance generator attached to a scenario.
struct AttackPolicy {
    enum class Mode { KeepOut, KeepIn, Constant, Zero };

    Mode mode = Mode::Zero;
    DisturbanceBound dbound;
    double constant = 0.0;                        // Constant mode, clamped to dbound
    std::optional<ScalarField> gradient_source;   // required for KeepOut/KeepIn
};

/// Realize the policy as a callable. KeepOut/KeepIn precompute the
/// gradient of the source field once; queries outside the grid box are
/// clamped to it so a diverged trajectory still gets a defined signal.
/// Every emitted value lies in [dbound.lower, dbound.upper].
DisturbancePolicy make_policy(const AttackPolicy& policy, const SmibParams& params);

/// Simulate from x0 under the keep-out selector driven by a converged
/// invariant-set value field for (relay, dbound).
Trajectory run_optimal_attack(const State& x0, const SmibParams& params, RelayStatus relay,
                              const DisturbanceBound& dbound, const ScalarField& value_field,
                              double horizon, double dt);

struct SweepEntry {
    double bound = 0.0;
    bool empty = false;
    double max_value = 0.0;  // max node value of the converged set field
};

struct SweepResult {
    std::optional<double> threshold;  // smallest listed bound with an empty set
    std::vector<SweepEntry> entries;
};

/// Converged invariant sets for each symmetric bound in ascending
/// order; entries run concurrently. Throws std::invalid_argument when
/// bounds are not ascending.
SweepResult emptiness_sweep(const SafeBounds& safe, const SmibParams& params,
                            RelayStatus relay, const std::vector<double>& bounds,
                            const GridSpec& grid, const SolveConfig& config);

/// Two-phase scenario: inject phase-1 disturbance with the relay
/// closed, then on the switch predicate open the relay and stop
/// injecting.
struct CoordinatedPlan {
    AttackPolicy phase1;
    std::function<bool(double t, const State& x)> switch_when;
    RelayStatus phase2_relay = RelayStatus::Open;  // Closed gives the control run
};

struct CoordinatedRun {
    Trajectory trajectory;
    std::optional<double> switch_time;  // empty when the predicate never fired
};

CoordinatedRun run_coordinated(const CoordinatedPlan& plan, const State& x0,
                               const SmibParams& params, double horizon, double dt);

/// Predicate firing once the interpolated region value at the state
/// drops below zero; states outside the grid box count as outside the
/// region.
std::function<bool(double, const State&)> outside_region_predicate(ScalarField region_field);

}  // namespace swingreach
