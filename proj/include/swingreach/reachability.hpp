#pragma once

#include <map>
#include <optional>

#include "swingreach/grid.hpp"
#include "swingreach/hjsolver.hpp"
#include "swingreach/plant.hpp"

namespace swingreach {

enum class SetKind { Invariant, Viability, Reach, StabilityRegion };

/// A computed set: membership is value >= 0 at a node, boundary is the
/// zero contour of the value field.
struct SetResult {
    ScalarField value_field;
    Contour boundary;
    SetKind kind = SetKind::Invariant;
    double horizon = 0.0;
    RelayStatus relay = RelayStatus::Closed;
    DisturbanceBound dbound;
    std::optional<double> converged_at;
    std::map<double, ScalarField> snapshots;
};

/// States that remain in the safe envelope for every admissible
/// disturbance over the horizon (Inf quantifier).
SetResult invariant_set(const SafeBounds& safe, const SmibParams& params, RelayStatus relay,
                        const DisturbanceBound& dbound, const GridSpec& grid,
                        const SolveConfig& config);

/// States that some admissible disturbance keeps in the safe envelope
/// over the horizon (Sup quantifier).
SetResult viability_set(const SafeBounds& safe, const SmibParams& params, RelayStatus relay,
                        const DisturbanceBound& dbound, const GridSpec& grid,
                        const SolveConfig& config);

/// States from which some disturbance reaches the target within the
/// horizon, computed through the complement identity: negate the
/// target, run the invariant solve, negate the result.
SetResult reach_set(const ScalarField& target, const SmibParams& params, RelayStatus relay,
                    const DisturbanceBound& dbound, const SolveConfig& config);

struct BallRadii {
    double delta = 0.1;  // rad
    double omega = 0.5;  // rad/s
};

/// Basin-of-attraction estimate: reach set of a small ball around the
/// stable equilibrium with no disturbance.
SetResult stability_region(const SmibParams& params, RelayStatus relay, const GridSpec& grid,
                           const BallRadii& radii, const SolveConfig& config);

/// True when no grid node has value >= 0 (the boundary counts as
/// membership).
bool is_empty(const SetResult& result);

/// First snapshot time at which the max node change per second against
/// the previous snapshot drops below eps. Requires >= 2 snapshots.
std::optional<double> converged(const std::map<double, ScalarField>& snapshots, double eps);

}  // namespace swingreach
