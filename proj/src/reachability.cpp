#include "swingreach/reachability.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace swingreach {

namespace {

SetResult wrap(SolveResult solved, SetKind kind, RelayStatus relay,
               const DisturbanceBound& dbound, double horizon) {
    SetResult out{std::move(solved.final), {}, kind, horizon, relay, dbound,
                  solved.converged_at, std::move(solved.snapshots)};
    out.boundary = extract_zero_contour(out.value_field);
    return out;
}

SetResult safe_set_solve(const SafeBounds& safe, const SmibParams& params, RelayStatus relay,
                         const DisturbanceBound& dbound, const GridSpec& grid,
                         const SolveConfig& config, Quantifier quantifier, SetKind kind) {
    const ScalarField l = signed_distance_rect(grid, safe.delta_lo(), safe.delta_hi(),
                                               safe.omega_lo(), safe.omega_hi());
    return wrap(solve_smib(l, params, relay, dbound, quantifier, config), kind, relay, dbound,
                config.horizon);
}

}  // namespace

SetResult invariant_set(const SafeBounds& safe, const SmibParams& params, RelayStatus relay,
                        const DisturbanceBound& dbound, const GridSpec& grid,
                        const SolveConfig& config) {
    return safe_set_solve(safe, params, relay, dbound, grid, config, Quantifier::Inf,
                          SetKind::Invariant);
}

SetResult viability_set(const SafeBounds& safe, const SmibParams& params, RelayStatus relay,
                        const DisturbanceBound& dbound, const GridSpec& grid,
                        const SolveConfig& config) {
    return safe_set_solve(safe, params, relay, dbound, grid, config, Quantifier::Sup,
                          SetKind::Viability);
}

SetResult reach_set(const ScalarField& target, const SmibParams& params, RelayStatus relay,
                    const DisturbanceBound& dbound, const SolveConfig& config) {
    SolveResult inner = solve_smib(pointwise_neg(target), params, relay, dbound,
                                   Quantifier::Inf, config);
    SolveResult flipped{pointwise_neg(inner.final), {}, inner.converged_at, inner.dt,
                        inner.steps};
    for (auto& [t, field] : inner.snapshots) {
        flipped.snapshots.emplace(t, pointwise_neg(field));
    }
    return wrap(std::move(flipped), SetKind::Reach, relay, dbound, config.horizon);
}

SetResult stability_region(const SmibParams& params, RelayStatus relay, const GridSpec& grid,
                           const BallRadii& radii, const SolveConfig& config) {
    const State center = equilibria(params, relay).stable;
    const ScalarField target = signed_distance_ellipse(grid, center, radii.delta, radii.omega);
    SetResult out = reach_set(target, params, relay, DisturbanceBound{0.0, 0.0}, config);
    out.kind = SetKind::StabilityRegion;
    return out;
}

bool is_empty(const SetResult& result) {
    return result.value_field.max_value() < 0.0;
}

std::optional<double> converged(const std::map<double, ScalarField>& snapshots, double eps) {
    if (snapshots.size() < 2) {
        throw std::invalid_argument("converged: need at least two snapshots");
    }
    auto prev = snapshots.begin();
    for (auto it = std::next(prev); it != snapshots.end(); ++it, ++prev) {
        const double span = it->first - prev->first;
        if (!(span > 0.0)) continue;
        double change = 0.0;
        const auto& a = prev->second.values();
        const auto& b = it->second.values();
        for (std::size_t k = 0; k < a.size(); ++k) {
            change = std::max(change, std::abs(b[k] - a[k]));
        }
        if (change / span < eps) return it->first;
    }
    return std::nullopt;
}

}  // namespace swingreach
