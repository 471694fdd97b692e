#include "swingreach/attack.hpp"

#include <algorithm>
#include <future>
#include <memory>
#include <stdexcept>

namespace swingreach {

namespace {

State clamp_to_box(const State& x, const GridSpec& g) {
    return {std::clamp(x.delta, g.delta_min, g.delta_max),
            std::clamp(x.omega, g.omega_min, g.omega_max)};
}

double select_keep_out(double switch_value, const DisturbanceBound& b) {
    return switch_value <= 0.0 ? b.upper : b.lower;
}

double select_keep_in(double switch_value, const DisturbanceBound& b) {
    return switch_value <= 0.0 ? b.lower : b.upper;
}

}  // namespace

double d_star_keep_out(const State& x, const ScalarField& value_field,
                       const SmibParams& params, const DisturbanceBound& dbound) {
    dbound.validate();
    if (!value_field.spec().contains(x)) {
        throw std::domain_error("d_star_keep_out: state outside the grid box");
    }
    const GradientField grad = gradient_central(value_field);
    const double sw = interpolate(grad.d_omega, x) / params.inertia;
    return select_keep_out(sw, dbound);
}

double d_star_keep_in(const State& x, const ScalarField& value_field,
                      const SmibParams& params, const DisturbanceBound& dbound) {
    dbound.validate();
    if (!value_field.spec().contains(x)) {
        throw std::domain_error("d_star_keep_in: state outside the grid box");
    }
    const GradientField grad = gradient_central(value_field);
    const double sw = interpolate(grad.d_omega, x) / params.inertia;
    return select_keep_in(sw, dbound);
}

DisturbancePolicy make_policy(const AttackPolicy& policy, const SmibParams& params) {
    policy.dbound.validate();
    const DisturbanceBound b = policy.dbound;
    switch (policy.mode) {
        case AttackPolicy::Mode::Zero:
            return [b](double, const State&) { return std::clamp(0.0, b.lower, b.upper); };
        case AttackPolicy::Mode::Constant: {
            const double d = std::clamp(policy.constant, b.lower, b.upper);
            return [d](double, const State&) { return d; };
        }
        case AttackPolicy::Mode::KeepOut:
        case AttackPolicy::Mode::KeepIn: {
            if (!policy.gradient_source) {
                throw std::invalid_argument("make_policy: gradient mode needs a source field");
            }
            const bool keep_out = policy.mode == AttackPolicy::Mode::KeepOut;
            auto grad = std::make_shared<ScalarField>(
                gradient_central(*policy.gradient_source).d_omega);
            const double inv_inertia = 1.0 / params.inertia;
            return [grad, b, keep_out, inv_inertia](double, const State& x) {
                const double sw =
                    interpolate(*grad, clamp_to_box(x, grad->spec())) * inv_inertia;
                return keep_out ? select_keep_out(sw, b) : select_keep_in(sw, b);
            };
        }
    }
    throw std::invalid_argument("make_policy: unknown mode");
}

Trajectory run_optimal_attack(const State& x0, const SmibParams& params, RelayStatus relay,
                              const DisturbanceBound& dbound, const ScalarField& value_field,
                              double horizon, double dt) {
    AttackPolicy policy{AttackPolicy::Mode::KeepOut, dbound, 0.0, value_field};
    return simulate(x0, params, make_policy(policy, params), fixed_relay(relay), horizon, dt);
}

SweepResult emptiness_sweep(const SafeBounds& safe, const SmibParams& params,
                            RelayStatus relay, const std::vector<double>& bounds,
                            const GridSpec& grid, const SolveConfig& config) {
    if (!std::is_sorted(bounds.begin(), bounds.end())) {
        throw std::invalid_argument("emptiness_sweep: bounds must be ascending");
    }
    std::vector<std::future<SweepEntry>> jobs;
    jobs.reserve(bounds.size());
    for (double bound : bounds) {
        jobs.push_back(std::async(std::launch::async, [&, bound] {
            SetResult set = invariant_set(safe, params, relay,
                                          DisturbanceBound::symmetric(bound), grid, config);
            return SweepEntry{bound, is_empty(set), set.value_field.max_value()};
        }));
    }
    SweepResult result;
    for (auto& job : jobs) {
        result.entries.push_back(job.get());
        if (!result.threshold && result.entries.back().empty) {
            result.threshold = result.entries.back().bound;
        }
    }
    return result;
}

CoordinatedRun run_coordinated(const CoordinatedPlan& plan, const State& x0,
                               const SmibParams& params, double horizon, double dt) {
    params.validate();
    if (!(dt > 0.0) || !(horizon >= dt)) {
        throw std::invalid_argument("run_coordinated: need dt > 0 and horizon >= dt");
    }
    if (!plan.switch_when) {
        throw std::invalid_argument("run_coordinated: plan needs a switch predicate");
    }
    const DisturbancePolicy phase1 = make_policy(plan.phase1, params);

    CoordinatedRun run;
    const long steps = static_cast<long>(std::floor(horizon / dt));
    run.trajectory.samples.reserve(steps + 1);
    State x = x0;
    bool switched = false;
    for (long k = 0; k <= steps; ++k) {
        const double t = k * dt;
        if (!is_finite(x)) {
            run.trajectory.divergent = true;
            break;
        }
        if (!switched && plan.switch_when(t, x)) {
            switched = true;
            run.switch_time = t;
        }
        const double d = switched ? 0.0 : phase1(t, x);
        const RelayStatus relay = switched ? plan.phase2_relay : RelayStatus::Closed;
        run.trajectory.samples.push_back({t, x, d, relay});
        if (k < steps) x = rk4_step(x, params, relay, d, dt);
    }
    return run;
}

std::function<bool(double, const State&)> outside_region_predicate(ScalarField region_field) {
    auto field = std::make_shared<ScalarField>(std::move(region_field));
    return [field](double, const State& x) {
        if (!field->spec().contains(x)) return true;
        return interpolate(*field, x) < 0.0;
    };
}

}  // namespace swingreach
