#include "swingreach/hjsolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swingreach {

void DisturbanceBound::validate() const {
    if (!std::isfinite(lower) || !std::isfinite(upper) || lower > upper) {
        throw std::invalid_argument("DisturbanceBound: need finite lower <= upper");
    }
}

void SolveConfig::validate() const {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("SolveConfig: horizon must be finite and nonnegative");
    }
    if (!(cfl > 0.0) || cfl > 1.0) {
        throw std::invalid_argument("SolveConfig: cfl must lie in (0, 1]");
    }
    if (!(convergence_eps > 0.0)) {
        throw std::invalid_argument("SolveConfig: convergence eps must be positive");
    }
    if (value_floor && !std::isfinite(*value_floor)) {
        throw std::invalid_argument("SolveConfig: value floor must be finite");
    }
    if (dt_override && !(*dt_override > 0.0)) {
        throw std::invalid_argument("SolveConfig: dt override must be positive");
    }
}

PlanarAffineDynamics smib_dynamics(const SmibParams& params, RelayStatus relay) {
    params.validate();
    const double inv_inertia = 1.0 / params.inertia;
    return {
        [params, relay](const State& x) { return rhs(x, params, relay, 0.0); },
        [inv_inertia](const State&) { return Deriv{0.0, inv_inertia}; },
    };
}

PlanarAffineDynamics constant_advection(double vdelta, double vomega) {
    return {
        [vdelta, vomega](const State&) { return Deriv{vdelta, vomega}; },
        [](const State&) { return Deriv{0.0, 0.0}; },
    };
}

namespace {

// Range of sin over [lo, hi], exact (accounts for interior extrema).
std::pair<double, double> sin_range(double lo, double hi) {
    const double pi = std::numbers::pi;
    double smin = std::min(std::sin(lo), std::sin(hi));
    double smax = std::max(std::sin(lo), std::sin(hi));
    // sin attains +1 at pi/2 + 2k*pi, -1 at -pi/2 + 2k*pi.
    const double two_pi = 2.0 * pi;
    if (std::floor((hi - pi / 2.0) / two_pi) >= std::ceil((lo - pi / 2.0) / two_pi)) smax = 1.0;
    if (std::floor((hi + pi / 2.0) / two_pi) >= std::ceil((lo + pi / 2.0) / two_pi)) smin = -1.0;
    return {smin, smax};
}

double pick_extremal_input(double coeff, const DisturbanceBound& b, Quantifier q) {
    if (q == Quantifier::Inf) return coeff >= 0.0 ? b.lower : b.upper;
    return coeff >= 0.0 ? b.upper : b.lower;
}

}  // namespace

Dissipation lf_dissipation(const SmibParams& params, RelayStatus relay,
                           const DisturbanceBound& dbound, const GridSpec& box) {
    params.validate();
    dbound.validate();
    box.validate();
    Dissipation a;
    a.alpha_delta = std::max(std::abs(box.omega_min), std::abs(box.omega_max));
    const auto [smin, smax] = sin_range(box.delta_min, box.delta_max);
    const double load = relay == RelayStatus::Closed ? params.local_load : 0.0;
    for (double omega : {box.omega_min, box.omega_max}) {
        for (double s : {smin, smax}) {
            for (double d : {dbound.lower, dbound.upper}) {
                const double accel = (params.mech_power - params.damping * omega -
                                      params.max_electric_power * s - load + d) /
                                     params.inertia;
                a.alpha_omega = std::max(a.alpha_omega, std::abs(accel));
            }
        }
    }
    return a;
}

Dissipation lf_dissipation(const PlanarAffineDynamics& dynamics,
                           const DisturbanceBound& dbound, const GridSpec& box) {
    dbound.validate();
    box.validate();
    Dissipation a;
    for (int i = 0; i < box.n_delta; ++i) {
        for (int j = 0; j < box.n_omega; ++j) {
            const State x = box.node(i, j);
            const Deriv fx = dynamics.drift(x);
            const Deriv fd = dynamics.gain(x);
            for (double d : {dbound.lower, dbound.upper}) {
                a.alpha_delta = std::max(a.alpha_delta, std::abs(fx.ddelta + fd.ddelta * d));
                a.alpha_omega = std::max(a.alpha_omega, std::abs(fx.domega + fd.domega * d));
            }
        }
    }
    return a;
}

double hamiltonian(double p_delta, double p_omega, const Deriv& drift, const Deriv& gain,
                   const DisturbanceBound& dbound, Quantifier quantifier) {
    dbound.validate();
    const double adv = p_delta * drift.ddelta + p_omega * drift.domega;
    const double coeff = p_delta * gain.ddelta + p_omega * gain.domega;
    return adv + coeff * pick_extremal_input(coeff, dbound, quantifier);
}

double hamiltonian(double p_delta, double p_omega, const State& x, const SmibParams& params,
                   RelayStatus relay, const DisturbanceBound& dbound, Quantifier quantifier) {
    return hamiltonian(p_delta, p_omega, rhs(x, params, relay, 0.0),
                       Deriv{0.0, 1.0 / params.inertia}, dbound, quantifier);
}

StepContext::StepContext(const GridSpec& spec, const PlanarAffineDynamics& dynamics,
                         Dissipation dissipation, DisturbanceBound dbound,
                         Quantifier quantifier, double cfl, bool freeze)
    : spec_(spec),
      dissipation_(dissipation),
      dbound_(dbound),
      quantifier_(quantifier),
      freeze_(freeze) {
    spec_.validate();
    dbound_.validate();
    if (!(cfl > 0.0) || cfl > 1.0) {
        throw std::invalid_argument("StepContext: cfl must lie in (0, 1]");
    }
    const std::size_t n = spec_.node_count();
    drift_delta_.resize(n);
    drift_omega_.resize(n);
    gain_delta_.resize(n);
    gain_omega_.resize(n);
    alpha_delta_.resize(n);
    alpha_omega_.resize(n);
    const double dmax = dbound_.max_abs();
    for (int i = 0; i < spec_.n_delta; ++i) {
        for (int j = 0; j < spec_.n_omega; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * spec_.n_omega + j;
            const State x = spec_.node(i, j);
            const Deriv fx = dynamics.drift(x);
            const Deriv fd = dynamics.gain(x);
            drift_delta_[k] = fx.ddelta;
            drift_omega_[k] = fx.domega;
            gain_delta_[k] = fd.ddelta;
            gain_omega_[k] = fd.domega;
            // Stencil-local dissipation: the node's own speed bound.
            // The box-wide bound over-smooths by an order of magnitude
            // here (speeds near the corners dwarf those around the
            // sets of interest) and erodes every ridge of the value
            // function; the per-node bound keeps the scheme monotone
            // at the same CFL step while the fronts survive.
            alpha_delta_[k] = std::abs(fx.ddelta) + dmax * std::abs(fd.ddelta);
            alpha_omega_[k] = std::abs(fx.domega) + dmax * std::abs(fd.domega);
        }
    }
    max_dt_ = cfl / (dissipation_.alpha_delta / spec_.h_delta() +
                     dissipation_.alpha_omega / spec_.h_omega());
}

/// Fused step kernel; returns the max absolute node change.
double step_into(const std::vector<double>& src, std::vector<double>& dst, double dt,
                 const StepContext& ctx) {
    const GridSpec& g = ctx.spec_;
    const int nd = g.n_delta, nw = g.n_omega;
    const double inv_hd = 1.0 / g.h_delta(), inv_hw = 1.0 / g.h_omega();
    const double dlo = ctx.dbound_.lower, dhi = ctx.dbound_.upper;
    const bool sup = ctx.quantifier_ == Quantifier::Sup;
    const bool freeze = ctx.freeze_;
    const bool floored = !ctx.floor_values.empty();
    double max_change = 0.0;

    for (int i = 0; i < nd; ++i) {
        const std::size_t row = static_cast<std::size_t>(i) * nw;
        for (int j = 0; j < nw; ++j) {
            const std::size_t k = row + j;
            const double v = src[k];
            // One-sided differences; linear-extrapolation ghosts make the
            // boundary one-sided difference equal on both sides.
            double pdm, pdp;
            if (i == 0) {
                pdp = (src[k + nw] - v) * inv_hd;
                pdm = pdp;
            } else if (i == nd - 1) {
                pdm = (v - src[k - nw]) * inv_hd;
                pdp = pdm;
            } else {
                pdm = (v - src[k - nw]) * inv_hd;
                pdp = (src[k + nw] - v) * inv_hd;
            }
            double pwm, pwp;
            if (j == 0) {
                pwp = (src[k + 1] - v) * inv_hw;
                pwm = pwp;
            } else if (j == nw - 1) {
                pwm = (v - src[k - 1]) * inv_hw;
                pwp = pwm;
            } else {
                pwm = (v - src[k - 1]) * inv_hw;
                pwp = (src[k + 1] - v) * inv_hw;
            }
            // Backward form U_tau = H. When d cannot enter the angle
            // equation, H splits per direction: linear in p_delta with
            // the fixed per-node speed f_delta, and piecewise linear in
            // p_omega with its single kink at zero. Both directions
            // then take the exact first-order upwind (interval
            // extremum) value; no artificial dissipation is needed, so
            // ridges of the value function are not eroded. The coupled
            // case falls back to central differences with stencil-local
            // dissipation.
            double ham_lf;
            if (ctx.gain_delta_[k] == 0.0) {
                const double fd = ctx.drift_delta_[k];
                const double ham_delta = fd * (fd >= 0.0 ? pdp : pdm);
                const double fw = ctx.drift_omega_[k];
                const double gw = ctx.gain_omega_[k];
                auto ham_omega_at = [&](double p) {
                    const double c = p * gw;
                    const double ext = sup ? std::max(c * dlo, c * dhi)
                                           : std::min(c * dlo, c * dhi);
                    return p * fw + ext;
                };
                const double hm = ham_omega_at(pwm);
                const double hp = ham_omega_at(pwp);
                double ham_omega;
                if (pwm <= pwp) {
                    ham_omega = std::max(hm, hp);
                    // Concave H (Inf) can peak at the kink inside the cell.
                    if (!sup && pwm <= 0.0 && 0.0 <= pwp) ham_omega = std::max(ham_omega, 0.0);
                } else {
                    ham_omega = std::min(hm, hp);
                    // Convex H (Sup) can dip at the kink inside the cell.
                    if (sup && pwp <= 0.0 && 0.0 <= pwm) ham_omega = std::min(ham_omega, 0.0);
                }
                ham_lf = ham_delta + ham_omega;
            } else {
                const double pd = 0.5 * (pdm + pdp);
                const double pw = 0.5 * (pwm + pwp);
                const double coeff = pd * ctx.gain_delta_[k] + pw * ctx.gain_omega_[k];
                const double dstar =
                    sup ? (coeff >= 0.0 ? dhi : dlo) : (coeff >= 0.0 ? dlo : dhi);
                ham_lf = pd * ctx.drift_delta_[k] + pw * ctx.drift_omega_[k] + coeff * dstar +
                         0.5 * ctx.alpha_delta_[k] * (pdp - pdm) +
                         0.5 * ctx.alpha_omega_[k] * (pwp - pwm);
            }
            double vnew = v + dt * (freeze ? std::min(0.0, ham_lf) : ham_lf);
            if (floored) vnew = std::max(vnew, ctx.floor_values[k]);
            dst[k] = vnew;
            max_change = std::max(max_change, std::abs(vnew - v));
        }
    }
    return max_change;
}

ScalarField step_backward(const ScalarField& v, double dt, const StepContext& ctx) {
    if (!(v.spec() == ctx.spec())) {
        throw std::invalid_argument("step_backward: field grid does not match context");
    }
    if (!(dt > 0.0) || dt > ctx.max_dt() * (1.0 + 1e-12)) {
        throw SolverError("step_backward: dt " + std::to_string(dt) +
                          " violates the CFL bound " + std::to_string(ctx.max_dt()));
    }
    std::vector<double> dst(v.values().size());
    step_into(v.values(), dst, dt, ctx);
    for (double x : dst) {
        if (!std::isfinite(x)) {
            throw SolverError("step_backward: non-finite node value after step");
        }
    }
    return ScalarField(v.spec(), std::move(dst));
}

SolveResult solve(const ScalarField& terminal, const PlanarAffineDynamics& dynamics,
                  const Dissipation& dissipation, const DisturbanceBound& dbound,
                  Quantifier quantifier, const SolveConfig& config) {
    config.validate();
    dbound.validate();
    StepContext ctx(terminal.spec(), dynamics, dissipation, dbound, quantifier, config.cfl,
                    config.freeze);
    if (config.value_floor) {
        ctx.floor_values.resize(terminal.values().size());
        for (std::size_t k = 0; k < ctx.floor_values.size(); ++k) {
            ctx.floor_values[k] = std::min(*config.value_floor, terminal.values()[k]);
        }
    }

    long steps = 0;
    double dt = 0.0;
    if (config.horizon > 0.0) {
        if (config.dt_override) {
            dt = *config.dt_override;
            if (dt > ctx.max_dt() * (1.0 + 1e-12)) {
                throw SolverError("solve: dt override violates the CFL bound");
            }
            steps = std::lround(config.horizon / dt);
            if (steps < 1 || std::abs(steps * dt - config.horizon) > 1e-9 * config.horizon) {
                throw std::invalid_argument("solve: dt override must divide the horizon");
            }
        } else {
            steps = static_cast<long>(std::ceil(config.horizon / ctx.max_dt() - 1e-12));
            steps = std::max(steps, 1L);
            dt = config.horizon / steps;
        }
    }

    // Map each requested snapshot time to its nearest step index.
    std::map<long, std::vector<double>> snapshot_steps;
    for (double t : config.snapshot_times) {
        long k = dt > 0.0 ? std::lround(t / dt) : 0;
        snapshot_steps[std::clamp(k, 0L, steps)].push_back(t);
    }

    SolveResult result{terminal, {}, std::nullopt, dt, steps};
    std::vector<double> cur = terminal.values();
    std::vector<double> next(cur.size());

    auto record_snapshots = [&](long k, const std::vector<double>& values) {
        auto it = snapshot_steps.find(k);
        if (it == snapshot_steps.end()) return;
        for (double t : it->second) {
            result.snapshots.emplace(t, ScalarField(terminal.spec(), values));
        }
    };

    record_snapshots(0, cur);
    for (long k = 1; k <= steps; ++k) {
        const double change = step_into(cur, next, dt, ctx);
        if (!std::isfinite(change)) {
            throw SolverError("solve: numerical blow-up at step " + std::to_string(k) +
                              " (backward time " + std::to_string(k * dt) + " s)");
        }
        cur.swap(next);
        record_snapshots(k, cur);
        if (!result.converged_at && change / dt < config.convergence_eps) {
            result.converged_at = k * dt;
            if (config.stop_on_convergence) {
                // Later snapshots see the settled field.
                for (long rest = k + 1; rest <= steps; ++rest) record_snapshots(rest, cur);
                break;
            }
        }
    }
    result.final = ScalarField(terminal.spec(), std::move(cur));
    return result;
}

SolveResult solve_smib(const ScalarField& terminal, const SmibParams& params,
                       RelayStatus relay, const DisturbanceBound& dbound,
                       Quantifier quantifier, const SolveConfig& config) {
    return solve(terminal, smib_dynamics(params, relay),
                 lf_dissipation(params, relay, dbound, terminal.spec()), dbound, quantifier,
                 config);
}

}  // namespace swingreach
