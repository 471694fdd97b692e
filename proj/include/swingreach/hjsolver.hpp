#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "swingreach/grid.hpp"
#include "swingreach/plant.hpp"
#include "swingreach/types.hpp"

namespace swingreach {

/// Admissible interval of the injected signal d.
struct DisturbanceBound {
    double lower = 0.0;
    double upper = 0.0;

    static DisturbanceBound symmetric(double b) { return {-b, b}; }

    void validate() const;
    double max_abs() const { return std::max(std::abs(lower), std::abs(upper)); }
    double width() const { return upper - lower; }

    bool operator==(const DisturbanceBound&) const = default;
};

/// Quantification of d in the Hamiltonian: Inf for sets robust to every
/// disturbance, Sup for sets achievable by some disturbance.
enum class Quantifier { Inf, Sup };

/// Planar vector field affine in the scalar input: f(x, d) = drift(x) + gain(x)*d.
/// The solver consumes any such field; the rotor model is the production
/// instance and constant advection is the test oracle instance.
struct PlanarAffineDynamics {
    std::function<Deriv(const State&)> drift;
    std::function<Deriv(const State&)> gain;
};

PlanarAffineDynamics smib_dynamics(const SmibParams& params, RelayStatus relay);
PlanarAffineDynamics constant_advection(double vdelta, double vomega);

/// Lax-Friedrichs dissipation coefficients: per-axis bounds on |f_i|
/// over the grid box and the disturbance interval.
struct Dissipation {
    double alpha_delta = 0.0;
    double alpha_omega = 0.0;
};

/// Closed-form bound for the rotor model, maximized over box corners,
/// the sine range, and the disturbance endpoints.
Dissipation lf_dissipation(const SmibParams& params, RelayStatus relay,
                           const DisturbanceBound& dbound, const GridSpec& box);

/// Generic bound sampled at grid nodes (exact for node-attained extrema,
/// e.g. constant advection).
Dissipation lf_dissipation(const PlanarAffineDynamics& dynamics,
                           const DisturbanceBound& dbound, const GridSpec& box);

/// Quantified Hamiltonian value: extremum over d in [lower, upper] of
/// p . f(x, d). Affine dependence puts the extremum at an interval
/// endpoint selected by the sign of p . gain.
double hamiltonian(double p_delta, double p_omega, const Deriv& drift, const Deriv& gain,
                   const DisturbanceBound& dbound, Quantifier quantifier);

double hamiltonian(double p_delta, double p_omega, const State& x, const SmibParams& params,
                   RelayStatus relay, const DisturbanceBound& dbound, Quantifier quantifier);

struct SolveConfig {
    double horizon = 3.0;                       // backward-time span, s
    double cfl = 0.5;                           // in (0, 1]
    double convergence_eps = 1e-3;              // max node change per second
    std::vector<double> snapshot_times;         // backward times, s
    std::optional<double> value_floor = -2.0;   // per-node freeze at min(terminal, floor)
    bool freeze = true;                         // apply min{0, H}; advection oracle disables
    bool stop_on_convergence = true;
    std::optional<double> dt_override;          // must divide horizon and satisfy CFL

    void validate() const;
};

struct SolveResult {
    ScalarField final;
    std::map<double, ScalarField> snapshots;  // keyed by requested backward time
    std::optional<double> converged_at;       // backward time when rate first < eps
    double dt = 0.0;
    long steps = 0;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precomputed per-node dynamics and scheme constants for one solve.
/// The vector field is time-independent, so drift, gain, and the
/// stencil-local dissipation bounds are sampled once at every node;
/// the box-wide Dissipation sets the shared CFL step bound.
class StepContext {
public:
    StepContext(const GridSpec& spec, const PlanarAffineDynamics& dynamics,
                Dissipation dissipation, DisturbanceBound dbound, Quantifier quantifier,
                double cfl = 1.0, bool freeze = true);

    /// Largest admissible explicit step: cfl / (a_d/h_d + a_w/h_w).
    double max_dt() const { return max_dt_; }

    const GridSpec& spec() const { return spec_; }
    const Dissipation& dissipation() const { return dissipation_; }

    /// Per-node lower clamp applied after each step; empty disables.
    std::vector<double> floor_values;

private:
    friend double step_into(const std::vector<double>& src, std::vector<double>& dst,
                            double dt, const StepContext& ctx);

    GridSpec spec_;
    Dissipation dissipation_;
    DisturbanceBound dbound_;
    Quantifier quantifier_;
    double max_dt_;
    bool freeze_;
    std::vector<double> drift_delta_, drift_omega_, gain_delta_, gain_omega_;
    std::vector<double> alpha_delta_, alpha_omega_;
};

/// One explicit backward step: V <- V + dt * min{0, H_lf(x, DV)} with
/// one-sided upwind differences, linear-extrapolation ghost nodes, and
/// global Lax-Friedrichs dissipation. Never increases any node.
/// Throws SolverError on a CFL violation.
ScalarField step_backward(const ScalarField& v, double dt, const StepContext& ctx);

/// Integrate the terminal-value problem backward over config.horizon.
/// Declares convergence when the per-step max node change per second
/// drops below config.convergence_eps.
/// Throws SolverError if node values turn non-finite, naming the step.
SolveResult solve(const ScalarField& terminal, const PlanarAffineDynamics& dynamics,
                  const Dissipation& dissipation, const DisturbanceBound& dbound,
                  Quantifier quantifier, const SolveConfig& config);

/// Rotor-model front end: builds dynamics and dissipation from params.
SolveResult solve_smib(const ScalarField& terminal, const SmibParams& params,
                       RelayStatus relay, const DisturbanceBound& dbound,
                       Quantifier quantifier, const SolveConfig& config);

}  // namespace swingreach
