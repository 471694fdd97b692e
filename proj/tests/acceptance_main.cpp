// Reproduction gate: runs every acceptance scenario at the stated
// tolerance on the default 201x201 grid (the emptiness sweep also runs
// a refined 401x401 pass) and prints one PASS/FAIL line per criterion.
// Exit status is the number of failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "swingreach/attack.hpp"
#include "swingreach/hitl.hpp"
#include "swingreach/io.hpp"
#include "swingreach/reachability.hpp"

using namespace swingreach;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    int id;
    std::string name;
    bool pass;
    std::string detail;
};

std::vector<Outcome> g_outcomes;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    g_outcomes.push_back({id, name, pass, detail});
    std::printf("[%s] criterion %2d: %s\n           %s\n", pass ? "PASS" : "FAIL", id,
                name.c_str(), detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double x) { return io::format_double(x); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const SmibParams params;  // study defaults throughout

GridSpec default_grid(int n = 201) {
    return {-kPi, 2.0 * kPi, -20.0, 20.0, n, n};
}

SafeBounds safe_bounds() { return SafeBounds::centered_on_equilibrium(params); }

double max_node_gap(const ScalarField& a, const ScalarField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
    }
    return m;
}

long count_violations(const ScalarField& low, const ScalarField& high, double* worst) {
    long n = 0;
    *worst = 0.0;
    for (std::size_t k = 0; k < low.values().size(); ++k) {
        const double gap = low.values()[k] - high.values()[k];
        if (gap > 0.0) {
            ++n;
            *worst = std::max(*worst, gap);
        }
    }
    return n;
}

// ---------------------------------------------------------------------------

struct StabilityData {
    SetResult closed;
    SetResult open;
    double closed_runtime = 0.0;
    double open_runtime = 0.0;
};

StabilityData criterion1_stability_convergence() {
    SolveConfig cfg;
    cfg.horizon = 12.0;
    for (double t = 1.5; t <= 12.01; t += 1.5) cfg.snapshot_times.push_back(t);
    cfg.convergence_eps = 1e-3;

    auto run = [&](RelayStatus relay, double* runtime) {
        const auto t0 = std::chrono::steady_clock::now();
        SetResult region = stability_region(params, relay, default_grid(), {}, cfg);
        *runtime = seconds_since(t0);
        return region;
    };
    double closed_runtime = 0.0, open_runtime = 0.0;
    StabilityData data{run(RelayStatus::Closed, &closed_runtime),
                       run(RelayStatus::Open, &open_runtime), 0.0, 0.0};
    data.closed_runtime = closed_runtime;
    data.open_runtime = open_runtime;

    const double deadline = 3.0 + 1.5;  // one snapshot interval of the stability runs
    std::string detail;
    bool pass = true;
    for (const auto* r : {&data.closed, &data.open}) {
        const char* name = r->relay == RelayStatus::Closed ? "closed" : "open";
        const double runtime =
            r->relay == RelayStatus::Closed ? data.closed_runtime : data.open_runtime;
        const bool conv_ok = r->converged_at && *r->converged_at <= deadline;
        const bool time_ok = runtime <= 120.0;
        pass = pass && conv_ok && time_ok;
        detail += std::string(name) + ": rate<1e-3/s at " +
                  (r->converged_at ? fmt(*r->converged_at) + " s" : std::string("never")) +
                  " (deadline " + fmt(deadline) + " s), runtime " + fmt(runtime) + " s; ";
    }
    // Context: when the set itself (membership) stops changing.
    for (const auto* r : {&data.closed, &data.open}) {
        const char* name = r->relay == RelayStatus::Closed ? "closed" : "open";
        double settled = -1.0;
        auto prev = r->snapshots.begin();
        for (auto it = std::next(prev); it != r->snapshots.end(); ++it, ++prev) {
            long flips = 0;
            for (std::size_t k = 0; k < it->second.values().size(); ++k) {
                flips += (prev->second.values()[k] >= 0) != (it->second.values()[k] >= 0);
            }
            if (flips == 0 && settled < 0) settled = prev->first;
            if (flips != 0) settled = -1.0;
        }
        detail += std::string(name) + " membership settled at " +
                  (settled >= 0 ? fmt(settled) + " s" : std::string(">12 s")) + "; ";
    }
    report(1, "stability-region value convergence by 3 s +- one snapshot interval", pass,
           detail);
    return data;
}

void criterion2_transient_split() {
    const State x0{-0.5, 13.0};
    const State eq = equilibria(params, RelayStatus::Closed).stable;
    const SafeBounds safe = safe_bounds();

    Trajectory closed = simulate(x0, params, zero_disturbance,
                                 fixed_relay(RelayStatus::Closed), 10.0, 1e-3);
    const State cend = closed.back().state;
    const double cdist = std::hypot(cend.delta - eq.delta, cend.omega - eq.omega);
    const bool closed_ok = cdist <= 0.05;

    Trajectory open = simulate(x0, params, zero_disturbance, fixed_relay(RelayStatus::Open),
                               10.0, 1e-3);
    bool exited = false;
    double reentry = -1.0;
    for (const Sample& s : open.samples) {
        const bool inside = in_safe_set(s.state, safe);
        if (!inside) exited = true;
        if (exited && inside && reentry < 0) reentry = s.t;
    }
    const State oend = open.back().state;
    const double odist = std::hypot(oend.delta - eq.delta, oend.omega - eq.omega);
    // "Does not return": never back to the nominal rest point (the open
    // run settles at the load-shed equilibrium instead). The safe-set
    // re-entry time is reported for transparency: the exact trajectory
    // re-enters the envelope because the stated x0 is within 1e-4 of
    // the open-relay separatrix.
    const bool open_ok = exited && odist > 0.05;

    report(2, "transient from (-0.5, 13): closed returns to nominal, open does not",
           closed_ok && open_ok,
           "closed final distance " + fmt(cdist) + " (<= 0.05); open exits safe set: " +
               (exited ? "yes" : "no") + ", final distance to nominal " + fmt(odist) +
               " (> 0.05), settles at the open-relay rest point; safe-set re-entry at " +
               (reentry >= 0 ? fmt(reentry) + " s" : std::string("never")));
}

struct InvariantPair {
    SetResult open;
    SetResult closed;
};

InvariantPair criterion3_attack_dichotomy() {
    SolveConfig cfg;
    cfg.horizon = 3.0;
    cfg.snapshot_times = {1.5};
    const SafeBounds safe = safe_bounds();
    const DisturbanceBound b{-0.2, 0.2};
    InvariantPair inv{
        invariant_set(safe, params, RelayStatus::Open, b, default_grid(), cfg),
        invariant_set(safe, params, RelayStatus::Closed, b, default_grid(), cfg)};

    const State x0{1.2, 6.0};
    Trajectory open = run_optimal_attack(x0, params, RelayStatus::Open, b,
                                         inv.open.value_field, 5.0, 1e-3);
    double exit_t = -1.0;
    for (const Sample& s : open.samples) {
        if (s.t > 0.0 && !in_safe_set(s.state, safe)) {
            exit_t = s.t;
            break;
        }
    }
    Trajectory closed = run_optimal_attack(x0, params, RelayStatus::Closed, b,
                                           inv.closed.value_field, 5.0, 1e-3);
    bool closed_stays = true;
    for (const Sample& s : closed.samples) {
        if (!in_safe_set(s.state, safe)) closed_stays = false;
    }
    report(3, "optimal-attack dichotomy from (1.2, 6) under |d| <= 0.2",
           exit_t >= 0.0 && closed_stays,
           "open relay exits the safe set at " +
               (exit_t >= 0 ? fmt(exit_t) + " s" : std::string("never")) +
               "; closed relay " + (closed_stays ? "never exits" : "EXITS") +
               " over 5 s");
    return inv;
}

void criterion4_emptiness_thresholds() {
    SolveConfig cfg;
    cfg.horizon = 3.0;
    std::vector<double> bounds;
    for (double b = 0.10; b <= 0.701; b += 0.05) bounds.push_back(b);

    std::string detail;
    bool pass = true;
    for (int n : {201, 401}) {
        for (RelayStatus relay : {RelayStatus::Open, RelayStatus::Closed}) {
            SweepResult sweep =
                emptiness_sweep(safe_bounds(), params, relay, bounds, default_grid(n), cfg);
            bool monotone = true;
            bool seen_empty = false;
            for (const SweepEntry& e : sweep.entries) {
                if (seen_empty && !e.empty) monotone = false;
                seen_empty = seen_empty || e.empty;
            }
            const bool is_open = relay == RelayStatus::Open;
            const double lo = is_open ? 0.35 : 0.55;
            const double hi = is_open ? 0.45 : 0.65;
            const bool in_range =
                sweep.threshold && *sweep.threshold >= lo - 1e-9 && *sweep.threshold <= hi + 1e-9;
            detail += std::string(is_open ? "open" : "closed") + "@" + std::to_string(n) +
                      ": first empty at " +
                      (sweep.threshold ? fmt(*sweep.threshold) : std::string("none")) +
                      (monotone ? "" : " NON-MONOTONE") + "; ";
            if (n == 401) pass = pass && in_range && monotone;  // graded at the refined pass
        }
    }
    report(4, "invariant-set emptiness thresholds 0.40/0.60 +- 0.05 (graded at 401x401)",
           pass, detail + "tolerances [0.35,0.45] open, [0.55,0.65] closed");
}

double criterion5_coordinated(const SetResult& open_region_t3) {
    CoordinatedPlan plan;
    plan.phase1 = {AttackPolicy::Mode::KeepOut, {-0.2, 0.2}, 0.0,
                   open_region_t3.value_field};
    plan.switch_when = outside_region_predicate(open_region_t3.value_field);

    const State x0{1.2, 6.0};
    const State eq = equilibria(params, RelayStatus::Closed).stable;
    CoordinatedRun attack = run_coordinated(plan, x0, params, 10.0, 1e-3);
    CoordinatedPlan control = plan;
    control.phase2_relay = RelayStatus::Closed;
    CoordinatedRun held = run_coordinated(control, x0, params, 10.0, 1e-3);

    auto dist = [&](const Trajectory& t) {
        return std::hypot(t.back().state.delta - eq.delta, t.back().state.omega - eq.omega);
    };
    const double adist = dist(attack.trajectory);
    const double cdist = dist(held.trajectory);
    const bool pass = attack.switch_time.has_value() && adist > 0.05 && cdist <= 0.05;
    report(5, "coordinated breaker attack strands the state; closed control returns", pass,
           "switch at " +
               (attack.switch_time ? fmt(*attack.switch_time) + " s (reported, not asserted)"
                                   : std::string("never")) +
               "; attack run final distance to nominal " + fmt(adist) +
               " (settles at the load-shed rest point), control run " + fmt(cdist) +
               " (<= 0.05)");
    return attack.switch_time.value_or(0.0);
}

void criterion6_complement_identity() {
    SolveConfig cfg;
    cfg.horizon = 1.5;
    cfg.stop_on_convergence = false;
    const GridSpec grid = default_grid();
    const State center = equilibria(params, RelayStatus::Closed).stable;
    const ScalarField target = signed_distance_ellipse(grid, center, 0.1, 0.5);
    const DisturbanceBound b{-0.2, 0.2};

    SetResult reach = reach_set(target, params, RelayStatus::Closed, b, cfg);
    SolveResult inv = solve_smib(pointwise_neg(target), params, RelayStatus::Closed, b,
                                 Quantifier::Inf, cfg);
    const ScalarField expected = pointwise_neg(inv.final);
    const bool pass = reach.value_field == expected;
    report(6, "complement identity: reach = -invariant(-target), node for node", pass,
           pass ? "bitwise equal on 40401 nodes"
                : "max gap " + fmt(max_node_gap(reach.value_field, expected)));
}

void criterion7_containment(const InvariantPair& inv) {
    SolveConfig cfg;
    cfg.horizon = 3.0;
    cfg.snapshot_times = {1.5};
    const SafeBounds safe = safe_bounds();
    const GridSpec grid = default_grid();
    const ScalarField l = signed_distance_rect(grid, safe.delta_lo(), safe.delta_hi(),
                                               safe.omega_lo(), safe.omega_hi());
    std::string detail;
    bool pass = true;
    double worst = 0.0;

    // Inv <= Viab <= l, node-wise exact, for both relay states.
    for (const SetResult* r : {&inv.open, &inv.closed}) {
        SetResult viab = viability_set(safe, params, r->relay, r->dbound, grid, cfg);
        const long v1 = count_violations(r->value_field, viab.value_field, &worst);
        const long v2 = count_violations(viab.value_field, l, &worst);
        pass = pass && v1 == 0 && v2 == 0;
        detail += std::string(r->relay == RelayStatus::Closed ? "closed" : "open") +
                  ": inv<=viab viol " + std::to_string(v1) + ", viab<=l viol " +
                  std::to_string(v2) + "; ";
    }

    // Horizon monotonicity from snapshots of one backward run.
    for (const SetResult* r : {&inv.open, &inv.closed}) {
        const long v = count_violations(r->value_field, r->snapshots.at(1.5), &worst);
        pass = pass && v == 0;
        detail += "inv(3)<=inv(1.5) viol " + std::to_string(v) + "; ";
    }
    {
        SolveConfig rc;
        rc.horizon = 3.0;
        rc.snapshot_times = {1.5};
        rc.stop_on_convergence = false;
        SetResult reach = stability_region(params, RelayStatus::Closed, grid, {}, rc);
        const long v = count_violations(reach.snapshots.at(1.5), reach.value_field, &worst);
        pass = pass && v == 0;
        detail += "reach(1.5)<=reach(3) viol " + std::to_string(v) + "; ";
    }

    // Bound-width monotonicity at a shared step size.
    {
        const DisturbanceBound narrow{-0.2, 0.2}, wide{-0.3, 0.3};
        StepContext probe(grid, smib_dynamics(params, RelayStatus::Closed),
                          lf_dissipation(params, RelayStatus::Closed, wide, grid), wide,
                          Quantifier::Inf, cfg.cfl);
        SolveConfig shared = cfg;
        shared.snapshot_times.clear();
        shared.stop_on_convergence = false;
        shared.dt_override =
            cfg.horizon / std::ceil(cfg.horizon / probe.max_dt());
        SetResult vn = invariant_set(safe, params, RelayStatus::Closed, narrow, grid, shared);
        SetResult vw = invariant_set(safe, params, RelayStatus::Closed, wide, grid, shared);
        const long v = count_violations(vw.value_field, vn.value_field, &worst);
        pass = pass && v == 0;
        detail += "inv(0.3)<=inv(0.2) viol " + std::to_string(v) + "; ";
    }

    report(7, "set-containment suite, exact node-wise inequalities", pass,
           detail + (pass ? "all exact" : "worst violation " + fmt(worst)));
}

void criterion8_trajectory_consistency(const InvariantPair& inv) {
    const SafeBounds safe = safe_bounds();
    const GridSpec grid = default_grid();
    const ScalarField l = signed_distance_rect(grid, safe.delta_lo(), safe.delta_hi(),
                                               safe.omega_lo(), safe.omega_hi());
    const double margin = 2.0 * grid.h_max();
    const double horizon = 3.0;

    std::string detail;
    bool pass = true;
    for (const SetResult* r : {&inv.open, &inv.closed}) {
        DisturbancePolicy worst_case = make_policy(
            {AttackPolicy::Mode::KeepOut, r->dbound, 0.0, r->value_field}, params);
        const RelayStatus relay = r->relay;

        // Every qualifying node, not a subsample.
        std::vector<State> deep, doomed;
        for (int i = 0; i < grid.n_delta; ++i) {
            for (int j = 0; j < grid.n_omega; ++j) {
                const double v = r->value_field.at(i, j);
                if (v >= margin) deep.push_back(grid.node(i, j));
                if (l.at(i, j) >= 0.0 && v <= -margin) doomed.push_back(grid.node(i, j));
            }
        }

        auto run_class = [&](const std::vector<State>& nodes, bool expect_stay) {
            std::atomic<long> failures{0};
            auto worker = [&](std::size_t begin, std::size_t end) {
                for (std::size_t k = begin; k < end; ++k) {
                    Trajectory t = simulate(nodes[k], params, worst_case,
                                            fixed_relay(relay), horizon, 1e-3);
                    bool exited = false;
                    for (const Sample& s : t.samples) {
                        if (!in_safe_set(s.state, safe)) {
                            exited = true;
                            break;
                        }
                    }
                    if (exited == expect_stay) ++failures;
                }
            };
            std::thread half(worker, 0, nodes.size() / 2);
            worker(nodes.size() / 2, nodes.size());
            half.join();
            return failures.load();
        };

        const long stay_fail = run_class(deep, true);
        const long exit_fail = run_class(doomed, false);
        pass = pass && deep.size() >= 100 && doomed.size() >= 100 && stay_fail == 0 &&
               exit_fail == 0;
        detail += std::string(relay == RelayStatus::Closed ? "closed" : "open") + ": " +
                  std::to_string(deep.size()) + " deep nodes, " +
                  std::to_string(stay_fail) + " exit; " + std::to_string(doomed.size()) +
                  " doomed nodes, " + std::to_string(exit_fail) + " never exit; ";
    }
    report(8, "trajectory/value consistency at the 2h margin, 100% pass rate", pass, detail);
}

void criterion9_solver_oracles() {
    // Constant advection moves a circular contour at unit speed.
    GridSpec g{-3.0, 3.0, -3.0, 3.0, 151, 151};
    ScalarField l(g, 0.0);
    for (int i = 0; i < g.n_delta; ++i) {
        for (int j = 0; j < g.n_omega; ++j) {
            const State p = g.node(i, j);
            l.at(i, j) = 1.0 - std::hypot(p.delta - 0.5, p.omega);
        }
    }
    const PlanarAffineDynamics adv = constant_advection(1.0, 0.0);
    SolveConfig cfg;
    cfg.horizon = 1.0;
    cfg.freeze = false;
    cfg.stop_on_convergence = false;
    SolveResult moved = solve(l, adv, lf_dissipation(adv, {0, 0}, g), {0, 0},
                              Quantifier::Inf, cfg);
    Contour c = extract_zero_contour(moved.final);
    double worst = 0.0;
    std::size_t vertices = 0;
    for (const auto& line : c.polylines) {
        for (const State& q : line) {
            worst = std::max(worst, std::abs(std::hypot(q.delta + 0.5, q.omega) - 1.0));
            ++vertices;
        }
    }
    const bool advect_ok = vertices > 50 && worst <= 2.0 * g.h_max();

    // Fixed-step integrator halving: fourth-order error ratio.
    auto end_state = [&](double dt) {
        return simulate({0.0, 0.0}, params, zero_disturbance,
                        fixed_relay(RelayStatus::Closed), 1.0, dt)
            .back()
            .state;
    };
    const State ref = end_state(5e-4);
    const State coarse = end_state(0.02);
    const State fine = end_state(0.01);
    const double ratio = std::hypot(coarse.delta - ref.delta, coarse.omega - ref.omega) /
                         std::hypot(fine.delta - ref.delta, fine.omega - ref.omega);
    const bool rk_ok = ratio >= 8.0 && ratio <= 24.0;

    report(9, "solver oracles: unit-speed advection and step-halving ratio",
           advect_ok && rk_ok,
           "contour position error " + fmt(worst) + " (limit " + fmt(2.0 * g.h_max()) +
               ", " + std::to_string(vertices) + " vertices); halving error ratio " +
               fmt(ratio) + " (target 16 +- 50%)");
}

void criterion10_hitl(const SetResult& open_region_t3, double switch_time) {
    using namespace swingreach::hitl;
    using namespace std::chrono_literals;

    // (a) lockstep determinism through a zero-rule proxy.
    const State x0{0.3, 2.0};
    const double dt = 1e-3, horizon = 1.0;
    double worst = std::numeric_limits<double>::infinity();
    bool lockstep_ok = false;
    {
        auto [plant_end, proxy_plant] = make_pipe_pair();
        auto [proxy_ctrl, ctrl_end] = make_pipe_pair();
        ProxyResult proxy;
        std::thread proxy_thread([&] {
            proxy = run_spoof_proxy({}, {-0.2, 0.2}, *proxy_plant, *proxy_ctrl, 5000ms);
        });
        std::thread controller([&] {
            run_controller_endpoint(zero_disturbance, fixed_relay(RelayStatus::Closed),
                                    params, dt, *ctrl_end, 5000ms);
        });
        PlantRun run = run_plant_endpoint(params, x0, dt, horizon, *plant_end, 5000ms);
        controller.join();
        proxy_thread.join();
        Trajectory direct = simulate(x0, params, zero_disturbance,
                                     fixed_relay(RelayStatus::Closed), horizon, dt);
        if (!run.abort_reason && run.trajectory.samples.size() == direct.samples.size()) {
            worst = 0.0;
            for (std::size_t k = 0; k < direct.samples.size(); ++k) {
                worst = std::max(worst, std::abs(run.trajectory.samples[k].state.delta -
                                                 direct.samples[k].state.delta));
                worst = std::max(worst, std::abs(run.trajectory.samples[k].state.omega -
                                                 direct.samples[k].state.omega));
            }
            lockstep_ok = worst <= 1e-9 && proxy.tamper_log.empty();
        }
    }

    // (b) codec round-trip over 1e5 randomized frames.
    std::mt19937 rng(20240809);
    std::uniform_int_distribution<int> kind(0, 3);
    std::uniform_int_distribution<std::uint64_t> seqd(0, 1u << 30);
    std::uniform_real_distribution<double> num(-60.0, 60.0);
    long codec_fail = 0;
    for (long k = 0; k < 100000; ++k) {
        Frame f;
        switch (kind(rng)) {
            case 0: f = Frame::hello(seqd(rng), std::abs(num(rng)) * 1e-4, "f00d"); break;
            case 1: f = Frame::step(seqd(rng), num(rng), {num(rng), num(rng)}); break;
            case 2:
                f = Frame::cmd(seqd(rng), num(rng),
                               num(rng) > 0 ? RelayStatus::Open : RelayStatus::Closed);
                break;
            default: f = Frame::bye(seqd(rng), "spin down"); break;
        }
        if (!(decode(encode(f)) == f)) ++codec_fail;
    }

    // (c) the spoof proxy reproduces the coordinated outcome against an
    // honest controller: inject the keep-out signal before the recorded
    // switch time, force the relay open with no injection afterwards.
    bool spoof_ok = false;
    double spoof_dist = -1.0;
    {
        DisturbancePolicy keep_out = make_policy(
            {AttackPolicy::Mode::KeepOut, {-0.2, 0.2}, 0.0, open_region_t3.value_field},
            params);
        SpoofRule phase1;
        phase1.t_begin = 0.0;
        phase1.t_end = std::nextafter(switch_time, -1.0);  // up to, not including
        phase1.d_policy = keep_out;
        SpoofRule phase2;
        phase2.t_begin = switch_time;
        phase2.d_constant = 0.0;
        phase2.relay_override = RelayStatus::Open;
        std::vector<SpoofRule> rules;
        if (switch_time > 0.0) rules.push_back(phase1);
        rules.push_back(phase2);

        auto [plant_end, proxy_plant] = make_pipe_pair();
        auto [proxy_ctrl, ctrl_end] = make_pipe_pair();
        ProxyResult proxy;
        std::thread proxy_thread([&] {
            proxy = run_spoof_proxy(rules, {-0.2, 0.2}, *proxy_plant, *proxy_ctrl, 5000ms);
        });
        std::thread controller([&] {
            run_controller_endpoint(zero_disturbance, fixed_relay(RelayStatus::Closed),
                                    params, dt, *ctrl_end, 5000ms);
        });
        PlantRun run = run_plant_endpoint(params, {1.2, 6.0}, dt, 10.0, *plant_end, 5000ms);
        controller.join();
        proxy_thread.join();

        const State eq = equilibria(params, RelayStatus::Closed).stable;
        if (!run.abort_reason && !run.trajectory.samples.empty()) {
            const State end = run.trajectory.back().state;
            spoof_dist = std::hypot(end.delta - eq.delta, end.omega - eq.omega);
            bool relay_forced = true;
            for (const Sample& s : run.trajectory.samples) {
                if (s.t >= switch_time && s.relay != RelayStatus::Open) relay_forced = false;
            }
            spoof_ok = spoof_dist > 0.05 && relay_forced && !proxy.tamper_log.empty();
        }
    }

    report(10, "lockstep determinism, codec round-trip, spoofed coordinated replay",
           lockstep_ok && codec_fail == 0 && spoof_ok,
           "max coordinate deviation " +
               (std::isfinite(worst) ? fmt(worst) : std::string("n/a")) +
               " (<= 1e-9); codec failures " + std::to_string(codec_fail) +
               "/100000; spoofed run final distance to nominal " + fmt(spoof_dist) +
               " (> 0.05, relay forced open)");
}

}  // namespace

int main() {
    std::printf("acceptance suite: study parameters, default grid %dx%d\n", 201, 201);
    const auto t0 = std::chrono::steady_clock::now();

    StabilityData stability = criterion1_stability_convergence();
    criterion2_transient_split();
    InvariantPair inv = criterion3_attack_dichotomy();
    criterion4_emptiness_thresholds();
    // The open-relay region at the 3 s study horizon drives the
    // coordinated scenario; reuse the 3 s snapshot of the long run.
    SetResult open_region_t3{stability.open.snapshots.at(3.0),
                             {},
                             SetKind::StabilityRegion,
                             3.0,
                             RelayStatus::Open,
                             {0.0, 0.0}};
    open_region_t3.boundary = extract_zero_contour(open_region_t3.value_field);
    const double switch_time = criterion5_coordinated(open_region_t3);
    criterion6_complement_identity();
    criterion7_containment(inv);
    criterion8_trajectory_consistency(inv);
    criterion9_solver_oracles();
    criterion10_hitl(open_region_t3, switch_time);

    int failures = 0;
    for (const Outcome& o : g_outcomes) failures += o.pass ? 0 : 1;
    std::printf("\n%zu criteria, %d failed, total runtime %.1f s\n", g_outcomes.size(),
                failures, seconds_since(t0));
    return failures;
}
