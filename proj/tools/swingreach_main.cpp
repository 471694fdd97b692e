// Scenario runner: reachability studies and attack replays for the
// single-machine infinite-bus rotor model, with CSV/JSON artifacts for
// external plotting. See README.md for the subcommand tour.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <thread>

#include "swingreach/attack.hpp"
#include "swingreach/hitl.hpp"
#include "swingreach/io.hpp"
#include "swingreach/reachability.hpp"

using namespace swingreach;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct ScenarioConfig {
    SmibParams params;
    GridSpec grid{-kPi, 2.0 * kPi, -20.0, 20.0, 201, 201};
    std::optional<double> safe_delta_nominal;  // default: closed-relay rest angle
    double safe_omega_nominal = 0.0;
    double safe_delta_half_width = kPi / 2.0;
    double safe_omega_half_width = 6.0;
    DisturbanceBound dbound{-0.2, 0.2};
    std::string relay = "both";  // "closed" | "open" | "both"
    double horizon = 3.0;
    double cfl = 0.5;
    double convergence_eps = 1e-3;
    std::vector<double> snapshot_times{1.5, 3.0};
    BallRadii ball_radii;
    std::vector<State> x0s{{-0.5, 13.0}};
    double sim_horizon = 10.0;
    double dt = 1e-3;
    std::vector<double> sweep_bounds;  // default 0.1 .. 0.7 step 0.05
    State attack_x0{1.2, 6.0};
    double attack_horizon = 5.0;
    State coord_x0{1.2, 6.0};
    std::optional<double> coord_switch_time;  // unset: region-based switch
    double coord_horizon = 10.0;
    std::string out_dir = "out";

    ScenarioConfig() {
        for (double b = 0.10; b <= 0.701; b += 0.05) sweep_bounds.push_back(b);
    }

    SafeBounds safe_bounds() const {
        SafeBounds b;
        b.delta_nominal = safe_delta_nominal
                              ? *safe_delta_nominal
                              : equilibria(params, RelayStatus::Closed).stable.delta;
        b.omega_nominal = safe_omega_nominal;
        b.delta_half_width = safe_delta_half_width;
        b.omega_half_width = safe_omega_half_width;
        return b;
    }

    SolveConfig solve_config() const {
        SolveConfig c;
        c.horizon = horizon;
        c.cfl = cfl;
        c.convergence_eps = convergence_eps;
        c.snapshot_times = snapshot_times;
        return c;
    }

    std::vector<RelayStatus> relays() const {
        if (relay == "closed") return {RelayStatus::Closed};
        if (relay == "open") return {RelayStatus::Open};
        if (relay == "both") return {RelayStatus::Closed, RelayStatus::Open};
        throw std::invalid_argument("config: relay must be closed, open, or both");
    }
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

State state_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError("config: a state must be a [delta, omega] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

void apply_json(ScenarioConfig& cfg, const json& j) {
    if (j.contains("params")) {
        const json& p = j["params"];
        if (p.contains("inertia")) cfg.params.inertia = p["inertia"];
        if (p.contains("damping")) cfg.params.damping = p["damping"];
        if (p.contains("mech_power")) cfg.params.mech_power = p["mech_power"];
        if (p.contains("max_electric_power")) {
            cfg.params.max_electric_power = p["max_electric_power"];
        }
        if (p.contains("local_load")) cfg.params.local_load = p["local_load"];
    }
    if (j.contains("grid")) {
        const json& g = j["grid"];
        if (g.contains("delta_min")) cfg.grid.delta_min = g["delta_min"];
        if (g.contains("delta_max")) cfg.grid.delta_max = g["delta_max"];
        if (g.contains("omega_min")) cfg.grid.omega_min = g["omega_min"];
        if (g.contains("omega_max")) cfg.grid.omega_max = g["omega_max"];
        if (g.contains("n_delta")) cfg.grid.n_delta = g["n_delta"];
        if (g.contains("n_omega")) cfg.grid.n_omega = g["n_omega"];
    }
    if (j.contains("safe")) {
        const json& s = j["safe"];
        if (s.contains("delta_nominal") && !s["delta_nominal"].is_null()) {
            cfg.safe_delta_nominal = s["delta_nominal"].get<double>();
        }
        if (s.contains("omega_nominal")) cfg.safe_omega_nominal = s["omega_nominal"];
        if (s.contains("delta_half_width")) cfg.safe_delta_half_width = s["delta_half_width"];
        if (s.contains("omega_half_width")) cfg.safe_omega_half_width = s["omega_half_width"];
    }
    if (j.contains("dbound")) {
        const json& d = j["dbound"];
        if (d.is_number()) {
            cfg.dbound = DisturbanceBound::symmetric(d.get<double>());
        } else {
            cfg.dbound = {d.at("lower").get<double>(), d.at("upper").get<double>()};
        }
    }
    if (j.contains("relay")) cfg.relay = j["relay"];
    if (j.contains("horizon")) cfg.horizon = j["horizon"];
    if (j.contains("cfl")) cfg.cfl = j["cfl"];
    if (j.contains("convergence_eps")) cfg.convergence_eps = j["convergence_eps"];
    if (j.contains("snapshot_times")) {
        cfg.snapshot_times = j["snapshot_times"].get<std::vector<double>>();
    }
    if (j.contains("ball_radii")) {
        cfg.ball_radii.delta = j["ball_radii"].at("delta");
        cfg.ball_radii.omega = j["ball_radii"].at("omega");
    }
    if (j.contains("x0")) {
        cfg.x0s.clear();
        for (const json& s : j["x0"]) cfg.x0s.push_back(state_from_json(s));
    }
    if (j.contains("sim_horizon")) cfg.sim_horizon = j["sim_horizon"];
    if (j.contains("dt")) cfg.dt = j["dt"];
    if (j.contains("sweep_bounds")) {
        cfg.sweep_bounds = j["sweep_bounds"].get<std::vector<double>>();
    }
    if (j.contains("attack")) {
        const json& a = j["attack"];
        if (a.contains("x0")) cfg.attack_x0 = state_from_json(a["x0"]);
        if (a.contains("horizon")) cfg.attack_horizon = a["horizon"];
    }
    if (j.contains("coordinated")) {
        const json& c = j["coordinated"];
        if (c.contains("x0")) cfg.coord_x0 = state_from_json(c["x0"]);
        if (c.contains("switch_time") && !c["switch_time"].is_null()) {
            cfg.coord_switch_time = c["switch_time"].get<double>();
        }
        if (c.contains("horizon")) cfg.coord_horizon = c["horizon"];
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"];
}

const char* relay_name(RelayStatus r) {
    return r == RelayStatus::Closed ? "closed" : "open";
}

json resolved_config_json(const ScenarioConfig& cfg) {
    const SafeBounds safe = cfg.safe_bounds();
    json j;
    j["params"] = {{"inertia", cfg.params.inertia},
                   {"damping", cfg.params.damping},
                   {"mech_power", cfg.params.mech_power},
                   {"max_electric_power", cfg.params.max_electric_power},
                   {"local_load", cfg.params.local_load}};
    j["grid"] = {{"delta_min", cfg.grid.delta_min}, {"delta_max", cfg.grid.delta_max},
                 {"omega_min", cfg.grid.omega_min}, {"omega_max", cfg.grid.omega_max},
                 {"n_delta", cfg.grid.n_delta},     {"n_omega", cfg.grid.n_omega}};
    j["safe"] = {{"delta_nominal", safe.delta_nominal},
                 {"omega_nominal", safe.omega_nominal},
                 {"delta_half_width", safe.delta_half_width},
                 {"omega_half_width", safe.omega_half_width}};
    j["dbound"] = {{"lower", cfg.dbound.lower}, {"upper", cfg.dbound.upper}};
    j["relay"] = cfg.relay;
    j["horizon"] = cfg.horizon;
    j["cfl"] = cfg.cfl;
    j["convergence_eps"] = cfg.convergence_eps;
    j["snapshot_times"] = cfg.snapshot_times;
    j["ball_radii"] = {{"delta", cfg.ball_radii.delta}, {"omega", cfg.ball_radii.omega}};
    json x0s = json::array();
    for (const State& s : cfg.x0s) x0s.push_back({s.delta, s.omega});
    j["x0"] = x0s;
    j["sim_horizon"] = cfg.sim_horizon;
    j["dt"] = cfg.dt;
    j["sweep_bounds"] = cfg.sweep_bounds;
    j["attack"] = {{"x0", {cfg.attack_x0.delta, cfg.attack_x0.omega}},
                   {"horizon", cfg.attack_horizon}};
    j["coordinated"] = {{"x0", {cfg.coord_x0.delta, cfg.coord_x0.omega}},
                        {"switch_time", cfg.coord_switch_time
                                            ? json(*cfg.coord_switch_time)
                                            : json(nullptr)},
                        {"horizon", cfg.coord_horizon}};
    j["out_dir"] = cfg.out_dir;
    return j;
}

// Each output file travels with a metadata record of the full resolved
// configuration plus per-run results.
void write_meta(const fs::path& path, const ScenarioConfig& cfg, const json& extra) {
    json meta;
    meta["config"] = resolved_config_json(cfg);
    meta["run"] = extra;
    io::write_text_file(path, meta.dump(2) + "\n");
}

void write_set_bundle(const fs::path& dir, const std::string& base, const SetResult& set,
                      const ScenarioConfig& cfg, json extra = json::object()) {
    io::write_field_csv(dir / (base + ".csv"), set.value_field);
    io::write_text_file(dir / (base + "_contour.json"),
                        io::contour_to_json(set.boundary).dump() + "\n");
    for (const auto& [t, field] : set.snapshots) {
        const std::string tag = base + "_t" + io::format_double(t);
        io::write_field_csv(dir / (tag + ".csv"), field);
        io::write_text_file(dir / (tag + "_contour.json"),
                            io::contour_to_json(extract_zero_contour(field)).dump() + "\n");
    }
    extra["kind"] = static_cast<int>(set.kind);
    extra["horizon"] = set.horizon;
    extra["relay"] = relay_name(set.relay);
    extra["dbound"] = {{"lower", set.dbound.lower}, {"upper", set.dbound.upper}};
    extra["converged_at"] =
        set.converged_at ? json(*set.converged_at) : json(nullptr);
    extra["empty"] = is_empty(set);
    write_meta(dir / (base + "_meta.json"), cfg, extra);
}

fs::path ensure_out_dir(const ScenarioConfig& cfg) {
    fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir;
}

int cmd_stability(const ScenarioConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    for (RelayStatus relay : cfg.relays()) {
        SetResult region =
            stability_region(cfg.params, relay, cfg.grid, cfg.ball_radii, cfg.solve_config());
        const std::string base = std::string("stability_") + relay_name(relay);
        write_set_bundle(dir, base, region, cfg);
        if (region.converged_at) {
            std::printf("stability %s: converged at %.3f s\n", relay_name(relay),
                        *region.converged_at);
        } else {
            std::printf("stability %s: not converged within %.3f s\n", relay_name(relay),
                        cfg.horizon);
        }
    }
    return 0;
}

int cmd_invariant(const ScenarioConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const SafeBounds safe = cfg.safe_bounds();
    std::map<RelayStatus, SetResult> invariants;
    for (RelayStatus relay : cfg.relays()) {
        SetResult inv =
            invariant_set(safe, cfg.params, relay, cfg.dbound, cfg.grid, cfg.solve_config());
        SetResult viab =
            viability_set(safe, cfg.params, relay, cfg.dbound, cfg.grid, cfg.solve_config());
        write_set_bundle(dir, std::string("invariant_") + relay_name(relay), inv, cfg);
        write_set_bundle(dir, std::string("viability_") + relay_name(relay), viab, cfg);
        std::printf("invariant %s: %s (max value %g)\n", relay_name(relay),
                    is_empty(inv) ? "empty" : "nonempty", inv.value_field.max_value());
        invariants.emplace(relay, std::move(inv));
    }
    if (invariants.size() == 2) {
        // Resilient core for the coordinated threat: states robust to
        // the injection regardless of the breaker position.
        const ScalarField inter =
            pointwise_min(invariants.at(RelayStatus::Closed).value_field,
                          invariants.at(RelayStatus::Open).value_field);
        io::write_field_csv(dir / "invariant_intersection.csv", inter);
        io::write_text_file(dir / "invariant_intersection_contour.json",
                            io::contour_to_json(extract_zero_contour(inter)).dump() + "\n");
        write_meta(dir / "invariant_intersection_meta.json", cfg,
                   {{"empty", inter.max_value() < 0.0}});
        std::printf("invariant intersection: %s\n",
                    inter.max_value() < 0.0 ? "empty" : "nonempty");
    }
    return 0;
}

int cmd_simulate(const ScenarioConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    int leg = 0;
    for (const State& x0 : cfg.x0s) {
        for (RelayStatus relay : cfg.relays()) {
            Trajectory traj = simulate(x0, cfg.params, zero_disturbance, fixed_relay(relay),
                                       cfg.sim_horizon, cfg.dt);
            const std::string base =
                "simulate_" + std::to_string(leg) + "_" + relay_name(relay);
            io::write_trajectory_csv(dir / (base + ".csv"), traj);
            write_meta(dir / (base + "_meta.json"), cfg,
                       {{"x0", {x0.delta, x0.omega}},
                        {"relay", relay_name(relay)},
                        {"divergent", traj.divergent},
                        {"final", {traj.back().state.delta, traj.back().state.omega}}});
            std::printf("simulate leg %d (%s): final (%g, %g)%s\n", leg, relay_name(relay),
                        traj.back().state.delta, traj.back().state.omega,
                        traj.divergent ? " [divergent]" : "");
        }
        ++leg;
    }
    return 0;
}

int cmd_attack(const ScenarioConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    const SafeBounds safe = cfg.safe_bounds();

    // Optimal injection against each relay position, driven by the
    // converged robust-set field.
    for (RelayStatus relay : cfg.relays()) {
        SetResult inv =
            invariant_set(safe, cfg.params, relay, cfg.dbound, cfg.grid, cfg.solve_config());
        Trajectory traj = run_optimal_attack(cfg.attack_x0, cfg.params, relay, cfg.dbound,
                                             inv.value_field, cfg.attack_horizon, cfg.dt);
        bool exits = false;
        for (const Sample& s : traj.samples) {
            if (!in_safe_set(s.state, safe)) exits = true;
        }
        const std::string base = std::string("attack_") + relay_name(relay);
        io::write_trajectory_csv(dir / (base + ".csv"), traj);
        io::write_text_file(dir / (base + "_signal.csv"), io::attack_signal_csv(traj));
        write_meta(dir / (base + "_meta.json"), cfg,
                   {{"x0", {cfg.attack_x0.delta, cfg.attack_x0.omega}},
                    {"relay", relay_name(relay)},
                    {"exits_safe_set", exits}});
        std::printf("attack %s: %s the safe envelope\n", relay_name(relay),
                    exits ? "exits" : "stays inside");
    }

    // Two-phase replay: hold the state away from the open-relay region,
    // then trip the breaker. The control run keeps it closed.
    SetResult region = stability_region(cfg.params, RelayStatus::Open, cfg.grid,
                                        cfg.ball_radii, cfg.solve_config());
    CoordinatedPlan plan;
    plan.phase1 = {AttackPolicy::Mode::KeepOut, cfg.dbound, 0.0, region.value_field};
    if (cfg.coord_switch_time) {
        const double at = *cfg.coord_switch_time;
        plan.switch_when = [at](double t, const State&) { return t >= at; };
    } else {
        plan.switch_when = outside_region_predicate(region.value_field);
    }
    CoordinatedRun attack = run_coordinated(plan, cfg.coord_x0, cfg.params,
                                            cfg.coord_horizon, cfg.dt);
    CoordinatedPlan control = plan;
    control.phase2_relay = RelayStatus::Closed;
    CoordinatedRun held = run_coordinated(control, cfg.coord_x0, cfg.params,
                                          cfg.coord_horizon, cfg.dt);

    io::write_trajectory_csv(dir / "coordinated.csv", attack.trajectory);
    io::write_trajectory_csv(dir / "coordinated_control.csv", held.trajectory);
    const State eq = equilibria(cfg.params, RelayStatus::Closed).stable;
    auto dist_to_eq = [&](const Trajectory& t) {
        return std::hypot(t.back().state.delta - eq.delta, t.back().state.omega - eq.omega);
    };
    write_meta(dir / "coordinated_meta.json", cfg,
               {{"switch_time",
                 attack.switch_time ? json(*attack.switch_time) : json(nullptr)},
                {"attack_final_distance_to_nominal", dist_to_eq(attack.trajectory)},
                {"control_final_distance_to_nominal", dist_to_eq(held.trajectory)}});
    if (attack.switch_time) {
        std::printf("coordinated: switch at %.4f s, final distance to nominal %.4f "
                    "(control %.4f)\n",
                    *attack.switch_time, dist_to_eq(attack.trajectory),
                    dist_to_eq(held.trajectory));
    } else {
        std::printf("coordinated: switch predicate never fired\n");
    }
    return 0;
}

int cmd_sweep(const ScenarioConfig& cfg) {
    const fs::path dir = ensure_out_dir(cfg);
    for (RelayStatus relay : cfg.relays()) {
        SweepResult sweep = emptiness_sweep(cfg.safe_bounds(), cfg.params, relay,
                                            cfg.sweep_bounds, cfg.grid, cfg.solve_config());
        std::string csv = "bound,empty,max_value\n";
        for (const SweepEntry& e : sweep.entries) {
            csv += io::format_double(e.bound) + ',' + (e.empty ? "1" : "0") + ',' +
                   io::format_double(e.max_value) + '\n';
        }
        const std::string base = std::string("sweep_") + relay_name(relay);
        io::write_text_file(dir / (base + ".csv"), csv);
        write_meta(dir / (base + "_meta.json"), cfg,
                   {{"relay", relay_name(relay)},
                    {"threshold",
                     sweep.threshold ? json(*sweep.threshold) : json(nullptr)}});
        if (sweep.threshold) {
            std::printf("sweep %s: invariant set first empty at |d| >= %.3f\n",
                        relay_name(relay), *sweep.threshold);
        } else {
            std::printf("sweep %s: no listed bound empties the invariant set\n",
                        relay_name(relay));
        }
    }
    return 0;
}

int cmd_hitl_demo(const ScenarioConfig& cfg) {
    using namespace swingreach::hitl;
    using namespace std::chrono_literals;
    const fs::path dir = ensure_out_dir(cfg);
    const State x0 = cfg.x0s.front();
    const RelayStatus relay = cfg.relays().front();
    const double horizon = std::min(cfg.sim_horizon, 2.0);

    auto [plant_end, proxy_plant] = make_pipe_pair();
    auto [proxy_ctrl, ctrl_end] = make_pipe_pair();
    ProxyResult proxy;
    std::thread proxy_thread([&] {
        proxy = run_spoof_proxy({}, cfg.dbound, *proxy_plant, *proxy_ctrl);
    });
    std::thread controller([&] {
        run_controller_endpoint(zero_disturbance, fixed_relay(relay), cfg.params, cfg.dt,
                                *ctrl_end);
    });
    PlantRun run = run_plant_endpoint(cfg.params, x0, cfg.dt, horizon, *plant_end);
    controller.join();
    proxy_thread.join();

    Trajectory direct =
        simulate(x0, cfg.params, zero_disturbance, fixed_relay(relay), horizon, cfg.dt);
    double worst = std::numeric_limits<double>::infinity();
    bool ok = !run.abort_reason && run.trajectory.samples.size() == direct.samples.size();
    if (ok) {
        worst = 0.0;
        for (std::size_t k = 0; k < direct.samples.size(); ++k) {
            worst = std::max(worst,
                             std::abs(run.trajectory.samples[k].state.delta -
                                      direct.samples[k].state.delta));
            worst = std::max(worst,
                             std::abs(run.trajectory.samples[k].state.omega -
                                      direct.samples[k].state.omega));
        }
        ok = worst <= 1e-9 && proxy.tamper_log.empty();
    }
    io::write_trajectory_csv(dir / "hitl_demo.csv", run.trajectory);
    write_meta(dir / "hitl_demo_meta.json", cfg,
               {{"deterministic", ok},
                {"max_coordinate_deviation",
                 std::isfinite(worst) ? json(worst) : json(nullptr)},
                {"abort_reason",
                 run.abort_reason ? json(*run.abort_reason) : json(nullptr)}});
    std::printf("hitl demo: lockstep determinism %s (max deviation %s)\n",
                ok ? "PASS" : "FAIL",
                std::isfinite(worst) ? io::format_double(worst).c_str() : "n/a");
    return ok ? 0 : 1;
}

std::pair<std::string, uint16_t> parse_host_port(const std::string& s) {
    const auto colon = s.rfind(':');
    if (colon == std::string::npos) {
        throw ConfigError("expected HOST:PORT, got '" + s + "'");
    }
    return {s.substr(0, colon),
            static_cast<uint16_t>(io::parse_long(s.substr(colon + 1)))};
}

int cmd_hitl_plant(const ScenarioConfig& cfg, const std::string& connect, bool realtime) {
    using namespace swingreach::hitl;
    const fs::path dir = ensure_out_dir(cfg);
    auto [host, port] = parse_host_port(connect);
    auto link = tcp_connect(host, port);
    PlantRun run = run_plant_endpoint(cfg.params, cfg.x0s.front(), cfg.dt, cfg.sim_horizon,
                                      *link, kDefaultTimeout, realtime);
    io::write_trajectory_csv(dir / "hitl_plant.csv", run.trajectory);
    write_meta(dir / "hitl_plant_meta.json", cfg,
               {{"abort_reason",
                 run.abort_reason ? json(*run.abort_reason) : json(nullptr)},
                {"divergent", run.trajectory.divergent},
                {"samples", run.trajectory.samples.size()}});
    if (run.abort_reason) {
        std::fprintf(stderr, "plant endpoint aborted: %s\n", run.abort_reason->c_str());
        return 1;
    }
    std::printf("plant endpoint finished: %zu samples\n", run.trajectory.samples.size());
    return 0;
}

int cmd_hitl_controller(const ScenarioConfig& cfg, uint16_t listen_port,
                        const std::string& policy_name, const std::string& field_csv,
                        double open_at) {
    using namespace swingreach::hitl;
    AttackPolicy policy;
    policy.dbound = cfg.dbound;
    if (policy_name == "zero") {
        policy.mode = AttackPolicy::Mode::Zero;
    } else if (policy_name == "keep_out" || policy_name == "keep_in") {
        policy.mode = policy_name == "keep_out" ? AttackPolicy::Mode::KeepOut
                                                : AttackPolicy::Mode::KeepIn;
        if (field_csv.empty()) {
            throw ConfigError("controller: gradient policies need --value-field CSV");
        }
        policy.gradient_source = io::read_field_csv(field_csv);
    } else {
        throw ConfigError("controller: unknown policy '" + policy_name + "'");
    }
    RelaySchedule schedule;
    const RelayStatus base = cfg.relays().front();
    if (open_at >= 0) {
        schedule = [open_at](double t) {
            return t >= open_at ? RelayStatus::Open : RelayStatus::Closed;
        };
    } else {
        schedule = fixed_relay(base);
    }

    TcpListener listener(listen_port);
    std::printf("controller listening on port %u\n", listener.port());
    auto link = listener.accept(std::chrono::milliseconds(60000));
    ControllerRun run = run_controller_endpoint(make_policy(policy, cfg.params), schedule,
                                                cfg.params, cfg.dt, *link);
    if (run.abort_reason) {
        std::fprintf(stderr, "controller aborted: %s\n", run.abort_reason->c_str());
        return 1;
    }
    std::printf("controller finished: %zu frames sent\n", run.command_log.size());
    return 0;
}

int cmd_hitl_proxy(const ScenarioConfig& cfg, uint16_t listen_port,
                   const std::string& connect, const std::string& rules_json) {
    using namespace swingreach::hitl;
    const fs::path dir = ensure_out_dir(cfg);
    std::vector<SpoofRule> rules;
    if (!rules_json.empty()) {
        const json spec = json::parse(io::read_text_file(rules_json));
        for (const json& r : spec) {
            SpoofRule rule;
            if (r.contains("t_begin")) rule.t_begin = r["t_begin"];
            if (r.contains("t_end")) rule.t_end = r["t_end"];
            if (r.contains("d")) rule.d_constant = r["d"].get<double>();
            if (r.contains("relay")) {
                rule.relay_override = r["relay"] == "open" ? RelayStatus::Open
                                                           : RelayStatus::Closed;
            }
            rule.validate();
            rules.push_back(std::move(rule));
        }
    }
    auto [host, port] = parse_host_port(connect);
    TcpListener listener(listen_port);
    std::printf("proxy listening on port %u, forwarding to %s\n", listener.port(),
                connect.c_str());
    auto plant_side = listener.accept(std::chrono::milliseconds(60000));
    auto controller_side = tcp_connect(host, port);
    ProxyResult result = run_spoof_proxy(rules, cfg.dbound, *plant_side, *controller_side);

    std::string log;
    for (const TamperRecord& r : result.tamper_log) {
        json line{{"seq", r.seq}, {"t", r.t}, {"field", r.field},
                  {"before", r.before}, {"after", r.after}};
        log += line.dump() + "\n";
    }
    io::write_text_file(dir / "tamper_log.jsonl", log);
    for (const auto& w : result.warnings) {
        std::fprintf(stderr, "proxy warning: %s\n", w.c_str());
    }
    std::printf("proxy finished: %zu rewrites logged\n", result.tamper_log.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reachability analysis and attack replay for the SMIB rotor model"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    int grid_n = 0;
    double horizon = -1.0;
    app.add_option("--config", config_path, "JSON scenario configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--grid", grid_n, "override node count per axis");
    app.add_option("--horizon", horizon, "override the backward-time horizon [s]");

    auto* stability = app.add_subcommand("stability", "stability regions per relay state");
    auto* invariant = app.add_subcommand(
        "invariant", "invariant/viability sets under the disturbance bound");
    auto* simulate_cmd =
        app.add_subcommand("simulate", "undisturbed trajectories from the listed states");
    auto* attack = app.add_subcommand(
        "attack", "optimal injection runs and the coordinated breaker replay");
    std::string sweep_relay = "both";
    auto* sweep = app.add_subcommand("sweep", "invariant-set emptiness thresholds");
    sweep->add_option("--relay", sweep_relay, "closed | open | both");

    auto* hitl_demo = app.add_subcommand(
        "hitl", "in-process plant/controller/proxy lockstep determinism check");
    std::string connect, field_csv, rules_json, policy_name = "zero";
    uint16_t listen_port = 0;
    double open_at = -1.0;
    bool realtime = false;
    auto* hitl_plant = app.add_subcommand("hitl-plant", "plant endpoint (connects out)");
    hitl_plant->add_option("--connect", connect, "controller or proxy HOST:PORT")
        ->required();
    hitl_plant->add_flag("--realtime", realtime, "pace steps against the wall clock");
    auto* hitl_controller =
        app.add_subcommand("hitl-controller", "controller endpoint (listens)");
    hitl_controller->add_option("--listen", listen_port, "listening port (0 = ephemeral)");
    hitl_controller->add_option("--policy", policy_name, "zero | keep_out | keep_in");
    hitl_controller->add_option("--value-field", field_csv,
                                "value-field CSV for gradient policies");
    hitl_controller->add_option("--open-at", open_at, "open the relay at this time [s]");
    auto* hitl_proxy = app.add_subcommand("hitl-proxy", "spoofing man-in-the-middle");
    hitl_proxy->add_option("--listen", listen_port, "port facing the plant");
    hitl_proxy->add_option("--connect", connect, "controller HOST:PORT")->required();
    hitl_proxy->add_option("--rules", rules_json, "JSON file with spoof rules");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        ScenarioConfig cfg;
        if (!config_path.empty()) {
            apply_json(cfg, json::parse(io::read_text_file(config_path)));
        }
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (grid_n > 0) cfg.grid.n_delta = cfg.grid.n_omega = grid_n;
        if (horizon >= 0.0) cfg.horizon = horizon;
        cfg.grid.validate();
        cfg.params.validate();
        cfg.dbound.validate();
        if (sweep->parsed()) cfg.relay = sweep_relay;

        if (stability->parsed()) return cmd_stability(cfg);
        if (invariant->parsed()) return cmd_invariant(cfg);
        if (simulate_cmd->parsed()) return cmd_simulate(cfg);
        if (attack->parsed()) return cmd_attack(cfg);
        if (sweep->parsed()) return cmd_sweep(cfg);
        if (hitl_demo->parsed()) return cmd_hitl_demo(cfg);
        if (hitl_plant->parsed()) return cmd_hitl_plant(cfg, connect, realtime);
        if (hitl_controller->parsed()) {
            return cmd_hitl_controller(cfg, listen_port, policy_name, field_csv, open_at);
        }
        if (hitl_proxy->parsed()) {
            return cmd_hitl_proxy(cfg, listen_port, connect, rules_json);
        }
        return 2;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
