#include "sac/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sac/algebra.hpp"
#include "sac/chaos.hpp"
#include "sac/errors.hpp"
#include "sac/harness.hpp"
#include "sac/io.hpp"
#include "sac/kernels.hpp"
#include "sac/renorm.hpp"
#include "sac/solver.hpp"

namespace sac::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------- validation

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
}

void check_keys(const json& j, const std::string& ctx, const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
    require_object(j, ctx);
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
    for (const auto& k : required)
        if (!j.contains(k)) throw ConfigError(ctx + ": missing required key '" + k + "'");
}

double get_num(const json& j, const std::string& ctx, const std::string& key,
               std::optional<double> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(ctx + ": missing '" + key + "'");
    }
    if (!j[key].is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
    return j[key].get<double>();
}

long get_int(const json& j, const std::string& ctx, const std::string& key,
             std::optional<long> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(ctx + ": missing '" + key + "'");
    }
    if (!j[key].is_number_integer()) throw ConfigError(ctx + "." + key + ": expected an integer");
    return j[key].get<long>();
}

bool get_bool(const json& j, const std::string& ctx, const std::string& key, bool def) {
    if (!j.contains(key)) return def;
    if (!j[key].is_boolean()) throw ConfigError(ctx + "." + key + ": expected a boolean");
    return j[key].get<bool>();
}

std::string get_str(const json& j, const std::string& ctx, const std::string& key,
                    std::optional<std::string> def = std::nullopt) {
    if (!j.contains(key)) {
        if (def) return *def;
        throw ConfigError(ctx + ": missing '" + key + "'");
    }
    if (!j[key].is_string()) throw ConfigError(ctx + "." + key + ": expected a string");
    return j[key].get<std::string>();
}

std::vector<double> get_num_list(const json& j, const std::string& ctx, const std::string& key) {
    if (!j.contains(key) || !j[key].is_array() || j[key].empty())
        throw ConfigError(ctx + ": '" + key + "' must be a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& v : j[key]) {
        if (!v.is_number()) throw ConfigError(ctx + "." + key + ": expected numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

GridSpec parse_grid(const json& root) {
    check_keys(root.at("grid"), "grid", {"d", "T", "n_t", "n_x"}, {"d", "T", "n_t", "n_x"});
    const json& g = root.at("grid");
    GridSpec spec{static_cast<int>(get_int(g, "grid", "d")), get_num(g, "grid", "T"),
                  static_cast<int>(get_int(g, "grid", "n_t")),
                  static_cast<int>(get_int(g, "grid", "n_x"))};
    try {
        spec.validate();
    } catch (const StructuralError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
    return spec;
}

Mollifier parse_mollifier(const json& noise) {
    Mollifier m;
    if (!noise.contains("mollifier")) return m;
    const std::string kind = noise.at("mollifier").get<std::string>();
    if (kind == "bump")
        m.kind = Mollifier::Kind::Bump;
    else if (kind == "sharp-bump")
        m.kind = Mollifier::Kind::SharpBump;
    else
        throw ConfigError("noise.mollifier: unknown kind '" + kind + "'");
    return m;
}

struct NoiseSection {
    std::uint64_t seed = 1;
    Mollifier mollifier;
    std::optional<double> delta;
    std::optional<double> schedule_lambda;
};

NoiseSection parse_noise(const json& root, bool required) {
    NoiseSection ns;
    if (!root.contains("noise")) {
        if (required) throw ConfigError("missing 'noise' section");
        return ns;
    }
    const json& n = root.at("noise");
    check_keys(n, "noise", {"seed", "mollifier", "delta", "schedule"}, {});
    if (n.contains("seed")) ns.seed = static_cast<std::uint64_t>(get_int(n, "noise", "seed"));
    ns.mollifier = parse_mollifier(n);
    if (n.contains("delta")) ns.delta = get_num(n, "noise", "delta");
    if (n.contains("schedule")) {
        check_keys(n.at("schedule"), "noise.schedule", {"lambda"}, {"lambda"});
        ns.schedule_lambda = get_num(n.at("schedule"), "noise.schedule", "lambda");
    }
    if (ns.delta && ns.schedule_lambda)
        throw ConfigError("noise: give either 'delta' or 'schedule', not both");
    return ns;
}

struct EquationSection {
    double C = 0.0;
    double eps = 0.0;
    bool renormalised = false;
};

EquationSection parse_equation(const json& root, bool required) {
    EquationSection eq;
    if (!root.contains("equation")) {
        if (required) throw ConfigError("missing 'equation' section");
        return eq;
    }
    const json& e = root.at("equation");
    check_keys(e, "equation", {"C", "eps", "renormalised"}, {});
    eq.C = get_num(e, "equation", "C", 0.0);
    eq.eps = get_num(e, "equation", "eps", 0.0);
    eq.renormalised = get_bool(e, "equation", "renormalised", false);
    if (eq.eps < 0.0) throw ConfigError("equation.eps must be nonnegative");
    return eq;
}

TestFunction parse_phi(const json& run, const GridSpec& spec) {
    check_keys(run.at("phi"), "run.phi", {"t0", "x0", "lambda", "profile"}, {"t0", "lambda"});
    const json& p = run.at("phi");
    TestFunction tf;
    tf.t0 = get_num(p, "run.phi", "t0");
    tf.lambda = get_num(p, "run.phi", "lambda");
    if (p.contains("x0")) {
        const auto x0 = get_num_list(p, "run.phi", "x0");
        if (static_cast<int>(x0.size()) != spec.d)
            throw ConfigError("run.phi.x0 must have d entries");
        for (std::size_t i = 0; i < x0.size(); ++i) tf.x0[i] = x0[i];
    } else {
        tf.x0 = {0.5, 0.5, 0.5};
    }
    if (p.contains("profile")) {
        const std::string prof = get_str(p, "run.phi", "profile");
        if (prof == "bump")
            tf.profile = TestFunction::Profile::Bump;
        else if (prof == "sharp-bump")
            tf.profile = TestFunction::Profile::SharpBump;
        else
            throw ConfigError("run.phi.profile: unknown profile '" + prof + "'");
    }
    return tf;
}

// ---------------------------------------------------------------- output

struct Outputs {
    fs::path dir;
    std::vector<std::string> files;

    fs::path emit(const std::string& name) {
        files.push_back(name);
        return dir / name;
    }
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
}

void write_manifest(Outputs& outs, const std::string& command, const json& resolved,
                    std::uint64_t seed, const Context& ctx) {
    json manifest;
    manifest["command"] = command;
    manifest["config"] = resolved;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a(resolved.dump())));
    manifest["config_hash"] = hex;
    manifest["master_seed"] = seed;
    manifest["workers"] = ctx.workers;
    manifest["format"] = ctx.format;
    manifest["versions"] = {{"saclab", kVersion}};
    manifest["kernel_backend"] = kernels::backend_name();
    manifest["outputs"] = outs.files;
    write_json_file(outs.dir / "manifest.json", manifest);
}

void save_table(Outputs& outs, const Context& ctx, const std::string& stem, const CsvWriter& csv) {
    if (ctx.format == "json") {
        json rows = json::array();
        for (const auto& row : csv.rows()) {
            json r;
            for (std::size_t i = 0; i < csv.columns().size(); ++i) r[csv.columns()[i]] = row[i];
            rows.push_back(r);
        }
        write_json_file(outs.emit(stem + ".json"), rows);
    } else {
        csv.save(outs.emit(stem + ".csv").string());
    }
}

std::uint64_t resolve_seed(const NoiseSection& ns, const Context& ctx) {
    if (ctx.seed_override) return *ctx.seed_override;
    if (const char* env = std::getenv("SACLAB_SEED")) return std::strtoull(env, nullptr, 10);
    return ns.seed;
}

// ---------------------------------------------------------------- commands

int cmd_simulate(const json& cfg, const Context& ctx, Outputs& outs, json& resolved) {
    check_keys(cfg, "config", {"grid", "noise", "equation", "run"}, {"grid", "equation"});
    const GridSpec spec = parse_grid(cfg);
    const NoiseSection ns = parse_noise(cfg, /*required=*/false);
    const EquationSection eq = parse_equation(cfg, /*required=*/true);

    json run = cfg.value("run", json::object());
    check_keys(run, "run", {"u0_constant", "blowup_threshold", "dealias", "write_csv_slices"}, {});

    SolveConfig sc;
    sc.spec = spec;
    sc.C = eq.C;
    sc.eps = eq.eps;
    sc.renormalised = eq.renormalised;
    sc.mollifier = ns.mollifier;
    sc.blowup_threshold = get_num(run, "run", "blowup_threshold", 1e6);
    sc.dealias_two_thirds = get_bool(run, "run", "dealias", false);
    const double u0c = get_num(run, "run", "u0_constant", 0.0);
    if (u0c != 0.0) sc.u0.assign(static_cast<std::size_t>(spec.n_space()), u0c);
    if (eq.eps > 0.0) {
        if (!ns.delta) throw ConfigError("simulate with eps > 0 needs noise.delta");
        sc.delta = *ns.delta;
    }
    sc.validate();

    const std::uint64_t seed = resolve_seed(ns, ctx);
    resolved["resolved"] = {{"master_seed", seed},
                            {"u0_constant", u0c},
                            {"blowup_threshold", sc.blowup_threshold}};

    Trajectory traj;
    if (eq.eps > 0.0) {
        const auto xi = sample_white_noise(spec, seed);
        traj = solve(sc, &xi);
    } else {
        traj = solve(sc);
    }

    write_field(outs.emit("trajectory.bin").string(), traj.u);
    if (get_bool(run, "run", "write_csv_slices", false))
        write_field_csv(outs.emit("trajectory_slices.csv").string(), traj.u,
                        {0, spec.n_t / 2, spec.n_t - 1});

    json side;
    side["c_eff"] = traj.c_eff;
    side["blowup_time"] = traj.blowup_time ? json(*traj.blowup_time) : json(nullptr);
    side["terminal_sup"] = kernels::active().absmax(traj.u.slice(spec.n_t - 1),
                                                    static_cast<std::size_t>(spec.n_space()));
    write_json_file(outs.emit("trajectory.json"), side);
    write_manifest(outs, "simulate", resolved, seed, ctx);

    if (traj.blown_up()) {
        json diag = {{"error", "numerical"},
                     {"message", "trajectory hit the blowup cap (cemetery state)"},
                     {"blowup_time", *traj.blowup_time}};
        std::cerr << diag.dump() << "\n";
        return 3;
    }
    return 0;
}

int cmd_renorm_constants(const json& cfg, const Context& ctx, Outputs& outs, json& resolved) {
    check_keys(cfg, "config", {"grid", "noise", "run"}, {"grid", "run"});
    const GridSpec spec = parse_grid(cfg);
    const NoiseSection ns = parse_noise(cfg, /*required=*/false);
    const json& run = cfg.at("run");
    check_keys(run, "run", {"deltas", "t_ref", "with_c2"}, {"deltas"});
    auto deltas = get_num_list(run, "run", "deltas");
    std::sort(deltas.begin(), deltas.end(), std::greater<double>());
    const double t_ref = get_num(run, "run", "t_ref", -1.0);
    const bool with_c2 = get_bool(run, "run", "with_c2", spec.d == 3);
    if (with_c2 && spec.d != 3) throw ConfigError("run.with_c2 requires d=3");

    resolved["resolved"] = {{"t_ref", t_ref}, {"with_c2", with_c2}};

    CsvWriter csv({"delta", "c1", "c2", "delta_c1", "c1_diff"});
    double prev_c1 = 0.0;
    bool have_prev = false;
    for (double dl : deltas) {
        const double c1 = c1_constant(spec, dl, ns.mollifier, t_ref);
        std::vector<std::string> row;
        row.push_back(format_double(dl));
        row.push_back(format_double(c1));
        row.push_back(with_c2 ? format_double(c2_constant(spec, dl, ns.mollifier)) : "");
        row.push_back(format_double(dl * c1));
        row.push_back(have_prev ? format_double(c1 - prev_c1) : "");
        csv.add_row(row);
        prev_c1 = c1;
        have_prev = true;
    }
    save_table(outs, ctx, "constants", csv);
    write_manifest(outs, "renorm-constants", resolved, resolve_seed(ns, ctx), ctx);
    return 0;
}

int cmd_model_check(const json& cfg, const Context& ctx, Outputs& outs, json& resolved) {
    check_keys(cfg, "config", {"grid", "noise", "equation", "run"}, {"grid", "noise", "run"});
    const GridSpec spec = parse_grid(cfg);
    const NoiseSection ns = parse_noise(cfg, /*required=*/true);
    const EquationSection eq = parse_equation(cfg, /*required=*/false);
    const double eps = eq.eps > 0.0 ? eq.eps : 1.0;

    const json& run = cfg.at("run");
    check_keys(run, "run", {"deltas", "seeds", "phi"}, {"deltas", "seeds", "phi"});
    const auto deltas = get_num_list(run, "run", "deltas");
    const int n_seeds = static_cast<int>(get_int(run, "run", "seeds"));
    if (n_seeds < 2) throw ConfigError("run.seeds must be at least 2");
    const TestFunction phi = parse_phi(run, spec);

    const std::uint64_t seed = resolve_seed(ns, ctx);
    resolved["resolved"] = {{"master_seed", seed}, {"eps", eps}};

    CsvWriter csv({"delta", "symbol", "estimator", "n", "mean", "stderr", "variance"});

    for (double dl : deltas) {
        require_mollifier_resolvable(spec, dl);
        const RenormConstants consts = compute_constants(spec, dl, ns.mollifier, phi.t0);

        std::vector<std::string> symbols = {"I(Xi)", "I(Xi)^2", "I(Xi)^3"};
        if (spec.d == 3)
            symbols.insert(symbols.end(),
                           {"I(Xi)^2*I(I(Xi)^2)", "I(Xi)*I(I(Xi)^3)", "I(Xi)^2*I(I(Xi)^3)"});

        std::map<std::string, ChaosSampleStats> stats_raw, stats_ren;
        for (const auto& s : symbols) {
            stats_raw[s] = {};
            stats_ren[s] = {};
        }

        for (int s = 0; s < n_seeds; ++s) {
            const auto xi = sample_white_noise(spec, derive_trial_seed(seed, static_cast<std::uint64_t>(s)));
            const MinimalModel raw = build_minimal_model(xi, dl, false, eps, consts, ns.mollifier);
            const MinimalModel ren = build_minimal_model(xi, dl, true, eps, consts, ns.mollifier);
            for (const auto* m : {&raw, &ren}) {
                auto& stats = m->renormalised ? stats_ren : stats_raw;
                stats["I(Xi)"].add(test_pair(m->lin, phi));
                stats["I(Xi)^2"].add(test_pair(m->quad, phi));
                stats["I(Xi)^3"].add(test_pair(m->cubic, phi));
                if (spec.d == 3) {
                    stats["I(Xi)^2*I(I(Xi)^2)"].add(
                        model_pair_3d(*m, CompositeSymbol::QuadIntTimesQuad, phi));
                    stats["I(Xi)*I(I(Xi)^3)"].add(
                        model_pair_3d(*m, CompositeSymbol::CubicIntTimesLin, phi));
                    stats["I(Xi)^2*I(I(Xi)^3)"].add(
                        model_pair_3d(*m, CompositeSymbol::CubicIntTimesQuad, phi));
                }
            }
        }

        for (const auto& s : symbols) {
            for (bool ren : {false, true}) {
                const auto& st = ren ? stats_ren[s] : stats_raw[s];
                csv.add_row({format_double(dl), s, ren ? "renormalised" : "raw",
                             std::to_string(st.samples.size()), format_double(st.mean()),
                             format_double(st.stderr_mean()), format_double(st.variance())});
            }
        }
    }
    save_table(outs, ctx, "model_check", csv);
    write_manifest(outs, "model-check", resolved, seed, ctx);
    return 0;
}

TerminalCondition parse_target(const json& run, const GridSpec& spec, const SolveConfig& base) {
    check_keys(run.at("target"), "run.target",
               {"kind", "constant", "field_file", "from_deterministic", "radius", "threshold",
                "center_constant"},
               {"kind"});
    const json& t = run.at("target");
    const std::string kind = get_str(t, "run.target", "kind");
    TerminalCondition tc;
    const std::size_t nsp = static_cast<std::size_t>(spec.n_space());
    if (kind == "match-field") {
        tc.kind = TerminalCondition::Kind::MatchField;
        if (t.contains("field_file")) {
            const GridField f = read_field(get_str(t, "run.target", "field_file"));
            if (f.spec().n_space() != spec.n_space())
                throw ConfigError("target field file has the wrong spatial size");
            tc.field.assign(f.slice(f.spec().n_t - 1), f.slice(f.spec().n_t - 1) + nsp);
        } else if (get_bool(t, "run.target", "from_deterministic", false)) {
            const Trajectory det = solve(base);
            tc.field.assign(det.u.slice(spec.n_t - 1), det.u.slice(spec.n_t - 1) + nsp);
        } else {
            tc.field.assign(nsp, get_num(t, "run.target", "constant", 0.0));
        }
    } else if (kind == "exit-ball") {
        tc.kind = TerminalCondition::Kind::ExitBall;
        tc.radius = get_num(t, "run.target", "radius");
        if (t.contains("center_constant"))
            tc.field.assign(nsp, get_num(t, "run.target", "center_constant"));
    } else if (kind == "mean-above") {
        tc.kind = TerminalCondition::Kind::MeanAbove;
        tc.threshold = get_num(t, "run.target", "threshold");
    } else if (kind == "mean-below") {
        tc.kind = TerminalCondition::Kind::MeanBelow;
        tc.threshold = get_num(t, "run.target", "threshold");
    } else {
        throw ConfigError("run.target.kind: unknown kind '" + kind + "'");
    }
    return tc;
}

int cmd_minimize_action(const json& cfg, const Context& ctx, Outputs& outs, json& resolved) {
    check_keys(cfg, "config", {"grid", "noise", "equation", "run"}, {"grid", "equation", "run"});
    const GridSpec spec = parse_grid(cfg);
    const NoiseSection ns = parse_noise(cfg, /*required=*/false);
    const EquationSection eq = parse_equation(cfg, /*required=*/true);
    const json& run = cfg.at("run");
    check_keys(run, "run",
               {"target", "lambda", "mu_schedule", "max_iters", "grad_tol", "u0_constant"},
               {"target"});

    SolveConfig base;
    base.spec = spec;
    base.C = eq.C;
    base.mollifier = ns.mollifier;
    const double u0c = get_num(run, "run", "u0_constant", 0.0);
    if (u0c != 0.0) base.u0.assign(static_cast<std::size_t>(spec.n_space()), u0c);

    const TerminalCondition target = parse_target(run, spec, base);
    MinimizeOptions opts;
    if (run.contains("mu_schedule")) opts.mu_schedule = get_num_list(run, "run", "mu_schedule");
    opts.max_iters = static_cast<int>(get_int(run, "run", "max_iters", 200));
    opts.grad_tol = get_num(run, "run", "grad_tol", 1e-9);
    std::optional<double> lambda;
    if (run.contains("lambda")) lambda = get_num(run, "run", "lambda");

    resolved["resolved"] = {{"mu_schedule", opts.mu_schedule}, {"max_iters", opts.max_iters}};

    const InstantonResult res = minimize_action(base, target, opts, lambda);

    write_field(outs.emit("control.bin").string(), res.control);
    write_field(outs.emit("trajectory.bin").string(), res.trajectory.u);
    json summary;
    summary["action"] = res.action;
    summary["misfit"] = res.misfit;
    summary["converged"] = res.converged;
    summary["c_eff"] = res.trajectory.c_eff;
    summary["note"] = res.note;
    summary["iterations"] = json::array();
    for (const auto& r : res.log)
        summary["iterations"].push_back(
            {{"stage", r.stage}, {"iter", r.iter}, {"J", r.objective}, {"grad", r.grad_norm}});
    write_json_file(outs.emit("summary.json"), summary);
    write_manifest(outs, "minimize-action", resolved, resolve_seed(ns, ctx), ctx);

    if (!res.converged) {
        json diag = {{"error", "numerical"},
                     {"message", "minimizer did not reach the gradient tolerance"},
                     {"action", res.action},
                     {"misfit", res.misfit}};
        std::cerr << diag.dump() << "\n";
        return 3;
    }
    return 0;
}

EventSpec parse_event(const json& run, const GridSpec& spec) {
    check_keys(run.at("event"), "run.event", {"kind", "radius", "level", "center_constant"},
               {"kind"});
    const json& e = run.at("event");
    const std::string kind = get_str(e, "run.event", "kind");
    EventSpec ev;
    if (kind == "terminal-l2-exit") {
        ev.kind = EventSpec::Kind::TerminalL2Exit;
        ev.radius = get_num(e, "run.event", "radius");
        if (e.contains("center_constant"))
            ev.center.assign(static_cast<std::size_t>(spec.n_space()),
                             get_num(e, "run.event", "center_constant"));
    } else if (kind == "running-sup-exceed") {
        ev.kind = EventSpec::Kind::RunningSupExceed;
        ev.level = get_num(e, "run.event", "level");
    } else if (kind == "sign-change") {
        ev.kind = EventSpec::Kind::SignChange;
        ev.level = get_num(e, "run.event", "level");
    } else {
        throw ConfigError("run.event.kind: unknown kind '" + kind + "'");
    }
    return ev;
}

int cmd_ldp_scan(const json& cfg, const Context& ctx, Outputs& outs, json& resolved) {
    check_keys(cfg, "config", {"grid", "noise", "equation", "run"},
               {"grid", "noise", "equation", "run"});
    const GridSpec spec = parse_grid(cfg);
    const NoiseSection ns = parse_noise(cfg, /*required=*/true);
    const EquationSection eq = parse_equation(cfg, /*required=*/true);
    const json& run = cfg.at("run");
    check_keys(run, "run",
               {"eps_list", "trials", "estimator", "event", "allow_delta_floor", "u0_constant",
                "instanton", "blowup_threshold"},
               {"eps_list", "trials", "estimator", "event"});

    SolveConfig base;
    base.spec = spec;
    base.C = eq.C;
    base.renormalised = eq.renormalised;
    base.mollifier = ns.mollifier;
    base.blowup_threshold = get_num(run, "run", "blowup_threshold", 1e6);
    const double u0c = get_num(run, "run", "u0_constant", 0.0);
    if (u0c != 0.0) base.u0.assign(static_cast<std::size_t>(spec.n_space()), u0c);

    Schedule schedule{spec.d, 0.0};
    std::optional<double> fixed_delta = ns.delta;
    if (ns.schedule_lambda) schedule.lambda = *ns.schedule_lambda;
    if (!fixed_delta && !ns.schedule_lambda)
        throw ConfigError("ldp-scan needs noise.delta or noise.schedule.lambda");

    const EventSpec event = parse_event(run, spec);
    RareEventOptions opts;
    opts.trials = get_int(run, "run", "trials");
    const std::string estimator = get_str(run, "run", "estimator");
    if (estimator == "plain")
        opts.estimator = Estimator::Plain;
    else if (estimator == "tilted")
        opts.estimator = Estimator::Tilted;
    else
        throw ConfigError("run.estimator must be 'plain' or 'tilted'");
    opts.master_seed = resolve_seed(ns, ctx);
    opts.workers = ctx.workers;
    opts.allow_delta_floor = get_bool(run, "run", "allow_delta_floor", false);

    const auto eps_list = get_num_list(run, "run", "eps_list");
    resolved["resolved"] = {{"master_seed", opts.master_seed},
                            {"estimator", estimator},
                            {"event", event.name()}};

    // Instanton for the event: required by the tilted estimator, and used for
    // the rate comparison either way.
    std::optional<InstantonResult> instanton;
    {
        MinimizeOptions mopts;
        if (run.contains("instanton")) {
            const json& io_ = run.at("instanton");
            check_keys(io_, "run.instanton", {"mu_schedule", "max_iters", "grad_tol"}, {});
            if (io_.contains("mu_schedule"))
                mopts.mu_schedule = get_num_list(io_, "run.instanton", "mu_schedule");
            mopts.max_iters = static_cast<int>(get_int(io_, "run.instanton", "max_iters", 200));
            mopts.grad_tol = get_num(io_, "run.instanton", "grad_tol", 1e-9);
        }
        const TerminalCondition tc = event_terminal_condition(event, spec);
        instanton = minimize_action(base, tc, mopts);
        if (opts.estimator == Estimator::Tilted && !instanton->converged)
            throw NumericalFailure("instanton minimisation did not converge; cannot tilt");
    }

    if (fixed_delta) schedule.fixed_delta = fixed_delta;
    const LdpTable table = estimate_rare_event(base, schedule, eps_list, event, opts,
                                               instanton ? &instanton->control : nullptr);

    CsvWriter csv({"eps", "delta", "delta_used", "trials", "hits", "p_hat", "stderr",
                   "rate_estimate", "flag"});
    for (const auto& r : table.rows)
        csv.add_row({format_double(r.eps), format_double(r.delta_schedule),
                     format_double(r.delta_used), std::to_string(r.trials),
                     format_double(r.hits), format_double(r.p_hat), format_double(r.stderr_p),
                     format_double(r.rate_estimate), r.flag});
    save_table(outs, ctx, "ldp_table", csv);

    const RateComparison cmp = compare_with_rate(table, instanton->action);
    json cj;
    cj["instanton_action"] = cmp.instanton_action;
    cj["instanton_converged"] = instanton->converged;
    cj["verdict"] = cmp.verdict;
    cj["rows"] = json::array();
    for (const auto& r : cmp.rows)
        cj["rows"].push_back({{"eps", r.eps},
                              {"rate_estimate", r.rate_estimate},
                              {"rate_stderr", r.rate_stderr},
                              {"gap", r.gap}});
    write_json_file(outs.emit("compare.json"), cj);
    {
        std::ofstream txt(outs.emit("compare.txt"));
        txt << cmp.rendering;
    }
    write_field(outs.emit("instanton_control.bin").string(), instanton->control);
    write_manifest(outs, "ldp-scan", resolved, opts.master_seed, ctx);
    return 0;
}

int cmd_algebra(const json& cfg, const Context& ctx, Outputs& outs, json& resolved) {
    check_keys(cfg, "config", {"run"}, {"run"});
    const json& run = cfg.at("run");
    check_keys(run, "run", {"query"}, {"query"});
    const std::string query = get_str(run, "run", "query");

    std::istringstream is(query);
    std::vector<std::string> tok;
    for (std::string w; is >> w;) tok.push_back(w);
    if (tok.empty()) throw ConfigError("run.query is empty");

    auto parse_d = [&](const std::string& w) {
        if (w.rfind("d=", 0) != 0) throw ConfigError("expected d=<n> in query");
        const int d = std::stoi(w.substr(2));
        return d;
    };

    std::ostringstream os;
    using namespace sac::algebra;
    if (tok[0] == "W_minus" || tok[0] == "W" || tok[0] == "U" || tok[0] == "W_plus") {
        if (tok.size() != 2) throw ConfigError("query: expected '<set> d=<n>'");
        const int d = parse_d(tok[1]);
        const SymbolSets sets = generate_symbols(d);
        const std::vector<Symbol>* list = nullptr;
        if (tok[0] == "W_minus") list = &sets.W_minus;
        else if (tok[0] == "W") list = &sets.W;
        else if (tok[0] == "U") list = &sets.U;
        if (list) {
            os << tok[0] << " (d=" << d << "), " << list->size() << " symbols\n";
            for (const auto& s : *list)
                os << "  " << to_string(s) << "    |.| = " << homogeneity(s, d).str()
                   << "    chaos order " << chaos_order(s) << "\n";
        } else {
            os << "W_plus generators (d=" << d << ")\n";
            for (const auto& x : sets.W_plus_x) os << "  " << to_string(x) << "\n";
            for (const auto& jg : sets.W_plus_j) {
                os << "  J";
                if (jg.k != MultiIndex{0, 0, 0, 0})
                    os << "[" << jg.k[0] << "," << jg.k[1] << "," << jg.k[2] << "," << jg.k[3]
                       << "]";
                os << "(" << to_string(jg.tau) << ")\n";
            }
        }
    } else if (tok[0] == "homogeneity" || tok[0] == "chaos" || tok[0] == "coproduct") {
        if (tok.size() < 2) throw ConfigError("query: expected '<op> <expr> [d=<n>]'");
        const bool has_d = tok.back().rfind("d=", 0) == 0;
        const int d = has_d ? parse_d(tok.back()) : 3;
        std::string expr;
        for (std::size_t i = 1; i + (has_d ? 1 : 0) < tok.size(); ++i) expr += tok[i];
        const Symbol s = parse_symbol(expr);
        if (tok[0] == "homogeneity") {
            os << "|" << to_string(s) << "| = " << homogeneity(s, d).str() << " (d=" << d << ")\n";
        } else if (tok[0] == "chaos") {
            os << "chaos_order(" << to_string(s) << ") = " << chaos_order(s) << "\n";
        } else {
            os << "coproduct of " << to_string(s) << " (d=" << d << ")\n";
            for (const auto& term : coproduct(s, d)) os << "  " << to_string(term) << "\n";
        }
    } else {
        throw ConfigError("unknown algebra query '" + tok[0] +
                          "' (try: W_minus d=3, homogeneity <expr> d=2, coproduct <expr> d=3, "
                          "chaos <expr>)");
    }

    std::cout << os.str();
    {
        std::ofstream txt(outs.emit("algebra.txt"));
        txt << os.str();
    }
    resolved["resolved"] = {{"query", query}};
    write_manifest(outs, "algebra", resolved, 0, ctx);
    return 0;
}

int emit_error(Outputs& outs, const std::string& kind, const std::string& message, int code) {
    json diag = {{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << diag.dump() << "\n";
    if (!outs.dir.empty()) {
        std::error_code ec;
        fs::create_directories(outs.dir, ec);
        if (!ec) {
            std::ofstream out(outs.dir / "error.json");
            if (out) out << diag.dump(2) << "\n";
        }
    }
    return code;
}

}  // namespace

const char* command_list() {
    return "simulate, renorm-constants, model-check, minimize-action, ldp-scan, algebra";
}

int run(const std::string& command, const std::string& config_path, const Context& ctx) {
    Outputs outs;
    try {
        if (ctx.out_dir.empty()) throw ConfigError("output directory required (--out)");
        outs.dir = ctx.out_dir;
        fs::create_directories(outs.dir);
        if (ctx.format != "csv" && ctx.format != "json")
            throw ConfigError("--format must be csv or json");

        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot read config file: " + config_path);
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error: ") + e.what());
        }

        json resolved = cfg;
        int code = 0;
        if (command == "simulate")
            code = cmd_simulate(cfg, ctx, outs, resolved);
        else if (command == "renorm-constants")
            code = cmd_renorm_constants(cfg, ctx, outs, resolved);
        else if (command == "model-check")
            code = cmd_model_check(cfg, ctx, outs, resolved);
        else if (command == "minimize-action")
            code = cmd_minimize_action(cfg, ctx, outs, resolved);
        else if (command == "ldp-scan")
            code = cmd_ldp_scan(cfg, ctx, outs, resolved);
        else if (command == "algebra")
            code = cmd_algebra(cfg, ctx, outs, resolved);
        else
            throw ConfigError("unknown command '" + command + "' (available: " + command_list() +
                              ")");
        write_json_file(outs.dir / "config.resolved.json", resolved);
        return code;
    } catch (const ConfigError& e) {
        return emit_error(outs, "validation", e.what(), 2);
    } catch (const ResolutionError& e) {
        return emit_error(outs, "validation", e.what(), 2);
    } catch (const DomainError& e) {
        return emit_error(outs, "validation", e.what(), 2);
    } catch (const StructuralError& e) {
        return emit_error(outs, "validation", e.what(), 2);
    } catch (const UnsupportedError& e) {
        return emit_error(outs, "validation", e.what(), 2);
    } catch (const NumericalFailure& e) {
        return emit_error(outs, "numerical", e.what(), 3);
    } catch (const std::exception& e) {
        return emit_error(outs, "internal", e.what(), 3);
    }
}

}  // namespace sac::cli
