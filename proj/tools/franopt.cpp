// Command-line front end: validate configs, solve single scenarios, run the
// load/latency sweeps and the enumerator cross-check, and serialize results.
//
// Exit codes: 0 success, 1 problem proven infeasible, 2 configuration error,
// 3 solver failure (numerical breakdown, node budget exhausted, mismatch).

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "franopt/cli_io.hpp"
#include "franopt/demand.hpp"
#include "franopt/errors.hpp"
#include "franopt/formulation.hpp"
#include "franopt/milp.hpp"
#include "franopt/model.hpp"
#include "franopt/oracle.hpp"
#include "franopt/scenarios.hpp"
#include "franopt/solver.hpp"

namespace {

using namespace franopt;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct GlobalArgs {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::string out = ".";
    bool dump_lp = false;
};

ScenarioConfig load_with_overrides(const std::string& path,
                                   const GlobalArgs& g) {
    ScenarioConfig cfg = load_config(path);
    if (g.seed) cfg.demand.seed = *g.seed;
    if (g.workers) {
        if (*g.workers == 0) throw ValidationError("--workers: must be >= 1");
        cfg.workers = *g.workers;
    }
    return cfg;
}

std::filesystem::path ensure_out_dir(const GlobalArgs& g) {
    std::filesystem::path dir(g.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir.string());
    return dir;
}

/// Full-demand instance: topology plus one generated request per
/// (device, index) pair.
NetworkInstance materialize(const ScenarioConfig& cfg) {
    NetworkInstance instance = cfg.topology;
    instance.requests = generate_requests(cfg.demand, ud_ids(instance));
    return instance;
}

void dump_problem_lp(const ScenarioConfig& cfg, const NetworkInstance& inst,
                     HostingPolicy policy, const std::filesystem::path& dir) {
    const BuildResult built = build(inst, policy, cfg.build);
    const std::filesystem::path path =
        dir / (std::string("problem_") + to_string(policy) + ".lp");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path.string());
    out << to_lp_text(built.problem);
    std::cerr << "wrote " << path.string() << "\n";
}

RunMeta make_meta(const ScenarioConfig& cfg) {
    RunMeta meta;
    meta.seed = cfg.demand.seed;
    meta.config_hash = config_hash(cfg);
    return meta;
}

void print_sweep_summary(const char* name, const SweepResult& result) {
    std::cout << name << ": " << result.rows.size() << " rows";
    if (result.average_saving_pct)
        std::cout << ", average saving "
                  << format_double(*result.average_saving_pct) << "%";
    else
        std::cout << ", average saving undefined";
    if (!result.excluded_keys.empty())
        std::cout << " (" << result.excluded_keys.size()
                  << " keys excluded from the average)";
    std::cout << "\n";
}

int cmd_validate(const std::string& path, const GlobalArgs& g) {
    const ScenarioConfig cfg = load_with_overrides(path, g);
    std::cout << dump_config(cfg);
    std::cerr << "config OK: " << cfg.topology.nodes.size() << " nodes, "
              << cfg.topology.links.size() << " links, "
              << ud_ids(cfg.topology).size() * cfg.demand.requests_per_ud
              << " requests potential, hash " << config_hash(cfg) << "\n";
    return kExitOk;
}

int cmd_solve(const std::string& path, const GlobalArgs& g,
              const std::string& policy_name, std::optional<int> hour,
              std::optional<double> latency) {
    const ScenarioConfig cfg = load_with_overrides(path, g);
    const HostingPolicy policy =
        policy_name == "cran" ? HostingPolicy::CRAN : HostingPolicy::FRAN;

    NetworkInstance instance = materialize(cfg);
    if (hour) {
        const auto& entries = cfg.profile.entries;
        auto it = std::find_if(
            entries.begin(), entries.end(),
            [&](const ProfileEntry& e) { return e.hour == *hour; });
        if (it == entries.end())
            throw ValidationError("--hour " + std::to_string(*hour) +
                                  ": no such slot in the profile");
        const auto active = active_uds(it->active_fraction, ud_ids(instance));
        std::vector<Request> kept;
        for (const Request& r : instance.requests)
            if (std::binary_search(active.begin(), active.end(), r.source))
                kept.push_back(r);
        instance.requests = std::move(kept);
        std::cout << "hour " << *hour << ": " << active.size()
                  << " active devices, " << instance.requests.size()
                  << " requests\n";
    }
    if (latency) {
        if (!(*latency > 0.0))
            throw ValidationError("--latency: must be > 0");
        for (Request& r : instance.requests) r.max_latency_l = *latency;
        std::cout << "latency bound overridden to " << format_double(*latency)
                  << " s for all requests\n";
    }

    if (g.dump_lp) dump_problem_lp(cfg, instance, policy, ensure_out_dir(g));

    const BuildResult built = build(instance, policy, cfg.build);
    const BnbReport report = solve_milp(built.problem, cfg.solver);

    std::cout << "policy " << to_string(policy) << ": "
              << to_string(report.status) << "\n";
    if (report.status == BnbStatus::INFEASIBLE) return kExitInfeasible;
    if (report.status == BnbStatus::NODE_LIMIT) {
        std::cout << "node budget exhausted after " << report.nodes_explored
                  << " nodes";
        if (std::isfinite(report.objective))
            std::cout << "; best incumbent " << format_double(report.objective)
                      << " W, remaining gap " << format_double(report.gap);
        std::cout << "\n";
        return kExitSolver;
    }

    const Placement placement =
        extract_placement(instance, built.vars, report.values);
    const PowerBreakdown power =
        placement_power(instance, placement, cfg.build);
    std::cout << "total " << format_double(power.total_w) << " W (processing "
              << format_double(power.proc_w) << ", vm overhead "
              << format_double(power.vm_w) << ", transmission "
              << format_double(power.traffic_w) << ")\n";
    std::cout << "branch-and-bound nodes " << report.nodes_explored
              << ", lp iterations " << report.lp_iterations << "\n";
    for (std::size_t r = 0; r < instance.requests.size(); ++r) {
        std::cout << "  " << instance.requests[r].id << " -> "
                  << instance.nodes[placement.host[r]].id;
        if (!placement.route[r].empty()) {
            std::cout << " via";
            for (std::size_t l : placement.route[r])
                std::cout << " " << instance.links[l].id;
        }
        std::cout << "\n";
    }
    return kExitOk;
}

int cmd_sweep_load(const std::string& path, const GlobalArgs& g) {
    const ScenarioConfig cfg = load_with_overrides(path, g);
    const auto dir = ensure_out_dir(g);
    if (g.dump_lp) {
        const NetworkInstance inst = materialize(cfg);
        dump_problem_lp(cfg, inst, HostingPolicy::CRAN, dir);
        dump_problem_lp(cfg, inst, HostingPolicy::FRAN, dir);
    }
    const SweepResult result = run_load_sweep(cfg.topology, cfg.profile,
                                              cfg.demand, sweep_options(cfg));
    write_results(result, dir / "load_sweep.csv", make_meta(cfg));
    print_sweep_summary("load sweep", result);
    std::cout << "wrote " << (dir / "load_sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_sweep_latency(const std::string& path, const GlobalArgs& g) {
    const ScenarioConfig cfg = load_with_overrides(path, g);
    const auto dir = ensure_out_dir(g);
    if (g.dump_lp) {
        const NetworkInstance inst = materialize(cfg);
        dump_problem_lp(cfg, inst, HostingPolicy::CRAN, dir);
        dump_problem_lp(cfg, inst, HostingPolicy::FRAN, dir);
    }
    const std::vector<double> grid =
        cfg.latency_grid.empty()
            ? auto_latency_grid(cfg.topology, cfg.demand, sweep_options(cfg))
            : cfg.latency_grid;
    const SweepResult result =
        run_latency_sweep(cfg.topology, cfg.demand, grid, sweep_options(cfg));
    write_results(result, dir / "latency_sweep.csv", make_meta(cfg));
    std::cout << "latency grid: " << grid.size() << " points in ["
              << format_double(grid.front()) << ", "
              << format_double(grid.back()) << "] s\n";
    print_sweep_summary("latency sweep", result);
    std::cout << "wrote " << (dir / "latency_sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_compare(const std::string& path, const GlobalArgs& g) {
    const ScenarioConfig cfg = load_with_overrides(path, g);
    const auto dir = ensure_out_dir(g);
    const RunMeta meta = make_meta(cfg);

    const SweepResult load = run_load_sweep(cfg.topology, cfg.profile,
                                            cfg.demand, sweep_options(cfg));
    write_results(load, dir / "load_sweep.csv", meta);
    print_sweep_summary("load sweep", load);

    const std::vector<double> grid =
        cfg.latency_grid.empty()
            ? auto_latency_grid(cfg.topology, cfg.demand, sweep_options(cfg))
            : cfg.latency_grid;
    const SweepResult lat =
        run_latency_sweep(cfg.topology, cfg.demand, grid, sweep_options(cfg));
    write_results(lat, dir / "latency_sweep.csv", meta);
    print_sweep_summary("latency sweep", lat);

    std::cout << "wrote " << (dir / "load_sweep.csv").string() << " and "
              << (dir / "latency_sweep.csv").string() << "\n";
    return kExitOk;
}

int cmd_oracle_check(const std::string& path, const GlobalArgs& g,
                     std::size_t instances) {
    const ScenarioConfig cfg = load_with_overrides(path, g);
    const OracleCheckResult result = run_oracle_check(
        instances, cfg.demand.seed, 1e-6, sweep_options(cfg));
    std::cout << "oracle check: " << result.instances << " instances, "
              << result.comparisons << " comparisons, max |diff| "
              << format_double(result.max_abs_diff) << " W -> "
              << (result.all_match ? "MATCH" : "MISMATCH") << "\n";
    return result.all_match ? kExitOk : kExitSolver;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-minimal VM placement and traffic routing for a "
                 "fibre-backed radio access network"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    GlobalArgs g;
    app.add_option("--seed", g.seed, "Override the demand seed");
    app.add_option("--workers", g.workers, "Override the worker count");
    app.add_option("--out", g.out, "Output directory (default: .)");
    app.add_flag("--dump-lp", g.dump_lp,
                 "Also write plain-text dumps of the built problems");

    std::string config_path;
    std::string policy_name = "fran";
    std::optional<int> hour;
    std::optional<double> latency;
    std::size_t instances = 50;

    CLI::App* validate_cmd =
        app.add_subcommand("validate", "Parse, check and echo a config");
    validate_cmd->add_option("config", config_path, "Scenario JSON file")
        ->required();

    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Solve one scenario at full demand");
    solve_cmd->add_option("config", config_path, "Scenario JSON file")
        ->required();
    solve_cmd->add_option("--policy", policy_name, "Hosting policy")
        ->check(CLI::IsMember({"cran", "fran"}))
        ->required();
    CLI::Option* hour_opt = solve_cmd->add_option(
        "--hour", hour, "Restrict demand to one profile slot");
    CLI::Option* latency_opt = solve_cmd->add_option(
        "--latency", latency, "Override every request's latency bound (s)");
    hour_opt->excludes(latency_opt);

    CLI::App* load_cmd = app.add_subcommand(
        "sweep-load", "Solve both policies across the activity profile");
    load_cmd->add_option("config", config_path, "Scenario JSON file")
        ->required();

    CLI::App* lat_cmd = app.add_subcommand(
        "sweep-latency", "Solve both policies across a latency grid");
    lat_cmd->add_option("config", config_path, "Scenario JSON file")
        ->required();

    CLI::App* compare_cmd = app.add_subcommand(
        "compare", "Both sweeps plus the savings summary");
    compare_cmd->add_option("config", config_path, "Scenario JSON file")
        ->required();

    CLI::App* oracle_cmd = app.add_subcommand(
        "oracle-check", "Cross-check the solver against exhaustive "
                        "enumeration on small random instances");
    oracle_cmd->add_option("config", config_path, "Scenario JSON file")
        ->required();
    oracle_cmd->add_option("--instances", instances,
                           "Number of random instances (default 50)");

    for (CLI::App* sub : {validate_cmd, solve_cmd, load_cmd, lat_cmd,
                          compare_cmd, oracle_cmd})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(config_path, g);
        if (solve_cmd->parsed())
            return cmd_solve(config_path, g, policy_name, hour, latency);
        if (load_cmd->parsed()) return cmd_sweep_load(config_path, g);
        if (lat_cmd->parsed()) return cmd_sweep_latency(config_path, g);
        if (compare_cmd->parsed()) return cmd_compare(config_path, g);
        if (oracle_cmd->parsed())
            return cmd_oracle_check(config_path, g, instances);
    } catch (const ParseError& e) {
        std::cerr << "config parse error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SchemaError& e) {
        std::cerr << "config schema error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::cerr << "config validation error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
