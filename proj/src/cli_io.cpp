#include "franopt/cli_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "franopt/errors.hpp"

namespace franopt {
namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Strict-schema helpers. Every object is checked against its allowed key
// set; anything else is rejected by name so typos cannot silently pass.
// ---------------------------------------------------------------------------

void require_object(const Json& j, const std::string& ctx) {
    if (!j.is_object())
        throw SchemaError(ctx, ctx + ": expected a JSON object");
}

void check_keys(const Json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        const std::string& key = item.key();
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw SchemaError(key, ctx + ": unknown key \"" + key + "\"");
    }
}

const Json& member(const Json& obj, const std::string& ctx,
                   const std::string& key) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(key, ctx + ": missing required key \"" + key + "\"");
    return *it;
}

double number_field(const Json& obj, const std::string& ctx,
                    const std::string& key) {
    const Json& v = member(obj, ctx, key);
    if (!v.is_number())
        throw SchemaError(key, ctx + "." + key + ": expected a number");
    return v.get<double>();
}

double number_field_or(const Json& obj, const std::string& ctx,
                       const std::string& key, double fallback) {
    if (obj.find(key) == obj.end()) return fallback;
    return number_field(obj, ctx, key);
}

std::uint64_t uint_field_or(const Json& obj, const std::string& ctx,
                            const std::string& key, std::uint64_t fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number_integer() ||
        (it->is_number_integer() && !it->is_number_unsigned() &&
         it->get<std::int64_t>() < 0))
        throw SchemaError(key,
                          ctx + "." + key + ": expected a nonnegative integer");
    return it->get<std::uint64_t>();
}

std::string string_field(const Json& obj, const std::string& ctx,
                         const std::string& key) {
    const Json& v = member(obj, ctx, key);
    if (!v.is_string())
        throw SchemaError(key, ctx + "." + key + ": expected a string");
    return v.get<std::string>();
}

NodeKind parse_node_kind(const std::string& s, const std::string& ctx) {
    if (s == "OLT") return NodeKind::OLT;
    if (s == "ONU") return NodeKind::ONU;
    if (s == "ENODEB") return NodeKind::ENODEB;
    if (s == "UD") return NodeKind::UD;
    throw SchemaError("kind", ctx + ".kind: expected one of "
                              "OLT|ONU|ENODEB|UD, got \"" + s + "\"");
}

LinkKind parse_link_kind(const std::string& s, const std::string& ctx) {
    if (s == "FIBRE") return LinkKind::FIBRE;
    if (s == "LICENSED") return LinkKind::LICENSED;
    if (s == "D2D") return LinkKind::D2D;
    throw SchemaError("kind", ctx + ".kind: expected one of "
                              "FIBRE|LICENSED|D2D, got \"" + s + "\"");
}

FieldRange parse_range(const Json& j, const std::string& ctx) {
    require_object(j, ctx);
    check_keys(j, ctx, {"min", "max"});
    FieldRange r;
    r.min = number_field(j, ctx, "min");
    r.max = number_field(j, ctx, "max");
    return r;
}

void check_range(const FieldRange& r, const std::string& name) {
    if (!(std::isfinite(r.min) && std::isfinite(r.max) && r.min > 0.0 &&
          r.max >= r.min))
        throw ValidationError(name + ": range must satisfy 0 < min <= max");
}

// ---------------------------------------------------------------------------
// Section parsers. Each consumes one top-level key and fills defaults.
// ---------------------------------------------------------------------------

void parse_topology(const Json& j, ScenarioConfig& cfg) {
    require_object(j, "topology");
    check_keys(j, "topology", {"response_traffic_multiplier", "nodes", "links"});
    cfg.build.response_traffic_multiplier =
        number_field_or(j, "topology", "response_traffic_multiplier",
                        cfg.build.response_traffic_multiplier);
    if (!(std::isfinite(cfg.build.response_traffic_multiplier) &&
          cfg.build.response_traffic_multiplier >= 0.0))
        throw ValidationError(
            "topology.response_traffic_multiplier: must be finite and >= 0");

    const Json& nodes = member(j, "topology", "nodes");
    if (!nodes.is_array())
        throw SchemaError("nodes", "topology.nodes: expected an array");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string ctx = "topology.nodes[" + std::to_string(i) + "]";
        const Json& n = nodes[i];
        require_object(n, ctx);
        check_keys(n, ctx, {"id", "kind", "capacity_f", "cpi", "vm_overhead_w",
                            "proc_energy"});
        NodeSpec spec;
        spec.id = string_field(n, ctx, "id");
        spec.kind = parse_node_kind(string_field(n, ctx, "kind"), ctx);
        spec.capacity_f = number_field_or(n, ctx, "capacity_f", spec.capacity_f);
        spec.cpi = number_field_or(n, ctx, "cpi", spec.cpi);
        spec.vm_overhead_w =
            number_field_or(n, ctx, "vm_overhead_w", spec.vm_overhead_w);
        spec.proc_energy =
            number_field_or(n, ctx, "proc_energy", spec.proc_energy);
        cfg.topology.nodes.push_back(std::move(spec));
    }

    const Json& links = member(j, "topology", "links");
    if (!links.is_array())
        throw SchemaError("links", "topology.links: expected an array");
    for (std::size_t i = 0; i < links.size(); ++i) {
        const std::string ctx = "topology.links[" + std::to_string(i) + "]";
        const Json& l = links[i];
        require_object(l, ctx);
        check_keys(l, ctx, {"id", "from", "to", "kind", "capacity_b",
                            "tx_energy"});
        LinkSpec spec;
        spec.id = string_field(l, ctx, "id");
        spec.from = string_field(l, ctx, "from");
        spec.to = string_field(l, ctx, "to");
        spec.kind = parse_link_kind(string_field(l, ctx, "kind"), ctx);
        spec.capacity_b = number_field_or(l, ctx, "capacity_b", spec.capacity_b);
        spec.tx_energy = number_field_or(l, ctx, "tx_energy", spec.tx_energy);
        cfg.topology.links.push_back(std::move(spec));
    }
}

void parse_demand(const Json& j, ScenarioConfig& cfg) {
    require_object(j, "demand");
    check_keys(j, "demand", {"seed", "requests_per_ud", "arrival_a", "instr",
                             "traffic_t", "max_latency_l"});
    cfg.demand.seed = uint_field_or(j, "demand", "seed", cfg.demand.seed);
    cfg.demand.requests_per_ud = static_cast<std::size_t>(
        uint_field_or(j, "demand", "requests_per_ud",
                      cfg.demand.requests_per_ud));
    if (cfg.demand.requests_per_ud == 0)
        throw ValidationError("demand.requests_per_ud: must be >= 1");
    if (auto it = j.find("arrival_a"); it != j.end())
        cfg.demand.arrival_a = parse_range(*it, "demand.arrival_a");
    if (auto it = j.find("instr"); it != j.end())
        cfg.demand.instr = parse_range(*it, "demand.instr");
    if (auto it = j.find("traffic_t"); it != j.end())
        cfg.demand.traffic_t = parse_range(*it, "demand.traffic_t");
    if (auto it = j.find("max_latency_l"); it != j.end())
        cfg.demand.max_latency_l = parse_range(*it, "demand.max_latency_l");
    check_range(cfg.demand.arrival_a, "demand.arrival_a");
    check_range(cfg.demand.instr, "demand.instr");
    check_range(cfg.demand.traffic_t, "demand.traffic_t");
    check_range(cfg.demand.max_latency_l, "demand.max_latency_l");
}

void parse_profile(const Json& j, ScenarioConfig& cfg) {
    if (!j.is_array())
        throw SchemaError("profile", "profile: expected an array of entries");
    cfg.profile.entries.clear();
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string ctx = "profile[" + std::to_string(i) + "]";
        const Json& e = j[i];
        require_object(e, ctx);
        check_keys(e, ctx, {"hour", "active_fraction"});
        ProfileEntry entry;
        const Json& h = member(e, ctx, "hour");
        if (!h.is_number_integer())
            throw SchemaError("hour", ctx + ".hour: expected an integer");
        entry.hour = h.get<int>();
        entry.active_fraction = number_field(e, ctx, "active_fraction");
        cfg.profile.entries.push_back(entry);
    }
    if (cfg.profile.entries.empty())
        throw ValidationError("profile: needs at least one entry");
    for (std::size_t i = 0; i < cfg.profile.entries.size(); ++i) {
        const ProfileEntry& e = cfg.profile.entries[i];
        if (e.hour < 0 || e.hour > 23)
            throw ValidationError("profile: hour " + std::to_string(e.hour) +
                                  " outside 0..23");
        if (i > 0 && cfg.profile.entries[i - 1].hour >= e.hour)
            throw ValidationError("profile: hours must be strictly increasing");
        if (!(std::isfinite(e.active_fraction) && e.active_fraction >= 0.0 &&
              e.active_fraction <= 1.0))
            throw ValidationError(
                "profile: active_fraction must lie in [0, 1]");
    }
}

void parse_solver(const Json& j, ScenarioConfig& cfg) {
    require_object(j, "solver");
    check_keys(j, "solver",
               {"primal_feas_tol", "dual_feas_tol", "int_tol", "gap_abs",
                "gap_rel", "pivot_floor", "node_budget", "latency_slack",
                "workers"});
    SolverOptions& s = cfg.solver;
    s.primal_feas_tol =
        number_field_or(j, "solver", "primal_feas_tol", s.primal_feas_tol);
    s.dual_feas_tol =
        number_field_or(j, "solver", "dual_feas_tol", s.dual_feas_tol);
    s.int_tol = number_field_or(j, "solver", "int_tol", s.int_tol);
    s.gap_abs = number_field_or(j, "solver", "gap_abs", s.gap_abs);
    s.gap_rel = number_field_or(j, "solver", "gap_rel", s.gap_rel);
    s.pivot_floor = number_field_or(j, "solver", "pivot_floor", s.pivot_floor);
    s.node_budget = static_cast<std::size_t>(
        uint_field_or(j, "solver", "node_budget", s.node_budget));
    cfg.build.latency_slack =
        number_field_or(j, "solver", "latency_slack", cfg.build.latency_slack);
    cfg.workers = static_cast<std::size_t>(
        uint_field_or(j, "solver", "workers", cfg.workers));

    for (double tol : {s.primal_feas_tol, s.dual_feas_tol, s.int_tol,
                       s.pivot_floor})
        if (!(std::isfinite(tol) && tol > 0.0))
            throw ValidationError("solver: tolerances must be finite and > 0");
    if (!(std::isfinite(s.gap_abs) && s.gap_abs >= 0.0 &&
          std::isfinite(s.gap_rel) && s.gap_rel >= 0.0))
        throw ValidationError("solver: gaps must be finite and >= 0");
    if (s.node_budget == 0)
        throw ValidationError("solver.node_budget: must be >= 1");
    if (!(std::isfinite(cfg.build.latency_slack) &&
          cfg.build.latency_slack >= 0.0))
        throw ValidationError("solver.latency_slack: must be finite and >= 0");
    if (cfg.workers == 0)
        throw ValidationError("solver.workers: must be >= 1");
}

void parse_sweep(const Json& j, ScenarioConfig& cfg) {
    require_object(j, "sweep");
    check_keys(j, "sweep", {"latency_grid"});
    auto it = j.find("latency_grid");
    if (it == j.end()) return;
    if (it->is_string()) {
        if (it->get<std::string>() != "auto")
            throw SchemaError("latency_grid",
                              "sweep.latency_grid: the only string form is "
                              "\"auto\"");
        cfg.latency_grid.clear();
        return;
    }
    if (!it->is_array())
        throw SchemaError("latency_grid",
                          "sweep.latency_grid: expected \"auto\" or an array "
                          "of numbers");
    cfg.latency_grid.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
        const Json& v = (*it)[i];
        if (!v.is_number())
            throw SchemaError("latency_grid",
                              "sweep.latency_grid[" + std::to_string(i) +
                                  "]: expected a number");
        cfg.latency_grid.push_back(v.get<double>());
    }
    if (cfg.latency_grid.empty())
        throw ValidationError("sweep.latency_grid: explicit grid cannot be "
                              "empty; use \"auto\"");
    for (std::size_t i = 0; i < cfg.latency_grid.size(); ++i) {
        const double v = cfg.latency_grid[i];
        if (!(std::isfinite(v) && v > 0.0))
            throw ValidationError(
                "sweep.latency_grid: values must be finite and > 0");
        if (i > 0 && cfg.latency_grid[i - 1] >= v)
            throw ValidationError(
                "sweep.latency_grid: values must be strictly increasing");
    }
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(e.what());
    }
    require_object(root, "config");
    check_keys(root, "config",
               {"topology", "demand", "profile", "solver", "sweep"});

    ScenarioConfig cfg;
    cfg.profile = default_profile();

    parse_topology(member(root, "config", "topology"), cfg);
    if (auto it = root.find("demand"); it != root.end())
        parse_demand(*it, cfg);
    if (auto it = root.find("profile"); it != root.end())
        parse_profile(*it, cfg);
    if (auto it = root.find("solver"); it != root.end())
        parse_solver(*it, cfg);
    if (auto it = root.find("sweep"); it != root.end())
        parse_sweep(*it, cfg);

    std::vector<std::string> problems = validate(cfg.topology);
    if (!problems.empty()) {
        std::string msg = "topology failed validation:";
        for (const std::string& p : problems) msg += "\n  - " + p;
        throw ValidationError(msg);
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading: " + path.string());
    return parse_config_text(buf.str());
}

SweepOptions sweep_options(const ScenarioConfig& config) {
    SweepOptions options;
    options.solver = config.solver;
    options.build = config.build;
    options.workers = config.workers;
    return options;
}

std::string dump_config(const ScenarioConfig& config) {
    Json topo;
    topo["response_traffic_multiplier"] =
        config.build.response_traffic_multiplier;
    topo["nodes"] = Json::array();
    for (const NodeSpec& n : config.topology.nodes) {
        Json jn;
        jn["id"] = n.id;
        jn["kind"] = to_string(n.kind);
        jn["capacity_f"] = n.capacity_f;
        jn["cpi"] = n.cpi;
        jn["vm_overhead_w"] = n.vm_overhead_w;
        jn["proc_energy"] = n.proc_energy;
        topo["nodes"].push_back(std::move(jn));
    }
    topo["links"] = Json::array();
    for (const LinkSpec& l : config.topology.links) {
        Json jl;
        jl["id"] = l.id;
        jl["from"] = l.from;
        jl["to"] = l.to;
        jl["kind"] = to_string(l.kind);
        jl["capacity_b"] = l.capacity_b;
        jl["tx_energy"] = l.tx_energy;
        topo["links"].push_back(std::move(jl));
    }

    Json demand;
    demand["seed"] = config.demand.seed;
    demand["requests_per_ud"] = config.demand.requests_per_ud;
    for (auto [key, range] :
         {std::pair<const char*, const FieldRange*>{"arrival_a",
                                                    &config.demand.arrival_a},
          {"instr", &config.demand.instr},
          {"traffic_t", &config.demand.traffic_t},
          {"max_latency_l", &config.demand.max_latency_l}}) {
        Json r;
        r["min"] = range->min;
        r["max"] = range->max;
        demand[key] = std::move(r);
    }

    Json profile = Json::array();
    for (const ProfileEntry& e : config.profile.entries) {
        Json je;
        je["hour"] = e.hour;
        je["active_fraction"] = e.active_fraction;
        profile.push_back(std::move(je));
    }

    Json solver;
    solver["primal_feas_tol"] = config.solver.primal_feas_tol;
    solver["dual_feas_tol"] = config.solver.dual_feas_tol;
    solver["int_tol"] = config.solver.int_tol;
    solver["gap_abs"] = config.solver.gap_abs;
    solver["gap_rel"] = config.solver.gap_rel;
    solver["pivot_floor"] = config.solver.pivot_floor;
    solver["node_budget"] = config.solver.node_budget;
    solver["latency_slack"] = config.build.latency_slack;
    solver["workers"] = config.workers;

    Json sweep;
    if (config.latency_grid.empty())
        sweep["latency_grid"] = "auto";
    else
        sweep["latency_grid"] = config.latency_grid;

    Json root;
    root["topology"] = std::move(topo);
    root["demand"] = std::move(demand);
    root["profile"] = std::move(profile);
    root["solver"] = std::move(solver);
    root["sweep"] = std::move(sweep);
    return root.dump(2) + "\n";
}

std::string config_hash(const ScenarioConfig& config) {
    const std::uint64_t h = fnv1a64(dump_config(config));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value,
                                   std::chars_format::general, 17);
    return std::string(buf, end);
}

std::string results_csv(const SweepResult& result) {
    std::vector<SweepRow> rows = result.rows;
    std::sort(rows.begin(), rows.end(),
              [](const SweepRow& a, const SweepRow& b) {
                  if (a.key != b.key) return a.key < b.key;
                  return static_cast<int>(a.policy) < static_cast<int>(b.policy);
              });

    std::string out =
        "key,policy,status,total_w,proc_w,vm_w,traffic_w,bnb_nodes\n";
    for (const SweepRow& row : rows) {
        out += format_double(row.key);
        out += ',';
        out += to_string(row.policy);
        out += ',';
        out += to_string(row.status);
        out += ',';
        if (row.status == BnbStatus::OPTIMAL) {
            out += format_double(row.power.total_w);
            out += ',';
            out += format_double(row.power.proc_w);
            out += ',';
            out += format_double(row.power.vm_w);
            out += ',';
            out += format_double(row.power.traffic_w);
        } else {
            out += ",,,";
        }
        out += ',';
        out += std::to_string(row.bnb_nodes);
        out += '\n';
    }
    return out;
}

std::string results_meta_json(const SweepResult& result, const RunMeta& meta) {
    Json m;
    m["tool_version"] = meta.tool_version;
    m["seed"] = meta.seed;
    m["config_hash"] = meta.config_hash;
    m["rows"] = result.rows.size();
    if (result.average_saving_pct)
        m["average_saving_pct"] = *result.average_saving_pct;
    else
        m["average_saving_pct"] = nullptr;
    m["excluded_keys"] = result.excluded_keys;
    m["latency_grid"] = result.grid;
    return m.dump(2) + "\n";
}

void write_results(const SweepResult& result,
                   const std::filesystem::path& csv_path, const RunMeta& meta) {
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw IoError("cannot write: " + csv_path.string());
        out << results_csv(result);
        if (!out) throw IoError("error while writing: " + csv_path.string());
    }
    std::filesystem::path meta_path = csv_path;
    meta_path.replace_extension(".meta.json");
    std::ofstream out(meta_path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + meta_path.string());
    out << results_meta_json(result, meta);
    if (!out) throw IoError("error while writing: " + meta_path.string());
}

ScenarioConfig default_config() {
    ScenarioConfig cfg;
    cfg.profile = default_profile();

    auto node = [&cfg](std::string id, NodeKind kind, double f, double cpi,
                       double vm_w, double proc_e) {
        cfg.topology.nodes.push_back(
            NodeSpec{std::move(id), kind, f, cpi, vm_w, proc_e});
    };
    auto duplex = [&cfg](const std::string& a, const std::string& b,
                         LinkKind kind, double cap, double tx) {
        cfg.topology.links.push_back(LinkSpec{a + ":" + b, a, b, kind, cap, tx});
        cfg.topology.links.push_back(LinkSpec{b + ":" + a, b, a, kind, cap, tx});
    };

    node("olt0", NodeKind::OLT, 200.0, 1.0, 20.0, 0.6);
    node("onu0", NodeKind::ONU, 100.0, 1.0, 10.0, 0.8);
    node("onu1", NodeKind::ONU, 100.0, 1.0, 10.0, 0.8);
    node("enb0", NodeKind::ENODEB, 15.0, 1.2, 4.0, 1.6);
    node("enb1", NodeKind::ENODEB, 15.0, 1.2, 4.0, 1.6);

    // Two coverage areas: devices ud00..ud10 camp on enb0, ud11..ud20 on
    // enb1. Neighbours within an area are chained by D2D in both directions;
    // sidelink D2D shares the licensed radio, so it carries the same
    // per-megabit energy as the uplink.
    std::vector<std::string> area0, area1;
    for (int i = 0; i <= 20; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "ud%02d", i);
        node(id, NodeKind::UD, 6.0, 1.4, 0.6, 1.8);
        (i <= 10 ? area0 : area1).push_back(id);
    }

    duplex("olt0", "onu0", LinkKind::FIBRE, 2000.0, 0.01);
    duplex("olt0", "onu1", LinkKind::FIBRE, 2000.0, 0.01);
    duplex("onu0", "enb0", LinkKind::FIBRE, 1500.0, 0.02);
    duplex("onu1", "enb1", LinkKind::FIBRE, 1500.0, 0.02);
    for (const std::string& ud : area0)
        duplex("enb0", ud, LinkKind::LICENSED, 400.0, 0.25);
    for (const std::string& ud : area1)
        duplex("enb1", ud, LinkKind::LICENSED, 400.0, 0.25);
    for (std::size_t i = 1; i < area0.size(); ++i)
        duplex(area0[i - 1], area0[i], LinkKind::D2D, 150.0, 0.25);
    for (std::size_t i = 1; i < area1.size(); ++i)
        duplex(area1[i - 1], area1[i], LinkKind::D2D, 150.0, 0.25);

    return cfg;
}

}  // namespace franopt
