#include "franopt/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <thread>
#include <unordered_map>

#include "franopt/errors.hpp"
#include "franopt/oracle.hpp"
#include "franopt/queueing.hpp"

namespace franopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn(0..n-1) across `workers` threads. Each index is processed exactly
// once and writes only its own slot, so results are ordered regardless of
// scheduling; the first exception by index is rethrown after the join.
void parallel_for_ordered(std::size_t n, std::size_t workers,
                          const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto body = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// Solves one (instance, policy) cell and decodes its power breakdown.
SweepRow solve_cell(const NetworkInstance& inst, HostingPolicy policy,
                    double key, const SweepOptions& options) {
    SweepRow row;
    row.key = key;
    row.policy = policy;
    auto built = build(inst, policy, options.build);
    auto report = solve_milp(built.problem, options.solver);
    row.status = report.status;
    row.bnb_nodes = report.nodes_explored;
    if (report.status == BnbStatus::OPTIMAL) {
        Placement placement =
            extract_placement(inst, built.vars, report.values);
        row.power = placement_power(inst, placement, options.build);
    }
    return row;
}

// Shared tail of both sweeps: solve all (key, policy) cells in parallel,
// then fold the per-key savings into the aggregate.
SweepResult run_cells(
    const std::vector<std::pair<double, NetworkInstance>>& keyed_instances,
    const SweepOptions& options) {
    const std::size_t cells = keyed_instances.size() * 2;
    SweepResult result;
    result.rows.resize(cells);
    parallel_for_ordered(cells, options.workers, [&](std::size_t i) {
        const auto& [key, inst] = keyed_instances[i / 2];
        const HostingPolicy policy =
            (i % 2 == 0) ? HostingPolicy::CRAN : HostingPolicy::FRAN;
        result.rows[i] = solve_cell(inst, policy, key, options);
    });

    double sum = 0.0;
    std::size_t included = 0;
    for (std::size_t k = 0; k < keyed_instances.size(); ++k) {
        const SweepRow& cran = result.rows[2 * k];
        const SweepRow& fran = result.rows[2 * k + 1];
        if (cran.status == BnbStatus::OPTIMAL &&
            fran.status == BnbStatus::OPTIMAL && cran.power.total_w > 0.0) {
            sum += saving_pct(cran.power.total_w, fran.power.total_w);
            ++included;
        } else {
            result.excluded_keys.push_back(cran.key);
        }
    }
    if (included > 0) result.average_saving_pct = sum / included;
    return result;
}

}  // namespace

double saving_pct(double p_cran, double p_fran) {
    if (p_cran == 0.0)
        throw DivisionByZero(
            "saving undefined when the centralized power is zero");
    return 100.0 * (p_cran - p_fran) / p_cran;
}

SweepResult run_load_sweep(const NetworkInstance& base,
                           const LoadProfile& profile,
                           const DemandConfig& demand,
                           const SweepOptions& options) {
    for (const ProfileEntry& e : profile.entries)
        if (!(e.active_fraction >= 0.0) || !(e.active_fraction <= 1.0))
            throw ValidationError("profile fraction outside [0, 1] at hour " +
                                  std::to_string(e.hour));

    const std::vector<std::string> devices = ud_ids(base);
    const std::vector<Request> all_requests =
        generate_requests(demand, devices);

    std::vector<std::pair<double, NetworkInstance>> keyed;
    keyed.reserve(profile.entries.size());
    for (const ProfileEntry& e : profile.entries) {
        const std::vector<std::string> active =
            active_uds(e.active_fraction, devices);
        NetworkInstance inst = base;
        inst.requests.clear();
        for (const Request& r : all_requests)
            if (std::binary_search(active.begin(), active.end(), r.source))
                inst.requests.push_back(r);
        keyed.emplace_back(static_cast<double>(e.hour), std::move(inst));
    }
    return run_cells(keyed, options);
}

SweepResult run_latency_sweep(const NetworkInstance& base,
                              const DemandConfig& demand,
                              const std::vector<double>& latency_grid,
                              const SweepOptions& options) {
    if (latency_grid.empty())
        throw ValidationError("latency grid must not be empty");
    for (std::size_t i = 0; i < latency_grid.size(); ++i) {
        if (!(latency_grid[i] > 0.0))
            throw ValidationError("latency grid values must be positive");
        if (i > 0 && !(latency_grid[i] > latency_grid[i - 1]))
            throw ValidationError("latency grid must be strictly increasing");
    }

    const std::vector<Request> all_requests =
        generate_requests(demand, ud_ids(base));

    std::vector<std::pair<double, NetworkInstance>> keyed;
    keyed.reserve(latency_grid.size());
    for (double bound : latency_grid) {
        NetworkInstance inst = base;
        inst.requests = all_requests;
        for (Request& r : inst.requests) r.max_latency_l = bound;
        keyed.emplace_back(bound, std::move(inst));
    }
    SweepResult result = run_cells(keyed, options);
    result.grid = latency_grid;
    return result;
}

std::vector<double> auto_latency_grid(const NetworkInstance& base,
                                      const DemandConfig& demand,
                                      const SweepOptions& options) {
    // Low end: just below the reciprocal of the best capacity outside the
    // backbone, so that no eNodeB or device can satisfy the headroom there.
    double best_edge_f = 0.0;
    for (const NodeSpec& n : base.nodes)
        if (n.kind == NodeKind::ENODEB || n.kind == NodeKind::UD)
            best_edge_f = std::max(best_edge_f, n.capacity_f);
    if (best_edge_f <= 0.0)
        for (const NodeSpec& n : base.nodes)
            best_edge_f = std::max(best_edge_f, n.capacity_f);
    if (best_edge_f <= 0.0)
        throw ValidationError("cannot derive a latency grid: no capacity");
    const double low = (1.0 - 1e-3) / best_edge_f;

    // High end: probe the unconstrained-latency fog optimum and find the
    // smallest spare capacity among its hosting nodes; beyond the
    // reciprocal of that slack the deadline rows stop binding, so the
    // power column has plateaued. Generous margin, then a sanity clamp.
    double high = 100.0 * low;
    NetworkInstance probe = base;
    probe.requests = generate_requests(demand, ud_ids(base));
    for (Request& r : probe.requests) r.max_latency_l = kInf;
    auto built = build(probe, HostingPolicy::FRAN, options.build);
    auto report = solve_milp(built.problem, options.solver);
    if (report.status == BnbStatus::OPTIMAL && !probe.requests.empty()) {
        Placement placement =
            extract_placement(probe, built.vars, report.values);
        std::unordered_map<std::size_t, double> load;
        for (std::size_t r = 0; r < probe.requests.size(); ++r) {
            const std::size_t host = placement.host[r];
            load[host] += probe.requests[r].arrival_a *
                          job_cycles(probe.requests[r], probe.nodes[host]);
        }
        double slack_min = kInf;
        for (const auto& [node, work] : load)
            slack_min =
                std::min(slack_min, probe.nodes[node].capacity_f - work);
        if (slack_min > 0.0 && std::isfinite(slack_min))
            high = 6.0 / slack_min;
    }
    high = std::min(high, 32000.0 * low);
    high = std::max(high, 8.0 * low);

    std::vector<double> grid;
    grid.reserve(16);
    const double step = (std::log(high) - std::log(low)) / 15.0;
    for (int k = 0; k < 16; ++k)
        grid.push_back(std::exp(std::log(low) + step * k));
    return grid;
}

NetworkInstance random_small_instance(std::uint64_t seed) {
    std::uint64_t state = seed;
    // Prime the stream so small seeds do not produce correlated layouts.
    splitmix64_next(state);
    auto u01 = [&]() {
        return static_cast<double>(splitmix64_next(state) >> 11) * 0x1.0p-53;
    };
    auto pick = [&](std::uint64_t n) { return splitmix64_next(state) % n; };
    auto in = [&](double lo, double hi) { return lo + u01() * (hi - lo); };

    NetworkInstance inst;
    inst.nodes.push_back(
        {"olt0", NodeKind::OLT, 100.0, 1.0, in(6.0, 12.0), in(0.3, 0.6)});
    inst.nodes.push_back(
        {"onu0", NodeKind::ONU, 50.0, 1.0, in(3.0, 7.0), in(0.5, 1.0)});
    inst.nodes.push_back(
        {"enb0", NodeKind::ENODEB, in(8.0, 15.0), in(1.1, 1.3), in(2.0, 4.0),
         in(1.0, 2.0)});
    const std::size_t num_uds = 1 + pick(5);
    for (std::size_t i = 0; i < num_uds; ++i)
        inst.nodes.push_back({"ud" + std::to_string(i), NodeKind::UD,
                              in(2.0, 3.0), in(1.2, 1.6), in(0.3, 0.7),
                              in(1.2, 2.5)});

    const double ample = 10000.0;
    std::size_t link_no = 0;
    auto both_ways = [&](const std::string& a, const std::string& b,
                         LinkKind kind, double tx) {
        inst.links.push_back(
            {"l" + std::to_string(link_no++), a, b, kind, ample, tx});
        inst.links.push_back(
            {"l" + std::to_string(link_no++), b, a, kind, ample, tx});
    };
    both_ways("olt0", "onu0", LinkKind::FIBRE, in(0.008, 0.02));
    both_ways("onu0", "enb0", LinkKind::FIBRE, in(0.015, 0.03));
    both_ways("enb0", "ud0", LinkKind::LICENSED, in(0.15, 0.3));
    for (std::size_t i = 1; i < num_uds; ++i)
        both_ways("ud" + std::to_string(i - 1), "ud" + std::to_string(i),
                  LinkKind::D2D, in(0.05, 0.15));

    const std::size_t num_requests = 1 + pick(3);
    for (std::size_t k = 0; k < num_requests; ++k) {
        Request r;
        r.id = "q" + std::to_string(k);
        r.source = "ud" + std::to_string(pick(num_uds));
        r.arrival_a = in(0.3, 1.0);
        r.instr = in(0.2, 0.8);
        r.traffic_t = in(1.0, 5.0);
        // Half the requests carry a deadline loose enough for the backbone
        // (headroom at most 2 against an OLT with 100 spare), so the
        // instance stays feasible under both policies by construction.
        r.max_latency_l = pick(2) == 0 ? kInf : in(0.5, 3.0);
        inst.requests.push_back(std::move(r));
    }
    return inst;
}

OracleCheckResult run_oracle_check(std::size_t num_instances,
                                   std::uint64_t seed, double tolerance,
                                   const SweepOptions& options) {
    OracleCheckResult out;
    out.instances = num_instances;
    for (std::size_t i = 0; i < num_instances; ++i) {
        NetworkInstance inst = random_small_instance(seed + i);
        for (HostingPolicy policy :
             {HostingPolicy::CRAN, HostingPolicy::FRAN}) {
            OracleResult ref = enumerate_optimum(inst, policy, options.build);
            auto built = build(inst, policy, options.build);
            auto report = solve_milp(built.problem, options.solver);
            ++out.comparisons;
            if (ref.status == OracleStatus::INFEASIBLE) {
                if (report.status != BnbStatus::INFEASIBLE)
                    out.all_match = false;
                continue;
            }
            if (report.status != BnbStatus::OPTIMAL) {
                out.all_match = false;
                continue;
            }
            const double diff = std::abs(ref.objective - report.objective);
            out.max_abs_diff = std::max(out.max_abs_diff, diff);
            if (!(diff <= tolerance)) out.all_match = false;
        }
    }
    return out;
}

}  // namespace franopt
