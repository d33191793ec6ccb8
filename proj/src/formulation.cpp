#include "franopt/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "franopt/errors.hpp"
#include "franopt/queueing.hpp"

namespace franopt {

namespace {

double work_rate(const Request& r, const NodeSpec& n) {
    return r.arrival_a * job_cycles(r, n);
}

}  // namespace

BuildResult build(const NetworkInstance& instance, HostingPolicy policy,
                  const BuildOptions& options) {
    const InstanceIndex idx(instance);
    const std::size_t num_nodes = instance.nodes.size();
    const std::size_t num_links = instance.links.size();
    const std::size_t num_requests = instance.requests.size();

    BuildResult out;
    VarMap& vm = out.vars;
    vm.hosts = hosting_indices(instance, policy);
    if (vm.hosts.empty())
        throw EmptyHostingSet("policy admits no hosting nodes");
    vm.host_slot.assign(num_nodes, VarMap::npos);
    for (std::size_t h = 0; h < vm.hosts.size(); ++h)
        vm.host_slot[vm.hosts[h]] = h;

    for (const auto& r : instance.requests) {
        const std::size_t src = idx.node(r.source);
        if (vm.host_slot[src] == VarMap::npos && idx.out_links[src].empty())
            throw UnroutableRequest("request " + r.id + ": source " +
                                    r.source +
                                    " has no outgoing links and cannot "
                                    "self-host");
    }

    MilpProblem& p = out.problem;

    vm.x.assign(num_requests, {});
    for (std::size_t r = 0; r < num_requests; ++r) {
        vm.x[r].reserve(vm.hosts.size());
        for (std::size_t h = 0; h < vm.hosts.size(); ++h)
            vm.x[r].push_back(p.add_variable(
                "x[" + instance.requests[r].id + "," +
                    instance.nodes[vm.hosts[h]].id + "]",
                VarDomain::BINARY));
    }
    vm.z.assign(num_requests, {});
    for (std::size_t r = 0; r < num_requests; ++r) {
        vm.z[r].reserve(num_links);
        for (std::size_t l = 0; l < num_links; ++l)
            vm.z[r].push_back(p.add_variable(
                "z[" + instance.requests[r].id + "," + instance.links[l].id +
                    "]",
                VarDomain::BINARY));
    }
    vm.y.reserve(num_nodes);
    for (std::size_t n = 0; n < num_nodes; ++n)
        vm.y.push_back(
            p.add_variable("y[" + instance.nodes[n].id + "]",
                           VarDomain::BINARY));

    FormulationReport& rep = out.report;
    rep.x_vars = num_requests * vm.hosts.size();
    rep.z_vars = num_requests * num_links;
    rep.y_vars = num_nodes;

    const double traffic_scale = 1.0 + options.response_traffic_multiplier;
    const double big_m = big_m_for(instance) + options.latency_slack;
    rep.big_m = big_m;

    // A host whose compute capacity cannot cover even a lone request's work
    // plus its headroom requirement can never serve it. Fixing the
    // assignment variable at zero keeps the model exact while sparing the
    // search those branches; the pair's headroom and activation rows are
    // both implied once the variable is zero, so they are skipped below.
    std::vector<std::vector<char>> pruned(
        num_requests, std::vector<char>(vm.hosts.size(), 0));
    for (std::size_t r = 0; r < num_requests; ++r) {
        const Request& req = instance.requests[r];
        if (std::isinf(req.max_latency_l)) continue;
        const double headroom =
            required_headroom(req.max_latency_l) + options.latency_slack;
        for (std::size_t h = 0; h < vm.hosts.size(); ++h) {
            const NodeSpec& node = instance.nodes[vm.hosts[h]];
            if (node.capacity_f - work_rate(req, node) < headroom) {
                p.fix_variable(vm.x[r][h], 0.0);
                pruned[r][h] = 1;
                ++rep.pruned_hosting_pairs;
            }
        }
    }

    // Objective: VM overhead + processing power + transmission power.
    LinearExpr obj;
    for (std::size_t n = 0; n < num_nodes; ++n)
        obj.add(vm.y[n], instance.nodes[n].vm_overhead_w);
    for (std::size_t r = 0; r < num_requests; ++r)
        for (std::size_t h = 0; h < vm.hosts.size(); ++h) {
            const NodeSpec& node = instance.nodes[vm.hosts[h]];
            obj.add(vm.x[r][h],
                    node.proc_energy * work_rate(instance.requests[r], node));
        }
    for (std::size_t r = 0; r < num_requests; ++r)
        for (std::size_t l = 0; l < num_links; ++l)
            obj.add(vm.z[r][l], instance.links[l].tx_energy * traffic_scale *
                                    instance.requests[r].traffic_t);
    p.set_objective(std::move(obj));

    // (A) every request is hosted exactly once.
    for (std::size_t r = 0; r < num_requests; ++r) {
        LinearExpr e;
        for (std::size_t h = 0; h < vm.hosts.size(); ++h)
            e.add(vm.x[r][h], 1.0);
        p.add_constraint(std::move(e), Sense::EQ, 1.0,
                         "assign[" + instance.requests[r].id + "]");
        ++rep.assignment_rows;
    }

    // (B) hosting anywhere turns the node's VM flag on.
    for (std::size_t r = 0; r < num_requests; ++r)
        for (std::size_t h = 0; h < vm.hosts.size(); ++h) {
            if (pruned[r][h]) continue;
            LinearExpr e;
            e.add(vm.x[r][h], 1.0);
            e.add(vm.y[vm.hosts[h]], -1.0);
            p.add_constraint(std::move(e), Sense::LE, 0.0,
                             "activate[" + instance.requests[r].id + "," +
                                 instance.nodes[vm.hosts[h]].id + "]");
            ++rep.activation_rows;
        }

    // (C) assigned work fits in the host's compute capacity.
    for (std::size_t h = 0; h < vm.hosts.size(); ++h) {
        const NodeSpec& node = instance.nodes[vm.hosts[h]];
        LinearExpr e;
        for (std::size_t r = 0; r < num_requests; ++r)
            e.add(vm.x[r][h], work_rate(instance.requests[r], node));
        p.add_constraint(std::move(e), Sense::LE, node.capacity_f,
                         "capacity[" + node.id + "]");
        ++rep.capacity_rows;
    }

    // (D) hosting a finite-latency request leaves enough headroom:
    //   F_n - sum_r' w_r'n x[r'][n] >= h_r + eps - M (1 - x[r][n]).
    // At x[r][n] = 0 the row is implied by (C) because M covers h_r + eps.
    for (std::size_t r = 0; r < num_requests; ++r) {
        const Request& req = instance.requests[r];
        if (std::isinf(req.max_latency_l)) continue;
        const double headroom =
            required_headroom(req.max_latency_l) + options.latency_slack;
        for (std::size_t h = 0; h < vm.hosts.size(); ++h) {
            if (pruned[r][h]) continue;
            const NodeSpec& node = instance.nodes[vm.hosts[h]];
            LinearExpr e;
            for (std::size_t r2 = 0; r2 < num_requests; ++r2)
                e.add(vm.x[r2][h], -work_rate(instance.requests[r2], node));
            e.add(vm.x[r][h], -big_m);
            p.add_constraint(std::move(e), Sense::GE,
                             headroom - big_m - node.capacity_f,
                             "latency[" + req.id + "," + node.id + "]");
            ++rep.latency_rows;
        }
    }

    // (E) per-request flow conservation: net outflow is +1 at the source,
    // -1 at the chosen host, 0 elsewhere.
    for (std::size_t r = 0; r < num_requests; ++r) {
        const std::size_t src = idx.node(instance.requests[r].source);
        for (std::size_t v = 0; v < num_nodes; ++v) {
            LinearExpr e;
            for (std::size_t l : idx.out_links[v]) e.add(vm.z[r][l], 1.0);
            for (std::size_t l : idx.in_links[v]) e.add(vm.z[r][l], -1.0);
            if (vm.host_slot[v] != VarMap::npos)
                e.add(vm.x[r][vm.host_slot[v]], 1.0);
            p.add_constraint(std::move(e), Sense::EQ, v == src ? 1.0 : 0.0,
                             "flow[" + instance.requests[r].id + "," +
                                 instance.nodes[v].id + "]");
            ++rep.flow_rows;
        }
    }

    // (F) carried traffic fits each link.
    for (std::size_t l = 0; l < num_links; ++l) {
        LinearExpr e;
        for (std::size_t r = 0; r < num_requests; ++r)
            e.add(vm.z[r][l],
                  traffic_scale * instance.requests[r].traffic_t);
        p.add_constraint(std::move(e), Sense::LE,
                         instance.links[l].capacity_b,
                         "linkcap[" + instance.links[l].id + "]");
        ++rep.link_capacity_rows;
    }

    // (G) pairwise-conflict cliques: requests any two of which would
    // jointly overrun a host's latency-adjusted compute budget can place at
    // most one assignment there. Every integer point already obeys this via
    // the capacity and headroom rows; stating it directly removes the
    // fractional capacity-splitting that otherwise dominates the relaxation
    // in compute-tight regimes. One greedy clique per host, seeded from the
    // heaviest hostable request.
    for (std::size_t h = 0; h < vm.hosts.size(); ++h) {
        const NodeSpec& node = instance.nodes[vm.hosts[h]];
        auto budget = [&](std::size_t r) {
            const Request& req = instance.requests[r];
            if (std::isinf(req.max_latency_l)) return node.capacity_f;
            return node.capacity_f - required_headroom(req.max_latency_l) -
                   options.latency_slack;
        };
        auto work_of = [&](std::size_t r) {
            return work_rate(instance.requests[r], node);
        };
        std::vector<std::size_t> order;
        for (std::size_t r = 0; r < num_requests; ++r)
            if (!pruned[r][h]) order.push_back(r);
        if (order.size() < 2) continue;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) {
                      const double wa = work_of(a);
                      const double wb = work_of(b);
                      return wa > wb || (wa == wb && a < b);
                  });
        std::vector<std::size_t> clique;
        for (std::size_t r : order) {
            bool clashes_all = true;
            for (std::size_t s : clique) {
                if (work_of(r) + work_of(s) <=
                    std::min(budget(r), budget(s))) {
                    clashes_all = false;
                    break;
                }
            }
            if (clashes_all) clique.push_back(r);
        }
        if (clique.size() < 2) continue;
        std::sort(clique.begin(), clique.end());
        LinearExpr e;
        for (std::size_t r : clique) e.add(vm.x[r][h], 1.0);
        p.add_constraint(std::move(e), Sense::LE, 1.0,
                         "conflict[" + node.id + "]");
        ++rep.conflict_rows;
    }

    return out;
}

Placement extract_placement(const NetworkInstance& instance,
                            const VarMap& vars,
                            const std::vector<double>& values) {
    const InstanceIndex idx(instance);
    const std::size_t num_requests = instance.requests.size();

    Placement pl;
    pl.host.assign(num_requests, VarMap::npos);
    pl.route.assign(num_requests, {});
    pl.vm_on.assign(instance.nodes.size(), 0);

    for (std::size_t n = 0; n < instance.nodes.size(); ++n)
        pl.vm_on[n] = values.at(vars.y[n]) > 0.5 ? 1 : 0;

    for (std::size_t r = 0; r < num_requests; ++r) {
        const Request& req = instance.requests[r];
        std::size_t chosen = VarMap::npos;
        for (std::size_t h = 0; h < vars.hosts.size(); ++h) {
            if (values.at(vars.x[r][h]) > 0.5) {
                if (chosen != VarMap::npos)
                    throw CorruptSolution("request " + req.id +
                                          ": multiple hosts selected");
                chosen = vars.hosts[h];
            }
        }
        if (chosen == VarMap::npos)
            throw CorruptSolution("request " + req.id + ": no host selected");
        pl.host[r] = chosen;

        // Selected links must chain into a simple path source -> host.
        std::unordered_map<std::size_t, std::size_t> next;  // from-node -> link
        std::size_t selected = 0;
        for (std::size_t l = 0; l < instance.links.size(); ++l) {
            if (values.at(vars.z[r][l]) <= 0.5) continue;
            ++selected;
            const std::size_t from = idx.node(instance.links[l].from);
            if (!next.emplace(from, l).second)
                throw CorruptSolution("request " + req.id +
                                      ": route branches at " +
                                      instance.links[l].from);
        }
        std::size_t at = idx.node(req.source);
        std::vector<std::size_t> path;
        while (path.size() < selected) {
            auto it = next.find(at);
            if (it == next.end())
                throw CorruptSolution("request " + req.id +
                                      ": route is not a single path");
            path.push_back(it->second);
            at = idx.node(instance.links[it->second].to);
            if (at == idx.node(req.source))
                throw CorruptSolution("request " + req.id +
                                      ": route revisits its source");
        }
        if (at != chosen)
            throw CorruptSolution("request " + req.id +
                                  ": route does not end at the host");
        pl.route[r] = std::move(path);
    }
    return pl;
}

PowerBreakdown placement_power(const NetworkInstance& instance,
                               const Placement& placement,
                               const BuildOptions& options) {
    PowerBreakdown pb;
    for (std::size_t n = 0; n < instance.nodes.size(); ++n)
        if (n < placement.vm_on.size() && placement.vm_on[n])
            pb.vm_w += instance.nodes[n].vm_overhead_w;

    const double traffic_scale = 1.0 + options.response_traffic_multiplier;
    for (std::size_t r = 0; r < placement.host.size(); ++r) {
        const Request& req = instance.requests[r];
        const NodeSpec& host = instance.nodes[placement.host[r]];
        pb.proc_w += host.proc_energy * req.arrival_a * job_cycles(req, host);
        for (std::size_t l : placement.route[r])
            pb.traffic_w +=
                instance.links[l].tx_energy * traffic_scale * req.traffic_t;
    }
    pb.total_w = pb.vm_w + pb.proc_w + pb.traffic_w;
    return pb;
}

std::vector<double> placement_to_values(const NetworkInstance& instance,
                                        const VarMap& vars,
                                        const Placement& placement) {
    std::size_t total = instance.requests.size() * vars.hosts.size() +
                        instance.requests.size() * instance.links.size() +
                        instance.nodes.size();
    std::vector<double> values(total, 0.0);
    for (std::size_t r = 0; r < placement.host.size(); ++r) {
        const std::size_t slot = vars.host_slot.at(placement.host[r]);
        if (slot == VarMap::npos)
            throw CorruptSolution("request " + instance.requests[r].id +
                                  ": host outside the hosting set");
        values.at(vars.x[r][slot]) = 1.0;
        for (std::size_t l : placement.route[r]) values.at(vars.z[r][l]) = 1.0;
    }
    for (std::size_t n = 0; n < placement.vm_on.size(); ++n)
        if (placement.vm_on[n]) values.at(vars.y[n]) = 1.0;
    return values;
}

}  // namespace franopt
