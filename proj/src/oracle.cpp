#include "franopt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "franopt/errors.hpp"
#include "franopt/queueing.hpp"

namespace franopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNpos = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kAssignmentCap = 1'000'000;
constexpr double kFeasEps = 1e-9;

struct ShortestPaths {
    std::vector<double> dist;            // summed tx_energy per Mbit/s
    std::vector<std::size_t> pred_link;  // kNpos where unreachable
};

// Dijkstra over directed links weighted by tx_energy. The weight is traffic
// independent, so one run per request source serves every candidate host.
ShortestPaths min_energy_paths(const InstanceIndex& idx, std::size_t source) {
    const auto& inst = idx.instance;
    ShortestPaths sp;
    sp.dist.assign(inst.nodes.size(), kInf);
    sp.pred_link.assign(inst.nodes.size(), kNpos);
    sp.dist[source] = 0.0;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > sp.dist[u]) continue;
        for (std::size_t l : idx.out_links[u]) {
            const LinkSpec& link = inst.links[l];
            const std::size_t v = idx.node(link.to);
            const double nd = d + link.tx_energy;
            if (nd < sp.dist[v]) {
                sp.dist[v] = nd;
                sp.pred_link[v] = l;
                heap.emplace(nd, v);
            }
        }
    }
    return sp;
}

std::vector<std::size_t> reconstruct(const InstanceIndex& idx,
                                     const ShortestPaths& sp,
                                     std::size_t source, std::size_t target) {
    std::vector<std::size_t> links;
    std::size_t cur = target;
    while (cur != source) {
        const std::size_t l = sp.pred_link[cur];
        links.push_back(l);
        cur = idx.node(idx.instance.links[l].from);
    }
    std::reverse(links.begin(), links.end());
    return links;
}

// Everything about hosting request r at host slot h, precomputed once.
struct Candidate {
    bool reachable = false;
    std::vector<std::size_t> links;
    double tx_w = 0.0;    // transmission power on the chosen path, watts
    double work = 0.0;    // Gcycles/s of served demand at this host
    double proc_w = 0.0;  // processing power, watts
};

}  // namespace

const char* to_string(OracleStatus s) {
    switch (s) {
        case OracleStatus::OPTIMAL: return "OPTIMAL";
        case OracleStatus::INFEASIBLE: return "INFEASIBLE";
    }
    return "?";
}

OracleResult enumerate_optimum(const NetworkInstance& instance,
                               HostingPolicy policy,
                               const BuildOptions& options) {
    const InstanceIndex idx(instance);
    const std::vector<std::size_t> hosts = hosting_indices(instance, policy);
    if (hosts.empty())
        throw EmptyHostingSet("no node is allowed to host under policy " +
                              std::string(to_string(policy)));

    const std::size_t num_requests = instance.requests.size();
    const std::size_t num_hosts = hosts.size();

    std::size_t total = 1;
    for (std::size_t r = 0; r < num_requests; ++r) {
        if (total > kAssignmentCap / num_hosts)
            throw TooLarge("assignment space " + std::to_string(num_hosts) +
                           "^" + std::to_string(num_requests) + " exceeds " +
                           std::to_string(kAssignmentCap));
        total *= num_hosts;
    }

    const double traffic_scale = 1.0 + options.response_traffic_multiplier;

    // Per (request, host slot) data, shared across all assignments.
    std::vector<std::vector<Candidate>> cand(
        num_requests, std::vector<Candidate>(num_hosts));
    std::vector<double> headroom(num_requests, 0.0);
    std::vector<bool> finite_latency(num_requests, false);
    for (std::size_t r = 0; r < num_requests; ++r) {
        const Request& req = instance.requests[r];
        const std::size_t src = idx.node(req.source);
        const ShortestPaths sp = min_energy_paths(idx, src);
        finite_latency[r] = std::isfinite(req.max_latency_l);
        headroom[r] = required_headroom(req.max_latency_l);
        for (std::size_t h = 0; h < num_hosts; ++h) {
            const std::size_t n = hosts[h];
            Candidate& c = cand[r][h];
            c.work = req.arrival_a * job_cycles(req, instance.nodes[n]);
            c.proc_w = instance.nodes[n].proc_energy * c.work;
            if (n == src) {
                c.reachable = true;
            } else if (sp.dist[n] < kInf) {
                c.reachable = true;
                c.links = reconstruct(idx, sp, src, n);
                c.tx_w = traffic_scale * req.traffic_t * sp.dist[n];
            }
        }
    }

    // Scratch accumulators, reset via touched lists between assignments.
    std::vector<double> node_work(instance.nodes.size(), 0.0);
    std::vector<double> link_load(instance.links.size(), 0.0);
    std::vector<std::size_t> touched_nodes;
    std::vector<std::size_t> touched_links;

    std::vector<std::size_t> slot(num_requests, 0);
    std::vector<std::size_t> best_slot;
    double best_obj = kInf;

    for (std::size_t count = 0; count < total; ++count) {
        bool feasible = true;
        for (std::size_t r = 0; r < num_requests && feasible; ++r)
            feasible = cand[r][slot[r]].reachable;

        if (feasible) {
            touched_nodes.clear();
            touched_links.clear();
            double obj = 0.0;
            for (std::size_t r = 0; r < num_requests; ++r) {
                const Candidate& c = cand[r][slot[r]];
                const std::size_t n = hosts[slot[r]];
                if (node_work[n] == 0.0) touched_nodes.push_back(n);
                node_work[n] += c.work;
                obj += c.proc_w + c.tx_w;
                for (std::size_t l : c.links) {
                    if (link_load[l] == 0.0) touched_links.push_back(l);
                    link_load[l] += traffic_scale * instance.requests[r].traffic_t;
                }
            }
            for (std::size_t n : touched_nodes) {
                obj += instance.nodes[n].vm_overhead_w;
                if (node_work[n] > instance.nodes[n].capacity_f + kFeasEps)
                    feasible = false;
            }
            if (feasible) {
                for (std::size_t r = 0; r < num_requests && feasible; ++r) {
                    if (!finite_latency[r]) continue;
                    const std::size_t n = hosts[slot[r]];
                    feasible = instance.nodes[n].capacity_f - node_work[n] >=
                               headroom[r] + options.latency_slack - kFeasEps;
                }
            }
            if (feasible) {
                for (std::size_t l : touched_links) {
                    if (link_load[l] >
                        instance.links[l].capacity_b + kFeasEps)
                        throw CapacityCoupling(
                            "minimum-energy routes jointly overload link '" +
                            instance.links[l].id +
                            "'; coupled routing cannot be certified by "
                            "per-request decomposition");
                }
                if (obj < best_obj) {
                    best_obj = obj;
                    best_slot = slot;
                }
            }
            for (std::size_t n : touched_nodes) node_work[n] = 0.0;
            for (std::size_t l : touched_links) link_load[l] = 0.0;
        }

        // Advance the odometer; the last request is the fastest digit, so
        // assignments appear in lexicographic order.
        for (std::size_t i = num_requests; i-- > 0;) {
            if (++slot[i] < num_hosts) break;
            slot[i] = 0;
        }
    }

    OracleResult result;
    result.assignments_examined = total;
    if (best_obj == kInf) return result;

    Placement placement;
    placement.host.resize(num_requests);
    placement.route.resize(num_requests);
    placement.vm_on.assign(instance.nodes.size(), 0);
    for (std::size_t r = 0; r < num_requests; ++r) {
        const std::size_t n = hosts[best_slot[r]];
        placement.host[r] = n;
        placement.route[r] = cand[r][best_slot[r]].links;
        placement.vm_on[n] = 1;
    }
    result.status = OracleStatus::OPTIMAL;
    result.placement = std::move(placement);
    result.objective =
        placement_power(instance, result.placement, options).total_w;
    return result;
}

}  // namespace franopt
