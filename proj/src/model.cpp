#include "franopt/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "franopt/errors.hpp"

namespace franopt {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::OLT: return "OLT";
        case NodeKind::ONU: return "ONU";
        case NodeKind::ENODEB: return "ENODEB";
        case NodeKind::UD: return "UD";
    }
    return "?";
}

const char* to_string(LinkKind k) {
    switch (k) {
        case LinkKind::FIBRE: return "FIBRE";
        case LinkKind::LICENSED: return "LICENSED";
        case LinkKind::D2D: return "D2D";
    }
    return "?";
}

const char* to_string(HostingPolicy p) {
    return p == HostingPolicy::CRAN ? "cran" : "fran";
}

double job_cycles(const Request& req, const NodeSpec& node) {
    return req.instr * node.cpi;
}

std::vector<std::string> hosting_set(const NetworkInstance& instance,
                                     HostingPolicy policy) {
    std::vector<std::string> ids;
    for (const auto& n : instance.nodes) {
        if (policy == HostingPolicy::FRAN ||
            n.kind == NodeKind::OLT || n.kind == NodeKind::ONU) {
            ids.push_back(n.id);
        }
    }
    return ids;
}

std::vector<std::size_t> hosting_indices(const NetworkInstance& instance,
                                         HostingPolicy policy) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < instance.nodes.size(); ++i) {
        const NodeKind k = instance.nodes[i].kind;
        if (policy == HostingPolicy::FRAN ||
            k == NodeKind::OLT || k == NodeKind::ONU) {
            out.push_back(i);
        }
    }
    return out;
}

namespace {

bool fibre_endpoint(NodeKind k) {
    return k == NodeKind::OLT || k == NodeKind::ONU || k == NodeKind::ENODEB;
}

}  // namespace

std::vector<std::string> validate(const NetworkInstance& instance) {
    std::vector<std::string> v;
    auto add = [&v](const std::string& msg) { v.push_back(msg); };

    std::unordered_map<std::string, std::size_t> node_of;
    for (const auto& n : instance.nodes) {
        if (n.id.empty()) add("node: empty id");
        if (!(n.capacity_f > 0.0))
            add("node " + n.id + ": capacity_f must be > 0");
        if (!(n.cpi >= 1.0)) add("node " + n.id + ": cpi must be >= 1");
        if (!(n.vm_overhead_w >= 0.0))
            add("node " + n.id + ": vm_overhead_w must be >= 0");
        if (!(n.proc_energy >= 0.0))
            add("node " + n.id + ": proc_energy must be >= 0");
        if (node_of.count(n.id)) {
            add("duplicate id: " + n.id);
        } else {
            node_of.emplace(n.id, node_of.size());
        }
    }

    std::size_t olt_count = 0;
    for (const auto& n : instance.nodes)
        if (n.kind == NodeKind::OLT) ++olt_count;
    if (olt_count != 1)
        add("instance: expected exactly one OLT, found " +
            std::to_string(olt_count));

    std::set<std::string> link_ids;
    for (const auto& l : instance.links) {
        if (l.id.empty()) add("link: empty id");
        if (!link_ids.insert(l.id).second) add("duplicate id: " + l.id);
        if (!(l.capacity_b > 0.0))
            add("link " + l.id + ": capacity_b must be > 0");
        if (!(l.tx_energy >= 0.0))
            add("link " + l.id + ": tx_energy must be >= 0");
        auto fi = node_of.find(l.from);
        auto ti = node_of.find(l.to);
        if (fi == node_of.end()) {
            add("link " + l.id + ": unknown endpoint " + l.from);
            continue;
        }
        if (ti == node_of.end()) {
            add("link " + l.id + ": unknown endpoint " + l.to);
            continue;
        }
        if (l.from == l.to) {
            add("link " + l.id + ": self-loop");
            continue;
        }
        const NodeKind a = instance.nodes[fi->second].kind;
        const NodeKind b = instance.nodes[ti->second].kind;
        bool ok = false;
        switch (l.kind) {
            case LinkKind::FIBRE:
                ok = fibre_endpoint(a) && fibre_endpoint(b);
                break;
            case LinkKind::LICENSED:
                ok = (a == NodeKind::ENODEB && b == NodeKind::UD) ||
                     (a == NodeKind::UD && b == NodeKind::ENODEB);
                break;
            case LinkKind::D2D:
                ok = a == NodeKind::UD && b == NodeKind::UD;
                break;
        }
        if (!ok)
            add("link " + l.id + ": kind/endpoint mismatch (" +
                std::string(to_string(l.kind)) + " between " + to_string(a) +
                " and " + to_string(b) + ")");
    }

    std::set<std::string> request_ids;
    for (const auto& r : instance.requests) {
        if (r.id.empty()) add("request: empty id");
        if (!request_ids.insert(r.id).second) add("duplicate id: " + r.id);
        if (!(r.arrival_a > 0.0))
            add("request " + r.id + ": arrival_a must be > 0");
        if (!(r.instr > 0.0)) add("request " + r.id + ": instr must be > 0");
        if (!(r.traffic_t >= 0.0))
            add("request " + r.id + ": traffic_t must be >= 0");
        if (!(r.max_latency_l > 0.0))
            add("request " + r.id + ": max_latency_l must be > 0");
        auto si = node_of.find(r.source);
        if (si == node_of.end()) {
            add("request " + r.id + ": unknown source " + r.source);
        } else if (instance.nodes[si->second].kind != NodeKind::UD) {
            add("request " + r.id + ": source " + r.source + " is not a UD");
        }
    }

    // Connectivity checks run only when per-element ids and endpoints are
    // sound; otherwise the adjacency itself is ill-defined.
    const bool structure_ok =
        v.empty() ||
        std::none_of(v.begin(), v.end(), [](const std::string& s) {
            return s.find("unknown endpoint") != std::string::npos ||
                   s.find("duplicate id") != std::string::npos;
        });
    if (structure_ok && !instance.nodes.empty()) {
        const std::size_t n = instance.nodes.size();
        std::vector<std::vector<std::size_t>> und(n);
        std::vector<std::vector<std::size_t>> radio(n);  // LICENSED + D2D only
        for (const auto& l : instance.links) {
            auto fi = node_of.find(l.from);
            auto ti = node_of.find(l.to);
            if (fi == node_of.end() || ti == node_of.end()) continue;
            und[fi->second].push_back(ti->second);
            und[ti->second].push_back(fi->second);
            if (l.kind != LinkKind::FIBRE) {
                radio[fi->second].push_back(ti->second);
                radio[ti->second].push_back(fi->second);
            }
        }
        std::vector<char> seen(n, 0);
        std::deque<std::size_t> q{0};
        seen[0] = 1;
        while (!q.empty()) {
            std::size_t u = q.front();
            q.pop_front();
            for (std::size_t w : und[u])
                if (!seen[w]) {
                    seen[w] = 1;
                    q.push_back(w);
                }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!seen[i])
                add("node " + instance.nodes[i].id +
                    ": disconnected from the rest of the network");

        for (std::size_t i = 0; i < n; ++i) {
            if (instance.nodes[i].kind != NodeKind::UD) continue;
            std::vector<char> vis(n, 0);
            std::deque<std::size_t> bfs{i};
            vis[i] = 1;
            bool reaches = false;
            while (!bfs.empty() && !reaches) {
                std::size_t u = bfs.front();
                bfs.pop_front();
                if (instance.nodes[u].kind == NodeKind::ENODEB) {
                    reaches = true;
                    break;
                }
                for (std::size_t w : radio[u])
                    if (!vis[w]) {
                        vis[w] = 1;
                        bfs.push_back(w);
                    }
            }
            if (!reaches)
                add("node " + instance.nodes[i].id +
                    ": UD cannot reach any eNodeB over LICENSED/D2D hops");
        }
    }

    std::sort(v.begin(), v.end());
    return v;
}

InstanceIndex::InstanceIndex(const NetworkInstance& inst) : instance(inst) {
    node_of.reserve(inst.nodes.size());
    for (std::size_t i = 0; i < inst.nodes.size(); ++i)
        node_of.emplace(inst.nodes[i].id, i);
    link_of.reserve(inst.links.size());
    out_links.resize(inst.nodes.size());
    in_links.resize(inst.nodes.size());
    for (std::size_t l = 0; l < inst.links.size(); ++l) {
        link_of.emplace(inst.links[l].id, l);
        out_links[node(inst.links[l].from)].push_back(l);
        in_links[node(inst.links[l].to)].push_back(l);
    }
}

std::size_t InstanceIndex::node(const std::string& id) const {
    auto it = node_of.find(id);
    if (it == node_of.end()) throw Error("unknown node id: " + id);
    return it->second;
}

std::size_t InstanceIndex::link(const std::string& id) const {
    auto it = link_of.find(id);
    if (it == link_of.end()) throw Error("unknown link id: " + id);
    return it->second;
}

}  // namespace franopt
