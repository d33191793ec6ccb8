#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace franopt {

enum class NodeKind { OLT, ONU, ENODEB, UD };
enum class LinkKind { FIBRE, LICENSED, D2D };

const char* to_string(NodeKind k);
const char* to_string(LinkKind k);

/// A network element that can carry traffic and, policy permitting, host VMs.
struct NodeSpec {
    std::string id;
    NodeKind kind = NodeKind::UD;
    double capacity_f = 0.0;     // compute capacity, Gcycles/s
    double cpi = 1.0;            // cycles per instruction, >= 1
    double vm_overhead_w = 0.0;  // watts while hosting at least one VM
    double proc_energy = 0.0;    // watts per Gcycle/s of served work
};

/// One directed link. Bidirectional media appear as two entries.
struct LinkSpec {
    std::string id;
    std::string from;
    std::string to;
    LinkKind kind = LinkKind::FIBRE;
    double capacity_b = 0.0;  // Mbit/s
    double tx_energy = 0.0;   // watts per Mbit/s carried
};

/// A service demand originating at a user device.
struct Request {
    std::string id;
    std::string source;        // UD node id
    double arrival_a = 0.0;    // jobs/s
    double instr = 0.0;        // Ginstructions per job
    double traffic_t = 0.0;    // Mbit/s sustained source -> host
    double max_latency_l = std::numeric_limits<double>::infinity();  // seconds
};

struct NetworkInstance {
    std::vector<NodeSpec> nodes;
    std::vector<LinkSpec> links;
    std::vector<Request> requests;
};

/// Which node kinds may host VMs. CRAN restricts hosting to the GPON
/// backbone (OLT + ONUs); FRAN opens every element of the network.
enum class HostingPolicy { CRAN, FRAN };

const char* to_string(HostingPolicy p);

/// Checks every instance invariant and returns the violations found, one
/// human-readable line each, sorted. Empty result means the instance is valid.
std::vector<std::string> validate(const NetworkInstance& instance);

/// Work one job of `req` costs on `node`: instructions times the node's CPI.
double job_cycles(const Request& req, const NodeSpec& node);

/// Node ids allowed to host under `policy`, in instance order.
std::vector<std::string> hosting_set(const NetworkInstance& instance,
                                     HostingPolicy policy);

/// Same hosting set as indices into instance.nodes.
std::vector<std::size_t> hosting_indices(const NetworkInstance& instance,
                                         HostingPolicy policy);

/// Lookup tables over an instance: id -> index maps and per-node link
/// adjacency. Build once after validation; the instance must outlive it.
struct InstanceIndex {
    explicit InstanceIndex(const NetworkInstance& instance);

    const NetworkInstance& instance;
    std::unordered_map<std::string, std::size_t> node_of;
    std::unordered_map<std::string, std::size_t> link_of;
    std::vector<std::vector<std::size_t>> out_links;  // per node
    std::vector<std::vector<std::size_t>> in_links;   // per node

    std::size_t node(const std::string& id) const;
    std::size_t link(const std::string& id) const;
};

}  // namespace franopt
