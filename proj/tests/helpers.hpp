#pragma once

#include <limits>
#include <string>

#include "franopt/model.hpp"

namespace franopt::test {

inline NodeSpec make_node(std::string id, NodeKind kind, double f, double cpi,
                          double vm_w, double proc_e) {
    NodeSpec n;
    n.id = std::move(id);
    n.kind = kind;
    n.capacity_f = f;
    n.cpi = cpi;
    n.vm_overhead_w = vm_w;
    n.proc_energy = proc_e;
    return n;
}

inline LinkSpec make_link(std::string id, std::string from, std::string to,
                          LinkKind kind, double b, double tx) {
    LinkSpec l;
    l.id = std::move(id);
    l.from = std::move(from);
    l.to = std::move(to);
    l.kind = kind;
    l.capacity_b = b;
    l.tx_energy = tx;
    return l;
}

inline Request make_request(
    std::string id, std::string source, double a, double instr, double t,
    double latency = std::numeric_limits<double>::infinity()) {
    Request r;
    r.id = std::move(id);
    r.source = std::move(source);
    r.arrival_a = a;
    r.instr = instr;
    r.traffic_t = t;
    r.max_latency_l = latency;
    return r;
}

/// Five nodes (one OLT, two ONUs, one eNodeB, one UD), eight directed
/// links, two requests. Small enough to reason about by hand; the CRAN
/// hosting set has exactly three nodes.
inline NetworkInstance tiny_instance() {
    NetworkInstance inst;
    inst.nodes = {
        make_node("olt0", NodeKind::OLT, 100.0, 1.0, 10.0, 0.5),
        make_node("onu0", NodeKind::ONU, 50.0, 1.0, 5.0, 0.8),
        make_node("onu1", NodeKind::ONU, 50.0, 1.0, 5.0, 0.8),
        make_node("enb0", NodeKind::ENODEB, 10.0, 1.2, 3.0, 1.5),
        make_node("ud0", NodeKind::UD, 2.0, 1.5, 0.5, 2.0),
    };
    inst.links = {
        make_link("l0", "olt0", "onu0", LinkKind::FIBRE, 1000.0, 0.01),
        make_link("l1", "onu0", "olt0", LinkKind::FIBRE, 1000.0, 0.01),
        make_link("l2", "olt0", "onu1", LinkKind::FIBRE, 1000.0, 0.01),
        make_link("l3", "onu1", "olt0", LinkKind::FIBRE, 1000.0, 0.01),
        make_link("l4", "onu0", "enb0", LinkKind::FIBRE, 800.0, 0.02),
        make_link("l5", "enb0", "onu0", LinkKind::FIBRE, 800.0, 0.02),
        make_link("l6", "enb0", "ud0", LinkKind::LICENSED, 200.0, 0.2),
        make_link("l7", "ud0", "enb0", LinkKind::LICENSED, 200.0, 0.2),
    };
    inst.requests = {
        make_request("r0", "ud0", 1.0, 0.5, 4.0),
        make_request("r1", "ud0", 0.5, 0.8, 2.0),
    };
    return inst;
}

}  // namespace franopt::test
