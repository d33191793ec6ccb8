#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "franopt/milp.hpp"
#include "franopt/model.hpp"

namespace franopt {

/// Knobs for the MILP construction. The response multiplier scales every
/// request's carried traffic (1 + m charges the uplink plus a modeled
/// downlink share on the same path); the latency slack keeps headroom
/// constraints strictly away from the unstable boundary.
struct BuildOptions {
    double response_traffic_multiplier = 0.0;
    double latency_slack = 1e-9;
};

/// Variable index layout of a built problem. x is indexed [request][host
/// slot], z is [request][link], y is [node]. host_slot maps a node index to
/// its slot in `hosts` (npos when the node cannot host).
struct VarMap {
    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

    std::vector<std::size_t> hosts;
    std::vector<std::size_t> host_slot;
    std::vector<std::vector<std::size_t>> x;
    std::vector<std::vector<std::size_t>> z;
    std::vector<std::size_t> y;
};

struct FormulationReport {
    std::size_t x_vars = 0;
    std::size_t z_vars = 0;
    std::size_t y_vars = 0;
    std::size_t assignment_rows = 0;
    std::size_t activation_rows = 0;
    std::size_t capacity_rows = 0;
    std::size_t latency_rows = 0;
    std::size_t flow_rows = 0;
    std::size_t link_capacity_rows = 0;
    // (request, host) pairs whose assignment variable was fixed at zero
    // because the host cannot meet the request's latency bound even alone;
    // their headroom and activation rows are omitted as redundant.
    std::size_t pruned_hosting_pairs = 0;
    // One row per host whose hostable requests contain a set that is
    // pairwise incompatible (any two together overrun the host's
    // latency-adjusted compute budget): at most one member can be assigned
    // there. Valid for every integer solution; added to sharpen the
    // relaxation.
    std::size_t conflict_rows = 0;
    double big_m = 0.0;
};

struct BuildResult {
    MilpProblem problem;
    VarMap vars;
    FormulationReport report;
};

/// Integral solution decoded back into domain terms: per-request hosting
/// node index, per-request route as ordered link indices (empty when
/// self-hosted), and per-node VM-on flags.
struct Placement {
    std::vector<std::size_t> host;
    std::vector<std::vector<std::size_t>> route;
    std::vector<char> vm_on;
};

struct PowerBreakdown {
    double total_w = 0.0;
    double proc_w = 0.0;
    double vm_w = 0.0;
    double traffic_w = 0.0;
};

/// Builds the placement-and-routing MILP: minimize VM overhead plus
/// processing plus transmission power, subject to one host per request,
/// activation coupling, compute capacity, latency headroom (big-M over the
/// hosting indicator), per-request flow conservation and link capacity.
/// Throws EmptyHostingSet or UnroutableRequest.
BuildResult build(const NetworkInstance& instance, HostingPolicy policy,
                  const BuildOptions& options = {});

/// Decodes an integral-feasible value vector. Throws CorruptSolution when an
/// x row is not one-hot or the selected z edges do not trace a simple
/// source-to-host path.
Placement extract_placement(const NetworkInstance& instance, const VarMap& vars,
                            const std::vector<double>& values);

/// Recomputes the three power components from a placement alone.
PowerBreakdown placement_power(const NetworkInstance& instance,
                               const Placement& placement,
                               const BuildOptions& options = {});

/// Encodes a placement as a value vector for the built problem, suitable for
/// MilpProblem::check_feasible and objective evaluation.
std::vector<double> placement_to_values(const NetworkInstance& instance,
                                        const VarMap& vars,
                                        const Placement& placement);

}  // namespace franopt
