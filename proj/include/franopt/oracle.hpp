#pragma once

#include <cstddef>
#include <limits>

#include "franopt/formulation.hpp"
#include "franopt/model.hpp"

namespace franopt {

enum class OracleStatus { OPTIMAL, INFEASIBLE };
const char* to_string(OracleStatus s);

/// Outcome of the exhaustive reference search. On OPTIMAL the placement
/// satisfies every feasibility rule (one host per request, compute capacity,
/// latency headroom, routing, joint link capacity) and no other assignment
/// has lower total power.
struct OracleResult {
    OracleStatus status = OracleStatus::INFEASIBLE;
    double objective = std::numeric_limits<double>::infinity();
    Placement placement;
    std::size_t assignments_examined = 0;
};

/// Brute-force reference optimizer for tiny instances. Enumerates every
/// host assignment in lexicographic order (requests in instance order, host
/// slots in hosting-set order); routes each request along its minimum
/// transmission-energy path; keeps the cheapest feasible combination, ties
/// resolved to the first assignment enumerated.
///
/// Deliberately refuses what it cannot answer exactly:
///  - TooLarge when |hosts|^|requests| exceeds 10^6;
///  - CapacityCoupling when an otherwise-feasible assignment's min-energy
///    paths jointly violate a link capacity (a coupled routing choice could
///    exist that this per-request decomposition cannot certify);
///  - EmptyHostingSet when no node may host under the policy.
///
/// Shares BuildOptions with the MILP construction so the traffic multiplier
/// and latency slack can never diverge between the two answers.
OracleResult enumerate_optimum(const NetworkInstance& instance,
                               HostingPolicy policy,
                               const BuildOptions& options = {});

}  // namespace franopt
