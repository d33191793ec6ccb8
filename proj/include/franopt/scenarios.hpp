#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "franopt/demand.hpp"
#include "franopt/formulation.hpp"
#include "franopt/model.hpp"
#include "franopt/solver.hpp"

namespace franopt {

/// Everything a sweep needs besides the inputs themselves.
struct SweepOptions {
    SolverOptions solver{};
    BuildOptions build{};
    std::size_t workers = 1;  // row-level parallelism; results are ordered
};

/// One solved (sweep key, policy) cell. The key is the hour for the load
/// sweep and the latency bound in seconds for the latency sweep. Power is
/// meaningful only when the status is OPTIMAL.
struct SweepRow {
    double key = 0.0;
    HostingPolicy policy = HostingPolicy::CRAN;
    BnbStatus status = BnbStatus::INFEASIBLE;
    PowerBreakdown power{};
    std::size_t bnb_nodes = 0;
};

/// Sweep outcome: rows sorted by (key, policy with CRAN first), the average
/// saving over the keys where it is defined, and the keys that were
/// excluded from that average (a policy not OPTIMAL, or zero baseline).
struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<double> average_saving_pct;
    std::vector<double> excluded_keys;
    std::vector<double> grid;  // latency grid used; empty for load sweeps
};

/// Percentage of the centralized power saved by fog hosting:
/// 100 * (p_cran - p_fran) / p_cran. Throws DivisionByZero when the
/// baseline is zero; the caller excludes such slots instead.
double saving_pct(double p_cran, double p_fran);

/// Daily experiment: for every profile slot, restrict the generated demand
/// to the slot's active devices and solve both hosting policies.
/// `base` supplies topology only; its own request list is ignored.
SweepResult run_load_sweep(const NetworkInstance& base,
                           const LoadProfile& profile,
                           const DemandConfig& demand,
                           const SweepOptions& options = {});

/// Deadline experiment: full demand (all devices active), every request's
/// latency bound overridden by each grid value in turn, both policies
/// solved per point. The grid must be positive and strictly increasing.
SweepResult run_latency_sweep(const NetworkInstance& base,
                              const DemandConfig& demand,
                              const std::vector<double>& latency_grid,
                              const SweepOptions& options = {});

/// Picks a 16-point log-spaced latency grid for this instance: the low end
/// sits just below the reciprocal of the best non-backbone capacity (so
/// only backbone nodes can satisfy it), the high end safely inside the
/// region where the fog optimum has stopped improving (found by probing
/// the unconstrained-latency solution).
std::vector<double> auto_latency_grid(const NetworkInstance& base,
                                      const DemandConfig& demand,
                                      const SweepOptions& options = {});

/// Deterministic small instance for reference testing: one OLT, one ONU,
/// one eNodeB, one to five daisy-chained devices, one to three requests,
/// link capacities far above any possible load. Always validate-clean and
/// feasible under both policies.
NetworkInstance random_small_instance(std::uint64_t seed);

/// Outcome of an enumerate-versus-branch-and-bound comparison batch.
struct OracleCheckResult {
    std::size_t instances = 0;
    std::size_t comparisons = 0;  // two per instance (both policies)
    double max_abs_diff = 0.0;
    bool all_match = true;
};

/// Compares the exhaustive enumerator with the MILP solver on
/// `num_instances` seeded random small instances under both policies.
OracleCheckResult run_oracle_check(std::size_t num_instances,
                                   std::uint64_t seed, double tolerance,
                                   const SweepOptions& options = {});

}  // namespace franopt
