#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "franopt/model.hpp"

namespace franopt {

/// FNV-1a 64-bit hash; stable across platforms and runs. Used to key the
/// demand stream by device id and to fingerprint configuration files.
std::uint64_t fnv1a64(std::string_view data);

/// One step of the splitmix64 generator: advances `state` and returns the
/// next 64-bit output. The demand generator derives an independent stream
/// per (seed, device, request) from this single primitive.
std::uint64_t splitmix64_next(std::uint64_t& state);

/// Closed interval a request parameter is drawn from, uniformly.
struct FieldRange {
    double min = 0.0;
    double max = 0.0;
};

/// Deterministic demand recipe: every request parameter is a pure function
/// of (seed, device id, request index), independent of device list order.
struct DemandConfig {
    std::uint64_t seed = 0;
    std::size_t requests_per_ud = 3;
    FieldRange arrival_a{0.4, 1.2};    // jobs/s
    FieldRange instr{0.3, 0.9};        // Ginstructions per job
    FieldRange traffic_t{2.0, 10.0};   // Mbit/s
    FieldRange max_latency_l{1.0, 3.0};  // seconds
};

/// One hour-slot of the day with the fraction of devices active in it.
struct ProfileEntry {
    int hour = 0;                 // 0..23
    double active_fraction = 0.0;  // in [0, 1]
};

struct LoadProfile {
    std::vector<ProfileEntry> entries;
};

/// Synthetic diurnal activity curve: trough 0.10 at 04:00, peak 1.00 at
/// 20:00-21:00, piecewise-linear between anchor hours, one entry per hour.
LoadProfile default_profile();

/// Generates exactly requests_per_ud requests per device, parameters drawn
/// uniformly from the configured ranges by a counter-based splitmix64
/// stream keyed by (seed, device id hash, request index). The result is
/// sorted by (device id, request index), so it is byte-identical under any
/// permutation of the input list. Request ids are "<ud_id>.r<k>".
/// Throws ValidationError on an empty device list or a bad range.
std::vector<Request> generate_requests(const DemandConfig& config,
                                       const std::vector<std::string>& ud_ids);

/// The first ceil(fraction * N) device ids in ascending id order. Nested:
/// a larger fraction always yields a superset. Throws ValidationError when
/// the fraction is outside [0, 1].
std::vector<std::string> active_uds(double fraction,
                                    const std::vector<std::string>& ud_ids);

/// Device ids of every UD node in the instance, ascending.
std::vector<std::string> ud_ids(const NetworkInstance& instance);

}  // namespace franopt
