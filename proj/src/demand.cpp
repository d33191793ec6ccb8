#include "franopt/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "franopt/errors.hpp"

namespace franopt {

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

double uniform01(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

double draw(std::uint64_t& state, const FieldRange& r) {
    return r.min + uniform01(splitmix64_next(state)) * (r.max - r.min);
}

void check_range(const FieldRange& r, const char* what) {
    if (!(r.min > 0.0) || !(r.max >= r.min) || !std::isfinite(r.max))
        throw ValidationError(std::string(what) +
                              " range must satisfy 0 < min <= max < inf");
}

}  // namespace

LoadProfile default_profile() {
    // Anchor hours; the curve is linear between consecutive anchors.
    static constexpr std::pair<int, double> kAnchors[] = {
        {0, 0.30}, {4, 0.10},  {8, 0.40},  {12, 0.60},
        {16, 0.70}, {20, 1.00}, {21, 1.00}, {23, 0.35},
    };
    LoadProfile p;
    std::size_t seg = 0;
    for (int hour = 0; hour < 24; ++hour) {
        while (seg + 1 < std::size(kAnchors) && kAnchors[seg + 1].first <= hour)
            ++seg;
        double value;
        if (seg + 1 == std::size(kAnchors)) {
            value = kAnchors[seg].second;
        } else {
            const auto [h0, v0] = kAnchors[seg];
            const auto [h1, v1] = kAnchors[seg + 1];
            value = v0 + (v1 - v0) * (hour - h0) / static_cast<double>(h1 - h0);
        }
        p.entries.push_back({hour, value});
    }
    return p;
}

std::vector<Request> generate_requests(const DemandConfig& config,
                                       const std::vector<std::string>& ids) {
    if (ids.empty())
        throw ValidationError("request generation needs at least one device");
    if (config.requests_per_ud == 0)
        throw ValidationError("requests_per_ud must be positive");
    check_range(config.arrival_a, "arrival_a");
    check_range(config.instr, "instr");
    check_range(config.traffic_t, "traffic_t");
    check_range(config.max_latency_l, "max_latency_l");

    std::vector<std::string> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    std::vector<Request> out;
    out.reserve(sorted.size() * config.requests_per_ud);
    for (const std::string& ud : sorted) {
        const std::uint64_t ud_key = fnv1a64(ud);
        for (std::size_t k = 0; k < config.requests_per_ud; ++k) {
            // Counter-based stream: two mixing steps fold the device hash
            // and the request index into the seed, then four draws follow.
            std::uint64_t state = config.seed;
            state = splitmix64_next(state) ^ ud_key;
            state = splitmix64_next(state) ^ static_cast<std::uint64_t>(k);
            Request r;
            r.id = ud + ".r" + std::to_string(k);
            r.source = ud;
            r.arrival_a = draw(state, config.arrival_a);
            r.instr = draw(state, config.instr);
            r.traffic_t = draw(state, config.traffic_t);
            r.max_latency_l = draw(state, config.max_latency_l);
            out.push_back(std::move(r));
        }
    }
    return out;
}

std::vector<std::string> active_uds(double fraction,
                                    const std::vector<std::string>& ids) {
    if (!(fraction >= 0.0) || !(fraction <= 1.0))
        throw ValidationError("active fraction must lie in [0, 1]");
    std::vector<std::string> sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    // The tiny nudge keeps an exact integer product from drifting one ulp
    // up and activating a device too many.
    const double raw = fraction * static_cast<double>(sorted.size());
    auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
    count = std::min(count, sorted.size());
    sorted.resize(count);
    return sorted;
}

std::vector<std::string> ud_ids(const NetworkInstance& instance) {
    std::vector<std::string> out;
    for (const NodeSpec& n : instance.nodes)
        if (n.kind == NodeKind::UD) out.push_back(n.id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace franopt
