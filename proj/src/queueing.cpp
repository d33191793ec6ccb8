#include "franopt/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "franopt/errors.hpp"

namespace franopt {

double mm1_delay(const QueueState& q) {
    if (!(q.capacity_mu > 0.0))
        throw UnstableQueue("mm1_delay: capacity must be positive");
    if (q.work_arrival_lambda >= q.capacity_mu)
        throw UnstableQueue("mm1_delay: arrival rate " +
                            std::to_string(q.work_arrival_lambda) +
                            " >= capacity " + std::to_string(q.capacity_mu));
    return 1.0 / (q.capacity_mu - q.work_arrival_lambda);
}

double required_headroom(double max_latency_l) {
    if (std::isinf(max_latency_l)) return 0.0;
    if (!(max_latency_l > 0.0))
        throw Error("required_headroom: latency bound must be positive");
    return 1.0 / max_latency_l;
}

double big_m_for(const NetworkInstance& instance) {
    double m = 0.0;
    for (const auto& r : instance.requests)
        m = std::max(m, required_headroom(r.max_latency_l));
    return m;
}

}  // namespace franopt
