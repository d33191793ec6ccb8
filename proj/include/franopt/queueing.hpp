#pragma once

#include "franopt/model.hpp"

namespace franopt {

/// Work-conserving M/M/1 view of one hosting node: capacity and aggregate
/// assigned work, both in Gcycles/s.
struct QueueState {
    double capacity_mu = 0.0;
    double work_arrival_lambda = 0.0;
};

/// Sojourn time 1 / (mu - lambda). Throws UnstableQueue when lambda >= mu.
double mm1_delay(const QueueState& q);

/// Minimum capacity headroom (mu - lambda) a host must keep so its M/M/1
/// delay stays within `max_latency_l`. Infinite latency needs no headroom.
double required_headroom(double max_latency_l);

/// Largest headroom any request in the instance can demand; makes the
/// indicator-relaxed latency constraint vacuous when the request is hosted
/// elsewhere. Requests with infinite latency contribute zero.
double big_m_for(const NetworkInstance& instance);

}  // namespace franopt
