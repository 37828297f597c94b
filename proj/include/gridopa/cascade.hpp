#pragma once

#include "gridopa/dispatch.hpp"
#include "gridopa/network.hpp"
#include "gridopa/rng.hpp"

#include <vector>

namespace gridopa {

struct CascadeParams {
    double p0 = 0.0001;               // per-line daily trigger probability
    double p1 = 0.05;                 // failure probability of an overloaded line
    double overload_threshold = 0.9;  // M at which a line becomes a candidate
    double blackout_threshold = 1e-3; // shed fraction above which a day is a blackout
};

struct CascadeResult {
    std::vector<int> failed_lines;     // all lines out at the end, triggers included
    std::vector<int> overloaded_lines; // reached the overload threshold at any step
    int steps = 0;                     // redispatch iterations
    double load_shed = 0.0;            // L_S of the final dispatch
    double demand = 0.0;               // P_D
    bool is_blackout = false;
    bool shortfall_only = false;       // no line failed, capacity below demand
};

/// Each in-service line fails independently with probability p0; draws are
/// consumed in line-id order.
std::vector<int> trigger_outages(const GridNetwork& network, double p0, rng::RngStream& rng);
std::vector<int> trigger_outages(const std::vector<bool>& in_service, double p0,
                                 rng::RngStream& rng);

/// Strict: shed/demand must exceed the threshold.
bool classify_blackout(double load_shed, double demand, double threshold = 1e-3);

/// Removes the triggers, then redispatches and fails overloaded lines with
/// probability p1 until quiescence. Line statuses are restored before
/// returning; persistence of upgrades belongs to the caller.
CascadeResult run_cascade(DispatchEngine& engine, const GridNetwork& network,
                          const std::vector<double>& demand_mw,
                          const std::vector<double>& available_capacity_mw,
                          const std::vector<double>& flow_limits_mw,
                          const std::vector<bool>& in_service,
                          const std::vector<int>& triggers, rng::RngStream& rng,
                          const CascadeParams& params);

/// Convenience form using the network's static limits and statuses.
CascadeResult run_cascade(const GridNetwork& network, const std::vector<double>& demand_mw,
                          const std::vector<double>& available_capacity_mw,
                          const std::vector<int>& triggers, rng::RngStream& rng,
                          const CascadeParams& params = {});

} // namespace gridopa
