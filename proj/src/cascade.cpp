#include "gridopa/cascade.hpp"

#include "gridopa/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace gridopa {

std::vector<int> trigger_outages(const std::vector<bool>& in_service, double p0,
                                 rng::RngStream& rng) {
    std::vector<int> outages;
    for (std::size_t l = 0; l < in_service.size(); ++l) {
        if (!in_service[l]) continue;
        if (rng.uniform() < p0) outages.push_back(static_cast<int>(l));
    }
    return outages;
}

std::vector<int> trigger_outages(const GridNetwork& network, double p0, rng::RngStream& rng) {
    std::vector<bool> in_service(network.num_lines());
    for (int l = 0; l < network.num_lines(); ++l) in_service[l] = network.lines[l].in_service;
    return trigger_outages(in_service, p0, rng);
}

bool classify_blackout(double load_shed, double demand, double threshold) {
    if (demand <= 0.0) throw ContractError("blackout classification needs positive demand");
    if (load_shed < 0.0) throw ContractError("load shed cannot be negative");
    return load_shed / demand > threshold;
}

CascadeResult run_cascade(DispatchEngine& engine, const GridNetwork& network,
                          const std::vector<double>& demand_mw,
                          const std::vector<double>& available_capacity_mw,
                          const std::vector<double>& flow_limits_mw,
                          const std::vector<bool>& in_service,
                          const std::vector<int>& triggers, rng::RngStream& rng,
                          const CascadeParams& params) {
    std::vector<bool> mask = in_service;
    for (int l : triggers) {
        if (l < 0 || l >= network.num_lines() || !mask[l])
            throw ContractError("trigger must reference an in-service line");
        mask[l] = false;
    }

    CascadeResult result;
    result.demand = std::accumulate(demand_mw.begin(), demand_mw.end(), 0.0);
    std::set<int> failed(triggers.begin(), triggers.end());
    std::set<int> overloaded;

    while (true) {
        const DispatchSolution sol =
            engine.solve(demand_mw, available_capacity_mw, flow_limits_mw, mask);
        ++result.steps;
        result.load_shed = sol.total_shed;

        // Overload candidates in line-id order; one draw per candidate keeps
        // the stream aligned for any p1.
        bool any_failed = false;
        for (int l = 0; l < network.num_lines(); ++l) {
            if (!mask[l]) continue;
            if (sol.loading[l] >= params.overload_threshold) {
                overloaded.insert(l);
                if (rng.uniform() < params.p1) {
                    mask[l] = false;
                    failed.insert(l);
                    any_failed = true;
                }
            }
        }
        if (!any_failed) break;
    }

    result.failed_lines.assign(failed.begin(), failed.end());
    result.overloaded_lines.assign(overloaded.begin(), overloaded.end());
    result.is_blackout = result.demand > 0.0 &&
                         classify_blackout(result.load_shed, result.demand,
                                           params.blackout_threshold);
    const double total_available =
        std::accumulate(available_capacity_mw.begin(), available_capacity_mw.end(), 0.0);
    result.shortfall_only = result.failed_lines.empty() && result.load_shed > 0.0 &&
                            total_available < result.demand;
    return result;
}

CascadeResult run_cascade(const GridNetwork& network, const std::vector<double>& demand_mw,
                          const std::vector<double>& available_capacity_mw,
                          const std::vector<int>& triggers, rng::RngStream& rng,
                          const CascadeParams& params) {
    DispatchEngine engine(network);
    std::vector<double> limits(network.num_lines());
    std::vector<bool> in_service(network.num_lines());
    for (int l = 0; l < network.num_lines(); ++l) {
        limits[l] = network.lines[l].flow_limit_mw;
        in_service[l] = network.lines[l].in_service;
    }
    return run_cascade(engine, network, demand_mw, available_capacity_mw, limits, in_service,
                       triggers, rng, params);
}

} // namespace gridopa
