#pragma once

#include "gridopa/cascade.hpp"
#include "gridopa/network.hpp"
#include "gridopa/res_plant.hpp"
#include "gridopa/rng.hpp"

#include <vector>

namespace gridopa {

struct EvolutionParams {
    double daily_growth = 1.00005;   // 0.005% per day, about 2% a year
    double demand_noise = 0.05;      // gamma uniform in [1-delta, 1+delta]
    double line_upgrade = 1.04;      // mu
    double capacity_upgrade = 1.04;  // annual generator upgrade step
    double critical_margin = 0.4;    // margin threshold that triggers upgrades
};

/// Slow-timescale state owned by one realization.
struct SystemState {
    long day = 0;
    double demand_scale = 1.0;                  // cumulative growth factor
    std::vector<double> line_limits;            // MW, non-decreasing
    std::vector<double> conventional_capacity;  // MW per generator (zero for RES slots)
    std::vector<double> margin_history;         // daily margins of the running year

    static SystemState from_network(const GridNetwork& network);
};

/// Applies one day of demand growth and noise; returns the system peak for
/// the day. Consumes one uniform draw even when noise is disabled.
double advance_day(SystemState& state, const DemandProfile& profile, rng::RngStream& rng,
                   const EvolutionParams& params);

/// Raises the limits of every line involved in the blackout by mu.
/// Calling this on a non-blackout result is a contract violation.
void upgrade_after_blackout(SystemState& state, const CascadeResult& result,
                            const EvolutionParams& params);

/// Year-end check: if the annual mean margin reached the critical value,
/// every generator grows by the upgrade step (renewables through their
/// nominal power). Clears the margin history for the next year and
/// returns whether the upgrade fired.
bool annual_capacity_check(SystemState& state, std::vector<ResPlant>& plants,
                           const EvolutionParams& params);

void record_margin(SystemState& state, double margin);

} // namespace gridopa
