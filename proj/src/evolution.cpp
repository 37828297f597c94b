#include "gridopa/evolution.hpp"

#include "gridopa/calendar.hpp"
#include "gridopa/errors.hpp"

#include <numeric>
#include <set>

namespace gridopa {

SystemState SystemState::from_network(const GridNetwork& network) {
    SystemState state;
    state.line_limits.reserve(network.num_lines());
    for (const auto& line : network.lines) state.line_limits.push_back(line.flow_limit_mw);
    state.conventional_capacity.assign(network.num_generators(), 0.0);
    for (int g = 0; g < network.num_generators(); ++g) {
        if (network.generators[g].kind == GeneratorKind::Conventional)
            state.conventional_capacity[g] = network.generators[g].capacity_mw;
    }
    return state;
}

double advance_day(SystemState& state, const DemandProfile& profile, rng::RngStream& rng,
                   const EvolutionParams& params) {
    state.demand_scale *= params.daily_growth;
    const double base = profile.base_peaks[state.day % calendar::kDaysPerYear];
    const double gamma = 1.0 + params.demand_noise * (2.0 * rng.uniform() - 1.0);
    ++state.day;
    return base * state.demand_scale * gamma;
}

void upgrade_after_blackout(SystemState& state, const CascadeResult& result,
                            const EvolutionParams& params) {
    if (!result.is_blackout)
        throw ContractError("upgrade_after_blackout called on a non-blackout result");
    std::set<int> involved(result.failed_lines.begin(), result.failed_lines.end());
    involved.insert(result.overloaded_lines.begin(), result.overloaded_lines.end());
    for (int l : involved) state.line_limits[l] *= params.line_upgrade;
}

void record_margin(SystemState& state, double margin) { state.margin_history.push_back(margin); }

bool annual_capacity_check(SystemState& state, std::vector<ResPlant>& plants,
                           const EvolutionParams& params) {
    if (state.margin_history.empty()) return false;
    const double mean =
        std::accumulate(state.margin_history.begin(), state.margin_history.end(), 0.0) /
        state.margin_history.size();
    state.margin_history.clear();
    // tolerance keeps exact-threshold years firing despite summation error
    if (mean > params.critical_margin * (1.0 + 1e-12) + 1e-12) return false;
    for (double& cap : state.conventional_capacity) cap *= params.capacity_upgrade;
    for (auto& plant : plants) plant.scale_capacity(params.capacity_upgrade);
    return true;
}

} // namespace gridopa
