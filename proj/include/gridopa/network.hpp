#pragma once

#include <string>
#include <vector>

namespace gridopa {

enum class GeneratorKind { Conventional, Solar, Wind };

std::string to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& s);

struct Bus {
    int id = 0;
    std::string name;
    double demand_fraction = 0.0; // share of the system peak placed here
};

struct Line {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double susceptance = 1.0;   // per-unit
    double flow_limit_mw = 0.0; // only ever increased by upgrades
    bool in_service = true;
};

struct Generator {
    int id = 0;
    int bus = 0;
    GeneratorKind kind = GeneratorKind::Conventional;
    double capacity_mw = 0.0;
    double marginal_cost = 0.0; // dispatch-order weight; renewables < conventional
};

/// Immutable after load; simulation runs clone the mutable parts
/// (line limits, capacities) into their own state.
struct GridNetwork {
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Generator> generators;

    int num_buses() const { return static_cast<int>(buses.size()); }
    int num_lines() const { return static_cast<int>(lines.size()); }
    int num_generators() const { return static_cast<int>(generators.size()); }

    std::vector<double> demand_fractions() const;
    double total_conventional_capacity() const;

    /// Throws ValidationError naming the violated rule.
    void validate() const;
};

/// One seasonal daily-peak value per calendar day plus its annual mean.
struct DemandProfile {
    std::vector<double> base_peaks; // 365 entries, MW
    double annual_mean = 0.0;       // MW

    void validate() const;
};

GridNetwork load_network(const std::string& path);
void save_network(const GridNetwork& network, const std::string& path);
std::string serialize_network(const GridNetwork& network);
GridNetwork parse_network(const std::string& text);

DemandProfile load_demand_profile(const std::string& path);
void save_demand_profile(const DemandProfile& profile, const std::string& path);

/// Spatial demand split: entry b = fraction_b * system_peak.
std::vector<double> nodal_demand(const std::vector<double>& fractions, double system_peak_mw);
std::vector<double> nodal_demand(const GridNetwork& network, double system_peak_mw);

bool networks_equal(const GridNetwork& a, const GridNetwork& b);

} // namespace gridopa
