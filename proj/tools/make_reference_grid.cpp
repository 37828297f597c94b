// Generates the bundled synthetic reference dataset: a four-island
// 62-bus/89-line network, a seasonal daily-peak demand profile, and the
// default plant profiles in file form. Deterministic; rerunning reproduces
// the shipped files bit for bit.

#include "gridopa/calendar.hpp"
#include "gridopa/dispatch.hpp"
#include "gridopa/network.hpp"
#include "gridopa/res_plant.hpp"
#include "gridopa/rng.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

using namespace gridopa;

namespace {

constexpr double kMeanPeakMw = 1000.0;
constexpr double kSeasonalAmplitude = 0.25;
constexpr int kPeakDay = 196; // mid July
constexpr double kHeadroom = 1.3;
constexpr double kLimitFloorMw = 5.0;

struct Island {
    std::string name;
    int first_bus;
    int n_buses;
    int n_lines;
    double demand_share;
};

const std::vector<Island> kIslands = {
    {"mall", 0, 35, 50, 0.70},
    {"meno", 35, 10, 13, 0.10},
    {"eivi", 45, 12, 16, 0.17},
    {"form", 57, 5, 6, 0.03},
};

// (bus, capacity) of the conventional plants
const std::vector<std::pair<int, double>> kConventional = {
    {2, 380.0}, {10, 300.0}, {18, 200.0}, {27, 100.0}, // mall
    {37, 120.0},                                       // meno
    {47, 150.0}, {52, 90.0},                           // eivi
    {58, 60.0},                                        // form
};

const std::vector<std::pair<int, int>> kInterIsland = {
    {12, 38},  // mall - meno
    {20, 46},  // mall - eivi
    {33, 50},  // mall - eivi, second circuit
    {56, 59},  // eivi - form
};

} // namespace

int main(int argc, char** argv) {
    const std::string out_dir = argc > 1 ? argv[1] : "data";

    GridNetwork net;
    rng::RngStream stream(62891);

    // Buses with island-share demand fractions; a few heavy "city" buses
    // per island, the rest drawn from a fixed stream.
    for (const auto& island : kIslands) {
        std::vector<double> weight(island.n_buses);
        for (int k = 0; k < island.n_buses; ++k) weight[k] = 1.0 + 0.9 * stream.uniform();
        weight[0] *= 3.0;
        if (island.n_buses > 6) weight[island.n_buses / 2] *= 2.0;
        double total = 0.0;
        for (double w : weight) total += w;
        for (int k = 0; k < island.n_buses; ++k) {
            Bus bus;
            bus.id = island.first_bus + k;
            bus.name = island.name + "-" + std::to_string(k);
            bus.demand_fraction = island.demand_share * weight[k] / total;
            net.buses.push_back(bus);
        }
    }
    // exact unit sum
    double partial = 0.0;
    for (std::size_t b = 0; b + 1 < net.buses.size(); ++b) partial += net.buses[b].demand_fraction;
    net.buses.back().demand_fraction = 1.0 - partial;

    // Ring plus deterministic chords inside each island.
    int line_id = 0;
    std::set<std::pair<int, int>> seen;
    auto add_line = [&](int from, int to) {
        const auto key = std::minmax(from, to);
        if (from == to || !seen.insert(key).second) return false;
        Line line;
        line.id = line_id++;
        line.from_bus = from;
        line.to_bus = to;
        line.susceptance = 1.0;
        line.flow_limit_mw = 1.0; // placeholder until the bootstrap dispatch
        net.lines.push_back(line);
        return true;
    };
    for (const auto& island : kIslands) {
        const int base = island.first_bus;
        const int n = island.n_buses;
        for (int k = 0; k < n; ++k) add_line(base + k, base + (k + 1) % n);
        int chords = island.n_lines - n;
        int stride = 2;
        int k = 0;
        while (chords > 0) {
            if (add_line(base + k, base + (k + stride) % n)) --chords;
            k += 3;
            if (k >= n) {
                k = (k % n) + 1;
                ++stride;
                if (stride >= n) stride = 2;
            }
        }
    }
    for (const auto& [from, to] : kInterIsland) add_line(from, to);

    for (std::size_t g = 0; g < kConventional.size(); ++g) {
        Generator gen;
        gen.id = static_cast<int>(g);
        gen.bus = kConventional[g].first;
        gen.kind = GeneratorKind::Conventional;
        gen.capacity_mw = kConventional[g].second;
        gen.marginal_cost = 1.0;
        net.generators.push_back(gen);
    }

    // Bootstrap the flow limits: dispatch the annual-mean peak with open
    // limits, then give every line a fixed headroom over that base flow.
    for (auto& line : net.lines) line.flow_limit_mw = 1e9;
    net.validate();
    std::vector<double> capacity;
    for (const auto& g : net.generators) capacity.push_back(g.capacity_mw);
    const auto base_case = solve_dispatch(net, nodal_demand(net, kMeanPeakMw), capacity);
    if (base_case.total_shed > 1e-9) {
        std::fprintf(stderr, "bootstrap dispatch sheds load; dataset is inconsistent\n");
        return 1;
    }
    for (auto& line : net.lines)
        line.flow_limit_mw =
            std::max(kHeadroom * std::abs(base_case.flows[line.id]), kLimitFloorMw);
    net.validate();

    save_network(net, out_dir + "/balearic_synthetic.json");

    DemandProfile profile;
    for (int d = 0; d < calendar::kDaysPerYear; ++d) {
        profile.base_peaks.push_back(
            kMeanPeakMw *
            (1.0 + kSeasonalAmplitude *
                       std::cos(2.0 * M_PI * (d - kPeakDay) / calendar::kDaysPerYear)));
    }
    double mean = 0.0;
    for (double p : profile.base_peaks) mean += p;
    profile.annual_mean = mean / calendar::kDaysPerYear;
    save_demand_profile(profile, out_dir + "/balearic_demand.csv");

    auto write_profile = [&](const MonthlyProfile& p, const std::string& name) {
        std::ofstream out(out_dir + "/" + name);
        out << "month,mean_normalized,sigma_normalized\n";
        out.precision(17);
        for (int m = 0; m < 12; ++m)
            out << (m + 1) << "," << p.mean[m] << "," << p.sigma[m] << "\n";
    };
    write_profile(default_solar_profile(), "solar_profile.csv");
    write_profile(default_wind_profile(), "wind_profile.csv");

    double max_flow = 0.0;
    for (int l = 0; l < net.num_lines(); ++l)
        max_flow = std::max(max_flow, std::abs(base_case.flows[l]));
    std::printf("wrote %s: %d buses, %d lines, %zu generators, %.0f MW capacity\n",
                (out_dir + "/balearic_synthetic.json").c_str(), net.num_buses(), net.num_lines(),
                net.generators.size(), net.total_conventional_capacity());
    std::printf("base case: peak %.0f MW, max |flow| %.1f MW\n", kMeanPeakMw, max_flow);
    return 0;
}
