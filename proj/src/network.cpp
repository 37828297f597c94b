#include "gridopa/network.hpp"

#include "gridopa/calendar.hpp"
#include "gridopa/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace gridopa {

using nlohmann::json;

namespace {

constexpr const char* kNetworkFormat = "gridopa-net/1";

json require_key(const json& obj, const char* key, const char* where) {
    if (!obj.contains(key)) {
        throw FormatError(std::string("missing key '") + key + "' in " + where);
    }
    return obj.at(key);
}

} // namespace

std::string to_string(GeneratorKind kind) {
    switch (kind) {
        case GeneratorKind::Conventional: return "conventional";
        case GeneratorKind::Solar: return "solar";
        case GeneratorKind::Wind: return "wind";
    }
    return "conventional";
}

GeneratorKind generator_kind_from_string(const std::string& s) {
    if (s == "conventional") return GeneratorKind::Conventional;
    if (s == "solar") return GeneratorKind::Solar;
    if (s == "wind") return GeneratorKind::Wind;
    throw FormatError("unknown generator kind '" + s + "'");
}

std::vector<double> GridNetwork::demand_fractions() const {
    std::vector<double> f(buses.size());
    for (std::size_t i = 0; i < buses.size(); ++i) f[i] = buses[i].demand_fraction;
    return f;
}

double GridNetwork::total_conventional_capacity() const {
    double total = 0.0;
    for (const auto& g : generators)
        if (g.kind == GeneratorKind::Conventional) total += g.capacity_mw;
    return total;
}

void GridNetwork::validate() const {
    if (buses.empty()) throw ValidationError("network has no buses");

    std::unordered_set<int> ids;
    for (const auto& b : buses) {
        if (b.id < 0 || b.id >= num_buses())
            throw ValidationError("bus ids must be dense 0..B-1, got " + std::to_string(b.id));
        if (!ids.insert(b.id).second)
            throw ValidationError("duplicate bus id " + std::to_string(b.id));
        if (b.demand_fraction < 0.0 || b.demand_fraction > 1.0)
            throw ValidationError("demand fraction out of [0,1] at bus " + std::to_string(b.id));
    }

    double fraction_sum = 0.0;
    for (const auto& b : buses) fraction_sum += b.demand_fraction;
    if (std::abs(fraction_sum - 1.0) > 1e-9)
        throw ValidationError("demand fractions sum != 1 (got " + std::to_string(fraction_sum) + ")");

    std::unordered_set<int> line_ids;
    for (const auto& l : lines) {
        if (!line_ids.insert(l.id).second)
            throw ValidationError("duplicate line id " + std::to_string(l.id));
        if (l.from_bus == l.to_bus)
            throw ValidationError("line " + std::to_string(l.id) + " connects a bus to itself");
        if (l.from_bus < 0 || l.from_bus >= num_buses() || l.to_bus < 0 || l.to_bus >= num_buses())
            throw ValidationError("line " + std::to_string(l.id) + " references a missing bus");
        if (l.susceptance <= 0.0)
            throw ValidationError("line " + std::to_string(l.id) + " has non-positive susceptance");
        if (l.flow_limit_mw <= 0.0)
            throw ValidationError("line " + std::to_string(l.id) + " has non-positive flow limit");
    }

    std::unordered_set<int> gen_ids;
    double max_res_cost = -1.0;
    double min_conventional_cost = std::numeric_limits<double>::infinity();
    for (const auto& g : generators) {
        if (!gen_ids.insert(g.id).second)
            throw ValidationError("duplicate generator id " + std::to_string(g.id));
        if (g.bus < 0 || g.bus >= num_buses())
            throw ValidationError("generator " + std::to_string(g.id) + " references a missing bus");
        if (g.capacity_mw < 0.0)
            throw ValidationError("generator " + std::to_string(g.id) + " has negative capacity");
        if (g.marginal_cost < 0.0)
            throw ValidationError("generator " + std::to_string(g.id) + " has negative marginal cost");
        if (g.kind == GeneratorKind::Conventional)
            min_conventional_cost = std::min(min_conventional_cost, g.marginal_cost);
        else
            max_res_cost = std::max(max_res_cost, g.marginal_cost);
    }
    if (max_res_cost >= 0.0 && max_res_cost >= min_conventional_cost)
        throw ValidationError("renewable marginal cost must be below every conventional cost");
}

void DemandProfile::validate() const {
    if (base_peaks.size() != calendar::kDaysPerYear)
        throw ValidationError("demand profile must have 365 daily peaks, got " +
                              std::to_string(base_peaks.size()));
    double sum = 0.0;
    for (double p : base_peaks) {
        if (p <= 0.0) throw ValidationError("demand profile peaks must be positive");
        sum += p;
    }
    if (std::abs(annual_mean - sum / base_peaks.size()) > 1e-9)
        throw ValidationError("annual mean does not match the mean of the daily peaks");
}

std::string serialize_network(const GridNetwork& network) {
    json doc;
    doc["format"] = kNetworkFormat;
    doc["buses"] = json::array();
    for (const auto& b : network.buses) {
        doc["buses"].push_back(
            {{"id", b.id}, {"name", b.name}, {"demand_fraction", b.demand_fraction}});
    }
    doc["lines"] = json::array();
    for (const auto& l : network.lines) {
        doc["lines"].push_back({{"id", l.id},
                                {"from", l.from_bus},
                                {"to", l.to_bus},
                                {"susceptance", l.susceptance},
                                {"flow_limit_mw", l.flow_limit_mw},
                                {"in_service", l.in_service}});
    }
    doc["generators"] = json::array();
    for (const auto& g : network.generators) {
        doc["generators"].push_back({{"id", g.id},
                                     {"bus", g.bus},
                                     {"kind", to_string(g.kind)},
                                     {"capacity_mw", g.capacity_mw},
                                     {"marginal_cost", g.marginal_cost}});
    }
    return doc.dump(2) + "\n";
}

GridNetwork parse_network(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("network file parse failure: ") + e.what());
    }

    if (!doc.contains("format") || doc.at("format") != kNetworkFormat)
        throw FormatError(std::string("expected format field '") + kNetworkFormat + "'");

    GridNetwork network;
    try {
        for (const auto& b : require_key(doc, "buses", "network document")) {
            Bus bus;
            bus.id = require_key(b, "id", "bus").get<int>();
            bus.name = b.value("name", std::string{});
            bus.demand_fraction = require_key(b, "demand_fraction", "bus").get<double>();
            network.buses.push_back(std::move(bus));
        }
        for (const auto& l : require_key(doc, "lines", "network document")) {
            Line line;
            line.id = require_key(l, "id", "line").get<int>();
            line.from_bus = require_key(l, "from", "line").get<int>();
            line.to_bus = require_key(l, "to", "line").get<int>();
            line.susceptance = require_key(l, "susceptance", "line").get<double>();
            line.flow_limit_mw = require_key(l, "flow_limit_mw", "line").get<double>();
            line.in_service = l.value("in_service", true);
            network.lines.push_back(std::move(line));
        }
        for (const auto& g : require_key(doc, "generators", "network document")) {
            Generator gen;
            gen.id = require_key(g, "id", "generator").get<int>();
            gen.bus = require_key(g, "bus", "generator").get<int>();
            gen.kind = generator_kind_from_string(require_key(g, "kind", "generator").get<std::string>());
            gen.capacity_mw = require_key(g, "capacity_mw", "generator").get<double>();
            gen.marginal_cost = require_key(g, "marginal_cost", "generator").get<double>();
            network.generators.push_back(std::move(gen));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("network file field error: ") + e.what());
    }

    network.validate();
    return network;
}

GridNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open network file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_network(buffer.str());
}

void save_network(const GridNetwork& network, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write network file '" + path + "'");
    out << serialize_network(network);
}

DemandProfile load_demand_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open demand profile '" + path + "'");

    DemandProfile profile;
    std::string linebuf;
    int lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        if (linebuf.empty() || linebuf[0] == '#') continue;
        std::istringstream row(linebuf);
        std::string day_field, peak_field;
        if (!std::getline(row, day_field, ',') || !std::getline(row, peak_field)) {
            throw FormatError("demand profile line " + std::to_string(lineno) +
                              ": expected 'day_index, peak_mw'");
        }
        if (day_field == "day_index" || day_field == "day") continue; // header
        try {
            const int day = std::stoi(day_field);
            const double peak = std::stod(peak_field);
            if (day != static_cast<int>(profile.base_peaks.size()))
                throw FormatError("demand profile line " + std::to_string(lineno) +
                                  ": days must be consecutive from 0");
            profile.base_peaks.push_back(peak);
        } catch (const std::invalid_argument&) {
            throw FormatError("demand profile line " + std::to_string(lineno) + ": not numeric");
        }
    }
    profile.annual_mean =
        std::accumulate(profile.base_peaks.begin(), profile.base_peaks.end(), 0.0) /
        std::max<std::size_t>(1, profile.base_peaks.size());
    profile.validate();
    return profile;
}

void save_demand_profile(const DemandProfile& profile, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write demand profile '" + path + "'");
    out << "day_index,peak_mw\n";
    out.precision(17);
    for (std::size_t d = 0; d < profile.base_peaks.size(); ++d)
        out << d << "," << profile.base_peaks[d] << "\n";
}

std::vector<double> nodal_demand(const std::vector<double>& fractions, double system_peak_mw) {
    if (system_peak_mw <= 0.0) throw ContractError("system peak must be positive");
    std::vector<double> demand(fractions.size());
    for (std::size_t i = 0; i < fractions.size(); ++i) demand[i] = fractions[i] * system_peak_mw;
    return demand;
}

std::vector<double> nodal_demand(const GridNetwork& network, double system_peak_mw) {
    return nodal_demand(network.demand_fractions(), system_peak_mw);
}

bool networks_equal(const GridNetwork& a, const GridNetwork& b) {
    if (a.buses.size() != b.buses.size() || a.lines.size() != b.lines.size() ||
        a.generators.size() != b.generators.size())
        return false;
    for (std::size_t i = 0; i < a.buses.size(); ++i) {
        const auto& x = a.buses[i];
        const auto& y = b.buses[i];
        if (x.id != y.id || x.name != y.name || x.demand_fraction != y.demand_fraction)
            return false;
    }
    for (std::size_t i = 0; i < a.lines.size(); ++i) {
        const auto& x = a.lines[i];
        const auto& y = b.lines[i];
        if (x.id != y.id || x.from_bus != y.from_bus || x.to_bus != y.to_bus ||
            x.susceptance != y.susceptance || x.flow_limit_mw != y.flow_limit_mw ||
            x.in_service != y.in_service)
            return false;
    }
    for (std::size_t i = 0; i < a.generators.size(); ++i) {
        const auto& x = a.generators[i];
        const auto& y = b.generators[i];
        if (x.id != y.id || x.bus != y.bus || x.kind != y.kind ||
            x.capacity_mw != y.capacity_mw || x.marginal_cost != y.marginal_cost)
            return false;
    }
    return true;
}

} // namespace gridopa
