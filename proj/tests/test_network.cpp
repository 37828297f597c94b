#include "gridopa/network.hpp"

#include "gridopa/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gridopa;

namespace {

const char* kTwoBusDoc = R"({
  "format": "gridopa-net/1",
  "buses": [
    {"id": 0, "name": "plant", "demand_fraction": 0.0},
    {"id": 1, "name": "town", "demand_fraction": 1.0}
  ],
  "lines": [
    {"id": 0, "from": 0, "to": 1, "susceptance": 1.0, "flow_limit_mw": 120.0}
  ],
  "generators": [
    {"id": 0, "bus": 0, "kind": "conventional", "capacity_mw": 150.0, "marginal_cost": 1.0}
  ]
})";

} // namespace

TEST_CASE("parse a minimal two-bus file") {
    const auto net = parse_network(kTwoBusDoc);
    CHECK(net.num_buses() == 2);
    CHECK(net.num_lines() == 1);
    CHECK(net.lines[0].in_service);
    CHECK(net.generators[0].capacity_mw == doctest::Approx(150.0));
}

TEST_CASE("demand fractions must sum to one") {
    std::string doc = kTwoBusDoc;
    const auto pos = doc.find("\"demand_fraction\": 1.0");
    doc.replace(pos, std::string("\"demand_fraction\": 1.0").size(),
                "\"demand_fraction\": 0.9");
    CHECK_THROWS_WITH_AS(parse_network(doc),
                         doctest::Contains("demand fractions sum != 1"), ValidationError);
}

TEST_CASE("parse errors carry position context") {
    CHECK_THROWS_AS(parse_network("{ not json"), FormatError);
    CHECK_THROWS_AS(parse_network(R"({"format": "something-else"})"), FormatError);
}

TEST_CASE("serialization round-trips field for field") {
    auto net = test::triangle(123.456789012345, 50.0, 60.0, 70.125);
    net.buses[1].name = "midpoint";
    net.lines[2].in_service = false;
    net.lines[2].flow_limit_mw = 1.0; // keep the out-of-service line valid
    net.generators.push_back({1, 1, GeneratorKind::Solar, 12.5, 0.0});
    const auto text = serialize_network(net);
    const auto back = parse_network(text);
    CHECK(networks_equal(net, back));
}

TEST_CASE("nodal demand splits the peak") {
    CHECK(nodal_demand({0.5, 0.5}, 100.0) == std::vector<double>{50.0, 50.0});
    CHECK(nodal_demand({1.0, 0.0}, 250.0) == std::vector<double>{250.0, 0.0});
    CHECK_THROWS_AS(nodal_demand({1.0}, 0.0), ContractError);
}

TEST_CASE("nodal demand sums to the peak for random simplexes") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::uniform_int_distribution<int> size_dist(1, 40);
        const int n = size_dist(rng);
        std::vector<double> fractions(n);
        double total = 0.0;
        for (double& f : fractions) total += (f = unit(rng) + 1e-6);
        for (double& f : fractions) f /= total;
        const double peak = 1.0 + unit(rng) * 2000.0;
        const auto demand = nodal_demand(fractions, peak);
        double sum = 0.0;
        for (double d : demand) sum += d;
        CHECK(sum == doctest::Approx(peak).epsilon(1e-12));
    }
}

TEST_CASE("invariants catch malformed networks") {
    auto self_loop = test::two_bus(10.0, 10.0);
    self_loop.lines[0].to_bus = 0;
    CHECK_THROWS_AS(self_loop.validate(), ValidationError);

    auto bad_kind_cost = test::two_bus(10.0, 10.0);
    bad_kind_cost.generators.push_back({1, 1, GeneratorKind::Solar, 5.0, 2.0});
    CHECK_THROWS_AS(bad_kind_cost.validate(), ValidationError);

    auto sparse_ids = test::two_bus(10.0, 10.0);
    sparse_ids.buses[1].id = 5;
    CHECK_THROWS_AS(sparse_ids.validate(), ValidationError);
}
