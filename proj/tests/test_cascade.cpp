#include "gridopa/cascade.hpp"

#include "gridopa/errors.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace gridopa;

namespace {

/// Triangle where losing the direct line overloads exactly the limit-bound
/// leg of the detour: gen at 0, load 1.5 at 2; line 0 = 0-1 (wide),
/// line 1 = 1-2 (tight), line 2 = 0-2 (direct).
GridNetwork detour_grid() {
    GridNetwork net;
    net.buses = {{0, "gen", 0.0}, {1, "relay", 0.0}, {2, "load", 1.0}};
    net.lines = {{0, 0, 1, 1.0, 2.0, true},
                 {1, 1, 2, 1.0, 0.6, true},
                 {2, 0, 2, 1.0, 1.2, true}};
    net.generators = {{0, 0, GeneratorKind::Conventional, 2.0, 1.0}};
    return net;
}

} // namespace

TEST_CASE("blackout classification is strict") {
    CHECK(classify_blackout(2.0, 1000.0));        // 2e-3
    CHECK_FALSE(classify_blackout(1.0, 1000.0));  // exactly 1e-3
    CHECK_FALSE(classify_blackout(0.0, 1000.0));
    CHECK_THROWS_AS(classify_blackout(1.0, 0.0), ContractError);
}

TEST_CASE("trigger probabilities at the extremes") {
    const auto net = test::triangle(10.0, 5.0, 5.0, 5.0);
    rng::RngStream rng(1);
    CHECK(trigger_outages(net, 0.0, rng).empty());
    const auto all = trigger_outages(net, 1.0, rng);
    CHECK(all == std::vector<int>{0, 1, 2});

    auto partial = net;
    partial.lines[1].in_service = false;
    const auto in_service_only = trigger_outages(partial, 1.0, rng);
    CHECK(in_service_only == std::vector<int>{0, 2});
}

TEST_CASE("trigger rate matches the binomial expectation") {
    // 89 lines at p0 = 1e-4: mean outages per day 89e-4.
    std::vector<bool> in_service(89, true);
    rng::RngStream rng(12345);
    const long days = 1000000;
    long total = 0;
    for (long d = 0; d < days; ++d)
        total += static_cast<long>(trigger_outages(in_service, 0.0001, rng).size());
    const double mean = static_cast<double>(total) / days;
    const double expectation = 89 * 0.0001;
    const double sigma = std::sqrt(89 * 0.0001 * (1.0 - 0.0001) / days);
    CHECK(std::abs(mean - expectation) <= 3.0 * sigma);
}

TEST_CASE("p1 = 0 stops after a single redispatch") {
    auto net = detour_grid();
    rng::RngStream rng(3);
    CascadeParams params;
    params.p1 = 0.0;
    const auto result = run_cascade(net, {0.0, 0.0, 1.5}, {2.0}, {2}, rng, params);
    CHECK(result.steps == 1);
    CHECK(result.failed_lines == std::vector<int>{2});
    CHECK(result.overloaded_lines == std::vector<int>{1}); // the candidate survives
    CHECK(result.load_shed == doctest::Approx(0.9));
    CHECK(result.is_blackout);
    CHECK_FALSE(result.shortfall_only);
}

TEST_CASE("losing the direct line cascades into the tight detour leg") {
    // After the trigger, the series path carries 0.6 (shed to the limit):
    // line 1 hits M = 1, line 0 sits at 0.3; with p1 = 1 only line 1 fails,
    // the load bus islands, and the cascade stops.
    auto net = detour_grid();
    rng::RngStream rng(3);
    CascadeParams params;
    params.p1 = 1.0;
    const auto result = run_cascade(net, {0.0, 0.0, 1.5}, {2.0}, {2}, rng, params);
    CHECK(result.failed_lines == std::vector<int>{1, 2});
    CHECK(result.steps == 2);
    CHECK(result.load_shed == doctest::Approx(1.5));
    CHECK(result.demand == doctest::Approx(1.5));
    CHECK(result.is_blackout);
    CHECK_FALSE(result.shortfall_only);
}

TEST_CASE("generation shortfall without any line event") {
    auto net = test::two_bus(0.5, 100.0);
    rng::RngStream rng(5);
    const auto result = run_cascade(net, {0.0, 1.0}, {0.5}, {}, rng, {});
    CHECK(result.steps == 1);
    CHECK(result.failed_lines.empty());
    CHECK(result.load_shed == doctest::Approx(0.5));
    CHECK(result.shortfall_only);
    CHECK(result.is_blackout);
}

TEST_CASE("cascade with p1 = 0 is a pure function of its triggers") {
    auto net = detour_grid();
    CascadeParams params;
    params.p1 = 0.0;
    for (int rep = 0; rep < 3; ++rep) {
        rng::RngStream a(7 + rep), b(1000 + rep);
        const auto r1 = run_cascade(net, {0.0, 0.0, 1.5}, {2.0}, {2}, a, params);
        const auto r2 = run_cascade(net, {0.0, 0.0, 1.5}, {2.0}, {2}, b, params);
        CHECK(r1.failed_lines == r2.failed_lines);
        CHECK(r1.load_shed == r2.load_shed);
        CHECK(r1.steps == r2.steps);
    }
}

TEST_CASE("failure sets grow monotonically and cascades terminate") {
    // All trigger subsets of a 4-line grid under p1 = 1.
    GridNetwork net;
    net.buses = {{0, "g", 0.0}, {1, "a", 0.4}, {2, "b", 0.3}, {3, "c", 0.3}};
    net.lines = {{0, 0, 1, 1.0, 1.0, true},
                 {1, 1, 2, 1.0, 0.5, true},
                 {2, 2, 3, 1.0, 0.4, true},
                 {3, 0, 3, 1.0, 0.8, true}};
    net.generators = {{0, 0, GeneratorKind::Conventional, 2.0, 1.0}};
    const std::vector<double> demand = {0.0, 0.8, 0.6, 0.6};
    CascadeParams params;
    params.p1 = 1.0;

    for (int subset = 0; subset < 16; ++subset) {
        std::vector<int> triggers;
        for (int l = 0; l < 4; ++l)
            if (subset & (1 << l)) triggers.push_back(l);
        rng::RngStream rng(1);
        const auto result = run_cascade(net, demand, {2.0}, triggers, rng, params);
        CHECK(result.steps <= 5); // at most one sweep per line plus quiescence
        for (int t : triggers)
            CHECK(std::find(result.failed_lines.begin(), result.failed_lines.end(), t) !=
                  result.failed_lines.end());
        // network untouched by the cascade
        for (const auto& line : net.lines) CHECK(line.in_service);
    }
}

TEST_CASE("triggers must reference in-service lines") {
    auto net = detour_grid();
    net.lines[1].in_service = false;
    rng::RngStream rng(1);
    CHECK_THROWS_AS(run_cascade(net, {0.0, 0.0, 1.5}, {2.0}, {1}, rng, {}), ContractError);
}
