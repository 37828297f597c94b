#include "gridopa/metrics.hpp"

#include "gridopa/calendar.hpp"
#include "gridopa/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace gridopa;

TEST_CASE("performance is the mean daily coverage ratio") {
    CHECK(performance({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == doctest::Approx(1.0));
    CHECK(performance({0.0, 0.0}, {5.0, 9.0}) == doctest::Approx(0.0));
    CHECK(performance({2.0, 4.0}, {10.0, 10.0}) == doctest::Approx(0.3));
    CHECK_THROWS_AS(performance({1.0}, {1.0, 2.0}), ContractError);
}

TEST_CASE("grid stress averages the loading field") {
    CHECK(grid_stress({{0.5, 0.5}, {0.5, 0.5}}) == doctest::Approx(0.5));
    CHECK(grid_stress({{0.4, 0.8}}) == doctest::Approx(0.6));
    CHECK(grid_stress({{0.9, 0.3, 0.6}}) == doctest::Approx(0.6));
}

TEST_CASE("risk is the expected annual blackout cost") {
    CHECK(risk({}, 1000) == doctest::Approx(0.0));

    std::vector<BlackoutRecord> records(2);
    records[0].size = 0.01;
    records[1].size = 0.03;
    CHECK(risk(records, 730) == doctest::Approx(0.02));

    const double raw = risk(records, 730);
    CHECK(normalize_risk(raw, raw) == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalize_risk(raw, 0.0), ContractError);

    // alpha reweights large events
    CHECK(risk(records, 730, 2.0) ==
          doctest::Approx((0.01 * 0.01 + 0.03 * 0.03) * 365.0 / 730.0));
}

TEST_CASE("risk is additive over disjoint segments") {
    std::vector<BlackoutRecord> first(3), second(2);
    for (auto& r : first) r.size = 0.02;
    for (auto& r : second) r.size = 0.05;
    const double combined_days = 4000;
    std::vector<BlackoutRecord> all;
    all.insert(all.end(), first.begin(), first.end());
    all.insert(all.end(), second.begin(), second.end());
    const double duration_weighted =
        (risk(first, 1500) * 1500 + risk(second, 2500) * 2500) / combined_days;
    CHECK(risk(all, combined_days) == doctest::Approx(duration_weighted));
}

TEST_CASE("coverage histograms") {
    SUBCASE("constant ratio lands in a single bin") {
        const std::vector<double> ratios(365, 0.305);
        auto months = seasonal_coverage(ratios);
        for (const auto& h : months) {
            double total = 0.0;
            for (int b = 0; b < CoverageHistogram::kBins; ++b) {
                total += h.mass[b];
                if (h.mass[b] > 0.0) CHECK(b == 30);
            }
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("uniform grid of ratios is flat") {
        std::vector<double> ratios;
        for (int i = 0; i < 150; ++i) ratios.push_back((i + 0.5) * 0.01);
        CoverageHistogram h;
        for (double r : ratios) h.add(r);
        h.normalize();
        for (int b = 0; b < CoverageHistogram::kBins; ++b)
            CHECK(h.mass[b] == doctest::Approx(1.0 / 150.0));
    }
    SUBCASE("summer-heavy profile has a higher summer mean") {
        std::vector<double> ratios(365);
        for (int d = 0; d < 365; ++d) {
            const int m = calendar::month_of_day(d);
            ratios[d] = calendar::is_winter_month(m) ? 0.15 : 0.34;
        }
        const auto months = seasonal_coverage(ratios);
        CHECK(months[6].mean() > months[0].mean()); // July above January
    }
    SUBCASE("ratios beyond the range clamp into the last bin") {
        CoverageHistogram h;
        h.add(2.7);
        CHECK(h.mass[CoverageHistogram::kBins - 1] == 1.0);
    }
}

TEST_CASE("accumulator matches the standalone formulas") {
    RunAccumulator acc;
    std::vector<double> ratios, p_s, p_d;
    std::vector<std::vector<double>> loadings;
    for (long day = 0; day < 730; ++day) {
        const double ratio = 0.2 + 0.1 * ((day * 37) % 10) / 10.0;
        const std::vector<double> loading = {0.3, 0.5, 0.4 + 0.2 * ((day * 13) % 5) / 5.0};
        double mean = 0.0;
        for (double m : loading) mean += m;
        acc.record_day(day, ratio, mean / loading.size());
        p_s.push_back(ratio * 100.0);
        p_d.push_back(100.0);
        loadings.push_back(loading);
    }
    BlackoutRecord rec;
    rec.day = 100;
    rec.size = 0.04;
    rec.cause = BlackoutCause::Shortfall;
    acc.record_blackout(rec);

    const auto stats = acc.finalize();
    CHECK(stats.performance == doctest::Approx(performance(p_s, p_d)));
    CHECK(stats.stress == doctest::Approx(grid_stress(loadings)));
    CHECK(stats.risk_raw == doctest::Approx(risk({rec}, 730)));
    CHECK(stats.blackouts_shortfall == 1);
    CHECK(stats.blackouts_cascade == 0);
    CHECK(stats.blackout_frequency == doctest::Approx(0.5));
}
