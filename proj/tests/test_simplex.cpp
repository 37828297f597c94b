#include "gridopa/simplex.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>

using namespace gridopa;

TEST_CASE("maximize within a single constraint") {
    // min -x1 - x2 s.t. x1 + x2 <= 1, x in [0,1]^2
    lp::Problem p;
    p.add_variable(-1.0, 0.0, 1.0);
    p.add_variable(-1.0, 0.0, 1.0);
    auto& row = p.add_row(-lp::kInf, 1.0);
    row.terms = {{0, 1.0}, {1, 1.0}};
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(-1.0));
    CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("bound flip when the constraint never binds") {
    lp::Problem p;
    p.add_variable(-1.0, 0.0, 5.0);
    auto& row = p.add_row(-lp::kInf, 10.0);
    row.terms = {{0, 1.0}};
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.x[0] == doctest::Approx(5.0));
}

TEST_CASE("equality row requires phase 1 from a cold start") {
    // min x1 + 2 x2 s.t. x1 + x2 = 2
    lp::Problem p;
    p.add_variable(1.0, 0.0, 3.0);
    p.add_variable(2.0, 0.0, 3.0);
    auto& row = p.add_row(2.0, 2.0);
    row.terms = {{0, 1.0}, {1, 1.0}};
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.x[0] == doctest::Approx(2.0));
    CHECK(sol.x[1] == doctest::Approx(0.0));
    CHECK(sol.objective == doctest::Approx(2.0));
}

TEST_CASE("upper-bound start makes the shed pattern feasible without phase 1") {
    // min g + 100 s s.t. g + s = 2; s starts at its upper bound
    lp::Problem p;
    p.add_variable(1.0, 0.0, 5.0);
    p.add_variable(100.0, 0.0, 2.0, /*at_upper=*/true);
    auto& row = p.add_row(2.0, 2.0);
    row.terms = {{0, 1.0}, {1, 1.0}};
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.x[0] == doctest::Approx(2.0));
    CHECK(sol.x[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasible bounds are reported") {
    lp::Problem p;
    p.add_variable(1.0, 0.0, 1.0);
    auto& row = p.add_row(2.0, lp::kInf);
    row.terms = {{0, 1.0}};
    const auto sol = lp::solve(p);
    CHECK(sol.status == lp::Status::Infeasible);
}

TEST_CASE("two-sided row binds on the cheaper side") {
    // min x2 - x1 s.t. -1 <= x1 - x2 <= 1, x in [0, 4]
    lp::Problem p;
    p.add_variable(-1.0, 0.0, 4.0);
    p.add_variable(1.0, 0.0, 4.0);
    auto& row = p.add_row(-1.0, 1.0);
    row.terms = {{0, 1.0}, {1, -1.0}};
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.x[0] == doctest::Approx(1.0));
    CHECK(sol.x[1] == doctest::Approx(0.0));
}

TEST_CASE("degenerate ties still find the optimal value") {
    // Two identical generators; any split is optimal, value pinned.
    lp::Problem p;
    p.add_variable(1.0, 0.0, 10.0);
    p.add_variable(1.0, 0.0, 10.0);
    auto& row = p.add_row(10.0, 10.0);
    row.terms = {{0, 1.0}, {1, 1.0}};
    const auto sol = lp::solve(p);
    REQUIRE(sol.status == lp::Status::Optimal);
    CHECK(sol.objective == doctest::Approx(10.0));
}

TEST_CASE("random one-row problems match a dense scan") {
    std::uint64_t state = 42;
    auto next = [&]() {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        return double((state >> 33) % 1000) / 1000.0;
    };
    for (int trial = 0; trial < 200; ++trial) {
        lp::Problem p;
        const double c0 = next() * 4.0 - 2.0;
        const double c1 = next() * 4.0 - 2.0;
        const double u0 = 0.5 + next();
        const double u1 = 0.5 + next();
        p.add_variable(c0, 0.0, u0);
        p.add_variable(c1, 0.0, u1);
        const double a0 = next() * 2.0 - 1.0;
        const double a1 = next() * 2.0 - 1.0;
        const double hi = next() * 2.0;
        auto& row = p.add_row(-lp::kInf, hi);
        row.terms = {{0, a0}, {1, a1}};

        const auto sol = lp::solve(p);
        REQUIRE(sol.status == lp::Status::Optimal);

        double best = 0.0;
        bool found = false;
        const int grid = 160;
        for (int i = 0; i <= grid; ++i) {
            for (int j = 0; j <= grid; ++j) {
                const double x0 = u0 * i / grid;
                const double x1 = u1 * j / grid;
                if (a0 * x0 + a1 * x1 > hi + 1e-12) continue;
                const double obj = c0 * x0 + c1 * x1;
                if (!found || obj < best) best = obj, found = true;
            }
        }
        REQUIRE(found);
        CHECK(sol.objective <= best + 1e-9);
        CHECK(sol.objective >= best - 0.2); // scan resolution
    }
}
