#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace gridopa::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// lo <= sum_k coeff_k * x_{idx_k} <= hi. Equality rows use lo == hi.
struct Constraint {
    std::vector<std::pair<int, double>> terms;
    double lo = -kInf;
    double hi = kInf;
};

/// min c.x subject to variable bounds and two-sided linear constraints.
struct Problem {
    std::vector<double> cost;
    std::vector<double> lower;
    std::vector<double> upper;
    /// Nonbasic start value hint; defaults to the lower bound. Starting shed
    /// variables at their upper bound makes the all-shed dispatch point
    /// feasible so phase 1 is skipped.
    std::vector<bool> start_at_upper;
    std::vector<Constraint> rows;

    int add_variable(double c, double lo, double hi, bool at_upper = false) {
        cost.push_back(c);
        lower.push_back(lo);
        upper.push_back(hi);
        start_at_upper.push_back(at_upper);
        return static_cast<int>(cost.size()) - 1;
    }

    Constraint& add_row(double lo, double hi) {
        rows.push_back(Constraint{{}, lo, hi});
        return rows.back();
    }

    int num_vars() const { return static_cast<int>(cost.size()); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
    Status status = Status::IterationLimit;
    std::vector<double> x;
    double objective = 0.0;
    int iterations = 0;
};

/// Bounded-variable primal simplex on a dense tableau. Deterministic:
/// identical problems produce identical pivot sequences and solutions.
Solution solve(const Problem& problem);

} // namespace gridopa::lp
