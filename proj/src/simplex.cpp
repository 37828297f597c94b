#include "gridopa/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace gridopa::lp {
namespace {

constexpr double kFeasTol = 1e-8;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-10;
constexpr int kRefreshEvery = 256;
constexpr int kStallLimit = 64;

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, Free };

struct Tableau {
    int n = 0; // structural
    int m = 0; // rows (== slacks)
    Eigen::MatrixXd T;            // m x (n+m), equals B^{-1} [A | -I]
    Eigen::VectorXd xb;           // basic values, per row
    std::vector<int> basis;       // column basic in each row
    std::vector<VarState> state;  // per column
    std::vector<double> val;      // nonbasic value per column
    std::vector<double> lo, hi, cost;

    double value(int col) const {
        return state[col] == VarState::Basic ? 0.0 : val[col];
    }

    void recompute_xb() {
        xb.setZero();
        for (int j = 0; j < n + m; ++j) {
            if (state[j] == VarState::Basic || val[j] == 0.0) continue;
            xb.noalias() -= T.col(j) * val[j];
        }
    }

    void pivot(int row, int col) {
        const double p = T(row, col);
        T.row(row) /= p;
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            const double f = T(i, col);
            if (f != 0.0) T.row(i).noalias() -= f * T.row(row);
        }
    }
};

struct RatioHit {
    double step = kInf;
    int row = -1;          // -1: bound flip of entering variable
    bool at_upper = false; // bound the leaving variable lands on
};

// First breakpoint along the entering direction. Phase 1 also stops where an
// out-of-bounds basic variable regains feasibility, because the piecewise
// objective gradient changes there.
RatioHit ratio_test(const Tableau& t, int enter, int dir, bool phase1, bool bland) {
    RatioHit best;
    const double range = t.hi[enter] - t.lo[enter];
    if (std::isfinite(range)) best.step = range;

    for (int i = 0; i < t.m; ++i) {
        const double g = -dir * t.T(i, enter); // d(xb_i)/d(step)
        if (std::abs(g) <= kPivotTol) continue;
        const double v = t.xb(i);
        const double lo = t.lo[t.basis[i]];
        const double hi = t.hi[t.basis[i]];
        double step = kInf;
        bool at_upper = false;
        if (g > 0.0) {
            if (phase1 && v < lo - kFeasTol) {
                step = (lo - v) / g;
                at_upper = false;
            } else if (v <= hi + kFeasTol && std::isfinite(hi)) {
                step = (hi - v) / g;
                at_upper = true;
            }
        } else {
            if (phase1 && v > hi + kFeasTol) {
                step = (hi - v) / g;
                at_upper = true;
            } else if (v >= lo - kFeasTol && std::isfinite(lo)) {
                step = (lo - v) / g;
                at_upper = false;
            }
        }
        if (step == kInf) continue;
        step = std::max(step, 0.0);
        const bool better =
            step < best.step - 1e-12 ||
            (step <= best.step + 1e-12 && best.row >= 0 &&
             (bland ? t.basis[i] < t.basis[best.row]
                    : std::abs(t.T(i, enter)) > std::abs(t.T(best.row, enter))));
        if (best.row < 0 ? step < best.step : better) {
            best.step = step;
            best.row = i;
            best.at_upper = at_upper;
        }
    }
    return best;
}

double infeasibility(const Tableau& t) {
    double f = 0.0;
    for (int i = 0; i < t.m; ++i) {
        const int c = t.basis[i];
        f += std::max(0.0, t.lo[c] - t.xb(i)) + std::max(0.0, t.xb(i) - t.hi[c]);
    }
    return f;
}

double objective_value(const Tableau& t) {
    double z = 0.0;
    for (int i = 0; i < t.m; ++i) z += t.cost[t.basis[i]] * t.xb(i);
    for (int j = 0; j < t.n + t.m; ++j)
        if (t.state[j] != VarState::Basic) z += t.cost[j] * t.val[j];
    return z;
}

// Runs one simplex phase; returns status.
Status run_phase(Tableau& t, bool phase1, int max_iters, int& iter_count) {
    const int ncols = t.n + t.m;
    Eigen::VectorXd d(ncols);
    Eigen::VectorXd w(t.m);
    bool bland = false;
    int stall = 0;
    double last_merit = phase1 ? infeasibility(t) : objective_value(t);

    for (int iter = 0; iter < max_iters; ++iter, ++iter_count) {
        if (phase1 && infeasibility(t) <= kFeasTol * (1.0 + t.m)) return Status::Optimal;

        // Reduced costs. Phase 1 prices change with the infeasibility sign
        // pattern, so both phases recompute the full row; problems here are
        // small enough that this dominates nothing.
        if (phase1) {
            for (int i = 0; i < t.m; ++i) {
                const int c = t.basis[i];
                w(i) = t.xb(i) < t.lo[c] - kFeasTol ? -1.0
                     : t.xb(i) > t.hi[c] + kFeasTol ? 1.0
                                                    : 0.0;
            }
            d.noalias() = -(w.transpose() * t.T).transpose();
        } else {
            for (int i = 0; i < t.m; ++i) w(i) = t.cost[t.basis[i]];
            d.noalias() = -(w.transpose() * t.T).transpose();
            for (int j = 0; j < ncols; ++j) d(j) += t.cost[j];
        }

        // Entering variable.
        int enter = -1, dir = 0;
        double best_rate = -kCostTol;
        for (int j = 0; j < ncols; ++j) {
            if (t.state[j] == VarState::Basic) continue;
            if (t.hi[j] - t.lo[j] <= 0.0) continue; // fixed, never enters
            double rate = 0.0;
            int sigma = 0;
            if (t.state[j] == VarState::AtLower && d(j) < -kCostTol) {
                rate = d(j);
                sigma = 1;
            } else if (t.state[j] == VarState::AtUpper && d(j) > kCostTol) {
                rate = -d(j);
                sigma = -1;
            } else if (t.state[j] == VarState::Free && std::abs(d(j)) > kCostTol) {
                rate = -std::abs(d(j));
                sigma = d(j) < 0.0 ? 1 : -1;
            } else {
                continue;
            }
            if (bland) {
                enter = j;
                dir = sigma;
                break;
            }
            if (rate < best_rate) {
                best_rate = rate;
                enter = j;
                dir = sigma;
            }
        }
        if (enter < 0) return Status::Optimal; // no improving direction

        const RatioHit hit = ratio_test(t, enter, dir, phase1, bland);
        if (hit.step == kInf) {
            if (phase1) return Status::IterationLimit; // cannot happen: f >= 0
            return Status::Unbounded;
        }

        // Apply the step to the basic values.
        if (hit.step != 0.0) {
            t.xb.noalias() -= dir * hit.step * t.T.col(enter);
        }
        if (hit.row < 0) {
            // Bound flip: entering variable crosses to its other bound.
            t.val[enter] = dir > 0 ? t.hi[enter] : t.lo[enter];
            t.state[enter] = dir > 0 ? VarState::AtUpper : VarState::AtLower;
        } else {
            const int leave = t.basis[hit.row];
            t.val[leave] = hit.at_upper ? t.hi[leave] : t.lo[leave];
            t.state[leave] = hit.at_upper ? VarState::AtUpper : VarState::AtLower;
            const double enter_value = t.value(enter) + dir * hit.step;
            t.pivot(hit.row, enter);
            t.basis[hit.row] = enter;
            t.state[enter] = VarState::Basic;
            t.xb(hit.row) = enter_value;
        }

        if ((iter_count + 1) % kRefreshEvery == 0) t.recompute_xb();

        const double merit = phase1 ? infeasibility(t) : objective_value(t);
        if (merit < last_merit - 1e-10 * (1.0 + std::abs(last_merit))) {
            stall = 0;
            bland = false;
            last_merit = merit;
        } else if (++stall > kStallLimit) {
            bland = true; // anti-cycling fallback
        }
    }
    return Status::IterationLimit;
}

} // namespace

Solution solve(const Problem& problem) {
    const int n = problem.num_vars();
    const int m = static_cast<int>(problem.rows.size());

    Solution sol;
    sol.x.assign(n, 0.0);

    if (m == 0) {
        // Pure bound minimization.
        sol.status = Status::Optimal;
        for (int j = 0; j < n; ++j) {
            const double c = problem.cost[j];
            double v = c >= 0.0 ? problem.lower[j] : problem.upper[j];
            if (!std::isfinite(v)) {
                if (c != 0.0) {
                    sol.status = Status::Unbounded;
                    return sol;
                }
                v = 0.0;
            }
            sol.x[j] = v;
            sol.objective += c * v;
        }
        return sol;
    }

    Tableau t;
    t.n = n;
    t.m = m;
    t.T.resize(m, n + m);
    t.T.setZero();
    t.xb.resize(m);
    t.basis.resize(m);
    t.state.assign(n + m, VarState::AtLower);
    t.val.assign(n + m, 0.0);
    t.lo.resize(n + m);
    t.hi.resize(n + m);
    t.cost.assign(n + m, 0.0);

    for (int j = 0; j < n; ++j) {
        t.lo[j] = problem.lower[j];
        t.hi[j] = problem.upper[j];
        t.cost[j] = problem.cost[j];
        const bool upper_start = j < static_cast<int>(problem.start_at_upper.size()) &&
                                 problem.start_at_upper[j] && std::isfinite(t.hi[j]);
        if (upper_start) {
            t.state[j] = VarState::AtUpper;
            t.val[j] = t.hi[j];
        } else if (std::isfinite(t.lo[j])) {
            t.state[j] = VarState::AtLower;
            t.val[j] = t.lo[j];
        } else if (std::isfinite(t.hi[j])) {
            t.state[j] = VarState::AtUpper;
            t.val[j] = t.hi[j];
        } else {
            t.state[j] = VarState::Free;
            t.val[j] = 0.0;
        }
    }
    for (int i = 0; i < m; ++i) {
        const int col = n + i;
        for (const auto& [idx, coeff] : problem.rows[i].terms) t.T(i, idx) = -coeff;
        t.T(i, col) = 1.0; // B^{-1} = -I applied to the -I slack block
        t.basis[i] = col;
        t.state[col] = VarState::Basic;
        t.lo[col] = problem.rows[i].lo;
        t.hi[col] = problem.rows[i].hi;
    }
    t.recompute_xb();

    const int max_iters = 200 * (n + m) + 2000;
    int iters = 0;

    if (infeasibility(t) > kFeasTol * (1.0 + m)) {
        const Status s1 = run_phase(t, true, max_iters, iters);
        if (s1 != Status::Optimal || infeasibility(t) > 1e-6 * (1.0 + m)) {
            sol.status = s1 == Status::Optimal ? Status::Infeasible : s1;
            sol.iterations = iters;
            if (sol.status == Status::IterationLimit && infeasibility(t) > 1e-6 * (1.0 + m))
                sol.status = Status::Infeasible;
            return sol;
        }
    }

    const Status s2 = run_phase(t, false, max_iters, iters);
    t.recompute_xb();

    sol.status = s2;
    sol.iterations = iters;

    // Snap tiny bound violations left by accumulated pivots; genuine
    // violations are left intact for the caller's validation to catch.
    for (int i = 0; i < m; ++i) {
        const int c = t.basis[i];
        if (std::isfinite(t.lo[c]) && t.xb(i) < t.lo[c] && t.xb(i) > t.lo[c] - 1e-6)
            t.xb(i) = t.lo[c];
        if (std::isfinite(t.hi[c]) && t.xb(i) > t.hi[c] && t.xb(i) < t.hi[c] + 1e-6)
            t.xb(i) = t.hi[c];
    }
    std::vector<double> full(n + m, 0.0);
    for (int j = 0; j < n + m; ++j)
        if (t.state[j] != VarState::Basic) full[j] = t.val[j];
    for (int i = 0; i < m; ++i) full[t.basis[i]] = t.xb(i);
    for (int j = 0; j < n; ++j) {
        sol.x[j] = full[j];
        sol.objective += problem.cost[j] * full[j];
    }
    return sol;
}

} // namespace gridopa::lp
