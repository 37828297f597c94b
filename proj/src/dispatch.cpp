#include "gridopa/dispatch.hpp"

#include "gridopa/errors.hpp"
#include "gridopa/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gridopa {
namespace {

constexpr double kGrading = 1e-6;  // deterministic tie-break scale
constexpr double kFlowTol = 1e-7;  // fast-path acceptance on |flow| <= limit
constexpr double kHardTol = 1e-6;  // invariant tolerance

double flow_slack_tol(double limit) { return kFlowTol * std::max(1.0, limit); }

} // namespace

DispatchEngine::DispatchEngine(const GridNetwork& network, DispatchParams params)
    : network_(network), params_(params) {
    const int n_gen = network.num_generators();
    const int n_bus = network.num_buses();

    double max_cost = 0.0;
    for (const auto& g : network.generators) max_cost = std::max(max_cost, g.marginal_cost);
    shed_penalty_ = params_.shed_penalty_factor * std::max(1.0, max_cost);

    effective_cost_.resize(n_gen);
    for (int g = 0; g < n_gen; ++g) {
        // Same marginal cost resolves to lexicographically smallest generation:
        // lower ids carry a larger grading term, so they are dispatched last.
        effective_cost_[g] =
            network.generators[g].marginal_cost + kGrading * (n_gen - g) / std::max(1, n_gen);
    }
    shed_cost_.resize(n_bus);
    for (int b = 0; b < n_bus; ++b)
        shed_cost_[b] = shed_penalty_ * (1.0 + kGrading * (n_bus - b) / std::max(1, n_bus));

    merit_order_.resize(n_gen);
    std::iota(merit_order_.begin(), merit_order_.end(), 0);
    std::sort(merit_order_.begin(), merit_order_.end(),
              [&](int a, int b) { return effective_cost_[a] < effective_cost_[b]; });
}

DispatchEngine::Topology& DispatchEngine::topology_for(const std::vector<bool>& in_service) {
    auto it = topology_cache_.find(in_service);
    if (it != topology_cache_.end()) return it->second;
    if (topology_cache_.size() > 128) topology_cache_.clear();

    const int n_bus = network_.num_buses();
    Topology topo;
    topo.component_of_bus.assign(n_bus, -1);
    topo.reduced_index.assign(n_bus, -1);

    // Union of buses over in-service lines, BFS per component.
    std::vector<std::vector<std::pair<int, int>>> adjacency(n_bus); // (neighbor, line)
    for (int l = 0; l < network_.num_lines(); ++l) {
        if (!in_service[l]) continue;
        const auto& line = network_.lines[l];
        adjacency[line.from_bus].push_back({line.to_bus, l});
        adjacency[line.to_bus].push_back({line.from_bus, l});
    }

    for (int start = 0; start < n_bus; ++start) {
        if (topo.component_of_bus[start] >= 0) continue;
        const int comp_id = static_cast<int>(topo.components.size());
        topo.components.emplace_back();
        Component& comp = topo.components.back();
        std::vector<int> queue{start};
        topo.component_of_bus[start] = comp_id;
        while (!queue.empty()) {
            const int b = queue.back();
            queue.pop_back();
            comp.buses.push_back(b);
            for (const auto& [nb, line] : adjacency[b]) {
                if (topo.component_of_bus[nb] < 0) {
                    topo.component_of_bus[nb] = comp_id;
                    queue.push_back(nb);
                }
            }
        }
        std::sort(comp.buses.begin(), comp.buses.end());
    }

    for (int l = 0; l < network_.num_lines(); ++l) {
        if (!in_service[l]) continue;
        topo.components[topo.component_of_bus[network_.lines[l].from_bus]].lines.push_back(l);
    }
    for (int g = 0; g < network_.num_generators(); ++g)
        topo.components[topo.component_of_bus[network_.generators[g].bus]].generators.push_back(g);

    // Reduced susceptance matrix per component (reference bus removed).
    for (auto& comp : topo.components) {
        const int size = static_cast<int>(comp.buses.size());
        if (size < 2) continue;
        for (int k = 1; k < size; ++k) topo.reduced_index[comp.buses[k]] = k - 1;
        Eigen::MatrixXd b_red = Eigen::MatrixXd::Zero(size - 1, size - 1);
        for (int l : comp.lines) {
            const auto& line = network_.lines[l];
            const int i = topo.reduced_index[line.from_bus];
            const int j = topo.reduced_index[line.to_bus];
            if (i >= 0) b_red(i, i) += line.susceptance;
            if (j >= 0) b_red(j, j) += line.susceptance;
            if (i >= 0 && j >= 0) {
                b_red(i, j) -= line.susceptance;
                b_red(j, i) -= line.susceptance;
            }
        }
        comp.factor.compute(b_red);
        if (comp.factor.info() != Eigen::Success)
            throw InternalError("susceptance matrix factorization failed");
    }

    auto [inserted, ok] = topology_cache_.emplace(in_service, std::move(topo));
    (void)ok;
    return inserted->second;
}

const Eigen::VectorXd& DispatchEngine::ptdf_row(Topology& topo, int line) {
    auto it = topo.ptdf.find(line);
    if (it != topo.ptdf.end()) return it->second;

    const auto& l = network_.lines[line];
    const Component& comp = topo.components[topo.component_of_bus[l.from_bus]];
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(comp.buses.size()) - 1);
    const int i = topo.reduced_index[l.from_bus];
    const int j = topo.reduced_index[l.to_bus];
    if (i >= 0) rhs(i) += l.susceptance;
    if (j >= 0) rhs(j) -= l.susceptance;
    Eigen::VectorXd row = comp.factor.solve(rhs);
    return topo.ptdf.emplace(line, std::move(row)).first->second;
}

void DispatchEngine::compute_flows(const Topology& topo, const Component& comp,
                                   const std::vector<double>& injection,
                                   DispatchSolution& out) const {
    const int size = static_cast<int>(comp.buses.size());
    if (size < 2) return;
    Eigen::VectorXd p(size - 1);
    for (int k = 1; k < size; ++k) p(k - 1) = injection[comp.buses[k]];
    const Eigen::VectorXd theta = comp.factor.solve(p);
    for (int k = 1; k < size; ++k) out.angles[comp.buses[k]] = theta(k - 1);
    for (int l : comp.lines) {
        const auto& line = network_.lines[l];
        const int i = topo.reduced_index[line.from_bus];
        const int j = topo.reduced_index[line.to_bus];
        const double ti = i >= 0 ? theta(i) : 0.0;
        const double tj = j >= 0 ? theta(j) : 0.0;
        out.flows[l] = line.susceptance * (ti - tj);
    }
}

void DispatchEngine::solve_component(Topology& topo, const Component& comp,
                                     const std::vector<double>& demand,
                                     const std::vector<double>& available,
                                     const std::vector<double>& limits,
                                     DispatchSolution& out) {
    double comp_demand = 0.0;
    double comp_capacity = 0.0;
    for (int b : comp.buses) comp_demand += demand[b];
    for (int g : comp.generators) comp_capacity += std::max(0.0, available[g]);

    // Merit-order fill; with no binding line this is the unique optimum of
    // the graded LP, so the solver is only invoked when a limit binds.
    const double dispatched_total = std::min(comp_demand, comp_capacity);
    double remaining = dispatched_total;
    for (int g : merit_order_) {
        if (topo.component_of_bus[network_.generators[g].bus] !=
            topo.component_of_bus[comp.buses.front()])
            continue;
        const double take = std::min(remaining, std::max(0.0, available[g]));
        out.generation[g] = take;
        remaining -= take;
        if (remaining <= 0.0) break;
    }
    double shed_remaining = comp_demand - dispatched_total;
    if (shed_remaining > 0.0) {
        // Cheapest grading first: shed lands at the highest bus ids.
        for (auto it = comp.buses.rbegin(); it != comp.buses.rend() && shed_remaining > 1e-12;
             ++it) {
            const double s = std::min(demand[*it], shed_remaining);
            out.shed[*it] = s;
            shed_remaining -= s;
        }
    }

    if (comp.buses.size() < 2) return;

    std::vector<double> injection(network_.num_buses(), 0.0);
    for (int g : comp.generators) injection[network_.generators[g].bus] += out.generation[g];
    for (int b : comp.buses) injection[b] += out.shed[b] - demand[b];
    compute_flows(topo, comp, injection, out);

    bool violated = false;
    for (int l : comp.lines) {
        if (std::abs(out.flows[l]) > limits[l] + flow_slack_tol(limits[l])) {
            violated = true;
            break;
        }
    }
    if (!violated) return;

    // Active-set LP over this component's generation and shed variables.
    lp::Problem problem;
    std::vector<int> gen_var(network_.num_generators(), -1);
    std::vector<int> shed_var(network_.num_buses(), -1);
    for (int g : comp.generators) {
        if (available[g] <= 0.0) continue;
        gen_var[g] = problem.add_variable(effective_cost_[g], 0.0, available[g]);
    }
    for (int b : comp.buses) {
        if (demand[b] <= 0.0) continue;
        shed_var[b] = problem.add_variable(shed_cost_[b], 0.0, demand[b], /*at_upper=*/true);
    }
    auto& balance = problem.add_row(comp_demand, comp_demand);
    for (int g : comp.generators)
        if (gen_var[g] >= 0) balance.terms.push_back({gen_var[g], 1.0});
    for (int b : comp.buses)
        if (shed_var[b] >= 0) balance.terms.push_back({shed_var[b], 1.0});

    std::vector<bool> cut(network_.num_lines(), false);
    const int max_rounds = static_cast<int>(comp.lines.size()) + 2;
    for (int round = 0; round < max_rounds; ++round) {
        std::vector<int> new_cuts;
        for (int l : comp.lines) {
            if (cut[l]) continue;
            if (std::abs(out.flows[l]) > limits[l] + flow_slack_tol(limits[l]))
                new_cuts.push_back(l);
        }
        if (new_cuts.empty()) break;
        for (int l : new_cuts) {
            cut[l] = true;
            const Eigen::VectorXd& row = ptdf_row(topo, l);
            double demand_shift = 0.0;
            for (int b : comp.buses) {
                const int r = topo.reduced_index[b];
                if (r >= 0) demand_shift += row(r) * demand[b];
            }
            auto& constraint = problem.add_row(-limits[l] + demand_shift, limits[l] + demand_shift);
            for (int g : comp.generators) {
                if (gen_var[g] < 0) continue;
                const int r = topo.reduced_index[network_.generators[g].bus];
                if (r >= 0 && row(r) != 0.0) constraint.terms.push_back({gen_var[g], row(r)});
            }
            for (int b : comp.buses) {
                if (shed_var[b] < 0) continue;
                const int r = topo.reduced_index[b];
                if (r >= 0 && row(r) != 0.0) constraint.terms.push_back({shed_var[b], row(r)});
            }
        }

        const lp::Solution lp_sol = lp::solve(problem);
        if (lp_sol.status != lp::Status::Optimal)
            throw InternalError("dispatch LP did not reach optimality; full shed is always "
                                "feasible, this signals a solver bug");

        for (int g : comp.generators) out.generation[g] = gen_var[g] >= 0 ? lp_sol.x[gen_var[g]] : 0.0;
        for (int b : comp.buses) out.shed[b] = shed_var[b] >= 0 ? lp_sol.x[shed_var[b]] : 0.0;

        std::fill(injection.begin(), injection.end(), 0.0);
        for (int g : comp.generators) injection[network_.generators[g].bus] += out.generation[g];
        for (int b : comp.buses) injection[b] += out.shed[b] - demand[b];
        compute_flows(topo, comp, injection, out);
    }
}

DispatchSolution DispatchEngine::solve(const std::vector<double>& demand_mw,
                                       const std::vector<double>& available_capacity_mw,
                                       const std::vector<double>& flow_limits_mw,
                                       const std::vector<bool>& in_service) {
    if (demand_mw.size() != static_cast<std::size_t>(network_.num_buses()))
        throw ContractError("demand vector size does not match bus count");
    if (available_capacity_mw.size() != static_cast<std::size_t>(network_.num_generators()))
        throw ContractError("capacity vector size does not match generator count");
    for (double d : demand_mw)
        if (d < 0.0) throw ContractError("demand entries must be non-negative");
    for (double c : available_capacity_mw)
        if (c < 0.0) throw ContractError("available capacity entries must be non-negative");

    Topology& topo = topology_for(in_service);

    DispatchSolution sol;
    sol.generation.assign(network_.num_generators(), 0.0);
    sol.flows.assign(network_.num_lines(), 0.0);
    sol.shed.assign(network_.num_buses(), 0.0);
    sol.angles.assign(network_.num_buses(), 0.0);
    sol.loading.assign(network_.num_lines(), 0.0);
    sol.total_demand = std::accumulate(demand_mw.begin(), demand_mw.end(), 0.0);

    for (const auto& comp : topo.components)
        solve_component(topo, comp, demand_mw, available_capacity_mw, flow_limits_mw, sol);

    for (int l = 0; l < network_.num_lines(); ++l) {
        if (!in_service[l]) {
            sol.flows[l] = 0.0;
            continue;
        }
        sol.loading[l] = std::abs(sol.flows[l]) / flow_limits_mw[l];
    }
    sol.total_shed = std::accumulate(sol.shed.begin(), sol.shed.end(), 0.0);
    for (int g = 0; g < network_.num_generators(); ++g)
        sol.objective += network_.generators[g].marginal_cost * sol.generation[g];
    sol.objective += shed_penalty_ * sol.total_shed;

    validate_solution(topo, demand_mw, available_capacity_mw, flow_limits_mw, in_service, sol);
    return sol;
}

DispatchSolution DispatchEngine::solve(const std::vector<double>& demand_mw,
                                       const std::vector<double>& available_capacity_mw) {
    std::vector<double> limits(network_.num_lines());
    std::vector<bool> in_service(network_.num_lines());
    for (int l = 0; l < network_.num_lines(); ++l) {
        limits[l] = network_.lines[l].flow_limit_mw;
        in_service[l] = network_.lines[l].in_service;
    }
    return solve(demand_mw, available_capacity_mw, limits, in_service);
}

void DispatchEngine::validate_solution(const Topology& topo, const std::vector<double>& demand,
                                       const std::vector<double>& available,
                                       const std::vector<double>& limits,
                                       const std::vector<bool>& in_service,
                                       const DispatchSolution& sol) const {
    for (int g = 0; g < network_.num_generators(); ++g) {
        if (sol.generation[g] < -kHardTol || sol.generation[g] > available[g] + kHardTol)
            throw InternalError("generator output escaped its bounds");
    }
    for (int b = 0; b < network_.num_buses(); ++b) {
        if (sol.shed[b] < -kHardTol || sol.shed[b] > demand[b] + kHardTol)
            throw InternalError("shed escaped its bounds");
    }
    // Per-component power balance.
    std::vector<double> balance(topo.components.size(), 0.0);
    for (int g = 0; g < network_.num_generators(); ++g)
        balance[topo.component_of_bus[network_.generators[g].bus]] += sol.generation[g];
    for (int b = 0; b < network_.num_buses(); ++b)
        balance[topo.component_of_bus[b]] -= demand[b] - sol.shed[b];
    for (double r : balance)
        if (std::abs(r) > kHardTol) throw InternalError("component power balance violated");
    // Flow equations and limits.
    for (int l = 0; l < network_.num_lines(); ++l) {
        if (!in_service[l]) continue;
        const auto& line = network_.lines[l];
        const double expected =
            line.susceptance * (sol.angles[line.from_bus] - sol.angles[line.to_bus]);
        if (std::abs(sol.flows[l] - expected) > kHardTol)
            throw InternalError("flow does not match the angle difference");
        if (std::abs(sol.flows[l]) > limits[l] + kHardTol * std::max(1.0, limits[l]))
            throw InternalError("line flow exceeds its limit after dispatch");
    }
}

DispatchSolution solve_dispatch(const GridNetwork& network, const std::vector<double>& demand_mw,
                                const std::vector<double>& available_capacity_mw) {
    DispatchEngine engine(network);
    return engine.solve(demand_mw, available_capacity_mw);
}

std::vector<double> line_loading(const DispatchSolution& solution, const GridNetwork& network) {
    std::vector<double> loading(network.num_lines(), 0.0);
    for (int l = 0; l < network.num_lines(); ++l) {
        if (!network.lines[l].in_service) continue;
        loading[l] = std::abs(solution.flows[l]) / network.lines[l].flow_limit_mw;
    }
    return loading;
}

} // namespace gridopa
