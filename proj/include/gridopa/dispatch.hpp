#pragma once

#include "gridopa/network.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <map>
#include <unordered_map>
#include <vector>

namespace gridopa {

/// Result of one DC dispatch. Flows are signed from->to; loading is
/// M = |flow|/limit per line (0 for out-of-service lines).
struct DispatchSolution {
    std::vector<double> generation; // per generator, MW
    std::vector<double> flows;      // per line, MW
    std::vector<double> shed;       // per bus, MW
    std::vector<double> angles;     // per bus, radians
    std::vector<double> loading;    // per line, M_ij
    double total_shed = 0.0;        // L_S
    double total_demand = 0.0;      // P_D
    double objective = 0.0;         // cost + penalized shed, unperturbed
};

struct DispatchParams {
    /// W = factor * max(1, max marginal cost); dominates any generation cost
    /// so shedding is never preferred to a feasible generation pattern.
    double shed_penalty_factor = 100.0;
};

/// Minimum-cost DC dispatch with per-component load shedding. Caches
/// topology factorizations, so reuse one engine across many solves on the
/// same network. Solves are deterministic; degenerate optima are resolved
/// by a graded cost perturbation that prefers lower output at lower
/// generator ids and shedding at higher bus ids.
class DispatchEngine {
public:
    explicit DispatchEngine(const GridNetwork& network, DispatchParams params = {});

    DispatchSolution solve(const std::vector<double>& demand_mw,
                           const std::vector<double>& available_capacity_mw,
                           const std::vector<double>& flow_limits_mw,
                           const std::vector<bool>& in_service);

    /// Limits and statuses taken from the network as loaded.
    DispatchSolution solve(const std::vector<double>& demand_mw,
                           const std::vector<double>& available_capacity_mw);

    double shed_penalty() const { return shed_penalty_; }

private:
    struct Component {
        std::vector<int> buses;      // global ids, first is the angle reference
        std::vector<int> lines;      // in-service lines inside this component
        std::vector<int> generators; // generator ids with a bus here
        Eigen::LLT<Eigen::MatrixXd> factor; // reduced susceptance matrix
    };
    struct Topology {
        std::vector<Component> components;
        std::vector<int> component_of_bus;
        std::vector<int> reduced_index; // per bus, -1 for reference buses
        std::unordered_map<int, Eigen::VectorXd> ptdf; // per line, reduced-space row
    };

    Topology& topology_for(const std::vector<bool>& in_service);
    const Eigen::VectorXd& ptdf_row(Topology& topo, int line);
    void solve_component(Topology& topo, const Component& comp,
                         const std::vector<double>& demand,
                         const std::vector<double>& available,
                         const std::vector<double>& limits,
                         DispatchSolution& out);
    void compute_flows(const Topology& topo, const Component& comp,
                       const std::vector<double>& injection, DispatchSolution& out) const;
    void validate_solution(const Topology& topo, const std::vector<double>& demand,
                           const std::vector<double>& available,
                           const std::vector<double>& limits,
                           const std::vector<bool>& in_service,
                           const DispatchSolution& sol) const;

    const GridNetwork& network_;
    DispatchParams params_;
    double shed_penalty_ = 0.0;
    std::vector<double> effective_cost_; // marginal cost + deterministic grading
    std::vector<double> shed_cost_;      // per bus
    std::vector<int> merit_order_;       // generator ids by ascending effective cost
    std::map<std::vector<bool>, Topology> topology_cache_;
};

/// One-shot dispatch on a network (spec operation form).
DispatchSolution solve_dispatch(const GridNetwork& network,
                                const std::vector<double>& demand_mw,
                                const std::vector<double>& available_capacity_mw);

/// M_ij per line; out-of-service lines report 0.
std::vector<double> line_loading(const DispatchSolution& solution, const GridNetwork& network);

} // namespace gridopa
