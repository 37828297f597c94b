#pragma once

#include "gridopa/cascade.hpp"
#include "gridopa/dispatch.hpp"
#include "gridopa/evolution.hpp"
#include "gridopa/metrics.hpp"
#include "gridopa/network.hpp"
#include "gridopa/res_plant.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gridopa {

/// Model parameters with their standard defaults; every one can be
/// overridden from the scenario file.
struct SimParams {
    double p0 = 0.0001;
    double p1 = 0.05;
    double mu = 1.04;
    double kappa = 3.4;
    double blackout_threshold = 1e-3;
    double shed_penalty = 100.0;
    double demand_noise = 0.05;
    double daily_growth = 1.00005;
    double capacity_upgrade = 1.04;
    double overload_threshold = 0.9;
    double risk_alpha = 1.0;
    bool margin_uses_delivered = false;
    bool partial_storage_draw = false;
};

struct ScenarioConfig {
    std::string id = "scenario";
    std::string network_path;
    std::string demand_path;
    std::string solar_profile_path; // empty -> built-in default profile
    std::string wind_profile_path;
    long horizon_days = 100000;
    int n_res_plants = 0;
    double penetration = 0.0; // P_SG / P_G
    int n_wind_plants = 0;
    std::vector<GeneratorKind> plant_kinds; // optional explicit kinds, size n
    std::vector<int> placement;             // optional explicit buses, size n
    bool winter_doubled = false;
    double critical_margin = 0.4;
    int realizations = 256;
    std::uint64_t master_seed = 1;
    std::uint64_t planning_seed = 27;
    SimParams params;

    void validate() const;
    void validate_against(const GridNetwork& network) const;
};

ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir = "");

struct RealizationResult {
    std::uint64_t realization = 0;
    std::uint64_t seed = 0; // derived from the master seed, documented rule
    std::vector<int> placement;
    std::vector<GeneratorKind> kinds;
    RunStatistics stats;
};

/// A realization's fully initialized simulation inputs.
struct RealizationSetup {
    GridNetwork network; // conventional capacity scaled down, RES slots appended
    std::vector<ResPlant> plants;
    SystemState state;
    std::vector<int> placement;
    std::vector<GeneratorKind> kinds;
    int first_res_generator = 0; // generator id of plant 0
};

/// Immutable context shared by all realizations of one scenario.
class Scenario {
public:
    explicit Scenario(ScenarioConfig config);
    Scenario(ScenarioConfig config, GridNetwork network, DemandProfile demand);

    RealizationSetup build_realization(std::uint64_t realization) const;

    struct DayLog {
        long day = 0;
        double peak_mw = 0.0;
        double res_offered_mw = 0.0;    // plant-side delivery
        double res_dispatched_mw = 0.0; // absorbed by the grid
        double shed_mw = 0.0;           // after any cascade
        double mean_loading = 0.0;
        int cascade_steps = 0;
        int lines_failed = 0;
        bool blackout = false;
    };
    using DayCallback = std::function<void(const DayLog&)>;

    RealizationResult run_realization(std::uint64_t realization,
                                      const DayCallback& on_day = {}) const;

    /// Runs all configured realizations; 0 threads means use the
    /// GRIDOPA_THREADS override or the hardware count. Results are ordered
    /// by realization index and independent of the thread count.
    std::vector<RealizationResult> monte_carlo(int threads = 0) const;

    const ScenarioConfig& config() const { return config_; }
    const GridNetwork& network() const { return network_; }
    const DemandProfile& demand() const { return demand_; }

private:
    ScenarioConfig config_;
    GridNetwork network_;
    DemandProfile demand_;
    MonthlyProfile solar_profile_;
    MonthlyProfile wind_profile_;
};

/// Among results whose performance is within 1% (relative) of the best,
/// picks the one with the lowest risk; ties go to the lowest realization
/// index (the seed derivation order).
const RealizationResult& select_optimal(const std::vector<RealizationResult>& results);

struct Aggregate {
    int realizations = 0;
    double performance_mean = 0.0;
    double performance_std = 0.0;
    double performance_of_optimal = 0.0;
    double stress_mean = 0.0;
    double stress_of_optimal = 0.0;
    double risk_raw_mean = 0.0;
    double risk_raw_median = 0.0;
    double risk_raw_of_optimal = 0.0;
    long blackouts_cascade = 0;
    long blackouts_shortfall = 0;
    std::uint64_t optimal_realization = 0;
};

Aggregate aggregate_results(const std::vector<RealizationResult>& results);

enum class SweepParameter { Penetration, PlantCount, WindCount };

SweepParameter sweep_parameter_from_string(const std::string& s);
std::string to_string(SweepParameter p);

struct SweepConfig {
    std::string id = "sweep";
    ScenarioConfig base;
    SweepParameter parameter = SweepParameter::Penetration;
    std::vector<double> values;
    /// Adds (or reuses) a zero-RES run with the same master seed for risk
    /// normalization. Wind-count sweeps normalize to the all-solar point
    /// instead.
    bool include_baseline = true;
};

SweepConfig load_sweep(const std::string& path);
SweepConfig parse_sweep(const std::string& text, const std::string& base_dir = "");

struct SweepRow {
    double value = 0.0;
    Aggregate aggregate;
    double risk_normalized_mean = 0.0;
    double risk_normalized_of_optimal = 0.0;
    double wind_fraction = 0.0; // share of RES capacity that is wind
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double baseline_raw_risk = 0.0;
    std::vector<std::vector<RealizationResult>> per_point;
};

SweepResult run_sweep(const SweepConfig& config, int threads = 0);

/// Statistics export: one row per realization.
extern const char* kRealizationsCsvHeader;
void write_realization_rows(std::ostream& out, const std::string& scenario_id,
                            const ScenarioConfig& config,
                            const std::vector<RealizationResult>& results,
                            std::optional<double> baseline_raw);
void write_realizations_csv(const std::string& path, const std::string& scenario_id,
                            const ScenarioConfig& config,
                            const std::vector<RealizationResult>& results,
                            std::optional<double> baseline_raw);
void write_summary_csv(const std::string& path, const std::string& scenario_id,
                       const ScenarioConfig& config, const Aggregate& aggregate,
                       std::optional<double> baseline_raw);
void write_coverage_csv(const std::string& path, const std::vector<RealizationResult>& results);
void write_optimal_json(const std::string& path, const RealizationResult& optimal);
void write_sweep_csv(const std::string& path, const SweepConfig& config,
                     const SweepResult& result);

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization);

} // namespace gridopa
