#pragma once

#include "gridopa/calendar.hpp"
#include "gridopa/network.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace gridopa {

/// Monthly production statistics normalized to the profile's annual mean.
struct MonthlyProfile {
    std::array<double, 12> mean{};
    std::array<double, 12> sigma{};
};

MonthlyProfile default_solar_profile();
MonthlyProfile default_wind_profile();

/// 12 rows of `month, mean_normalized, sigma_normalized`.
MonthlyProfile load_plant_profile(const std::string& path);

/// Piecewise-constant monthly outflow plan.
struct OutflowPlan {
    std::vector<double> monthly_levels;  // one per month of the partition
    double required_storage = 0.0;       // peak of the storage trajectory
    double delivered_energy = 0.0;       // sum of planned outflow over the series
};

/// Plans the outflow for a production series: first maximize delivered
/// energy subject to the storage trajectory staying non-negative from an
/// empty start, then minimize the peak storage among those optima. Both
/// stages are linear programs over the monthly levels.
OutflowPlan plan_outflow(const std::vector<double>& p_in,
                         const calendar::MonthPartition& months);

enum class CorrelationSet { A, B };

struct DailyDelivery {
    double delivered = 0.0; // P_g
    double dumped = 0.0;    // storage overflow
};

/// A renewable plant: planned monthly outflow backed by daily storage
/// bookkeeping. Production fluctuates with one shared draw per
/// (kind, correlation set) per day.
class ResPlant {
public:
    /// Builds a plant from a normalized profile. The outflow plan is
    /// computed against one synthetic planning year drawn from
    /// planning_seed, then rescaled so the plan's month-length-weighted
    /// annual mean equals nominal_power exactly.
    static ResPlant create(int id, int bus, GeneratorKind kind, double nominal_power_mw,
                           const MonthlyProfile& profile, std::uint64_t planning_seed,
                           CorrelationSet set, double kappa = 3.4, bool winter_doubled = false,
                           bool partial_storage_draw = false);

    /// P_in for the given simulated day; draw is this plant's correlation
    /// set draw for the day.
    double sample_production(long sim_day, double set_draw) const;

    /// Advances the storage one day and returns the delivered power.
    DailyDelivery daily_step(long sim_day, double p_in_mw);

    /// Planned outflow for the day (doubled in winter when configured).
    double planned_outflow(long sim_day) const;

    /// Uniform upgrade: scales nominal power, plan and storage capacity.
    void scale_capacity(double factor);

    int id() const { return id_; }
    int bus() const { return bus_; }
    GeneratorKind kind() const { return kind_; }
    CorrelationSet correlation_set() const { return set_; }
    double nominal_power() const { return nominal_power_; }
    double storage_capacity() const { return storage_capacity_; }
    double storage_level() const { return storage_level_; }
    double kappa() const { return kappa_; }
    bool winter_doubled() const { return winter_doubled_; }
    const std::array<double, 12>& monthly_means() const { return monthly_means_; }
    const std::array<double, 12>& daily_sigma() const { return daily_sigma_; }
    const std::array<double, 12>& outflow_plan_mw() const { return outflow_plan_; }
    double dumped_total() const { return dumped_total_; }

    void set_storage_level(double level_mwday);

private:
    int id_ = 0;
    int bus_ = 0;
    GeneratorKind kind_ = GeneratorKind::Solar;
    CorrelationSet set_ = CorrelationSet::A;
    double nominal_power_ = 0.0;
    double storage_capacity_ = 0.0;
    double storage_level_ = 0.0;
    double kappa_ = 3.4;
    bool winter_doubled_ = false;
    bool partial_storage_draw_ = false;
    std::array<double, 12> monthly_means_{}; // P_in mean, units of nominal
    std::array<double, 12> daily_sigma_{};   // units of nominal
    std::array<double, 12> outflow_plan_{};  // MW, undoubled
    double dumped_total_ = 0.0;
};

/// Normalized plan shared by every plant of one kind; computed once and
/// scaled per plant.
struct PlantTemplate {
    std::array<double, 12> mean{};   // divided by the plan's annual mean
    std::array<double, 12> sigma{};
    std::array<double, 12> levels{}; // plan levels, same normalization
    double plan_kappa_days = 0.0;    // required storage over mean daily delivery
    bool productive = false;
};

/// Cached per (profile, seed); thread-safe.
const PlantTemplate& plant_template(const MonthlyProfile& profile, std::uint64_t planning_seed);

} // namespace gridopa
