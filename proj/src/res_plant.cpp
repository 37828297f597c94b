#include "gridopa/res_plant.hpp"

#include "gridopa/errors.hpp"
#include "gridopa/rng.hpp"
#include "gridopa/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace gridopa {

namespace {

// Seasonal sinusoid peaking mid-July, renormalized to a weighted annual
// mean of one. Synthetic defaults; real profiles are loaded from file.
MonthlyProfile sinusoid_profile(double amplitude, int peak_month, double sigma_ratio) {
    MonthlyProfile p;
    double weighted = 0.0;
    for (int m = 0; m < 12; ++m) {
        p.mean[m] = 1.0 + amplitude * std::cos(2.0 * M_PI * (m - peak_month) / 12.0);
        weighted += p.mean[m] * calendar::kMonthDays[m];
    }
    weighted /= calendar::kDaysPerYear;
    for (int m = 0; m < 12; ++m) {
        p.mean[m] /= weighted;
        p.sigma[m] = sigma_ratio * p.mean[m];
    }
    return p;
}

} // namespace

MonthlyProfile default_solar_profile() { return sinusoid_profile(0.525, 6, 0.30); }

MonthlyProfile default_wind_profile() { return sinusoid_profile(0.20, 11, 0.60); }

MonthlyProfile load_plant_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open plant profile '" + path + "'");
    MonthlyProfile profile;
    std::array<bool, 12> seen{};
    std::string linebuf;
    int lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        if (linebuf.empty() || linebuf[0] == '#') continue;
        std::istringstream row(linebuf);
        std::string month_field, mean_field, sigma_field;
        if (!std::getline(row, month_field, ',') || !std::getline(row, mean_field, ',') ||
            !std::getline(row, sigma_field))
            throw FormatError("plant profile line " + std::to_string(lineno) +
                              ": expected 'month, mean_normalized, sigma_normalized'");
        if (month_field == "month") continue;
        try {
            const int month = std::stoi(month_field);
            if (month < 1 || month > 12)
                throw FormatError("plant profile line " + std::to_string(lineno) +
                                  ": month must be 1..12");
            profile.mean[month - 1] = std::stod(mean_field);
            profile.sigma[month - 1] = std::stod(sigma_field);
            seen[month - 1] = true;
        } catch (const std::invalid_argument&) {
            throw FormatError("plant profile line " + std::to_string(lineno) + ": not numeric");
        }
    }
    for (int m = 0; m < 12; ++m)
        if (!seen[m]) throw FormatError("plant profile missing month " + std::to_string(m + 1));
    return profile;
}

OutflowPlan plan_outflow(const std::vector<double>& p_in, const calendar::MonthPartition& months) {
    const int days = static_cast<int>(p_in.size());
    const int n_months = static_cast<int>(months.size());
    if (std::accumulate(months.begin(), months.end(), 0) != days)
        throw ContractError("month partition does not cover the series");
    for (double p : p_in)
        if (p < 0.0) throw ContractError("production series must be non-negative");

    // month index and in-month day count per day
    std::vector<int> month_of(days);
    {
        int m = 0, left = n_months > 0 ? months[0] : 0;
        for (int d = 0; d < days; ++d) {
            while (left == 0 && m + 1 < n_months) left = months[++m];
            month_of[d] = m;
            --left;
        }
    }

    std::vector<double> cum_production(days);
    double acc = 0.0;
    for (int d = 0; d < days; ++d) {
        acc += p_in[d];
        cum_production[d] = acc;
    }

    // Days of each month elapsed by the end of day d; the storage level is
    // R(d) = cum_production(d) - sum_m elapsed_m(d) * level_m.
    auto elapsed_terms = [&](int d) {
        std::vector<std::pair<int, double>> terms;
        for (int m = 0; m < month_of[d]; ++m) terms.push_back({m, double(months[m])});
        int into = d + 1;
        for (int m = 0; m < month_of[d]; ++m) into -= months[m];
        terms.push_back({month_of[d], double(into)});
        return terms;
    };

    // Stage 1: maximize delivered energy subject to R(d) >= 0.
    lp::Problem stage1;
    for (int m = 0; m < n_months; ++m) stage1.add_variable(-double(months[m]), 0.0, lp::kInf);
    for (int d = 0; d < days; ++d) {
        auto& row = stage1.add_row(-lp::kInf, cum_production[d]);
        row.terms = elapsed_terms(d);
    }
    const lp::Solution s1 = lp::solve(stage1);
    if (s1.status != lp::Status::Optimal) throw InternalError("outflow stage-1 LP failed");
    const double best_delivery = -s1.objective;

    // Stage 2: among max-delivery plans, minimize the storage peak r.
    lp::Problem stage2;
    for (int m = 0; m < n_months; ++m) stage2.add_variable(0.0, 0.0, lp::kInf);
    const int r_var = stage2.add_variable(1.0, 0.0, lp::kInf);
    for (int d = 0; d < days; ++d) {
        auto terms = elapsed_terms(d);
        auto& feas = stage2.add_row(-lp::kInf, cum_production[d]);
        feas.terms = terms;
        auto& peak = stage2.add_row(cum_production[d], lp::kInf); // outflow + r >= cum
        peak.terms = terms;
        peak.terms.push_back({r_var, 1.0});
    }
    auto& delivery = stage2.add_row(best_delivery - 1e-9 * (1.0 + best_delivery), lp::kInf);
    for (int m = 0; m < n_months; ++m) delivery.terms.push_back({m, double(months[m])});
    const lp::Solution s2 = lp::solve(stage2);
    if (s2.status != lp::Status::Optimal) throw InternalError("outflow stage-2 LP failed");

    OutflowPlan plan;
    plan.monthly_levels.resize(n_months);
    for (int m = 0; m < n_months; ++m) {
        // Snap down by a relative hair so the plan stays feasible against
        // its own series in exact forward simulation.
        const double level = s2.x[m];
        plan.monthly_levels[m] = std::max(0.0, level - 1e-10 * (1.0 + level));
    }

    double storage = 0.0;
    double peak = 0.0;
    double delivered = 0.0;
    for (int d = 0; d < days; ++d) {
        storage += p_in[d] - plan.monthly_levels[month_of[d]];
        peak = std::max(peak, storage);
        delivered += plan.monthly_levels[month_of[d]];
        if (storage < -1e-7)
            throw InternalError("planned outflow is infeasible against its own series");
    }
    plan.required_storage = peak;
    plan.delivered_energy = delivered;
    return plan;
}

const PlantTemplate& plant_template(const MonthlyProfile& profile, std::uint64_t planning_seed) {
    static std::mutex mutex;
    static std::map<std::string, PlantTemplate> cache;

    std::string key(sizeof(profile.mean) + sizeof(profile.sigma) + sizeof(planning_seed), '\0');
    std::memcpy(key.data(), profile.mean.data(), sizeof(profile.mean));
    std::memcpy(key.data() + sizeof(profile.mean), profile.sigma.data(), sizeof(profile.sigma));
    std::memcpy(key.data() + sizeof(profile.mean) + sizeof(profile.sigma), &planning_seed,
                sizeof(planning_seed));

    std::scoped_lock lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    // One synthetic planning year with the profile's daily fluctuations.
    rng::RngStream stream(planning_seed);
    std::vector<double> year(calendar::kDaysPerYear);
    for (int d = 0; d < calendar::kDaysPerYear; ++d) {
        const int m = calendar::month_of_day(d);
        year[d] = std::max(0.0, profile.mean[m] + profile.sigma[m] * stream.normal());
    }
    const OutflowPlan plan = plan_outflow(year, calendar::calendar_partition());

    PlantTemplate tpl;
    const double plan_mean = plan.delivered_energy / calendar::kDaysPerYear;
    if (plan_mean > 1e-12) {
        tpl.productive = true;
        for (int m = 0; m < 12; ++m) {
            tpl.mean[m] = profile.mean[m] / plan_mean;
            tpl.sigma[m] = profile.sigma[m] / plan_mean;
            tpl.levels[m] = plan.monthly_levels[m] / plan_mean;
        }
        tpl.plan_kappa_days = plan.required_storage / plan_mean;
    }
    return cache.emplace(std::move(key), tpl).first->second;
}

ResPlant ResPlant::create(int id, int bus, GeneratorKind kind, double nominal_power_mw,
                          const MonthlyProfile& profile, std::uint64_t planning_seed,
                          CorrelationSet set, double kappa, bool winter_doubled,
                          bool partial_storage_draw) {
    if (kind == GeneratorKind::Conventional)
        throw ContractError("renewable plant kind must be solar or wind");
    if (nominal_power_mw < 0.0) throw ContractError("nominal power must be non-negative");

    const PlantTemplate& tpl = plant_template(profile, planning_seed);

    ResPlant plant;
    plant.id_ = id;
    plant.bus_ = bus;
    plant.kind_ = kind;
    plant.set_ = set;
    plant.nominal_power_ = nominal_power_mw;
    plant.kappa_ = kappa;
    plant.storage_capacity_ = kappa * nominal_power_mw;
    plant.storage_level_ = 0.0;
    plant.winter_doubled_ = winter_doubled;
    plant.partial_storage_draw_ = partial_storage_draw;
    if (tpl.productive) {
        for (int m = 0; m < 12; ++m) {
            plant.monthly_means_[m] = tpl.mean[m];
            plant.daily_sigma_[m] = tpl.sigma[m];
            plant.outflow_plan_[m] = nominal_power_mw * tpl.levels[m];
        }
    }
    return plant;
}

double ResPlant::sample_production(long sim_day, double set_draw) const {
    const int m = calendar::month_of_sim_day(sim_day);
    double p = nominal_power_ * std::max(0.0, monthly_means_[m] + daily_sigma_[m] * set_draw);
    if (winter_doubled_ && calendar::is_winter_month(m)) p *= 2.0;
    return p;
}

double ResPlant::planned_outflow(long sim_day) const {
    const int m = calendar::month_of_sim_day(sim_day);
    double out = outflow_plan_[m];
    if (winter_doubled_ && calendar::is_winter_month(m)) out *= 2.0;
    return out;
}

DailyDelivery ResPlant::daily_step(long sim_day, double p_in_mw) {
    if (p_in_mw < 0.0) throw ContractError("production must be non-negative");
    const double p_out = planned_outflow(sim_day);

    DailyDelivery result;
    if (p_in_mw >= p_out) {
        result.delivered = p_out;
        const double next = storage_level_ + (p_in_mw - p_out);
        if (next > storage_capacity_) {
            result.dumped = next - storage_capacity_;
            storage_level_ = storage_capacity_;
        } else {
            storage_level_ = next;
        }
    } else if (storage_level_ >= p_out - p_in_mw) {
        result.delivered = p_out;
        storage_level_ -= p_out - p_in_mw;
    } else if (partial_storage_draw_) {
        // Sensitivity variant: drain what is left.
        result.delivered = p_in_mw + storage_level_;
        storage_level_ = 0.0;
    } else {
        // Literal rule: insufficient storage is not partially drawn.
        result.delivered = p_in_mw;
    }
    dumped_total_ += result.dumped;
    return result;
}

void ResPlant::scale_capacity(double factor) {
    if (factor <= 0.0) throw ContractError("capacity scale factor must be positive");
    nominal_power_ *= factor;
    storage_capacity_ = kappa_ * nominal_power_;
    for (double& level : outflow_plan_) level *= factor;
    storage_level_ = std::min(storage_level_, storage_capacity_);
}

void ResPlant::set_storage_level(double level_mwday) {
    if (level_mwday < 0.0 || level_mwday > storage_capacity_ + 1e-9)
        throw ContractError("storage level outside [0, capacity]");
    storage_level_ = std::min(level_mwday, storage_capacity_);
}

} // namespace gridopa
