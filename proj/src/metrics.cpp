#include "gridopa/metrics.hpp"

#include "gridopa/calendar.hpp"
#include "gridopa/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gridopa {

void CoverageHistogram::add(double ratio) {
    int bin = static_cast<int>(std::floor(ratio / kWidth));
    bin = std::clamp(bin, 0, kBins - 1);
    mass[bin] += 1.0;
    ++samples;
}

void CoverageHistogram::normalize() {
    if (samples == 0) return;
    for (double& m : mass) m /= static_cast<double>(samples);
}

double CoverageHistogram::mean() const {
    double total = 0.0;
    double weighted = 0.0;
    for (int b = 0; b < kBins; ++b) {
        total += mass[b];
        weighted += mass[b] * (b + 0.5) * kWidth;
    }
    return total > 0.0 ? weighted / total : 0.0;
}

CoverageHistogram& CoverageHistogram::merge(const CoverageHistogram& other) {
    for (int b = 0; b < kBins; ++b) mass[b] += other.mass[b];
    samples += other.samples;
    return *this;
}

double performance(const std::vector<double>& p_s, const std::vector<double>& p_d) {
    if (p_s.size() != p_d.size()) throw ContractError("coverage series lengths differ");
    if (p_s.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < p_s.size(); ++i) {
        if (p_d[i] <= 0.0) throw ContractError("demand must be positive every day");
        sum += p_s[i] / p_d[i];
    }
    return sum / static_cast<double>(p_s.size());
}

double grid_stress(const std::vector<std::vector<double>>& daily_loading) {
    if (daily_loading.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& day : daily_loading) {
        if (day.empty()) continue;
        double m = 0.0;
        for (double v : day) m += v;
        sum += m / static_cast<double>(day.size());
    }
    return sum / static_cast<double>(daily_loading.size());
}

double risk(const std::vector<BlackoutRecord>& records, long horizon_days, double alpha) {
    if (horizon_days <= 0) throw ContractError("risk needs a positive horizon");
    double cost = 0.0;
    for (const auto& r : records) cost += std::pow(r.size, alpha);
    return cost * static_cast<double>(calendar::kDaysPerYear) / static_cast<double>(horizon_days);
}

double normalize_risk(double raw, double baseline_raw) {
    if (baseline_raw <= 0.0)
        throw ContractError(
            "baseline produced no blackouts; lengthen the baseline run before normalizing");
    return raw / baseline_raw;
}

std::array<CoverageHistogram, 12> seasonal_coverage(const std::vector<double>& daily_ratios) {
    std::array<CoverageHistogram, 12> months{};
    for (std::size_t d = 0; d < daily_ratios.size(); ++d)
        months[calendar::month_of_sim_day(static_cast<long>(d))].add(daily_ratios[d]);
    for (auto& h : months) h.normalize();
    return months;
}

void RunAccumulator::record_day(long sim_day, double coverage_ratio, double mean_loading) {
    ++days_;
    coverage_sum_ += coverage_ratio;
    loading_sum_ += mean_loading;
    monthly_[calendar::month_of_sim_day(sim_day)].add(coverage_ratio);
}

void RunAccumulator::record_blackout(const BlackoutRecord& record) {
    blackouts_.push_back(record);
    size_sum_ += std::pow(record.size, risk_alpha_);
}

void RunAccumulator::record_annual_margin(double mean_margin) {
    annual_margins_.push_back(mean_margin);
}

RunStatistics RunAccumulator::finalize() const {
    RunStatistics stats;
    stats.horizon_days = days_;
    if (days_ > 0) {
        stats.performance = coverage_sum_ / static_cast<double>(days_);
        stats.stress = loading_sum_ / static_cast<double>(days_);
        stats.risk_raw =
            size_sum_ * static_cast<double>(calendar::kDaysPerYear) / static_cast<double>(days_);
        stats.blackout_frequency = static_cast<double>(blackouts_.size()) *
                                   static_cast<double>(calendar::kDaysPerYear) /
                                   static_cast<double>(days_);
    }
    for (const auto& b : blackouts_) {
        if (b.cause == BlackoutCause::Cascade)
            ++stats.blackouts_cascade;
        else
            ++stats.blackouts_shortfall;
    }
    stats.monthly_coverage = monthly_;
    for (auto& h : stats.monthly_coverage) h.normalize();
    stats.annual_margin_means = annual_margins_;
    return stats;
}

} // namespace gridopa
