#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace gridopa {

enum class BlackoutCause { Cascade, Shortfall };

struct BlackoutRecord {
    long day = 0;
    double load_shed = 0.0; // MW
    double demand = 0.0;    // MW
    double size = 0.0;      // load_shed / demand, > 1e-3 by construction
    BlackoutCause cause = BlackoutCause::Cascade;
    int lines_failed = 0;
};

/// Fixed-bin histogram of daily coverage ratios on [0, 1.5), width 0.01.
/// Masses sum to one once normalized.
struct CoverageHistogram {
    static constexpr int kBins = 150;
    static constexpr double kWidth = 0.01;
    std::array<double, kBins> mass{};
    long samples = 0;

    void add(double ratio);
    void normalize();
    double mean() const; // bin-center weighted
    CoverageHistogram& merge(const CoverageHistogram& other);
};

struct RunStatistics {
    long horizon_days = 0;
    double performance = 0.0;       // <P_S/P_D>
    double stress = 0.0;            // <M>
    double risk_raw = 0.0;          // expected annual blackout cost
    double risk_normalized = 0.0;   // filled once a baseline is known
    double blackout_frequency = 0.0; // per year
    long blackouts_cascade = 0;
    long blackouts_shortfall = 0;
    std::array<CoverageHistogram, 12> monthly_coverage{};
    std::vector<double> annual_margin_means; // diagnostic trace
};

/// Time average of the daily coverage ratio.
double performance(const std::vector<double>& p_s, const std::vector<double>& p_d);

/// <(1/N) sum M_ij> over days; each entry of daily_loading is one day's
/// per-line loading from the base-case dispatch.
double grid_stress(const std::vector<std::vector<double>>& daily_loading);

/// risk_raw = (365/horizon) * sum size^alpha over recorded blackouts.
double risk(const std::vector<BlackoutRecord>& records, long horizon_days, double alpha = 1.0);

/// Normalized to the zero-RES baseline; baseline must be positive.
double normalize_risk(double raw, double baseline_raw);

/// Bins one coverage ratio per day into per-month normalized histograms.
std::array<CoverageHistogram, 12> seasonal_coverage(const std::vector<double>& daily_ratios);

/// Streaming accumulator used by the simulation loop.
class RunAccumulator {
public:
    explicit RunAccumulator(double risk_alpha = 1.0) : risk_alpha_(risk_alpha) {}

    void record_day(long sim_day, double coverage_ratio, double mean_loading);
    void record_blackout(const BlackoutRecord& record);
    void record_annual_margin(double mean_margin);

    const std::vector<BlackoutRecord>& blackouts() const { return blackouts_; }
    RunStatistics finalize() const;

private:
    double risk_alpha_ = 1.0;
    long days_ = 0;
    double coverage_sum_ = 0.0;
    double loading_sum_ = 0.0;
    double size_sum_ = 0.0;
    std::vector<BlackoutRecord> blackouts_;
    std::array<CoverageHistogram, 12> monthly_{};
    std::vector<double> annual_margins_;
};

} // namespace gridopa
