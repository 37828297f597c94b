#include "gridopa/calendar.hpp"
#include "gridopa/errors.hpp"
#include "gridopa/metrics.hpp"
#include "gridopa/res_plant.hpp"
#include "gridopa/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace gridopa;

namespace {

std::vector<double> read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open series file '" + path + "'");
    std::vector<double> values;
    std::string linebuf;
    int lineno = 0;
    while (std::getline(in, linebuf)) {
        ++lineno;
        if (linebuf.empty() || linebuf[0] == '#') continue;
        // accept "value" or "day,value" rows
        const auto comma = linebuf.find(',');
        const std::string field = comma == std::string::npos ? linebuf : linebuf.substr(comma + 1);
        try {
            values.push_back(std::stod(field));
        } catch (const std::invalid_argument&) {
            if (lineno == 1) continue; // header
            throw FormatError("series line " + std::to_string(lineno) + ": not numeric");
        }
    }
    return values;
}

calendar::MonthPartition parse_month_days(const std::string& spec, std::size_t series_len) {
    if (spec.empty()) {
        if (series_len != calendar::kDaysPerYear)
            throw ConfigError("series has " + std::to_string(series_len) +
                              " days; pass --month-days for non-calendar years");
        return calendar::calendar_partition();
    }
    calendar::MonthPartition months;
    std::istringstream in(spec);
    std::string field;
    while (std::getline(in, field, ',')) months.push_back(std::stoi(field));
    return months;
}

int cmd_plan_storage(const std::string& series_path, const std::string& month_days) {
    const auto series = read_series(series_path);
    const auto months = parse_month_days(month_days, series.size());
    const auto plan = plan_outflow(series, months);

    std::cout << "month,level\n";
    std::cout.precision(10);
    for (std::size_t m = 0; m < plan.monthly_levels.size(); ++m)
        std::cout << (m + 1) << "," << plan.monthly_levels[m] << "\n";
    std::cout << "delivered_energy," << plan.delivered_energy << "\n";
    std::cout << "required_storage," << plan.required_storage << "\n";
    const double mean_daily = plan.delivered_energy / static_cast<double>(series.size());
    if (mean_daily > 0.0)
        std::cout << "storage_days," << plan.required_storage / mean_daily << "\n";
    return 0;
}

int cmd_simulate(const std::string& scenario_path, std::optional<std::uint64_t> seed,
                 std::uint64_t realization, const std::string& log_path) {
    ScenarioConfig config = load_scenario(scenario_path);
    if (seed) config.master_seed = *seed;
    Scenario scenario(config);

    std::ofstream log;
    Scenario::DayCallback on_day;
    if (!log_path.empty()) {
        log.open(log_path);
        if (!log) throw FormatError("cannot write log file '" + log_path + "'");
        log << "day,peak_mw,res_offered_mw,res_dispatched_mw,shed_mw,mean_loading,"
               "cascade_steps,lines_failed,blackout\n";
        log.precision(10);
        on_day = [&log](const Scenario::DayLog& d) {
            log << d.day << "," << d.peak_mw << "," << d.res_offered_mw << ","
                << d.res_dispatched_mw << "," << d.shed_mw << "," << d.mean_loading << ","
                << d.cascade_steps << "," << d.lines_failed << "," << (d.blackout ? 1 : 0)
                << "\n";
        };
    }

    const RealizationResult result = scenario.run_realization(realization, on_day);
    std::cout << kRealizationsCsvHeader;
    write_realization_rows(std::cout, config.id, config, {result}, std::nullopt);
    return 0;
}

double run_zero_res_baseline(const ScenarioConfig& config, int threads) {
    ScenarioConfig baseline = config;
    baseline.penetration = 0.0;
    baseline.n_res_plants = 0;
    baseline.n_wind_plants = 0;
    baseline.placement.clear();
    baseline.plant_kinds.clear();
    baseline.id = config.id + "/baseline";
    Scenario scenario(baseline);
    return aggregate_results(scenario.monte_carlo(threads)).risk_raw_mean;
}

int cmd_montecarlo(const std::string& scenario_path, const std::string& out_dir,
                   std::optional<double> baseline_risk, bool no_baseline, int threads) {
    const ScenarioConfig config = load_scenario(scenario_path);
    Scenario scenario(config);

    std::optional<double> baseline = baseline_risk;
    if (!baseline && !no_baseline && config.penetration > 0.0)
        baseline = run_zero_res_baseline(config, threads);

    const auto results = scenario.monte_carlo(threads);
    const auto agg = aggregate_results(results);

    fs::create_directories(out_dir);
    write_realizations_csv(out_dir + "/realizations.csv", config.id, config, results, baseline);
    write_summary_csv(out_dir + "/summary.csv", config.id, config, agg, baseline);
    write_coverage_csv(out_dir + "/coverage.csv", results);
    write_optimal_json(out_dir + "/optimal.json", select_optimal(results));
    std::cout << "wrote " << out_dir << "/{realizations,summary,coverage}.csv and optimal.json\n";
    if (baseline) std::cout << "baseline raw risk: " << *baseline << "\n";
    return 0;
}

int cmd_sweep(const std::string& sweep_path, const std::string& out_dir, int threads) {
    const SweepConfig config = load_sweep(sweep_path);
    const SweepResult result = run_sweep(config, threads);

    fs::create_directories(out_dir);
    write_sweep_csv(out_dir + "/sweep.csv", config, result);

    std::ofstream all(out_dir + "/realizations.csv");
    if (!all) throw FormatError("cannot write '" + out_dir + "/realizations.csv'");
    all << kRealizationsCsvHeader;
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        ScenarioConfig point = config.base;
        std::ostringstream id;
        id << config.id << "/" << to_string(config.parameter) << "=" << result.rows[i].value;
        point.id = id.str();
        switch (config.parameter) {
            case SweepParameter::Penetration: point.penetration = result.rows[i].value; break;
            case SweepParameter::PlantCount:
                point.n_res_plants = static_cast<int>(result.rows[i].value);
                break;
            case SweepParameter::WindCount:
                point.n_wind_plants = static_cast<int>(result.rows[i].value);
                break;
        }
        const std::optional<double> baseline =
            result.baseline_raw_risk > 0.0 ? std::optional<double>(result.baseline_raw_risk)
                                           : std::nullopt;
        write_realization_rows(all, point.id, point, result.per_point[i], baseline);
    }
    std::cout << "wrote " << out_dir << "/sweep.csv and realizations.csv ("
              << result.rows.size() << " grid points, baseline raw risk "
              << result.baseline_raw_risk << ")\n";
    return 0;
}

// --- emit-plots -----------------------------------------------------------

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw FormatError("results file is missing column '" + name + "'");
    }
};

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open results file '" + path + "'");
    CsvTable table;
    std::string linebuf;
    while (std::getline(in, linebuf)) {
        if (linebuf.empty()) continue;
        std::vector<std::string> fields;
        std::istringstream row(linebuf);
        std::string field;
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (table.header.empty())
            table.header = fields;
        else
            table.rows.push_back(fields);
    }
    return table;
}

std::ostream& open_plot_output(std::ofstream& file, const std::string& out_path) {
    if (out_path.empty()) return std::cout;
    file.open(out_path);
    if (!file) throw FormatError("cannot write plot data to '" + out_path + "'");
    return file;
}

int cmd_emit_plots(const std::string& results_dir, const std::string& figure,
                   const std::string& out_path) {
    std::ofstream file;
    std::ostream& out = open_plot_output(file, out_path);
    out.precision(10);

    if (figure == "risk-perf") {
        const auto table = read_csv(results_dir + "/realizations.csv");
        const int perf = table.column("performance");
        const int risk = table.column("risk_normalized");
        const int raw = table.column("risk_raw");
        const int n = table.column("n_plants");
        out << "performance\trisk\tn_plants\n";
        for (const auto& row : table.rows)
            out << row[perf] << "\t" << (row[risk].empty() ? row[raw] : row[risk]) << "\t"
                << row[n] << "\n";
    } else if (figure == "stress-n") {
        const auto table = read_csv(results_dir + "/sweep.csv");
        const int value = table.column("value");
        const int stress = table.column("stress_optimal");
        out << "n_plants\tstress\n";
        for (const auto& row : table.rows) out << row[value] << "\t" << row[stress] << "\n";
    } else if (figure == "coverage-pdf") {
        const auto table = read_csv(results_dir + "/coverage.csv");
        const int month = table.column("month");
        const int lo = table.column("bin_lo");
        const int mass = table.column("mass");
        // winter Nov-Apr, summer May-Oct; probability density per bin
        std::map<double, double> winter, summer;
        double winter_total = 0.0, summer_total = 0.0;
        for (const auto& row : table.rows) {
            const int m = std::stoi(row[month]) - 1;
            const double bin = std::stod(row[lo]);
            const double value = std::stod(row[mass]);
            if (calendar::is_winter_month(m)) {
                winter[bin] += value;
                winter_total += value;
            } else {
                summer[bin] += value;
                summer_total += value;
            }
        }
        out << "coverage\twinter_pdf\tsummer_pdf\n";
        for (int b = 0; b < CoverageHistogram::kBins; ++b) {
            const double bin = b * CoverageHistogram::kWidth;
            const double w = winter.count(bin) && winter_total > 0.0
                                 ? winter[bin] / winter_total / CoverageHistogram::kWidth
                                 : 0.0;
            const double s = summer.count(bin) && summer_total > 0.0
                                 ? summer[bin] / summer_total / CoverageHistogram::kWidth
                                 : 0.0;
            if (w == 0.0 && s == 0.0) continue;
            out << (bin + CoverageHistogram::kWidth / 2) << "\t" << w << "\t" << s << "\n";
        }
    } else if (figure == "penetration") {
        const auto table = read_csv(results_dir + "/sweep.csv");
        const int value = table.column("value");
        const int perf = table.column("performance_optimal");
        const int risk = table.column("risk_normalized_optimal");
        out << "penetration\tperformance\trisk\n";
        for (const auto& row : table.rows)
            out << row[value] << "\t" << row[perf] << "\t" << row[risk] << "\n";
    } else if (figure == "wind-mix") {
        const auto table = read_csv(results_dir + "/sweep.csv");
        const int value = table.column("value");
        const int frac = table.column("wind_fraction");
        const int perf = table.column("performance_mean");
        const int risk = table.column("risk_normalized_mean");
        out << "wind_plants\twind_fraction\tperformance\trisk\n";
        for (const auto& row : table.rows)
            out << row[value] << "\t" << row[frac] << "\t" << row[perf] << "\t" << row[risk]
                << "\n";
    } else {
        throw ConfigError("unknown figure '" + figure + "'");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-timescale grid resilience simulator with renewable plants and storage"};
    app.require_subcommand(1);

    std::string series_path, month_days;
    auto* plan = app.add_subcommand("plan-storage", "Plan the monthly outflow for a series");
    plan->add_option("series", series_path, "daily production series file")->required();
    plan->add_option("--month-days", month_days, "comma-separated month lengths");

    std::string scenario_path, log_path;
    std::optional<std::uint64_t> seed;
    std::uint64_t realization = 0;
    auto* sim = app.add_subcommand("simulate", "Run one realization of a scenario");
    sim->add_option("scenario", scenario_path, "scenario file")->required();
    sim->add_option("--seed", seed, "override the master seed");
    sim->add_option("--realization", realization, "realization index");
    sim->add_option("--log", log_path, "write a per-day log CSV");

    std::string mc_scenario, mc_out;
    std::optional<double> baseline_risk;
    bool no_baseline = false;
    int threads = 0;
    auto* mc = app.add_subcommand("montecarlo", "Run all realizations of a scenario");
    mc->add_option("scenario", mc_scenario, "scenario file")->required();
    mc->add_option("--out", mc_out, "output directory")->required();
    mc->add_option("--baseline-risk", baseline_risk, "raw risk of the zero-RES baseline");
    mc->add_flag("--no-baseline", no_baseline, "skip the baseline normalization run");
    mc->add_option("--threads", threads, "worker threads (default: GRIDOPA_THREADS or cores)");

    std::string sweep_path, sweep_out;
    auto* sw = app.add_subcommand("sweep", "Run a parameter sweep");
    sw->add_option("sweep", sweep_path, "sweep file")->required();
    sw->add_option("--out", sweep_out, "output directory")->required();
    sw->add_option("--threads", threads, "worker threads");

    std::string results_dir, figure, plot_out;
    auto* plots = app.add_subcommand("emit-plots", "Write plot-ready tabular data from results");
    plots->add_option("results", results_dir, "montecarlo or sweep output directory")->required();
    plots->add_option("--figure", figure, "risk-perf|stress-n|coverage-pdf|penetration|wind-mix")
        ->required();
    plots->add_option("--out", plot_out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*plan) return cmd_plan_storage(series_path, month_days);
        if (*sim) return cmd_simulate(scenario_path, seed, realization, log_path);
        if (*mc) return cmd_montecarlo(mc_scenario, mc_out, baseline_risk, no_baseline, threads);
        if (*sw) return cmd_sweep(sweep_path, sweep_out, threads);
        if (*plots) return cmd_emit_plots(results_dir, figure, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
