#include "gridopa/scenario.hpp"

#include "gridopa/calendar.hpp"
#include "gridopa/errors.hpp"
#include "gridopa/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace gridopa {

using nlohmann::json;

namespace {

constexpr const char* kScenarioFormat = "gridopa-scenario/1";
constexpr const char* kSweepFormat = "gridopa-sweep/1";

std::string resolve_path(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty()) return path;
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& known,
                         const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw FormatError("unknown key '" + key + "' in " + where);
    }
}

SimParams parse_params(const json& obj) {
    reject_unknown_keys(obj,
                        {"p0", "p1", "mu", "kappa", "blackout_threshold", "shed_penalty",
                         "demand_noise", "daily_growth", "capacity_upgrade",
                         "overload_threshold", "risk_alpha", "margin_uses_delivered",
                         "partial_storage_draw"},
                        "params");
    SimParams p;
    p.p0 = obj.value("p0", p.p0);
    p.p1 = obj.value("p1", p.p1);
    p.mu = obj.value("mu", p.mu);
    p.kappa = obj.value("kappa", p.kappa);
    p.blackout_threshold = obj.value("blackout_threshold", p.blackout_threshold);
    p.shed_penalty = obj.value("shed_penalty", p.shed_penalty);
    p.demand_noise = obj.value("demand_noise", p.demand_noise);
    p.daily_growth = obj.value("daily_growth", p.daily_growth);
    p.capacity_upgrade = obj.value("capacity_upgrade", p.capacity_upgrade);
    p.overload_threshold = obj.value("overload_threshold", p.overload_threshold);
    p.risk_alpha = obj.value("risk_alpha", p.risk_alpha);
    p.margin_uses_delivered = obj.value("margin_uses_delivered", p.margin_uses_delivered);
    p.partial_storage_draw = obj.value("partial_storage_draw", p.partial_storage_draw);
    return p;
}

json params_to_json(const SimParams& p) {
    return json{{"p0", p.p0},
                {"p1", p.p1},
                {"mu", p.mu},
                {"kappa", p.kappa},
                {"blackout_threshold", p.blackout_threshold},
                {"shed_penalty", p.shed_penalty},
                {"demand_noise", p.demand_noise},
                {"daily_growth", p.daily_growth},
                {"capacity_upgrade", p.capacity_upgrade},
                {"overload_threshold", p.overload_threshold},
                {"risk_alpha", p.risk_alpha},
                {"margin_uses_delivered", p.margin_uses_delivered},
                {"partial_storage_draw", p.partial_storage_draw}};
}

ScenarioConfig scenario_from_json(const json& doc, const std::string& base_dir,
                                  bool expect_format) {
    static const std::vector<std::string> known = {
        "format",        "id",           "network",        "demand",
        "solar_profile", "wind_profile", "horizon_days",   "n_res_plants",
        "penetration",   "n_wind_plants", "plant_kinds",   "placement",
        "winter_doubled", "critical_margin", "realizations", "master_seed",
        "planning_seed", "params"};
    reject_unknown_keys(doc, known, "scenario document");
    if (expect_format) {
        if (!doc.contains("format") || doc.at("format") != kScenarioFormat)
            throw FormatError(std::string("expected format field '") + kScenarioFormat + "'");
    }

    ScenarioConfig cfg;
    cfg.id = doc.value("id", cfg.id);
    cfg.network_path = resolve_path(base_dir, doc.value("network", std::string{}));
    cfg.demand_path = resolve_path(base_dir, doc.value("demand", std::string{}));
    cfg.solar_profile_path = resolve_path(base_dir, doc.value("solar_profile", std::string{}));
    cfg.wind_profile_path = resolve_path(base_dir, doc.value("wind_profile", std::string{}));
    cfg.horizon_days = doc.value("horizon_days", cfg.horizon_days);
    cfg.n_res_plants = doc.value("n_res_plants", cfg.n_res_plants);
    cfg.penetration = doc.value("penetration", cfg.penetration);
    cfg.n_wind_plants = doc.value("n_wind_plants", cfg.n_wind_plants);
    if (doc.contains("plant_kinds")) {
        for (const auto& kind : doc.at("plant_kinds"))
            cfg.plant_kinds.push_back(generator_kind_from_string(kind.get<std::string>()));
    }
    if (doc.contains("placement")) {
        for (const auto& bus : doc.at("placement")) cfg.placement.push_back(bus.get<int>());
    }
    cfg.winter_doubled = doc.value("winter_doubled", cfg.winter_doubled);
    cfg.critical_margin = doc.value("critical_margin", cfg.critical_margin);
    cfg.realizations = doc.value("realizations", cfg.realizations);
    cfg.master_seed = doc.value("master_seed", cfg.master_seed);
    cfg.planning_seed = doc.value("planning_seed", cfg.planning_seed);
    if (doc.contains("params")) cfg.params = parse_params(doc.at("params"));
    cfg.validate();
    return cfg;
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

int thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRIDOPA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

std::uint64_t realization_seed(std::uint64_t master_seed, std::uint64_t realization) {
    return rng::splitmix64(rng::splitmix64(master_seed) ^
                           (0xA0761D6478BD642FULL * (realization + 1)));
}

void ScenarioConfig::validate() const {
    if (penetration < 0.0 || penetration > 1.0)
        throw ConfigError("penetration must be in [0, 1]");
    if (n_res_plants < 0) throw ConfigError("n_res_plants must be non-negative");
    if (penetration > 0.0 && n_res_plants == 0)
        throw ConfigError("positive penetration requires at least one RES plant");
    if (n_wind_plants < 0 || n_wind_plants > n_res_plants)
        throw ConfigError("n_wind_plants must be in [0, n_res_plants]");
    if (!plant_kinds.empty() && static_cast<int>(plant_kinds.size()) != n_res_plants)
        throw ConfigError("plant_kinds must list one kind per plant");
    if (!plant_kinds.empty())
        for (auto kind : plant_kinds)
            if (kind == GeneratorKind::Conventional)
                throw ConfigError("plant kinds must be solar or wind");
    if (!placement.empty() && static_cast<int>(placement.size()) != n_res_plants)
        throw ConfigError("placement must list one bus per plant");
    if (horizon_days <= 0) throw ConfigError("horizon_days must be positive");
    if (realizations < 1) throw ConfigError("realizations must be at least 1");
    if (critical_margin < 0.0) throw ConfigError("critical margin must be non-negative");
    if (params.demand_noise < 0.0 || params.demand_noise >= 1.0)
        throw ConfigError("demand noise must be in [0, 1)");
    if (params.p0 < 0.0 || params.p0 > 1.0 || params.p1 < 0.0 || params.p1 > 1.0)
        throw ConfigError("failure probabilities must be in [0, 1]");
    if (params.mu < 1.0) throw ConfigError("line upgrade factor must be >= 1");
    if (params.kappa < 0.0) throw ConfigError("kappa must be non-negative");
}

void ScenarioConfig::validate_against(const GridNetwork& network) const {
    if (placement.empty() && n_res_plants > network.num_buses())
        throw ConfigError("more plants than buses for random placement without replacement");
    for (int bus : placement)
        if (bus < 0 || bus >= network.num_buses())
            throw ConfigError("placement references missing bus " + std::to_string(bus));
    if (penetration > 0.0 && network.total_conventional_capacity() <= 0.0)
        throw ConfigError("network has no conventional capacity to replace");
}

ScenarioConfig parse_scenario(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("scenario parse failure: ") + e.what());
    }
    return scenario_from_json(doc, base_dir, true);
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open scenario file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str(), std::filesystem::path(path).parent_path().string());
}

Scenario::Scenario(ScenarioConfig config)
    : config_(std::move(config)),
      network_(load_network(config_.network_path)),
      demand_(load_demand_profile(config_.demand_path)) {
    config_.validate_against(network_);
    solar_profile_ = config_.solar_profile_path.empty()
                         ? default_solar_profile()
                         : load_plant_profile(config_.solar_profile_path);
    wind_profile_ = config_.wind_profile_path.empty() ? default_wind_profile()
                                                      : load_plant_profile(config_.wind_profile_path);
}

Scenario::Scenario(ScenarioConfig config, GridNetwork network, DemandProfile demand)
    : config_(std::move(config)), network_(std::move(network)), demand_(std::move(demand)) {
    network_.validate();
    demand_.validate();
    config_.validate_against(network_);
    solar_profile_ = config_.solar_profile_path.empty()
                         ? default_solar_profile()
                         : load_plant_profile(config_.solar_profile_path);
    wind_profile_ = config_.wind_profile_path.empty() ? default_wind_profile()
                                                      : load_plant_profile(config_.wind_profile_path);
}

RealizationSetup Scenario::build_realization(std::uint64_t realization) const {
    const int n = config_.n_res_plants;
    RealizationSetup setup;
    setup.network = network_;

    // Placement: explicit list or a partial Fisher-Yates draw without
    // replacement over the bus ids.
    if (!config_.placement.empty()) {
        setup.placement = config_.placement;
    } else if (n > 0) {
        rng::RngStream stream(
            rng::derive_seed(config_.master_seed, realization, rng::Stream::Placement));
        std::vector<int> buses(network_.num_buses());
        std::iota(buses.begin(), buses.end(), 0);
        for (int k = 0; k < n; ++k) {
            const std::size_t j = k + stream.below(buses.size() - k);
            std::swap(buses[k], buses[j]);
            setup.placement.push_back(buses[k]);
        }
    }

    // Kinds: explicit, or n_wind_plants positions drawn at random.
    if (!config_.plant_kinds.empty()) {
        setup.kinds = config_.plant_kinds;
    } else {
        setup.kinds.assign(n, GeneratorKind::Solar);
        if (config_.n_wind_plants > 0) {
            rng::RngStream stream(
                rng::derive_seed(config_.master_seed, realization, rng::Stream::WindAssignment));
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            for (int k = 0; k < config_.n_wind_plants; ++k) {
                const std::size_t j = k + stream.below(order.size() - k);
                std::swap(order[k], order[j]);
                setup.kinds[order[k]] = GeneratorKind::Wind;
            }
        }
    }

    // Replace conventional capacity uniformly, keeping total P_G fixed.
    const double total_capacity = network_.total_conventional_capacity();
    const double res_capacity = config_.penetration * total_capacity;
    for (auto& gen : setup.network.generators) {
        if (gen.kind == GeneratorKind::Conventional)
            gen.capacity_mw *= 1.0 - config_.penetration;
    }

    setup.first_res_generator = setup.network.num_generators();
    const double nominal = n > 0 ? res_capacity / n : 0.0;
    int solar_count = 0;
    int wind_count = 0;
    for (int k = 0; k < n; ++k) {
        const GeneratorKind kind = setup.kinds[k];
        const bool is_wind = kind == GeneratorKind::Wind;
        // Correlation sets alternate within each kind so both sets are
        // populated from two plants onward.
        int& counter = is_wind ? wind_count : solar_count;
        const CorrelationSet set = counter % 2 == 0 ? CorrelationSet::A : CorrelationSet::B;
        ++counter;

        const MonthlyProfile& profile = is_wind ? wind_profile_ : solar_profile_;
        const std::uint64_t plan_seed =
            is_wind ? rng::splitmix64(config_.planning_seed ^ 0x77696E64ULL)
                    : config_.planning_seed;
        setup.plants.push_back(ResPlant::create(k, setup.placement[k], kind, nominal, profile,
                                                plan_seed, set, config_.params.kappa,
                                                config_.winter_doubled,
                                                config_.params.partial_storage_draw));

        Generator gen;
        gen.id = setup.first_res_generator + k;
        gen.bus = setup.placement[k];
        gen.kind = kind;
        gen.capacity_mw = nominal;
        gen.marginal_cost = 0.0;
        setup.network.generators.push_back(gen);
    }

    setup.network.validate();
    setup.state = SystemState::from_network(setup.network);
    return setup;
}

RealizationResult Scenario::run_realization(std::uint64_t realization,
                                            const DayCallback& on_day) const {
    RealizationSetup setup = build_realization(realization);
    const GridNetwork& net = setup.network;
    const int n_bus = net.num_buses();
    const int n_gen = net.num_generators();
    const int n_line = net.num_lines();
    const int n_plants = static_cast<int>(setup.plants.size());

    DispatchParams dispatch_params;
    dispatch_params.shed_penalty_factor = config_.params.shed_penalty;
    DispatchEngine engine(net, dispatch_params);

    EvolutionParams evo;
    evo.daily_growth = config_.params.daily_growth;
    evo.demand_noise = config_.params.demand_noise;
    evo.line_upgrade = config_.params.mu;
    evo.capacity_upgrade = config_.params.capacity_upgrade;
    evo.critical_margin = config_.critical_margin;

    CascadeParams cascade_params;
    cascade_params.p0 = config_.params.p0;
    cascade_params.p1 = config_.params.p1;
    cascade_params.overload_threshold = config_.params.overload_threshold;
    cascade_params.blackout_threshold = config_.params.blackout_threshold;

    rng::RngStream demand_rng(
        rng::derive_seed(config_.master_seed, realization, rng::Stream::DemandNoise));
    rng::RngStream weather_rng(
        rng::derive_seed(config_.master_seed, realization, rng::Stream::Weather));
    rng::RngStream trigger_rng(
        rng::derive_seed(config_.master_seed, realization, rng::Stream::Triggers));
    rng::RngStream cascade_rng(
        rng::derive_seed(config_.master_seed, realization, rng::Stream::CascadeDraws));

    const std::vector<double> fractions = net.demand_fractions();
    std::vector<bool> base_mask(n_line);
    for (int l = 0; l < n_line; ++l) base_mask[l] = net.lines[l].in_service;

    RunAccumulator acc(config_.params.risk_alpha);
    std::vector<double> demand(n_bus, 0.0);
    std::vector<double> available(n_gen, 0.0);

    for (long day = 0; day < config_.horizon_days; ++day) {
        const double peak = advance_day(setup.state, demand_, demand_rng, evo);
        for (int b = 0; b < n_bus; ++b) demand[b] = fractions[b] * peak;

        // One weather draw per (kind, correlation set) per day, in fixed
        // order, whether or not such plants exist.
        double draws[2][2];
        for (int kind = 0; kind < 2; ++kind)
            for (int set = 0; set < 2; ++set) draws[kind][set] = weather_rng.normal();

        double delivered_res = 0.0;
        for (int k = 0; k < n_plants; ++k) {
            ResPlant& plant = setup.plants[k];
            const int kind_idx = plant.kind() == GeneratorKind::Wind ? 1 : 0;
            const int set_idx = plant.correlation_set() == CorrelationSet::A ? 0 : 1;
            const double p_in = plant.sample_production(day, draws[kind_idx][set_idx]);
            const double p_g = plant.daily_step(day, p_in).delivered;
            available[setup.first_res_generator + k] = p_g;
            delivered_res += p_g;
        }
        for (int g = 0; g < n_gen; ++g) {
            if (net.generators[g].kind == GeneratorKind::Conventional)
                available[g] = setup.state.conventional_capacity[g];
        }

        const DispatchSolution base =
            engine.solve(demand, available, setup.state.line_limits, base_mask);

        double solar_delivered = 0.0;
        for (int k = 0; k < n_plants; ++k)
            solar_delivered += base.generation[setup.first_res_generator + k];
        double mean_loading = 0.0;
        for (int l = 0; l < n_line; ++l) mean_loading += base.loading[l];
        if (n_line > 0) mean_loading /= n_line;
        acc.record_day(day, solar_delivered / peak, mean_loading);

        double installed = 0.0;
        for (double cap : setup.state.conventional_capacity) installed += cap;
        if (config_.params.margin_uses_delivered)
            installed += delivered_res;
        else
            for (const auto& plant : setup.plants) installed += plant.nominal_power();
        record_margin(setup.state, (installed - peak) / peak);

        Scenario::DayLog log;
        if (on_day) {
            log.day = day;
            log.peak_mw = peak;
            log.res_offered_mw = delivered_res;
            log.res_dispatched_mw = solar_delivered;
            log.shed_mw = base.total_shed;
            log.mean_loading = mean_loading;
        }

        const std::vector<int> triggers =
            trigger_outages(base_mask, config_.params.p0, trigger_rng);

        if (!triggers.empty() || base.total_shed > 0.0) {
            const CascadeResult result =
                run_cascade(engine, net, demand, available, setup.state.line_limits, base_mask,
                            triggers, cascade_rng, cascade_params);
            if (on_day) {
                log.shed_mw = result.load_shed;
                log.cascade_steps = result.steps;
                log.lines_failed = static_cast<int>(result.failed_lines.size());
                log.blackout = result.is_blackout;
            }
            if (result.is_blackout) {
                BlackoutRecord record;
                record.day = day;
                record.load_shed = result.load_shed;
                record.demand = result.demand;
                record.size = result.load_shed / result.demand;
                record.cause = result.shortfall_only ? BlackoutCause::Shortfall
                                                     : BlackoutCause::Cascade;
                record.lines_failed = static_cast<int>(result.failed_lines.size());
                acc.record_blackout(record);
                upgrade_after_blackout(setup.state, result, evo);
            }
        }

        if (on_day) on_day(log);

        if ((day + 1) % calendar::kDaysPerYear == 0) {
            acc.record_annual_margin(mean_of(setup.state.margin_history));
            annual_capacity_check(setup.state, setup.plants, evo);
        }
    }

    RealizationResult result;
    result.realization = realization;
    result.seed = realization_seed(config_.master_seed, realization);
    result.placement = setup.placement;
    result.kinds = setup.kinds;
    result.stats = acc.finalize();
    return result;
}

std::vector<RealizationResult> Scenario::monte_carlo(int threads) const {
    const int n = config_.realizations;
    std::vector<RealizationResult> results(n);
    const int workers = std::min(thread_count(threads), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) results[i] = run_realization(i);
        return results;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    results[i] = run_realization(i);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return results;
}

const RealizationResult& select_optimal(const std::vector<RealizationResult>& results) {
    if (results.empty()) throw ContractError("select_optimal needs at least one result");
    double best_perf = 0.0;
    for (const auto& r : results) best_perf = std::max(best_perf, r.stats.performance);
    const double band = best_perf * 0.99;
    const RealizationResult* best = nullptr;
    for (const auto& r : results) {
        if (r.stats.performance < band) continue;
        if (!best || r.stats.risk_raw < best->stats.risk_raw ||
            (r.stats.risk_raw == best->stats.risk_raw && r.realization < best->realization))
            best = &r;
    }
    return *best;
}

Aggregate aggregate_results(const std::vector<RealizationResult>& results) {
    Aggregate agg;
    agg.realizations = static_cast<int>(results.size());
    if (results.empty()) return agg;
    std::vector<double> perf, stress, risk;
    for (const auto& r : results) {
        perf.push_back(r.stats.performance);
        stress.push_back(r.stats.stress);
        risk.push_back(r.stats.risk_raw);
        agg.blackouts_cascade += r.stats.blackouts_cascade;
        agg.blackouts_shortfall += r.stats.blackouts_shortfall;
    }
    agg.performance_mean = mean_of(perf);
    agg.performance_std = stddev_of(perf);
    agg.stress_mean = mean_of(stress);
    agg.risk_raw_mean = mean_of(risk);
    agg.risk_raw_median = median_of(risk);
    const RealizationResult& opt = select_optimal(results);
    agg.performance_of_optimal = opt.stats.performance;
    agg.stress_of_optimal = opt.stats.stress;
    agg.risk_raw_of_optimal = opt.stats.risk_raw;
    agg.optimal_realization = opt.realization;
    return agg;
}

SweepParameter sweep_parameter_from_string(const std::string& s) {
    if (s == "penetration") return SweepParameter::Penetration;
    if (s == "n_res_plants") return SweepParameter::PlantCount;
    if (s == "n_wind_plants") return SweepParameter::WindCount;
    throw FormatError("unknown sweep parameter '" + s + "'");
}

std::string to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::Penetration: return "penetration";
        case SweepParameter::PlantCount: return "n_res_plants";
        case SweepParameter::WindCount: return "n_wind_plants";
    }
    return "penetration";
}

SweepConfig parse_sweep(const std::string& text, const std::string& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("sweep parse failure: ") + e.what());
    }
    reject_unknown_keys(doc, {"format", "id", "base", "parameter", "values", "include_baseline"},
                        "sweep document");
    if (!doc.contains("format") || doc.at("format") != kSweepFormat)
        throw FormatError(std::string("expected format field '") + kSweepFormat + "'");
    SweepConfig cfg;
    cfg.id = doc.value("id", cfg.id);
    if (!doc.contains("base")) throw FormatError("sweep document needs a 'base' scenario");
    cfg.base = scenario_from_json(doc.at("base"), base_dir, false);
    cfg.parameter = sweep_parameter_from_string(
        doc.value("parameter", std::string("penetration")));
    if (!doc.contains("values") || doc.at("values").empty())
        throw FormatError("sweep document needs a non-empty 'values' grid");
    for (const auto& v : doc.at("values")) cfg.values.push_back(v.get<double>());
    cfg.include_baseline = doc.value("include_baseline", true);
    return cfg;
}

SweepConfig load_sweep(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open sweep file '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_sweep(buffer.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

ScenarioConfig apply_sweep_value(const SweepConfig& sweep, double value) {
    ScenarioConfig cfg = sweep.base;
    switch (sweep.parameter) {
        case SweepParameter::Penetration:
            cfg.penetration = value;
            if (value == 0.0) {
                cfg.n_res_plants = 0;
                cfg.n_wind_plants = 0;
                cfg.placement.clear();
                cfg.plant_kinds.clear();
            }
            break;
        case SweepParameter::PlantCount:
            cfg.n_res_plants = static_cast<int>(value);
            if (cfg.n_res_plants == 0) cfg.penetration = 0.0;
            cfg.placement.clear();
            break;
        case SweepParameter::WindCount:
            cfg.n_wind_plants = static_cast<int>(value);
            cfg.plant_kinds.clear();
            break;
    }
    std::ostringstream id;
    id << sweep.base.id << "/" << to_string(sweep.parameter) << "=" << value;
    cfg.id = id.str();
    cfg.validate();
    return cfg;
}

} // namespace

SweepResult run_sweep(const SweepConfig& config, int threads) {
    SweepResult result;

    // Reference run for risk normalization.
    double baseline_raw = 0.0;
    if (config.parameter == SweepParameter::WindCount) {
        // All-solar point of the same scenario.
        ScenarioConfig base_cfg = apply_sweep_value(config, 0.0);
        Scenario base(base_cfg);
        baseline_raw = aggregate_results(base.monte_carlo(threads)).risk_raw_mean;
    } else if (config.include_baseline) {
        ScenarioConfig base_cfg = config.base;
        base_cfg.penetration = 0.0;
        base_cfg.n_res_plants = 0;
        base_cfg.n_wind_plants = 0;
        base_cfg.placement.clear();
        base_cfg.plant_kinds.clear();
        base_cfg.id = config.base.id + "/baseline";
        Scenario base(base_cfg);
        baseline_raw = aggregate_results(base.monte_carlo(threads)).risk_raw_mean;
    }
    result.baseline_raw_risk = baseline_raw;

    for (double value : config.values) {
        ScenarioConfig cfg = apply_sweep_value(config, value);
        Scenario scenario(cfg);
        std::vector<RealizationResult> runs = scenario.monte_carlo(threads);

        SweepRow row;
        row.value = value;
        row.aggregate = aggregate_results(runs);
        if (baseline_raw > 0.0) {
            row.risk_normalized_mean = row.aggregate.risk_raw_mean / baseline_raw;
            row.risk_normalized_of_optimal = row.aggregate.risk_raw_of_optimal / baseline_raw;
        }
        row.wind_fraction =
            cfg.n_res_plants > 0 ? static_cast<double>(cfg.n_wind_plants) / cfg.n_res_plants : 0.0;
        result.rows.push_back(std::move(row));
        result.per_point.push_back(std::move(runs));
    }
    return result;
}

const char* kRealizationsCsvHeader =
    "scenario,seed,realization,n_plants,penetration,performance,stress,risk_raw,"
    "risk_normalized,blackouts_cascade,blackouts_shortfall,placement\n";

void write_realization_rows(std::ostream& out, const std::string& scenario_id,
                            const ScenarioConfig& config,
                            const std::vector<RealizationResult>& results,
                            std::optional<double> baseline_raw) {
    out.precision(12);
    for (const auto& r : results) {
        out << scenario_id << "," << r.seed << "," << r.realization << ","
            << config.n_res_plants << "," << config.penetration << "," << r.stats.performance
            << "," << r.stats.stress << "," << r.stats.risk_raw << ",";
        if (baseline_raw && *baseline_raw > 0.0)
            out << r.stats.risk_raw / *baseline_raw;
        out << "," << r.stats.blackouts_cascade << "," << r.stats.blackouts_shortfall << ",";
        for (std::size_t i = 0; i < r.placement.size(); ++i) {
            if (i) out << ' ';
            out << r.placement[i];
        }
        out << "\n";
    }
}

void write_realizations_csv(const std::string& path, const std::string& scenario_id,
                            const ScenarioConfig& config,
                            const std::vector<RealizationResult>& results,
                            std::optional<double> baseline_raw) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << kRealizationsCsvHeader;
    write_realization_rows(out, scenario_id, config, results, baseline_raw);
}

void write_summary_csv(const std::string& path, const std::string& scenario_id,
                       const ScenarioConfig& config, const Aggregate& aggregate,
                       std::optional<double> baseline_raw) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << "scenario,realizations,n_plants,penetration,performance_mean,performance_std,"
           "performance_optimal,stress_mean,stress_optimal,risk_raw_mean,risk_raw_median,"
           "risk_raw_optimal,risk_normalized_mean,risk_normalized_optimal,blackouts_cascade,"
           "blackouts_shortfall,optimal_realization\n";
    out.precision(12);
    out << scenario_id << "," << aggregate.realizations << "," << config.n_res_plants << ","
        << config.penetration << "," << aggregate.performance_mean << ","
        << aggregate.performance_std << "," << aggregate.performance_of_optimal << ","
        << aggregate.stress_mean << "," << aggregate.stress_of_optimal << ","
        << aggregate.risk_raw_mean << "," << aggregate.risk_raw_median << ","
        << aggregate.risk_raw_of_optimal << ",";
    if (baseline_raw && *baseline_raw > 0.0)
        out << aggregate.risk_raw_mean / *baseline_raw << ","
            << aggregate.risk_raw_of_optimal / *baseline_raw;
    else
        out << ",";
    out << "," << aggregate.blackouts_cascade << "," << aggregate.blackouts_shortfall << ","
        << aggregate.optimal_realization << "\n";
}

void write_coverage_csv(const std::string& path, const std::vector<RealizationResult>& results) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << "month,bin_lo,bin_hi,mass\n";
    out.precision(12);
    std::array<CoverageHistogram, 12> merged{};
    for (const auto& r : results)
        for (int m = 0; m < 12; ++m) merged[m].merge(r.stats.monthly_coverage[m]);
    for (auto& h : merged) {
        // per-realization histograms are already normalized; renormalize the merge
        double total = 0.0;
        for (double v : h.mass) total += v;
        if (total > 0.0)
            for (double& v : h.mass) v /= total;
    }
    for (int m = 0; m < 12; ++m) {
        for (int b = 0; b < CoverageHistogram::kBins; ++b) {
            if (merged[m].mass[b] == 0.0) continue;
            out << (m + 1) << "," << b * CoverageHistogram::kWidth << ","
                << (b + 1) * CoverageHistogram::kWidth << "," << merged[m].mass[b] << "\n";
        }
    }
}

void write_optimal_json(const std::string& path, const RealizationResult& optimal) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    json doc;
    doc["realization"] = optimal.realization;
    doc["seed"] = optimal.seed;
    doc["placement"] = optimal.placement;
    std::vector<std::string> kinds;
    for (auto k : optimal.kinds) kinds.push_back(to_string(k));
    doc["plant_kinds"] = kinds;
    doc["performance"] = optimal.stats.performance;
    doc["risk_raw"] = optimal.stats.risk_raw;
    doc["stress"] = optimal.stats.stress;
    out << doc.dump(2) << "\n";
}

void write_sweep_csv(const std::string& path, const SweepConfig& config,
                     const SweepResult& result) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write '" + path + "'");
    out << "sweep,parameter,value,wind_fraction,realizations,performance_mean,performance_std,"
           "performance_optimal,stress_mean,stress_optimal,risk_raw_mean,risk_raw_median,"
           "risk_raw_optimal,risk_normalized_mean,risk_normalized_optimal,blackouts_cascade,"
           "blackouts_shortfall\n";
    out.precision(12);
    for (const auto& row : result.rows) {
        out << config.id << "," << to_string(config.parameter) << "," << row.value << ","
            << row.wind_fraction << "," << row.aggregate.realizations << ","
            << row.aggregate.performance_mean << "," << row.aggregate.performance_std << ","
            << row.aggregate.performance_of_optimal << "," << row.aggregate.stress_mean << ","
            << row.aggregate.stress_of_optimal << "," << row.aggregate.risk_raw_mean << ","
            << row.aggregate.risk_raw_median << "," << row.aggregate.risk_raw_of_optimal << ","
            << row.risk_normalized_mean << "," << row.risk_normalized_of_optimal << ","
            << row.aggregate.blackouts_cascade << "," << row.aggregate.blackouts_shortfall
            << "\n";
    }
}

} // namespace gridopa
