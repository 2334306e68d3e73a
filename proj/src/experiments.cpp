#include "gridlevel/experiments.hpp"

#include <algorithm>
#include <fstream>

#include "gridlevel/hems.hpp"
#include "gridlevel/json_io.hpp"

namespace gridlevel {

namespace {

std::unique_ptr<MeterTransport> make_transport(const ExperimentOptions& options,
                                               const std::vector<HouseholdSpec>& households) {
    if (options.transport_factory) return options.transport_factory(households);
    return std::make_unique<InprocTransport>(households, options.threads);
}

std::ofstream open_artifact(const std::string& out_dir, const std::string& name,
                            std::vector<std::string>& artifacts) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    artifacts.push_back(path);
    return out;
}

nlohmann::json telemetry_line(const GenerationStats& stats) {
    nlohmann::json line{{"generation", stats.generation},
                        {"mean_profit", stats.mean_profit_pence},
                        {"feasible_fraction", stats.feasible_fraction}};
    if (stats.best.feasible)
        line["best_profit"] = stats.best.profit.pence();
    else
        line["best_profit"] = nullptr;
    return line;
}

void write_trace_rows(std::ofstream& csv, const std::string& algorithm, int num_customers,
                      std::uint64_t seed, const std::vector<GenerationStats>& history) {
    for (const GenerationStats& g : history) {
        csv << algorithm << ',' << num_customers << ',' << seed << ',' << g.generation << ','
            << g.best.profit.to_string() << ',' << (g.best.feasible ? 1 : 0) << ','
            << g.mean_profit_pence << ',' << g.feasible_fraction << '\n';
    }
}

void fill_at_power_max(const TimeWindow& window, double energy, double power_max,
                       ConsumptionSchedule& out) {
    double remaining = energy;
    for (int i = window.alpha.offset(); i <= window.beta.offset() && remaining > 0.0; ++i) {
        const double x = std::min(power_max, remaining);
        out.load[i] += x;
        remaining -= x;
    }
}

}  // namespace

std::string scenario_hash(const Scenario& s) {
    const std::string dump = scenario_to_json(s).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    static const char* hex = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = hex[h & 0xf];
        h >>= 4;
    }
    return out;
}

PricingEvaluator make_evaluator(MeterTransport& transport, const CostParams& cost,
                                const RetailerConstraints& constraints) {
    return [&transport, cost, constraints](const std::vector<PriceVector>& batch) {
        const std::vector<ConsumptionSchedule> aggregates = transport.announce_and_collect(batch);
        std::vector<EvaluatedPricing> out;
        out.reserve(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i)
            out.push_back(evaluate_pricing(batch[i], aggregates[i], cost, constraints));
        return out;
    };
}

ConsumptionSchedule flat_baseline_schedule(const HouseholdSpec& household) {
    ConsumptionSchedule out;
    for (const ApplianceSpec& appliance : household.appliances) {
        std::visit(
            [&out](const auto& spec) {
                using S = std::decay_t<decltype(spec)>;
                if constexpr (std::is_same_v<S, CurtailableSpec>) {
                    for (int i = 0; i < spec.window.length(); ++i)
                        out.load[spec.window.alpha.offset() + i] +=
                            spec.ceiling[static_cast<std::size_t>(i)];
                } else {
                    fill_at_power_max(spec.window, spec.energy_required, spec.power_max, out);
                }
            },
            appliance);
    }
    return out;
}

HouseholdSpec without_waiting(HouseholdSpec household) {
    for (ApplianceSpec& appliance : household.appliances) {
        std::visit(
            [](auto& spec) {
                using S = std::decay_t<decltype(spec)>;
                if constexpr (!std::is_same_v<S, CurtailableSpec>) {
                    spec.max_wait = 0;
                    spec.thresholds.clear();
                }
            },
            appliance);
    }
    return household;
}

int generations_to_fraction(const std::vector<GenerationStats>& history, double fraction) {
    Money final_best;
    bool any_feasible = false;
    for (const GenerationStats& g : history) {
        if (g.best.feasible) {
            final_best = g.best.profit;
            any_feasible = true;
        }
    }
    if (!any_feasible) return -1;
    const double target = fraction * final_best.pence();
    for (const GenerationStats& g : history)
        if (g.best.feasible && g.best.profit.pence() >= target) return g.generation;
    return history.back().generation;
}

ExperimentReport run_convergence(const ScenarioConfig& base_config, const std::vector<int>& counts,
                                 const ExperimentOptions& options) {
    ExperimentReport report;
    report.experiment = "convergence";
    report.metrics["counts"] = counts;
    report.metrics["seed"] = base_config.seed;

    std::ofstream csv;
    std::ofstream jsonl;
    if (!options.out_dir.empty()) {
        csv = open_artifact(options.out_dir, "convergence.csv", report.artifacts);
        csv << "algorithm,num_customers,seed,generation,best_profit_pence,best_feasible,"
               "mean_profit_pence,feasible_fraction\n";
        jsonl = open_artifact(options.out_dir, "telemetry.jsonl", report.artifacts);
    }

    nlohmann::json runs = nlohmann::json::array();
    for (int count : counts) {
        ScenarioConfig config = base_config;
        config.num_customers = count;
        const Scenario scenario = generate_scenario(config);
        if (report.scenario_hash.empty()) report.scenario_hash = scenario_hash(scenario);

        struct Arm {
            const char* name;
            GaParams params;
        };
        GaParams multi = scenario.ga_params;
        GaParams single = scenario.ga_params;
        single.island_size = multi.num_islands * multi.island_size;  // same total population
        single.num_islands = 1;
        for (const Arm& arm : {Arm{"multi_population", multi}, Arm{"single_population", single}}) {
            auto transport = make_transport(options, scenario.customers);
            const PricingEvaluator evaluator =
                make_evaluator(*transport, scenario.cost_params, scenario.retailer_constraints);
            TelemetrySink sink;
            if (jsonl.is_open()) {
                sink = [&jsonl, &arm, count](const GenerationStats& stats) {
                    nlohmann::json line = telemetry_line(stats);
                    line["algorithm"] = arm.name;
                    line["num_customers"] = count;
                    jsonl << line.dump() << '\n';
                };
            }
            const GaResult result =
                optimize(arm.params, scenario.retailer_constraints, evaluator, sink);
            if (csv.is_open())
                write_trace_rows(csv, arm.name, count, arm.params.seed, result.history);

            nlohmann::json run;
            run["algorithm"] = arm.name;
            run["num_customers"] = count;
            run["best_profit_pence"] = result.best.profit.pence();
            run["best_feasible"] = result.best.feasible;
            run["generations_to_99pct"] = generations_to_fraction(result.history, 0.99);
            run["trace_length"] = result.history.size();
            runs.push_back(std::move(run));
        }
    }
    report.metrics["runs"] = std::move(runs);
    return report;
}

ExperimentReport run_flat_vs_dayahead(const Scenario& scenario, Money revenue_target,
                                      const ExperimentOptions& options, CompareOutcome* outcome) {
    ExperimentReport report;
    report.experiment = "flat_vs_dayahead";
    report.scenario_hash = scenario_hash(scenario);

    RetailerConstraints constraints = scenario.retailer_constraints;
    constraints.revenue_cap = revenue_target;

    // Day-ahead arm: GA against the live meter population.
    auto transport = make_transport(options, scenario.customers);
    const PricingEvaluator evaluator =
        make_evaluator(*transport, scenario.cost_params, constraints);

    std::ofstream jsonl;
    TelemetrySink sink;
    if (!options.out_dir.empty()) {
        jsonl = open_artifact(options.out_dir, "telemetry.jsonl", report.artifacts);
        sink = [&jsonl](const GenerationStats& stats) { jsonl << telemetry_line(stats).dump() << '\n'; };
    }
    const GaResult ga = optimize(scenario.ga_params, constraints, evaluator, sink);

    CompareOutcome result;
    result.dayahead_best = ga.best;
    result.dayahead = {ga.best.revenue, ga.best.supply_cost, ga.best.profit};

    // Flat arm: inelastic baseline load; the flat price is chosen to collect
    // the target revenue, clipped into the allowed band.
    ConsumptionSchedule flat_load;
    for (const HouseholdSpec& hh : scenario.customers) flat_load += flat_baseline_schedule(hh);
    const double total_kwh = flat_load.total();
    Money flat_price = total_kwh > 0.0 ? Money::from_pence(revenue_target.pence() / total_kwh)
                                       : scenario.retailer_constraints.price_min.at_offset(0);
    const Money lo = scenario.retailer_constraints.price_min.at_offset(0);
    const Money hi = scenario.retailer_constraints.price_max.at_offset(0);
    if (flat_price < lo) {
        flat_price = lo;
        result.flat_price_clipped = true;
    } else if (flat_price > hi) {
        flat_price = hi;
        result.flat_price_clipped = true;
    }
    result.flat_price = flat_price;

    double flat_revenue_pence = 0.0;
    for (int h = 0; h < kHorizonHours; ++h) flat_revenue_pence += flat_price.pence() * flat_load.load[h];
    result.flat.revenue = Money::from_pence(flat_revenue_pence);
    result.flat.cost = supply_cost(flat_load, scenario.cost_params);
    result.flat.profit = result.flat.revenue - result.flat.cost;

    if (!options.out_dir.empty()) {
        std::ofstream csv = open_artifact(options.out_dir, "compare.csv", report.artifacts);
        csv << "arm,revenue_pence,cost_pence,profit_pence\n";
        csv << "dayahead," << result.dayahead.revenue.to_string() << ','
            << result.dayahead.cost.to_string() << ',' << result.dayahead.profit.to_string() << '\n';
        csv << "flat," << result.flat.revenue.to_string() << ',' << result.flat.cost.to_string()
            << ',' << result.flat.profit.to_string() << '\n';

        std::ofstream prices = open_artifact(options.out_dir, "prices.csv", report.artifacts);
        prices << "hour,dayahead_price_pence,flat_price_pence\n";
        for (int h = 0; h < kHorizonHours; ++h)
            prices << h + 1 << ',' << ga.best.prices.at_offset(h).to_string() << ','
                   << flat_price.to_string() << '\n';

        // import_price_series-compatible dump of the winning day-ahead prices;
        // hour column is the local hour-ending, slot 1 being hour-ending 9.
        std::ofstream importable =
            open_artifact(options.out_dir, "dayahead_prices_import.csv", report.artifacts);
        importable << "date,hour,price_pence_per_kwh\n";
        for (int hour = 1; hour <= kHorizonHours; ++hour) {
            const int slot_offset = slot_of_clock_hour(hour - 1).offset();
            importable << "dayahead," << hour << ','
                       << ga.best.prices.at_offset(slot_offset).to_string() << '\n';
        }
    }

    report.metrics = {
        {"revenue_target_pence", revenue_target.pence()},
        {"dayahead",
         {{"revenue_pence", result.dayahead.revenue.pence()},
          {"cost_pence", result.dayahead.cost.pence()},
          {"profit_pence", result.dayahead.profit.pence()},
          {"feasible", ga.best.feasible}}},
        {"flat",
         {{"revenue_pence", result.flat.revenue.pence()},
          {"cost_pence", result.flat.cost.pence()},
          {"profit_pence", result.flat.profit.pence()},
          {"price_pence", flat_price.pence()},
          {"price_clipped", result.flat_price_clipped}}},
    };
    if (outcome) *outcome = result;
    return report;
}

ExperimentReport run_monthly_bills(const Scenario& scenario, const std::string& price_series_path,
                                   int customer_id, const ExperimentOptions& options,
                                   std::vector<DayBills>* outcome) {
    ExperimentReport report;
    report.experiment = "monthly_bills";
    report.scenario_hash = scenario_hash(scenario);

    const auto it = std::find_if(scenario.customers.begin(), scenario.customers.end(),
                                 [customer_id](const HouseholdSpec& h) { return h.id == customer_id; });
    if (it == scenario.customers.end())
        throw std::invalid_argument("no customer with id " + std::to_string(customer_id));
    const HouseholdSpec& household = *it;
    const HouseholdSpec no_wait = without_waiting(household);
    const ConsumptionSchedule baseline = flat_baseline_schedule(household);

    const std::vector<DailyPrices> days = import_price_series(price_series_path);

    std::vector<DayBills> bills;
    bills.reserve(days.size());
    for (const DailyPrices& day : days) {
        DayBills row;
        row.date = day.date;
        row.optimized = solve_household(day.prices, household).bill;
        row.wait_disabled = solve_household(day.prices, no_wait).bill;
        double baseline_pence = 0.0;
        for (int h = 0; h < kHorizonHours; ++h)
            baseline_pence += day.prices.at_offset(h).pence() * baseline.load[h];
        row.baseline = Money::from_pence(baseline_pence);
        bills.push_back(std::move(row));
    }

    if (!options.out_dir.empty()) {
        std::ofstream csv = open_artifact(options.out_dir, "bills.csv", report.artifacts);
        csv << "date,optimized_bill_pence,wait_disabled_bill_pence,baseline_bill_pence\n";
        for (const DayBills& b : bills)
            csv << b.date << ',' << b.optimized.to_string() << ',' << b.wait_disabled.to_string()
                << ',' << b.baseline.to_string() << '\n';
    }

    nlohmann::json rows = nlohmann::json::array();
    double optimized_total = 0.0, baseline_total = 0.0;
    for (const DayBills& b : bills) {
        rows.push_back({{"date", b.date},
                        {"optimized_pence", b.optimized.pence()},
                        {"wait_disabled_pence", b.wait_disabled.pence()},
                        {"baseline_pence", b.baseline.pence()}});
        optimized_total += b.optimized.pence();
        baseline_total += b.baseline.pence();
    }
    report.metrics = {{"customer_id", customer_id},
                      {"days", std::move(rows)},
                      {"optimized_total_pence", optimized_total},
                      {"baseline_total_pence", baseline_total}};
    if (outcome) *outcome = bills;
    return report;
}

}  // namespace gridlevel
