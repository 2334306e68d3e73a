#include "gridlevel/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "gridlevel/json_io.hpp"
#include "gridlevel/rng.hpp"

namespace gridlevel {

namespace {

constexpr int kMaxResamples = 1000;

void check_range(const Range& r, const char* what) {
    if (!(r.lo <= r.hi)) throw ConfigError(std::string(what) + ": range lo > hi");
}

void check_clock(const ClockRange& r, const char* what) {
    if (!(0 <= r.lo && r.lo <= r.hi && r.hi <= 23))
        throw ConfigError(std::string(what) + ": clock range must satisfy 0 <= lo <= hi <= 23");
}

void check_config(const ScenarioConfig& cfg) {
    if (cfg.num_customers < 0) throw ConfigError("num_customers must be >= 0");
    for (const ShiftableGen* g : {&cfg.phev, &cfg.dishwasher, &cfg.washing_machine}) {
        check_range(g->energy, "energy");
        check_range(g->power_max, "power_max");
        check_clock(g->start_hour, "start_hour");
        check_clock(g->end_hour, "end_hour");
        if (g->duration_lo > g->duration_hi) throw ConfigError("duration range lo > hi");
        if (static_cast<int>(g->thresholds.size()) < g->max_wait)
            throw ConfigError("thresholds must cover max_wait hours");
    }
    check_range(cfg.air_conditioning.floor, "floor");
    check_range(cfg.air_conditioning.ceiling, "ceiling");
    check_clock(cfg.air_conditioning.start_hour, "start_hour");
    check_clock(cfg.air_conditioning.end_hour, "end_hour");
    check_range(cfg.air_conditioning.budget, "budget");
    check_range(cfg.household_cap, "household_cap");
}

TimeWindow draw_window(Rng& rng, const ClockRange& start, const ClockRange& end) {
    const int start_clock = static_cast<int>(rng.next_int(start.lo, start.hi));
    const int end_clock = static_cast<int>(rng.next_int(end.lo, end.hi));
    const HourIndex alpha = slot_of_clock_hour(start_clock);
    // The window closes at end_clock, so its last slot is the one ending there.
    const HourIndex beta = slot_of_clock_hour(((end_clock - 1) % 24 + 24) % 24);
    return TimeWindow(alpha, beta);
}

// max_wait cannot push the window past slot 24; clip and keep the matching
// threshold prefix.
void clip_wait(int max_wait, const std::vector<Money>& thresholds, const TimeWindow& window,
               int& out_wait, std::vector<Money>& out_thresholds) {
    out_wait = std::min(max_wait, kHorizonHours - window.beta.value());
    out_thresholds.assign(thresholds.begin(), thresholds.begin() + out_wait);
}

bool household_ok(const HouseholdSpec& hh) { return validate_household(hh).empty(); }

// Worst-case affordability: the floor must stay within budget even at the
// price cap, otherwise some GA candidates could not be answered.
bool floor_affordable(const CurtailableSpec& spec, const PriceVector& price_max) {
    double worst = 0.0;
    for (int i = 0; i < spec.window.length(); ++i)
        worst += price_max.at_offset(spec.window.alpha.offset() + i).pence() *
                 spec.floor[static_cast<std::size_t>(i)];
    return Money::from_pence(worst) <= spec.budget;
}

}  // namespace

ScenarioConfig default_config(int num_customers, std::uint64_t seed) {
    ScenarioConfig cfg;
    cfg.num_customers = num_customers;
    cfg.seed = seed;

    const std::vector<Money> thresholds = {Money::from_whole_pence(10), Money::from_whole_pence(25),
                                           Money::from_whole_pence(45)};

    cfg.phev = {{9.0, 11.0}, {2.5, 3.3}, {18, 21}, {5, 8}, 0, 0, 3, thresholds};
    cfg.dishwasher = {{2.3, 2.9}, {1.2, 1.7}, {8, 11}, {18, 21}, 2, 3, 3, thresholds};
    cfg.washing_machine = {{1.8, 2.3}, {1.0, 1.5}, {18, 21}, {5, 8}, 2, 3, 3, thresholds};

    cfg.air_conditioning.mode = CurtailableMode::MaxConsumption;
    cfg.air_conditioning.floor = {0.5, 0.8};
    cfg.air_conditioning.ceiling = {1.8, 2.2};
    cfg.air_conditioning.start_hour = {16, 18};
    cfg.air_conditioning.end_hour = {21, 23};
    cfg.air_conditioning.budget = {70.0, 90.0};
    cfg.air_conditioning.min_total_fraction = {0.5, 0.9};

    cfg.household_cap = {3.5, 4.5};

    // Quadratic coefficients are anchored at the 100-customer reference scale
    // and scaled with 1/N so the per-customer marginal supply cost does not
    // depend on the population size.
    const double scale = 100.0 / std::max(1, num_customers);
    for (int h = 0; h < kHorizonHours; ++h) {
        // day rate 8AM-midnight (slots 1-16), night rate midnight-8AM
        cfg.cost_params.a[h] = (h < 16 ? 5.5e-4 : 4.0e-4) * scale;
        cfg.cost_params.b[h] = 0.0;
        cfg.cost_params.c[h] = 0.0;
    }

    cfg.retailer_constraints.price_min = PriceVector::uniform(Money::from_whole_pence(8));
    cfg.retailer_constraints.price_max = PriceVector::uniform(Money::from_whole_pence(14));
    cfg.retailer_constraints.hourly_supply_cap = 1e6;
    cfg.retailer_constraints.revenue_cap =
        Money::from_whole_pence(255LL * std::max(1, num_customers));

    cfg.ga_params.seed = seed;
    return cfg;
}

Scenario generate_scenario(const ScenarioConfig& config) {
    check_config(config);
    Scenario scenario;
    scenario.cost_params = config.cost_params;
    scenario.retailer_constraints = config.retailer_constraints;
    scenario.ga_params = config.ga_params;
    scenario.seed = config.seed;
    scenario.customers.reserve(static_cast<std::size_t>(config.num_customers));

    for (int n = 0; n < config.num_customers; ++n) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(n), 1));
        HouseholdSpec hh;
        hh.id = n + 1;

        auto draw_until = [&](auto draw) {
            for (int attempt = 0; attempt < kMaxResamples; ++attempt) {
                ApplianceSpec spec = draw();
                HouseholdSpec probe{hh.id, {spec}, 1.0};
                const bool ok = household_ok(probe) &&
                                (!std::holds_alternative<CurtailableSpec>(spec) ||
                                 std::get<CurtailableSpec>(spec).mode != CurtailableMode::MaxConsumption ||
                                 floor_affordable(std::get<CurtailableSpec>(spec),
                                                  config.retailer_constraints.price_max));
                if (ok) {
                    hh.appliances.push_back(std::move(spec));
                    return;
                }
                ++scenario.resample_count;
            }
            throw ConfigError("could not draw a feasible appliance after " +
                              std::to_string(kMaxResamples) + " attempts");
        };

        auto draw_interruptible = [&](const ShiftableGen& g) {
            draw_until([&]() -> ApplianceSpec {
                InterruptibleSpec s;
                s.energy_required = rng.next_real(g.energy.lo, g.energy.hi);
                s.power_min = 0.0;
                s.power_max = rng.next_real(g.power_max.lo, g.power_max.hi);
                s.window = draw_window(rng, g.start_hour, g.end_hour);
                clip_wait(g.max_wait, g.thresholds, s.window, s.max_wait, s.thresholds);
                return s;
            });
        };

        auto draw_noninterruptible = [&](const ShiftableGen& g) {
            draw_until([&]() -> ApplianceSpec {
                NonInterruptibleSpec s;
                s.energy_required = rng.next_real(g.energy.lo, g.energy.hi);
                s.duration = static_cast<int>(rng.next_int(g.duration_lo, g.duration_hi));
                s.power_min = 0.0;
                s.power_max = rng.next_real(g.power_max.lo, g.power_max.hi);
                s.window = draw_window(rng, g.start_hour, g.end_hour);
                clip_wait(g.max_wait, g.thresholds, s.window, s.max_wait, s.thresholds);
                return s;
            });
        };

        draw_interruptible(config.phev);
        draw_noninterruptible(config.dishwasher);
        draw_noninterruptible(config.washing_machine);

        draw_until([&]() -> ApplianceSpec {
            const CurtailableGen& g = config.air_conditioning;
            CurtailableSpec s;
            s.mode = g.mode;
            s.window = draw_window(rng, g.start_hour, g.end_hour);
            const int len = s.window.length();
            s.floor.resize(static_cast<std::size_t>(len));
            s.ceiling.resize(static_cast<std::size_t>(len));
            double floor_sum = 0.0, ceiling_sum = 0.0;
            for (int i = 0; i < len; ++i) {
                s.floor[static_cast<std::size_t>(i)] = rng.next_real(g.floor.lo, g.floor.hi);
                s.ceiling[static_cast<std::size_t>(i)] = rng.next_real(g.ceiling.lo, g.ceiling.hi);
                floor_sum += s.floor[static_cast<std::size_t>(i)];
                ceiling_sum += s.ceiling[static_cast<std::size_t>(i)];
            }
            if (s.mode == CurtailableMode::MaxConsumption) {
                s.budget = Money::from_pence(rng.next_real(g.budget.lo, g.budget.hi));
            } else {
                const double f = rng.next_real(g.min_total_fraction.lo, g.min_total_fraction.hi);
                s.min_total = floor_sum + f * (ceiling_sum - floor_sum);
            }
            return s;
        });

        hh.hourly_cap = rng.next_real(config.household_cap.lo, config.household_cap.hi);
        scenario.customers.push_back(std::move(hh));
    }
    return scenario;
}

nlohmann::json scenario_to_json(const Scenario& s) {
    return nlohmann::json{{"customers", s.customers},
                          {"cost_params", s.cost_params},
                          {"retailer_constraints", s.retailer_constraints},
                          {"ga_params", s.ga_params},
                          {"seed", s.seed}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario s;
    j.at("customers").get_to(s.customers);
    s.cost_params = j.at("cost_params").get<CostParams>();
    s.retailer_constraints = j.at("retailer_constraints").get<RetailerConstraints>();
    s.ga_params = j.at("ga_params").get<GaParams>();
    j.at("seed").get_to(s.seed);
    return s;
}

void save_scenario(const Scenario& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << scenario_to_json(s).dump(2) << '\n';
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    return scenario_from_json(j);
}

std::vector<DailyPrices> import_price_series(const std::string& path, double scale) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path, 0);

    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty file: " + path, 0);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "date,hour,price_pence_per_kwh")
        throw ParseError("expected header 'date,hour,price_pence_per_kwh'", line_no);

    // Preserve first-seen day order.
    std::vector<std::string> day_order;
    std::map<std::string, std::array<bool, kHorizonHours>> seen;
    std::map<std::string, PriceVector> days;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string date, hour_str, price_str;
        if (!std::getline(row, date, ',') || !std::getline(row, hour_str, ',') ||
            !std::getline(row, price_str))
            throw ParseError("expected 3 comma-separated columns", line_no);
        int hour = 0;
        double price = 0.0;
        try {
            hour = std::stoi(hour_str);
            price = std::stod(price_str);
        } catch (const std::exception&) {
            throw ParseError("bad number in row", line_no);
        }
        if (hour < 1 || hour > 24) throw ParseError("hour must be in 1..24", line_no);
        if (!(price * scale >= 0.0) || !std::isfinite(price * scale))
            throw ParseError("price must be finite and >= 0", line_no);

        if (days.find(date) == days.end()) {
            day_order.push_back(date);
            seen[date].fill(false);
        }
        // hour-ending h covers clock [h-1, h); slot 1 starts at 8AM
        const int slot_offset = slot_of_clock_hour(hour - 1).offset();
        if (seen[date][slot_offset]) throw ParseError("duplicate hour for " + date, line_no);
        seen[date][slot_offset] = true;
        days[date].at_offset(slot_offset) = Money::from_pence(price * scale);
    }

    std::vector<DailyPrices> out;
    out.reserve(day_order.size());
    for (const std::string& date : day_order) {
        std::vector<int> missing;
        for (int h = 0; h < kHorizonHours; ++h)
            if (!seen[date][h]) missing.push_back(h + 1);
        if (!missing.empty()) throw MissingHours(date, missing);
        out.push_back({date, days[date]});
    }
    return out;
}

}  // namespace gridlevel
