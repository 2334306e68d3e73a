#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridlevel/domain.hpp"
#include "gridlevel/ga.hpp"
#include "gridlevel/retailer.hpp"

namespace gridlevel {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, int line) : std::runtime_error(std::move(message)), line(line) {}
    int line;
};

class MissingHours : public std::runtime_error {
public:
    MissingHours(std::string date, std::vector<int> hours)
        : std::runtime_error("day " + date + " is missing hours"), date(std::move(date)),
          missing(std::move(hours)) {}
    std::string date;
    std::vector<int> missing;
};

/// Continuous uniform range [lo, hi].
struct Range {
    double lo = 0.0;
    double hi = 0.0;
};

/// Discrete uniform range of clock hours (0-23), inclusive.
struct ClockRange {
    int lo = 0;
    int hi = 0;
};

/// Draw table for one interruptible or non-interruptible appliance class.
/// Windows are drawn as clock hours: the start hour opens the window and the
/// end hour closes it, so the last occupied slot is the one ending at
/// end_hour.
struct ShiftableGen {
    Range energy;
    Range power_max;  // power_min is 0
    ClockRange start_hour;
    ClockRange end_hour;
    int duration_lo = 0;  // non-interruptible only, slots
    int duration_hi = 0;
    int max_wait = 0;
    std::vector<Money> thresholds;
};

/// Draw table for a curtailable appliance class; floor/ceiling are drawn per
/// window hour.
struct CurtailableGen {
    CurtailableMode mode = CurtailableMode::MaxConsumption;
    Range floor;
    Range ceiling;
    ClockRange start_hour;
    ClockRange end_hour;
    Range budget;              // pence, MaxConsumption mode
    Range min_total_fraction;  // MinBill mode: position of min_total between the bound sums
};

struct ScenarioConfig {
    int num_customers = 100;
    std::uint64_t seed = 1;
    ShiftableGen phev;
    ShiftableGen dishwasher;
    ShiftableGen washing_machine;
    CurtailableGen air_conditioning;
    Range household_cap;
    CostParams cost_params;
    RetailerConstraints retailer_constraints;
    GaParams ga_params;
};

struct Scenario {
    std::vector<HouseholdSpec> customers;
    CostParams cost_params;
    RetailerConstraints retailer_constraints;
    GaParams ga_params;
    std::uint64_t seed = 0;
    int resample_count = 0;  // infeasible draws replaced during generation
};

/// The stock configuration: 4 appliances per household (PHEV, dishwasher,
/// washing machine, air conditioning on a budget), price band 8-14 pence,
/// day/night quadratic cost, revenue cap of 255 pence per customer.
ScenarioConfig default_config(int num_customers = 100, std::uint64_t seed = 1);

/// Draws a heterogeneous customer population. Deterministic per seed with
/// per-customer streams: growing num_customers leaves earlier households
/// unchanged. Every generated household passes validate_household; infeasible
/// draws are resampled and counted.
Scenario generate_scenario(const ScenarioConfig& config);

nlohmann::json scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const nlohmann::json& j);
void save_scenario(const Scenario& s, const std::string& path);
Scenario load_scenario(const std::string& path);

/// One imported day of hourly prices.
struct DailyPrices {
    std::string date;
    PriceVector prices;
};

/// Reads `date,hour,price_pence_per_kwh` CSV (hour 1-24 is the local
/// hour-ending) and remaps each day onto the 8AM-anchored horizon. `scale`
/// multiplies every price (for series quoted in other units).
std::vector<DailyPrices> import_price_series(const std::string& path, double scale = 1.0);

}  // namespace gridlevel
