#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gridlevel/ga.hpp"
#include "gridlevel/harness.hpp"
#include "gridlevel/scenario.hpp"

namespace gridlevel {

/// Builds a transport over a household population; the default is in-process.
using TransportFactory =
    std::function<std::unique_ptr<MeterTransport>(const std::vector<HouseholdSpec>&)>;

struct ExperimentOptions {
    std::string out_dir;  // empty: no artifact files
    int threads = 0;      // in-process evaluation threads; 0 = hardware
    TransportFactory transport_factory;
};

struct ExperimentReport {
    std::string experiment;
    std::string scenario_hash;  // binds results to the exact inputs
    nlohmann::json metrics;
    std::vector<std::string> artifacts;  // emitted CSV/JSONL paths
};

/// FNV-1a over the canonical scenario JSON, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

/// Composes the meter transport with retailer scoring into the GA's batch
/// fitness contract.
PricingEvaluator make_evaluator(MeterTransport& transport, const CostParams& cost,
                                const RetailerConstraints& constraints);

/// Price-inelastic behavior: shiftable appliances run at power_max from the
/// window start until their energy is consumed (final slot fractional),
/// curtailable appliances follow their ceiling profile, waiting is off.
ConsumptionSchedule flat_baseline_schedule(const HouseholdSpec& household);

/// Copy with waiting disabled for every shiftable appliance.
HouseholdSpec without_waiting(HouseholdSpec household);

/// First generation whose feasible best profit reaches `fraction` of the
/// final feasible best; -1 if the trace never becomes feasible.
int generations_to_fraction(const std::vector<GenerationStats>& history, double fraction);

/// Convergence study: multi-population vs single-population (one island of
/// the same total size) for each customer count.
ExperimentReport run_convergence(const ScenarioConfig& base_config, const std::vector<int>& counts,
                                 const ExperimentOptions& options = {});

struct ArmMetrics {
    Money revenue;
    Money cost;
    Money profit;
};

struct CompareOutcome {
    ArmMetrics dayahead;
    ArmMetrics flat;
    Money flat_price;          // pence/kWh, same for every hour
    bool flat_price_clipped = false;
    EvaluatedPricing dayahead_best;
};

/// Optimized day-ahead pricing (revenue cap = revenue_target) against the
/// flat tariff that collects the same target revenue from the inelastic
/// baseline load.
ExperimentReport run_flat_vs_dayahead(const Scenario& scenario, Money revenue_target,
                                      const ExperimentOptions& options = {},
                                      CompareOutcome* outcome = nullptr);

struct DayBills {
    std::string date;
    Money optimized;      // energy management on, waiting as configured
    Money wait_disabled;  // energy management on, waiting off
    Money baseline;       // flat behavior billed at the day's prices
};

/// Bills one customer over an imported price series, with and without the
/// energy management scheme.
ExperimentReport run_monthly_bills(const Scenario& scenario, const std::string& price_series_path,
                                   int customer_id = 1, const ExperimentOptions& options = {},
                                   std::vector<DayBills>* outcome = nullptr);

}  // namespace gridlevel
