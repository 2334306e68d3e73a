#pragma once

#include <array>

#include "gridlevel/domain.hpp"

namespace gridlevel {

/// Hourly quadratic supply-cost coefficients: cost(L) = a*L^2 + b*L + c.
struct CostParams {
    std::array<double, kHorizonHours> a{};  // pence/kWh^2, > 0
    std::array<double, kHorizonHours> b{};  // pence/kWh, >= 0
    std::array<double, kHorizonHours> c{};  // pence, >= 0

    friend bool operator==(const CostParams&, const CostParams&) = default;
};

struct RetailerConstraints {
    PriceVector price_min;
    PriceVector price_max;
    double hourly_supply_cap = 0.0;  // kWh per hour aggregate
    Money revenue_cap;

    friend bool operator==(const RetailerConstraints&, const RetailerConstraints&) = default;
};

/// A candidate price vector scored against the aggregate customer response.
struct EvaluatedPricing {
    PriceVector prices;
    ConsumptionSchedule aggregate_load;
    Money revenue;
    Money supply_cost;
    Money profit;       // revenue - supply_cost
    double violation = 0.0;  // sum of normalized constraint excesses
    bool feasible = false;   // violation == 0

    friend bool operator==(const EvaluatedPricing&, const EvaluatedPricing&) = default;
};

/// Sum over hours of a*L^2 + b*L + c, rounded once to money resolution.
Money supply_cost(const ConsumptionSchedule& load, const CostParams& params);

EvaluatedPricing evaluate_pricing(const PriceVector& prices, const ConsumptionSchedule& aggregate_load,
                                  const CostParams& params, const RetailerConstraints& constraints);

/// Feasibility-rule ordering: feasible beats infeasible, feasible compare by
/// profit, infeasible by violation. Returns >0 when x wins, <0 when y wins,
/// 0 on a tie.
int deb_compare(const EvaluatedPricing& x, const EvaluatedPricing& y);

/// Strict "x is better than y" form of deb_compare.
inline bool deb_better(const EvaluatedPricing& x, const EvaluatedPricing& y) {
    return deb_compare(x, y) > 0;
}

}  // namespace gridlevel
