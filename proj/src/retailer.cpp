#include "gridlevel/retailer.hpp"

#include <algorithm>

namespace gridlevel {

Money supply_cost(const ConsumptionSchedule& load, const CostParams& params) {
    double total = 0.0;
    for (int h = 0; h < kHorizonHours; ++h) {
        const double l = load.load[h];
        total += params.a[h] * l * l + params.b[h] * l + params.c[h];
    }
    return Money::from_pence(total);
}

EvaluatedPricing evaluate_pricing(const PriceVector& prices,
                                  const ConsumptionSchedule& aggregate_load,
                                  const CostParams& params,
                                  const RetailerConstraints& constraints) {
    EvaluatedPricing out;
    out.prices = prices;
    out.aggregate_load = aggregate_load;

    double revenue_pence = 0.0;
    for (int h = 0; h < kHorizonHours; ++h)
        revenue_pence += prices.at_offset(h).pence() * aggregate_load.load[h];
    out.revenue = Money::from_pence(revenue_pence);
    out.supply_cost = supply_cost(aggregate_load, params);
    out.profit = out.revenue - out.supply_cost;

    // Each excess is normalized by its bound so heterogeneous constraint
    // violations are commensurate under the feasibility rules.
    double violation = 0.0;
    for (int h = 0; h < kHorizonHours; ++h) {
        const double p = prices.at_offset(h).pence();
        const double pmax = constraints.price_max.at_offset(h).pence();
        const double pmin = constraints.price_min.at_offset(h).pence();
        if (p > pmax) violation += (p - pmax) / pmax;
        if (p < pmin) violation += (pmin - p) / pmax;
        const double excess_load = aggregate_load.load[h] - constraints.hourly_supply_cap;
        if (excess_load > 0.0) violation += excess_load / constraints.hourly_supply_cap;
    }
    if (out.revenue > constraints.revenue_cap)
        violation += static_cast<double>((out.revenue - constraints.revenue_cap).centipence()) /
                     static_cast<double>(constraints.revenue_cap.centipence());

    out.violation = violation;
    out.feasible = violation == 0.0;
    return out;
}

int deb_compare(const EvaluatedPricing& x, const EvaluatedPricing& y) {
    if (x.feasible != y.feasible) return x.feasible ? 1 : -1;
    if (x.feasible) {
        if (x.profit != y.profit) return x.profit > y.profit ? 1 : -1;
        return 0;
    }
    if (x.violation != y.violation) return x.violation < y.violation ? 1 : -1;
    return 0;
}

}  // namespace gridlevel
