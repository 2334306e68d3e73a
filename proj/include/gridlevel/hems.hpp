#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gridlevel/domain.hpp"

namespace gridlevel {

/// Raised when an appliance sub-problem has no feasible schedule.
class SolveError : public std::runtime_error {
public:
    enum class Kind { Infeasible, FloorUnaffordable };

    SolveError(Kind kind, std::string message, int customer_id = -1, int appliance_index = -1)
        : std::runtime_error(std::move(message)),
          kind(kind),
          customer_id(customer_id),
          appliance_index(appliance_index) {}

    Kind kind;
    int customer_id;
    int appliance_index;
};

/// Optimal schedule and bill for a single appliance.
struct ApplianceResult {
    ConsumptionSchedule schedule;
    Money bill;
    int wait_used = 0;                    // hours of accepted postponement (0 for curtailable)
    std::optional<HourIndex> start_slot;  // non-interruptible only
};

struct CapViolation {
    HourIndex hour;
    double excess_kwh;
};

/// The lower-level optimum for one customer: the per-appliance results summed.
struct HouseholdResponse {
    int customer_id = 0;
    ConsumptionSchedule total_schedule;
    Money bill;
    std::vector<ApplianceResult> per_appliance;
    std::vector<CapViolation> cap_violations;  // hours where hourly_cap is exceeded (reported only)
};

/// Minimizes the bill of an interruptible appliance over `window`: every slot
/// gets power_min, the remaining energy goes to slots in ascending price
/// order (ties to the earlier hour) up to power_max.
ApplianceResult solve_interruptible(const PriceVector& prices, const InterruptibleSpec& spec,
                                    const TimeWindow& window);

/// Tries every feasible start slot in `window` and keeps the cheapest
/// fixed-start solution; ties go to the earliest start.
ApplianceResult solve_noninterruptible(const PriceVector& prices, const NonInterruptibleSpec& spec,
                                       const TimeWindow& window);

/// Floor everywhere, then raises the cheapest hours toward the ceiling until
/// min_total is reached.
ApplianceResult solve_curtailable_min_bill(const PriceVector& prices, const CurtailableSpec& spec);

/// Floor everywhere, then spends the remaining budget on the cheapest hours,
/// fractionally at the marginal hour, maximizing total consumption.
ApplianceResult solve_curtailable_max_consumption(const PriceVector& prices,
                                                  const CurtailableSpec& spec);

/// Bill saved by extending the scheduling window k hours: minBill(window) -
/// minBill(window extended by k). Non-negative and non-decreasing in k.
Money waiting_benefit(const PriceVector& prices, const InterruptibleSpec& spec, int k);
Money waiting_benefit(const PriceVector& prices, const NonInterruptibleSpec& spec, int k);

struct WaitChoice {
    int wait = 0;
    Money benefit;
};

/// Picks the waiting length: among k with saving >= threshold C_k, the one
/// with the largest saving (ties to the smaller k); (0, 0) when none qualify.
WaitChoice optimal_wait(const PriceVector& prices, const InterruptibleSpec& spec);
WaitChoice optimal_wait(const PriceVector& prices, const NonInterruptibleSpec& spec);

/// Solves every appliance independently (shiftable ones on their
/// wait-extended window) and sums the results; by separability this is the
/// joint household optimum.
HouseholdResponse solve_household(const PriceVector& prices, const HouseholdSpec& household);

}  // namespace gridlevel
