#include "gridlevel/hems.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace gridlevel {

namespace {

// Absolute slack used only to absorb float drift when an instance sits
// exactly on its feasibility boundary (e.g. E == power_max * |window|).
constexpr double kFeasEps = 1e-9;

// Hour offsets 0..23 sorted by (price, hour); the shared tie rule
// "cheaper first, then earlier" for every greedy fill.
struct PriceOrder {
    std::array<int, kHorizonHours> hours;

    explicit PriceOrder(const PriceVector& prices) {
        for (int i = 0; i < kHorizonHours; ++i) hours[i] = i;
        std::stable_sort(hours.begin(), hours.end(), [&](int a, int b) {
            return prices.at_offset(a) < prices.at_offset(b);
        });
    }
};

// Bill of `sched` over [lo, hi] offsets, summed in hour order so identical
// schedules always produce bit-identical bills.
double bill_pence(const PriceVector& prices, const ConsumptionSchedule& sched, int lo, int hi) {
    double total = 0.0;
    for (int i = lo; i <= hi; ++i) total += prices.at_offset(i).pence() * sched.load[i];
    return total;
}

// Continuous knapsack with box constraints: power_min everywhere, then the
// residual energy in ascending price order up to power_max. Returns false
// when more than kFeasEps of energy cannot be placed.
bool greedy_fill(const PriceOrder& order, const TimeWindow& window, double energy, double power_min,
                 double power_max, ConsumptionSchedule& sched) {
    const int lo = window.alpha.offset();
    const int hi = window.beta.offset();
    for (int i = lo; i <= hi; ++i) sched.load[i] = power_min;
    const double cap = power_max - power_min;
    double remaining = energy - power_min * window.length();
    if (remaining < -kFeasEps) return false;
    if (remaining > 0.0 && cap > 0.0) {
        for (int h : order.hours) {
            if (h < lo || h > hi) continue;
            if (remaining >= cap) {
                sched.load[h] = power_max;
                remaining -= cap;
            } else {
                sched.load[h] = power_min + remaining;
                remaining = 0.0;
            }
            if (remaining <= 0.0) break;
        }
    }
    return remaining <= kFeasEps;
}

void check_interruptible(const InterruptibleSpec& spec, const TimeWindow& window) {
    if (!(spec.energy_required > 0.0) || spec.power_min < 0.0 || spec.power_min > spec.power_max)
        throw SolveError(SolveError::Kind::Infeasible, "interruptible: bad parameters");
    if (spec.energy_required > spec.power_max * window.length() + kFeasEps)
        throw SolveError(SolveError::Kind::Infeasible,
                         "interruptible: energy_required exceeds window capacity");
    if (spec.power_min > 0.0 &&
        spec.power_min * window.length() > spec.energy_required + kFeasEps)
        throw SolveError(SolveError::Kind::Infeasible,
                         "interruptible: power_min forces more energy than required");
}

ApplianceResult solve_interruptible_on(const PriceVector& prices, const PriceOrder& order,
                                       const InterruptibleSpec& spec, const TimeWindow& window) {
    check_interruptible(spec, window);
    ApplianceResult result;
    if (!greedy_fill(order, window, spec.energy_required, spec.power_min, spec.power_max,
                     result.schedule))
        throw SolveError(SolveError::Kind::Infeasible, "interruptible: energy does not fit");
    result.bill = Money::from_pence(
        bill_pence(prices, result.schedule, window.alpha.offset(), window.beta.offset()));
    return result;
}

void check_noninterruptible(const NonInterruptibleSpec& spec, const TimeWindow& window) {
    if (!(spec.energy_required > 0.0) || spec.duration < 1 || spec.power_min < 0.0 ||
        spec.power_min > spec.power_max)
        throw SolveError(SolveError::Kind::Infeasible, "non-interruptible: bad parameters");
    if (spec.duration > window.length())
        throw SolveError(SolveError::Kind::Infeasible,
                         "non-interruptible: window shorter than duration");
    if (spec.energy_required > spec.duration * spec.power_max + kFeasEps ||
        spec.energy_required < spec.duration * spec.power_min - kFeasEps)
        throw SolveError(SolveError::Kind::Infeasible,
                         "non-interruptible: energy outside duration power range");
}

// Fixed-start sub-problem: the interruptible greedy restricted to the
// `duration` slots beginning at offset `start`.
ApplianceResult solve_fixed_start(const PriceVector& prices, const PriceOrder& order,
                                  const NonInterruptibleSpec& spec, int start) {
    ApplianceResult result;
    const TimeWindow run(HourIndex(start + 1), HourIndex(start + spec.duration));
    if (!greedy_fill(order, run, spec.energy_required, spec.power_min, spec.power_max,
                     result.schedule))
        throw SolveError(SolveError::Kind::Infeasible, "non-interruptible: energy does not fit");
    result.bill =
        Money::from_pence(bill_pence(prices, result.schedule, start, start + spec.duration - 1));
    result.start_slot = HourIndex(start + 1);
    return result;
}

ApplianceResult solve_noninterruptible_on(const PriceVector& prices, const PriceOrder& order,
                                          const NonInterruptibleSpec& spec,
                                          const TimeWindow& window) {
    check_noninterruptible(spec, window);
    std::optional<ApplianceResult> best;
    const int first = window.alpha.offset();
    const int last = window.beta.offset() - spec.duration + 1;
    for (int s = first; s <= last; ++s) {
        ApplianceResult cand = solve_fixed_start(prices, order, spec, s);
        if (!best || cand.bill < best->bill) best = std::move(cand);
    }
    return *best;
}

void check_curtailable(const CurtailableSpec& spec) {
    const std::size_t n = static_cast<std::size_t>(spec.window.length());
    if (spec.floor.size() != n || spec.ceiling.size() != n)
        throw SolveError(SolveError::Kind::Infeasible, "curtailable: bounds arrays wrong length");
    for (std::size_t i = 0; i < n; ++i)
        if (!(spec.floor[i] >= 0.0 && spec.floor[i] <= spec.ceiling[i]))
            throw SolveError(SolveError::Kind::Infeasible, "curtailable: floor above ceiling");
}

ApplianceResult solve_curtailable_min_bill_on(const PriceVector& prices, const PriceOrder& order,
                                              const CurtailableSpec& spec) {
    check_curtailable(spec);
    const int lo = spec.window.alpha.offset();
    const int hi = spec.window.beta.offset();
    double floor_sum = 0.0, ceiling_sum = 0.0;
    for (std::size_t i = 0; i < spec.floor.size(); ++i) {
        floor_sum += spec.floor[i];
        ceiling_sum += spec.ceiling[i];
    }
    if (spec.min_total < floor_sum - kFeasEps || spec.min_total > ceiling_sum + kFeasEps)
        throw SolveError(SolveError::Kind::Infeasible,
                         "curtailable: min_total outside [floor sum, ceiling sum]");

    ApplianceResult result;
    for (int i = lo; i <= hi; ++i) result.schedule.load[i] = spec.floor[i - lo];
    double remaining = spec.min_total - floor_sum;
    if (remaining > 0.0) {
        for (int h : order.hours) {
            if (h < lo || h > hi) continue;
            const double cap = spec.ceiling[h - lo] - spec.floor[h - lo];
            if (cap <= 0.0) continue;
            if (remaining >= cap) {
                result.schedule.load[h] = spec.ceiling[h - lo];
                remaining -= cap;
            } else {
                result.schedule.load[h] += remaining;
                remaining = 0.0;
            }
            if (remaining <= 0.0) break;
        }
    }
    result.bill = Money::from_pence(bill_pence(prices, result.schedule, lo, hi));
    return result;
}

ApplianceResult solve_curtailable_max_consumption_on(const PriceVector& prices,
                                                     const PriceOrder& order,
                                                     const CurtailableSpec& spec) {
    check_curtailable(spec);
    const int lo = spec.window.alpha.offset();
    const int hi = spec.window.beta.offset();

    ApplianceResult result;
    for (int i = lo; i <= hi; ++i) result.schedule.load[i] = spec.floor[i - lo];
    double spent = bill_pence(prices, result.schedule, lo, hi);
    if (Money::from_pence(spent) > spec.budget)
        throw SolveError(SolveError::Kind::FloorUnaffordable,
                         "curtailable: floor consumption alone exceeds the budget");

    const double budget = spec.budget.pence();
    for (int h : order.hours) {
        if (h < lo || h > hi) continue;
        const double headroom = spec.ceiling[h - lo] - spec.floor[h - lo];
        if (headroom <= 0.0) continue;
        const double left = budget - spent;
        if (left <= 0.0) break;
        const double price = prices.at_offset(h).pence();
        const double affordable = price > 0.0 ? left / price : headroom;
        if (affordable >= headroom) {
            result.schedule.load[h] = spec.ceiling[h - lo];
            spent += price * headroom;
        } else {
            result.schedule.load[h] += affordable;
            spent += price * affordable;
            break;  // budget exhausted at the marginal hour
        }
    }
    result.bill = Money::from_pence(bill_pence(prices, result.schedule, lo, hi));
    return result;
}

// Bills (and solutions) for every waiting length 0..max_wait in one pass.
// Non-interruptible solves are incremental: extending the window by one hour
// adds exactly one candidate start.
template <typename Spec>
std::vector<ApplianceResult> solve_for_all_waits(const PriceVector& prices, const PriceOrder& order,
                                                 const Spec& spec) {
    std::vector<ApplianceResult> by_wait;
    by_wait.reserve(static_cast<std::size_t>(spec.max_wait) + 1);
    const int max_wait = std::min(spec.max_wait, kHorizonHours - spec.window.beta.value());
    if constexpr (std::is_same_v<Spec, InterruptibleSpec>) {
        for (int k = 0; k <= max_wait; ++k) {
            // With power_min > 0 a long extension can overshoot the energy
            // budget; such waits simply stop being candidates.
            try {
                by_wait.push_back(
                    solve_interruptible_on(prices, order, spec, spec.window.extended(k)));
            } catch (const SolveError&) {
                if (k == 0) throw;
                break;
            }
        }
    } else {
        check_noninterruptible(spec, spec.window);
        std::optional<ApplianceResult> best;
        const int first = spec.window.alpha.offset();
        for (int k = 0; k <= max_wait; ++k) {
            const int last = spec.window.beta.offset() + k - spec.duration + 1;
            const int from = k == 0 ? first : last;  // only the newly reachable start
            for (int s = from; s <= last; ++s) {
                ApplianceResult cand = solve_fixed_start(prices, order, spec, s);
                if (!best || cand.bill < best->bill) best = std::move(cand);
            }
            by_wait.push_back(*best);
        }
    }
    return by_wait;
}

template <typename Spec>
WaitChoice choose_wait(const Spec& spec, const std::vector<ApplianceResult>& by_wait) {
    if (static_cast<int>(spec.thresholds.size()) != spec.max_wait)
        throw SolveError(SolveError::Kind::Infeasible,
                         "waiting: thresholds must have one entry per waiting hour");
    WaitChoice choice;
    const Money base = by_wait[0].bill;
    const int reachable = static_cast<int>(by_wait.size()) - 1;
    for (int k = 1; k <= reachable; ++k) {
        const Money saving = base - by_wait[static_cast<std::size_t>(k)].bill;
        if (saving >= spec.thresholds[static_cast<std::size_t>(k - 1)] && saving > choice.benefit)
            choice = {k, saving};  // strict '>' keeps the smallest k on ties
    }
    return choice;
}

template <typename Spec>
ApplianceResult solve_with_wait(const PriceVector& prices, const PriceOrder& order,
                                const Spec& spec) {
    const auto by_wait = solve_for_all_waits(prices, order, spec);
    const WaitChoice choice = choose_wait(spec, by_wait);
    ApplianceResult result = by_wait[static_cast<std::size_t>(choice.wait)];
    result.wait_used = choice.wait;
    return result;
}

}  // namespace

ApplianceResult solve_interruptible(const PriceVector& prices, const InterruptibleSpec& spec,
                                    const TimeWindow& window) {
    return solve_interruptible_on(prices, PriceOrder(prices), spec, window);
}

ApplianceResult solve_noninterruptible(const PriceVector& prices, const NonInterruptibleSpec& spec,
                                       const TimeWindow& window) {
    return solve_noninterruptible_on(prices, PriceOrder(prices), spec, window);
}

ApplianceResult solve_curtailable_min_bill(const PriceVector& prices, const CurtailableSpec& spec) {
    return solve_curtailable_min_bill_on(prices, PriceOrder(prices), spec);
}

ApplianceResult solve_curtailable_max_consumption(const PriceVector& prices,
                                                  const CurtailableSpec& spec) {
    return solve_curtailable_max_consumption_on(prices, PriceOrder(prices), spec);
}

Money waiting_benefit(const PriceVector& prices, const InterruptibleSpec& spec, int k) {
    if (k < 0 || k > spec.max_wait)
        throw SolveError(SolveError::Kind::Infeasible, "waiting: k outside [0, max_wait]");
    if (spec.window.beta.value() + k > kHorizonHours)
        throw SolveError(SolveError::Kind::Infeasible, "waiting: extension past the horizon");
    const PriceOrder order(prices);
    const Money base = solve_interruptible_on(prices, order, spec, spec.window).bill;
    const Money waited = solve_interruptible_on(prices, order, spec, spec.window.extended(k)).bill;
    return base - waited;
}

Money waiting_benefit(const PriceVector& prices, const NonInterruptibleSpec& spec, int k) {
    if (k < 0 || k > spec.max_wait)
        throw SolveError(SolveError::Kind::Infeasible, "waiting: k outside [0, max_wait]");
    if (spec.window.beta.value() + k > kHorizonHours)
        throw SolveError(SolveError::Kind::Infeasible, "waiting: extension past the horizon");
    const PriceOrder order(prices);
    const Money base = solve_noninterruptible_on(prices, order, spec, spec.window).bill;
    const Money waited =
        solve_noninterruptible_on(prices, order, spec, spec.window.extended(k)).bill;
    return base - waited;
}

WaitChoice optimal_wait(const PriceVector& prices, const InterruptibleSpec& spec) {
    const PriceOrder order(prices);
    return choose_wait(spec, solve_for_all_waits(prices, order, spec));
}

WaitChoice optimal_wait(const PriceVector& prices, const NonInterruptibleSpec& spec) {
    const PriceOrder order(prices);
    return choose_wait(spec, solve_for_all_waits(prices, order, spec));
}

HouseholdResponse solve_household(const PriceVector& prices, const HouseholdSpec& household) {
    const PriceOrder order(prices);
    HouseholdResponse response;
    response.customer_id = household.id;
    response.per_appliance.reserve(household.appliances.size());

    for (std::size_t i = 0; i < household.appliances.size(); ++i) {
        try {
            ApplianceResult r = std::visit(
                [&](const auto& spec) -> ApplianceResult {
                    using S = std::decay_t<decltype(spec)>;
                    if constexpr (std::is_same_v<S, CurtailableSpec>) {
                        return spec.mode == CurtailableMode::MinBill
                                   ? solve_curtailable_min_bill_on(prices, order, spec)
                                   : solve_curtailable_max_consumption_on(prices, order, spec);
                    } else {
                        return solve_with_wait(prices, order, spec);
                    }
                },
                household.appliances[i]);
            response.total_schedule += r.schedule;
            response.bill += r.bill;
            response.per_appliance.push_back(std::move(r));
        } catch (const SolveError& e) {
            throw SolveError(e.kind,
                             "customer " + std::to_string(household.id) + " appliance " +
                                 std::to_string(i) + ": " + e.what(),
                             household.id, static_cast<int>(i));
        }
    }

    for (int h = 0; h < kHorizonHours; ++h) {
        const double excess = response.total_schedule.load[h] - household.hourly_cap;
        if (excess > 0.0) response.cap_violations.push_back({HourIndex(h + 1), excess});
    }
    return response;
}

}  // namespace gridlevel
