#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "gridlevel/money.hpp"

namespace gridlevel {

/// Number of one-hour slots in the scheduling horizon. Slot 1 starts at 8AM,
/// slot 24 ends at 8AM the next day.
inline constexpr int kHorizonHours = 24;

/// 1-based hour slot of the scheduling horizon.
class HourIndex {
public:
    explicit HourIndex(int value) : value_(value) {
        if (value < 1 || value > kHorizonHours)
            throw std::out_of_range("HourIndex out of [1,24]: " + std::to_string(value));
    }

    int value() const { return value_; }
    /// 0-based array offset.
    int offset() const { return value_ - 1; }

    friend auto operator<=>(HourIndex, HourIndex) = default;

private:
    int value_;
};

/// Maps a clock hour (0-23) to the horizon slot that starts at it.
inline HourIndex slot_of_clock_hour(int clock_hour) {
    return HourIndex(((clock_hour - 8) % 24 + 24) % 24 + 1);
}

/// 24 hourly retail prices in pence/kWh; the upper-level decision variable.
class PriceVector {
public:
    PriceVector() { prices_.fill(Money{}); }

    static PriceVector uniform(Money p) {
        PriceVector v;
        v.prices_.fill(p);
        return v;
    }

    Money at(HourIndex h) const { return prices_[h.offset()]; }
    Money& at(HourIndex h) { return prices_[h.offset()]; }
    Money at_offset(int i) const { return prices_[static_cast<std::size_t>(i)]; }
    Money& at_offset(int i) { return prices_[static_cast<std::size_t>(i)]; }

    const std::array<Money, kHorizonHours>& values() const { return prices_; }

    friend bool operator==(const PriceVector&, const PriceVector&) = default;

private:
    std::array<Money, kHorizonHours> prices_;
};

/// A contiguous range of slots [alpha, beta], both inclusive.
struct TimeWindow {
    HourIndex alpha;
    HourIndex beta;

    TimeWindow(HourIndex a, HourIndex b) : alpha(a), beta(b) {
        if (a > b) throw std::invalid_argument("TimeWindow: alpha > beta");
    }
    TimeWindow(int a, int b) : TimeWindow(HourIndex(a), HourIndex(b)) {}

    int length() const { return beta.value() - alpha.value() + 1; }
    bool contains(HourIndex h) const { return alpha <= h && h <= beta; }

    /// Window with the end pushed k slots later.
    TimeWindow extended(int k) const { return TimeWindow(alpha, HourIndex(beta.value() + k)); }

    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// A 24-hour consumption profile in kWh per slot.
struct ConsumptionSchedule {
    std::array<double, kHorizonHours> load{};

    double at(HourIndex h) const { return load[h.offset()]; }
    double& at(HourIndex h) { return load[h.offset()]; }

    double total() const {
        double s = 0.0;
        for (double v : load) s += v;
        return s;
    }

    ConsumptionSchedule& operator+=(const ConsumptionSchedule& o) {
        for (int i = 0; i < kHorizonHours; ++i) load[i] += o.load[i];
        return *this;
    }

    friend bool operator==(const ConsumptionSchedule&, const ConsumptionSchedule&) = default;
};

/// Load whose energy can be split arbitrarily across its window (PHEV-like).
struct InterruptibleSpec {
    double energy_required = 0.0;  // kWh over the window
    double power_min = 0.0;        // kWh per slot
    double power_max = 0.0;        // kWh per slot
    TimeWindow window{1, 1};
    int max_wait = 0;               // hours the end may be postponed
    std::vector<Money> thresholds;  // savings required to accept wait k, one per k

    friend bool operator==(const InterruptibleSpec&, const InterruptibleSpec&) = default;
};

/// Load that must run for `duration` consecutive slots once started.
struct NonInterruptibleSpec {
    double energy_required = 0.0;
    int duration = 1;  // consecutive operating slots
    double power_min = 0.0;
    double power_max = 0.0;
    TimeWindow window{1, 1};
    int max_wait = 0;
    std::vector<Money> thresholds;

    friend bool operator==(const NonInterruptibleSpec&, const NonInterruptibleSpec&) = default;
};

enum class CurtailableMode {
    MinBill,         // minimize bill subject to a total-consumption floor
    MaxConsumption,  // maximize consumption subject to a spending budget
};

/// Load that runs for the whole window at an adjustable level per hour.
struct CurtailableSpec {
    CurtailableMode mode = CurtailableMode::MinBill;
    TimeWindow window{1, 1};
    std::vector<double> floor;    // kWh per window slot, size == window.length()
    std::vector<double> ceiling;  // kWh per window slot
    double min_total = 0.0;       // MinBill only
    Money budget;                 // MaxConsumption only

    friend bool operator==(const CurtailableSpec&, const CurtailableSpec&) = default;
};

using ApplianceSpec = std::variant<InterruptibleSpec, NonInterruptibleSpec, CurtailableSpec>;

struct HouseholdSpec {
    int id = 0;
    std::vector<ApplianceSpec> appliances;
    double hourly_cap = 0.0;  // kWh; reported against, not enforced in solves

    friend bool operator==(const HouseholdSpec&, const HouseholdSpec&) = default;
};

/// One invariant or feasibility failure found by validate_household.
struct Violation {
    int appliance_index = -1;  // -1 for household-level problems
    std::string code;
    std::string detail;
};

/// Checks type invariants and per-appliance feasibility. Returns an empty
/// list iff every appliance sub-problem is solvable for some price vector.
std::vector<Violation> validate_household(const HouseholdSpec& spec);

}  // namespace gridlevel
