#include "gridlevel/domain.hpp"

#include <cmath>
#include <numeric>
#include <set>

namespace gridlevel {

namespace {

void check_positive_finite(std::vector<Violation>& out, int idx, double v, const char* code,
                           const char* what) {
    if (!(std::isfinite(v) && v > 0.0))
        out.push_back({idx, code, std::string(what) + " must be finite and > 0"});
}

void validate_waiting(std::vector<Violation>& out, int idx, const TimeWindow& window, int max_wait,
                      const std::vector<Money>& thresholds) {
    if (max_wait < 0) {
        out.push_back({idx, "negative-wait", "max_wait must be >= 0"});
        return;
    }
    if (window.beta.value() + max_wait > kHorizonHours)
        out.push_back({idx, "wait-past-horizon", "window end plus max_wait exceeds slot 24"});
    if (static_cast<int>(thresholds.size()) != max_wait)
        out.push_back({idx, "threshold-count",
                       "expected " + std::to_string(max_wait) + " thresholds, got " +
                           std::to_string(thresholds.size())});
    for (Money c : thresholds)
        if (c < Money{}) out.push_back({idx, "negative-threshold", "thresholds must be >= 0"});
}

void validate_appliance(std::vector<Violation>& out, int idx, const InterruptibleSpec& s) {
    check_positive_finite(out, idx, s.energy_required, "bad-energy", "energy_required");
    if (!(s.power_min >= 0.0 && s.power_min <= s.power_max))
        out.push_back({idx, "bad-power-bounds", "need 0 <= power_min <= power_max"});
    validate_waiting(out, idx, s.window, s.max_wait, s.thresholds);
    const double cap = s.power_max * s.window.length();
    if (s.energy_required > cap)
        out.push_back({idx, "infeasible-energy",
                       "energy_required exceeds power_max * window length (" +
                           std::to_string(s.energy_required) + " > " + std::to_string(cap) + ")"});
    if (s.power_min > 0.0 && s.power_min * s.window.length() > s.energy_required)
        out.push_back({idx, "infeasible-energy",
                       "power_min * window length exceeds energy_required"});
}

void validate_appliance(std::vector<Violation>& out, int idx, const NonInterruptibleSpec& s) {
    check_positive_finite(out, idx, s.energy_required, "bad-energy", "energy_required");
    if (s.duration < 1) out.push_back({idx, "bad-duration", "duration must be >= 1"});
    if (!(s.power_min >= 0.0 && s.power_min <= s.power_max))
        out.push_back({idx, "bad-power-bounds", "need 0 <= power_min <= power_max"});
    validate_waiting(out, idx, s.window, s.max_wait, s.thresholds);
    if (s.duration > s.window.length())
        out.push_back({idx, "window-too-short",
                       "duration " + std::to_string(s.duration) + " exceeds window of " +
                           std::to_string(s.window.length()) + " slots"});
    if (s.duration >= 1) {
        if (s.energy_required > s.duration * s.power_max)
            out.push_back({idx, "infeasible-energy",
                           "energy_required exceeds duration * power_max"});
        if (s.energy_required < s.duration * s.power_min)
            out.push_back({idx, "infeasible-energy",
                           "energy_required below duration * power_min"});
    }
}

void validate_appliance(std::vector<Violation>& out, int idx, const CurtailableSpec& s) {
    const std::size_t n = static_cast<std::size_t>(s.window.length());
    if (s.floor.size() != n || s.ceiling.size() != n) {
        out.push_back({idx, "bad-bounds-length",
                       "floor/ceiling arrays must have one entry per window slot"});
        return;
    }
    double floor_sum = 0.0, ceiling_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::isfinite(s.floor[i]) && std::isfinite(s.ceiling[i]) && s.floor[i] >= 0.0 &&
              s.floor[i] <= s.ceiling[i])) {
            out.push_back({idx, "bad-bounds",
                           "need 0 <= floor <= ceiling at window slot " + std::to_string(i)});
            return;
        }
        floor_sum += s.floor[i];
        ceiling_sum += s.ceiling[i];
    }
    if (s.mode == CurtailableMode::MinBill) {
        if (!(floor_sum <= s.min_total && s.min_total <= ceiling_sum))
            out.push_back({idx, "min-total-range",
                           "min_total must lie between the floor and ceiling sums"});
    } else {
        if (s.budget < Money{}) out.push_back({idx, "negative-budget", "budget must be >= 0"});
    }
}

}  // namespace

std::vector<Violation> validate_household(const HouseholdSpec& spec) {
    std::vector<Violation> out;
    if (spec.appliances.empty()) out.push_back({-1, "no-appliances", "household has no appliances"});
    if (!(std::isfinite(spec.hourly_cap) && spec.hourly_cap >= 0.0))
        out.push_back({-1, "bad-hourly-cap", "hourly_cap must be finite and >= 0"});
    for (std::size_t i = 0; i < spec.appliances.size(); ++i) {
        const int idx = static_cast<int>(i);
        std::visit([&](const auto& s) { validate_appliance(out, idx, s); }, spec.appliances[i]);
    }
    return out;
}

}  // namespace gridlevel
