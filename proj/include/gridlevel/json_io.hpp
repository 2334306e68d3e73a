#pragma once

#include <json.hpp>

#include "gridlevel/domain.hpp"
#include "gridlevel/ga.hpp"
#include "gridlevel/retailer.hpp"

// JSON mappings for the domain types. Money travels as pence (two-decimal
// values round-trip exactly at the fixed-point resolution); energy travels as
// kWh doubles, which nlohmann prints with round-trip-exact precision.

namespace gridlevel {

void to_json(nlohmann::json& j, const Money& m);
void from_json(const nlohmann::json& j, Money& m);

void to_json(nlohmann::json& j, const PriceVector& p);
void from_json(const nlohmann::json& j, PriceVector& p);

void to_json(nlohmann::json& j, const ConsumptionSchedule& s);
void from_json(const nlohmann::json& j, ConsumptionSchedule& s);

void to_json(nlohmann::json& j, const InterruptibleSpec& s);
void from_json(const nlohmann::json& j, InterruptibleSpec& s);

void to_json(nlohmann::json& j, const NonInterruptibleSpec& s);
void from_json(const nlohmann::json& j, NonInterruptibleSpec& s);

void to_json(nlohmann::json& j, const CurtailableSpec& s);
void from_json(const nlohmann::json& j, CurtailableSpec& s);

void to_json(nlohmann::json& j, const ApplianceSpec& s);
void from_json(const nlohmann::json& j, ApplianceSpec& s);

void to_json(nlohmann::json& j, const HouseholdSpec& s);
void from_json(const nlohmann::json& j, HouseholdSpec& s);

void to_json(nlohmann::json& j, const CostParams& p);
void from_json(const nlohmann::json& j, CostParams& p);

void to_json(nlohmann::json& j, const RetailerConstraints& c);
void from_json(const nlohmann::json& j, RetailerConstraints& c);

void to_json(nlohmann::json& j, const GaParams& p);
void from_json(const nlohmann::json& j, GaParams& p);

}  // namespace gridlevel

namespace nlohmann {

template <>
struct adl_serializer<gridlevel::HourIndex> {
    static void to_json(json& j, const gridlevel::HourIndex& h) { j = h.value(); }
    static gridlevel::HourIndex from_json(const json& j) {
        return gridlevel::HourIndex(j.get<int>());
    }
};

template <>
struct adl_serializer<gridlevel::TimeWindow> {
    static void to_json(json& j, const gridlevel::TimeWindow& w) {
        j = json{{"alpha", w.alpha.value()}, {"beta", w.beta.value()}};
    }
    static gridlevel::TimeWindow from_json(const json& j) {
        return gridlevel::TimeWindow(gridlevel::HourIndex(j.at("alpha").get<int>()),
                                     gridlevel::HourIndex(j.at("beta").get<int>()));
    }
};

}  // namespace nlohmann
