#include "gridlevel/json_io.hpp"

namespace gridlevel {

using nlohmann::json;

void to_json(json& j, const Money& m) { j = m.pence(); }
void from_json(const json& j, Money& m) { m = Money::from_pence(j.get<double>()); }

void to_json(json& j, const PriceVector& p) {
    j = json::array();
    for (int h = 0; h < kHorizonHours; ++h) j.push_back(p.at_offset(h));
}

void from_json(const json& j, PriceVector& p) {
    if (!j.is_array() || j.size() != kHorizonHours)
        throw std::invalid_argument("price vector must have 24 entries");
    for (int h = 0; h < kHorizonHours; ++h) {
        const Money m = j.at(static_cast<std::size_t>(h)).get<Money>();
        if (m < Money{}) throw std::invalid_argument("prices must be >= 0");
        p.at_offset(h) = m;
    }
}

void to_json(json& j, const ConsumptionSchedule& s) { j = s.load; }

void from_json(const json& j, ConsumptionSchedule& s) {
    if (!j.is_array() || j.size() != kHorizonHours)
        throw std::invalid_argument("consumption schedule must have 24 entries");
    for (int h = 0; h < kHorizonHours; ++h) s.load[h] = j.at(static_cast<std::size_t>(h)).get<double>();
}

void to_json(json& j, const InterruptibleSpec& s) {
    j = json{{"type", "interruptible"},
             {"energy_required", s.energy_required},
             {"power_min", s.power_min},
             {"power_max", s.power_max},
             {"window", s.window},
             {"max_wait", s.max_wait},
             {"thresholds", s.thresholds}};
}

void from_json(const json& j, InterruptibleSpec& s) {
    j.at("energy_required").get_to(s.energy_required);
    j.at("power_min").get_to(s.power_min);
    j.at("power_max").get_to(s.power_max);
    s.window = j.at("window").get<TimeWindow>();
    j.at("max_wait").get_to(s.max_wait);
    j.at("thresholds").get_to(s.thresholds);
}

void to_json(json& j, const NonInterruptibleSpec& s) {
    j = json{{"type", "non_interruptible"},
             {"energy_required", s.energy_required},
             {"duration", s.duration},
             {"power_min", s.power_min},
             {"power_max", s.power_max},
             {"window", s.window},
             {"max_wait", s.max_wait},
             {"thresholds", s.thresholds}};
}

void from_json(const json& j, NonInterruptibleSpec& s) {
    j.at("energy_required").get_to(s.energy_required);
    j.at("duration").get_to(s.duration);
    j.at("power_min").get_to(s.power_min);
    j.at("power_max").get_to(s.power_max);
    s.window = j.at("window").get<TimeWindow>();
    j.at("max_wait").get_to(s.max_wait);
    j.at("thresholds").get_to(s.thresholds);
}

void to_json(json& j, const CurtailableSpec& s) {
    j = json{{"type", "curtailable"},
             {"mode", s.mode == CurtailableMode::MinBill ? "min_bill" : "max_consumption"},
             {"window", s.window},
             {"floor", s.floor},
             {"ceiling", s.ceiling}};
    if (s.mode == CurtailableMode::MinBill)
        j["min_total"] = s.min_total;
    else
        j["budget"] = s.budget;
}

void from_json(const json& j, CurtailableSpec& s) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "min_bill")
        s.mode = CurtailableMode::MinBill;
    else if (mode == "max_consumption")
        s.mode = CurtailableMode::MaxConsumption;
    else
        throw std::invalid_argument("unknown curtailable mode: " + mode);
    s.window = j.at("window").get<TimeWindow>();
    j.at("floor").get_to(s.floor);
    j.at("ceiling").get_to(s.ceiling);
    s.min_total = 0.0;
    s.budget = Money{};
    if (s.mode == CurtailableMode::MinBill)
        j.at("min_total").get_to(s.min_total);
    else
        s.budget = j.at("budget").get<Money>();
}

void to_json(json& j, const ApplianceSpec& s) {
    std::visit([&j](const auto& spec) { j = spec; }, s);
}

void from_json(const json& j, ApplianceSpec& s) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "interruptible")
        s = j.get<InterruptibleSpec>();
    else if (type == "non_interruptible")
        s = j.get<NonInterruptibleSpec>();
    else if (type == "curtailable")
        s = j.get<CurtailableSpec>();
    else
        throw std::invalid_argument("unknown appliance type: " + type);
}

void to_json(json& j, const HouseholdSpec& s) {
    j = json{{"id", s.id}, {"appliances", s.appliances}, {"hourly_cap", s.hourly_cap}};
}

void from_json(const json& j, HouseholdSpec& s) {
    j.at("id").get_to(s.id);
    j.at("appliances").get_to(s.appliances);
    j.at("hourly_cap").get_to(s.hourly_cap);
}

void to_json(json& j, const CostParams& p) {
    j = json{{"a", p.a}, {"b", p.b}, {"c", p.c}};
}

void from_json(const json& j, CostParams& p) {
    j.at("a").get_to(p.a);
    j.at("b").get_to(p.b);
    j.at("c").get_to(p.c);
}

void to_json(json& j, const RetailerConstraints& c) {
    j = json{{"price_min", c.price_min},
             {"price_max", c.price_max},
             {"hourly_supply_cap", c.hourly_supply_cap},
             {"revenue_cap", c.revenue_cap}};
}

void from_json(const json& j, RetailerConstraints& c) {
    c.price_min = j.at("price_min").get<PriceVector>();
    c.price_max = j.at("price_max").get<PriceVector>();
    j.at("hourly_supply_cap").get_to(c.hourly_supply_cap);
    c.revenue_cap = j.at("revenue_cap").get<Money>();
}

void to_json(json& j, const GaParams& p) {
    j = json{{"num_islands", p.num_islands},
             {"island_size", p.island_size},
             {"migration_rate", p.migration_rate},
             {"migration_interval", p.migration_interval},
             {"bits_per_gene", p.bits_per_gene},
             {"mutation_prob", p.mutation_prob},
             {"crossover_prob", p.crossover_prob},
             {"tournament_size", p.tournament_size},
             {"elitism", p.elitism},
             {"max_generations", p.max_generations},
             {"seed", p.seed}};
}

void from_json(const json& j, GaParams& p) {
    j.at("num_islands").get_to(p.num_islands);
    j.at("island_size").get_to(p.island_size);
    j.at("migration_rate").get_to(p.migration_rate);
    j.at("migration_interval").get_to(p.migration_interval);
    j.at("bits_per_gene").get_to(p.bits_per_gene);
    j.at("mutation_prob").get_to(p.mutation_prob);
    j.at("crossover_prob").get_to(p.crossover_prob);
    j.at("tournament_size").get_to(p.tournament_size);
    j.at("elitism").get_to(p.elitism);
    j.at("max_generations").get_to(p.max_generations);
    j.at("seed").get_to(p.seed);
}

}  // namespace gridlevel
