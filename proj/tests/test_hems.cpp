#include <doctest.h>

#include <cmath>

#include "gridlevel/hems.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace gridlevel;
using namespace testutil;

namespace {

double real_bill(const PriceVector& prices, const ConsumptionSchedule& sched) {
    double total = 0.0;
    for (int h = 0; h < kHorizonHours; ++h) total += prices.at_offset(h).pence() * sched.load[h];
    return total;
}

double schedule_sum(const ConsumptionSchedule& sched) {
    double total = 0.0;
    for (double v : sched.load) total += v;
    return total;
}

}  // namespace

TEST_CASE("interruptible: uniform prices fill earliest slots first") {
    const PriceVector prices = make_prices({10, 10, 10, 10}, 10);
    const auto r = solve_interruptible(prices, make_interruptible(6.0, 0.0, 3.0, 1, 4), TimeWindow(1, 4));
    CHECK(r.bill == Money::from_whole_pence(60));
    CHECK(r.schedule.load[0] == 3.0);
    CHECK(r.schedule.load[1] == 3.0);
    CHECK(r.schedule.load[2] == 0.0);
    CHECK(r.schedule.load[3] == 0.0);
}

TEST_CASE("interruptible: cheapest hours get the energy") {
    const PriceVector prices = make_prices({12, 9, 11, 10});
    const auto r = solve_interruptible(prices, make_interruptible(5.0, 0.0, 3.0, 1, 4), TimeWindow(1, 4));
    CHECK(r.schedule.load[1] == 3.0);
    CHECK(r.schedule.load[3] == 2.0);
    CHECK(r.bill == Money::from_whole_pence(47));
    // brute-force vertex oracle agrees
    CHECK(oracles::min_bill_interruptible(prices, TimeWindow(1, 4), 5.0, 0.0, 3.0) ==
          doctest::Approx(47.0).epsilon(1e-12));
}

TEST_CASE("interruptible: saturated window is forced to power_max everywhere") {
    const PriceVector prices = make_prices({13, 8, 9, 11});
    const auto r = solve_interruptible(prices, make_interruptible(12.0, 0.0, 3.0, 1, 4), TimeWindow(1, 4));
    for (int h = 0; h < 4; ++h) CHECK(r.schedule.load[h] == 3.0);
}

TEST_CASE("interruptible: infeasible energy throws") {
    const PriceVector prices = make_prices({10, 10});
    CHECK_THROWS_AS(
        solve_interruptible(prices, make_interruptible(10.0, 0.0, 2.0, 1, 4), TimeWindow(1, 4)),
        SolveError);
}

TEST_CASE("non-interruptible: all starts equal picks the earliest") {
    const PriceVector prices = make_prices({10, 10, 10, 10});
    const auto r = solve_noninterruptible(prices, make_noninterruptible(2.0, 2, 0.0, 2.0, 1, 4),
                                          TimeWindow(1, 4));
    REQUIRE(r.start_slot.has_value());
    CHECK(r.start_slot->value() == 1);
    CHECK(r.bill == Money::from_whole_pence(20));
}

TEST_CASE("non-interruptible: valley prices pick the interior start") {
    const PriceVector prices = make_prices({14, 8, 8, 14});
    const auto r = solve_noninterruptible(prices, make_noninterruptible(3.0, 2, 0.0, 2.0, 1, 4),
                                          TimeWindow(1, 4));
    REQUIRE(r.start_slot.has_value());
    CHECK(r.start_slot->value() == 2);
    CHECK(r.schedule.load[1] == 2.0);
    CHECK(r.schedule.load[2] == 1.0);
    CHECK(r.bill == Money::from_whole_pence(24));
    CHECK(oracles::min_bill_noninterruptible(prices, TimeWindow(1, 4), 3.0, 2, 0.0, 2.0) ==
          doctest::Approx(24.0).epsilon(1e-12));
}

TEST_CASE("non-interruptible: window shorter than duration is infeasible") {
    const PriceVector prices = make_prices({10, 10, 10});
    CHECK_THROWS_AS(solve_noninterruptible(prices, make_noninterruptible(2.0, 5, 0.0, 2.0, 1, 3),
                                           TimeWindow(1, 3)),
                    SolveError);
}

TEST_CASE("curtailable min-bill fills cheap hours to the ceiling") {
    const PriceVector prices = make_prices({9, 8, 10});
    const auto r =
        solve_curtailable_min_bill(prices, make_min_bill(1, 3, {0, 0, 0}, {2, 2, 2}, 4.0));
    CHECK(r.schedule.load[0] == 2.0);
    CHECK(r.schedule.load[1] == 2.0);
    CHECK(r.schedule.load[2] == 0.0);
    CHECK(r.bill == Money::from_whole_pence(34));
    CHECK(oracles::min_bill_curtailable(prices, TimeWindow(1, 3), {0, 0, 0}, {2, 2, 2}, 4.0) ==
          doctest::Approx(34.0).epsilon(1e-12));
}

TEST_CASE("curtailable min-bill degenerate totals") {
    const PriceVector prices = make_prices({9, 8, 10});
    const std::vector<double> floor{0.5, 0.25, 0.75};
    const std::vector<double> ceiling{1.5, 2.0, 1.25};

    SUBCASE("min_total equals the floor sum") {
        const auto r = solve_curtailable_min_bill(prices, make_min_bill(1, 3, floor, ceiling, 1.5));
        for (int i = 0; i < 3; ++i) CHECK(r.schedule.load[i] == floor[static_cast<std::size_t>(i)]);
    }
    SUBCASE("min_total equals the ceiling sum") {
        const auto r = solve_curtailable_min_bill(prices, make_min_bill(1, 3, floor, ceiling, 4.75));
        for (int i = 0; i < 3; ++i) CHECK(r.schedule.load[i] == ceiling[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("curtailable budget mode buys the cheap hour first, fractional at the margin") {
    const PriceVector prices = make_prices({10, 20});
    const auto r = solve_curtailable_max_consumption(
        prices, make_max_consumption(1, 2, {0.5, 0.5}, {2.0, 2.0}, 35.0));
    CHECK(r.schedule.load[0] == 2.0);
    CHECK(r.schedule.load[1] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(schedule_sum(r.schedule) == doctest::Approx(2.75).epsilon(1e-12));
    CHECK(r.bill == Money::from_whole_pence(35));
    CHECK(oracles::max_consumption_curtailable(prices, TimeWindow(1, 2), {0.5, 0.5}, {2.0, 2.0},
                                               35.0) == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("curtailable budget mode degenerate budgets") {
    const PriceVector prices = make_prices({10, 20});
    SUBCASE("slack budget buys the ceiling") {
        const auto r = solve_curtailable_max_consumption(
            prices, make_max_consumption(1, 2, {0.5, 0.5}, {2.0, 2.0}, 100.0));
        CHECK(r.schedule.load[0] == 2.0);
        CHECK(r.schedule.load[1] == 2.0);
    }
    SUBCASE("budget exactly covering the floor buys the floor") {
        const auto r = solve_curtailable_max_consumption(
            prices, make_max_consumption(1, 2, {0.5, 0.5}, {2.0, 2.0}, 15.0));
        CHECK(r.schedule.load[0] == 0.5);
        CHECK(r.schedule.load[1] == 0.5);
        CHECK(r.bill == Money::from_whole_pence(15));
    }
    SUBCASE("floor beyond the budget is an error") {
        CHECK_THROWS_AS(solve_curtailable_max_consumption(
                            prices, make_max_consumption(1, 2, {0.5, 0.5}, {2.0, 2.0}, 10.0)),
                        SolveError);
    }
}

TEST_CASE("waiting benefit basics") {
    SUBCASE("k = 0 saves nothing") {
        const PriceVector prices = make_prices({14, 14, 8});
        const auto spec = make_interruptible(3.0, 0.0, 3.0, 1, 2, 1, {Money::from_whole_pence(1)});
        CHECK(waiting_benefit(prices, spec, 0) == Money{});
    }
    SUBCASE("uniform prices save nothing for any k") {
        const PriceVector prices = PriceVector::uniform(Money::from_whole_pence(10));
        const auto spec = make_interruptible(3.0, 0.0, 3.0, 1, 2, 3,
                                             std::vector<Money>(3, Money::from_whole_pence(1)));
        for (int k = 0; k <= 3; ++k) CHECK(waiting_benefit(prices, spec, k) == Money{});
    }
    SUBCASE("a cheaper extension slot is worth the move") {
        const PriceVector prices = make_prices({14, 14, 8});
        const auto spec = make_interruptible(3.0, 0.0, 3.0, 1, 2, 1, {Money::from_whole_pence(1)});
        CHECK(waiting_benefit(prices, spec, 1) == Money::from_whole_pence(18));
    }
}

TEST_CASE("optimal wait follows the threshold schedule") {
    // Savings by waiting 1/2/3 hours: 12, 30, 40 pence.
    const PriceVector prices = make_prices({100, 88, 70, 60});
    const std::vector<Money> thresholds{Money::from_whole_pence(10), Money::from_whole_pence(25),
                                        Money::from_whole_pence(45)};
    const auto spec = make_interruptible(1.0, 0.0, 1.0, 1, 1, 3, thresholds);

    CHECK(waiting_benefit(prices, spec, 1) == Money::from_whole_pence(12));
    CHECK(waiting_benefit(prices, spec, 2) == Money::from_whole_pence(30));
    CHECK(waiting_benefit(prices, spec, 3) == Money::from_whole_pence(40));

    SUBCASE("the largest qualifying saving wins") {
        const auto choice = optimal_wait(prices, spec);
        CHECK(choice.wait == 2);
        CHECK(choice.benefit == Money::from_whole_pence(30));
    }
    SUBCASE("no qualifying saving means no wait") {
        auto strict = spec;
        strict.thresholds = {Money::from_whole_pence(50), Money::from_whole_pence(50),
                             Money::from_whole_pence(50)};
        const auto choice = optimal_wait(prices, strict);
        CHECK(choice.wait == 0);
        CHECK(choice.benefit == Money{});
    }
    SUBCASE("equal savings pick the shortest wait") {
        const PriceVector flat_drop = make_prices({10, 5, 5, 5});
        auto zero_thresholds = spec;
        zero_thresholds.thresholds = {Money{}, Money{}, Money{}};
        const auto choice = optimal_wait(flat_drop, zero_thresholds);
        CHECK(choice.wait == 1);
        CHECK(choice.benefit == Money::from_whole_pence(5));
    }
}

TEST_CASE("optimal wait applies to non-interruptible appliances") {
    // 2-slot run; prices fall after the original window.
    const PriceVector prices = make_prices({14, 14, 14, 6, 6});
    const auto spec = make_noninterruptible(2.0, 2, 0.0, 1.0, 1, 3, 2,
                                            {Money::from_whole_pence(5), Money::from_whole_pence(10)});
    CHECK(waiting_benefit(prices, spec, 1) == Money::from_whole_pence(8));   // (14,6) vs (14,14)
    CHECK(waiting_benefit(prices, spec, 2) == Money::from_whole_pence(16));  // (6,6)
    const auto choice = optimal_wait(prices, spec);
    CHECK(choice.wait == 2);
    CHECK(choice.benefit == Money::from_whole_pence(16));
}

TEST_CASE("waits that overshoot a power_min floor drop out of the candidate set") {
    // 5-slot window, power_min 1: extending by 2 forces 7 kWh > 6 required.
    const PriceVector prices = make_prices({10, 10, 10, 10, 10, 2, 2, 2});
    const auto spec = make_interruptible(6.0, 1.0, 2.0, 1, 5, 3,
                                         {Money{}, Money{}, Money{}});
    const auto choice = optimal_wait(prices, spec);
    CHECK(choice.wait == 1);  // k=1 fits exactly; k=2,3 are infeasible
    CHECK(choice.benefit == Money::from_whole_pence(8));

    HouseholdSpec hh;
    hh.id = 1;
    hh.hourly_cap = 10.0;
    hh.appliances = {spec};
    const auto response = solve_household(prices, hh);
    CHECK(response.per_appliance[0].wait_used == 1);
}

TEST_CASE("household solve equals its single appliance") {
    const PriceVector prices = make_prices({12, 9, 11, 10});
    HouseholdSpec hh;
    hh.id = 7;
    hh.hourly_cap = 10.0;
    hh.appliances = {make_interruptible(5.0, 0.0, 3.0, 1, 4)};
    const auto response = solve_household(prices, hh);
    const auto direct = solve_interruptible(prices, std::get<InterruptibleSpec>(hh.appliances[0]),
                                            TimeWindow(1, 4));
    CHECK(response.bill == direct.bill);
    CHECK(response.total_schedule == direct.schedule);
    CHECK(response.customer_id == 7);
    CHECK(response.per_appliance.size() == 1);
}

TEST_CASE("household with disjoint windows concatenates schedules") {
    const PriceVector prices = make_prices({12, 9, 11, 10, 7, 13});
    HouseholdSpec hh;
    hh.id = 1;
    hh.hourly_cap = 10.0;
    hh.appliances = {make_interruptible(4.0, 0.0, 2.0, 1, 3),
                     make_interruptible(3.0, 0.0, 3.0, 4, 6)};
    const auto response = solve_household(prices, hh);
    const auto a = solve_interruptible(prices, std::get<InterruptibleSpec>(hh.appliances[0]),
                                       TimeWindow(1, 3));
    const auto b = solve_interruptible(prices, std::get<InterruptibleSpec>(hh.appliances[1]),
                                       TimeWindow(4, 6));
    for (int h = 0; h < kHorizonHours; ++h)
        CHECK(response.total_schedule.load[h] == a.schedule.load[h] + b.schedule.load[h]);
    CHECK(response.bill == a.bill + b.bill);
}

TEST_CASE("household cap violations are reported, not enforced") {
    const PriceVector prices = make_prices({10, 10});
    HouseholdSpec hh;
    hh.id = 1;
    hh.hourly_cap = 2.0;
    hh.appliances = {make_interruptible(6.0, 0.0, 3.0, 1, 2)};
    const auto response = solve_household(prices, hh);
    REQUIRE(response.cap_violations.size() == 2);
    CHECK(response.cap_violations[0].hour.value() == 1);
    CHECK(response.cap_violations[0].excess_kwh == doctest::Approx(1.0));
    CHECK(schedule_sum(response.total_schedule) == doctest::Approx(6.0));
}

TEST_CASE("household errors carry the appliance id") {
    const PriceVector prices = make_prices({10, 10});
    HouseholdSpec hh;
    hh.id = 42;
    hh.hourly_cap = 5.0;
    hh.appliances = {make_interruptible(2.0, 0.0, 3.0, 1, 2),
                     make_interruptible(50.0, 0.0, 3.0, 1, 2)};
    try {
        solve_household(prices, hh);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(e.customer_id == 42);
        CHECK(e.appliance_index == 1);
    }
}

TEST_CASE("property: greedy solvers match the vertex oracles on random grids") {
    Rng rng(2024);
    for (int trial = 0; trial < 250; ++trial) {
        const PriceVector prices = random_prices(rng);
        const int alpha = static_cast<int>(rng.next_int(1, 19));
        const int len = static_cast<int>(rng.next_int(1, 6));
        const TimeWindow window(alpha, alpha + len - 1);
        const double pmax = grid_draw(rng, 0.5, 2.5, 0.25);
        const double pmin = rng.next_bool(0.3) ? grid_draw(rng, 0.0, pmax, 0.25) : 0.0;

        {  // interruptible
            const double lo = pmin * len, hi = pmax * len;
            if (hi - lo >= 0.25) {
                const double energy = grid_draw(rng, lo + 0.25, hi, 0.25);
                InterruptibleSpec spec = make_interruptible(energy, pmin, pmax, alpha,
                                                            alpha + len - 1);
                const auto got = solve_interruptible(prices, spec, window);
                const double oracle =
                    oracles::min_bill_interruptible(prices, window, energy, pmin, pmax);
                CHECK(real_bill(prices, got.schedule) ==
                      doctest::Approx(oracle).epsilon(1e-9));
                CHECK(schedule_sum(got.schedule) == doctest::Approx(energy).epsilon(1e-12));
            }
        }
        {  // non-interruptible
            const int duration = static_cast<int>(rng.next_int(1, len));
            const double lo = pmin * duration, hi = pmax * duration;
            if (hi - lo >= 0.25) {
                const double energy = grid_draw(rng, lo + 0.25, hi, 0.25);
                NonInterruptibleSpec spec =
                    make_noninterruptible(energy, duration, pmin, pmax, alpha, alpha + len - 1);
                const auto got = solve_noninterruptible(prices, spec, window);
                const double oracle = oracles::min_bill_noninterruptible(prices, window, energy,
                                                                         duration, pmin, pmax);
                CHECK(real_bill(prices, got.schedule) ==
                      doctest::Approx(oracle).epsilon(1e-9));
            }
        }
        {  // curtailable, both modes
            std::vector<double> floor, ceiling;
            double floor_sum = 0.0, ceiling_sum = 0.0;
            for (int i = 0; i < len; ++i) {
                const double f = grid_draw(rng, 0.0, 0.75, 0.25);
                const double c = f + grid_draw(rng, 0.25, 1.5, 0.25);
                floor.push_back(f);
                ceiling.push_back(c);
                floor_sum += f;
                ceiling_sum += c;
            }
            const double min_total = grid_draw(rng, floor_sum, ceiling_sum, 0.25);
            const auto mb = solve_curtailable_min_bill(
                prices, make_min_bill(alpha, alpha + len - 1, floor, ceiling, min_total));
            const double mb_oracle =
                oracles::min_bill_curtailable(prices, window, floor, ceiling, min_total);
            CHECK(real_bill(prices, mb.schedule) == doctest::Approx(mb_oracle).epsilon(1e-9));

            const double budget = grid_draw(rng, 16.0 * floor_sum, 16.0 * ceiling_sum, 0.5);
            CurtailableSpec mc = make_max_consumption(alpha, alpha + len - 1, floor, ceiling, budget);
            try {
                const auto got = solve_curtailable_max_consumption(prices, mc);
                const double oracle = oracles::max_consumption_curtailable(prices, window, floor,
                                                                           ceiling, budget);
                CHECK(schedule_sum(got.schedule) == doctest::Approx(oracle).epsilon(1e-9));
                CHECK(got.bill <= mc.budget);
            } catch (const SolveError& e) {
                CHECK(e.kind == SolveError::Kind::FloorUnaffordable);
            }
        }
    }
}

TEST_CASE("property: waiting benefit is non-negative and non-decreasing") {
    Rng rng(515);
    for (int trial = 0; trial < 150; ++trial) {
        const PriceVector prices = random_prices(rng);
        const int alpha = static_cast<int>(rng.next_int(1, 12));
        const int len = static_cast<int>(rng.next_int(1, 5));
        const int beta = alpha + len - 1;
        const int max_wait = static_cast<int>(rng.next_int(1, std::min(4, 24 - beta)));
        const auto spec = make_interruptible(grid_draw(rng, 0.5, 2.0 * len, 0.25), 0.0, 2.0, alpha,
                                             beta, max_wait,
                                             std::vector<Money>(static_cast<std::size_t>(max_wait)));
        Money prev;
        for (int k = 0; k <= max_wait; ++k) {
            const Money benefit = waiting_benefit(prices, spec, k);
            CHECK(benefit >= Money{});
            CHECK(benefit >= prev);
            prev = benefit;
        }
    }
}

TEST_CASE("property: price scaling leaves argmin schedules unchanged") {
    Rng rng(616);
    for (int trial = 0; trial < 100; ++trial) {
        PriceVector prices = random_prices(rng);
        PriceVector doubled;
        for (int h = 0; h < kHorizonHours; ++h)
            doubled.at_offset(h) = Money::from_centipence(2 * prices.at_offset(h).centipence());

        const auto spec = make_interruptible(grid_draw(rng, 0.5, 5.0, 0.25), 0.0, 2.0, 2, 7);
        const auto base = solve_interruptible(prices, spec, spec.window);
        const auto scaled = solve_interruptible(doubled, spec, spec.window);
        CHECK(base.schedule == scaled.schedule);
        CHECK(real_bill(doubled, scaled.schedule) ==
              doctest::Approx(2.0 * real_bill(prices, base.schedule)).epsilon(1e-12));
    }
}

TEST_CASE("property: identical inputs give bit-identical outputs") {
    Rng rng(717);
    const PriceVector prices = random_prices(rng);
    HouseholdSpec hh;
    hh.id = 3;
    hh.hourly_cap = 6.0;
    hh.appliances = {make_interruptible(7.25, 0.0, 3.0, 11, 20, 3,
                                        {Money::from_whole_pence(10), Money::from_whole_pence(25),
                                         Money::from_whole_pence(45)}),
                     make_noninterruptible(2.5, 2, 0.0, 1.5, 4, 10),
                     make_max_consumption(9, 13, {0.5, 0.5, 0.5, 0.5, 0.5},
                                          {2.0, 2.0, 2.0, 2.0, 2.0}, 80.0)};
    const auto a = solve_household(prices, hh);
    const auto b = solve_household(prices, hh);
    CHECK(a.total_schedule == b.total_schedule);
    CHECK(a.bill == b.bill);
    for (std::size_t i = 0; i < a.per_appliance.size(); ++i) {
        CHECK(a.per_appliance[i].schedule == b.per_appliance[i].schedule);
        CHECK(a.per_appliance[i].bill == b.per_appliance[i].bill);
        CHECK(a.per_appliance[i].wait_used == b.per_appliance[i].wait_used);
    }
}

TEST_CASE("household bill matches the joint grid oracle on a small instance") {
    Rng rng(818);
    for (int trial = 0; trial < 10; ++trial) {
        const PriceVector prices = random_prices(rng);
        HouseholdSpec hh;
        hh.id = 1;
        hh.hourly_cap = 10.0;
        hh.appliances = {
            make_interruptible(grid_draw(rng, 0.5, 2.0, 0.5), 0.0, 1.0, 1, 3),
            make_noninterruptible(grid_draw(rng, 0.5, 1.5, 0.5), 2, 0.0, 1.0, 4, 7),
            make_min_bill(8, 9, {0.0, 0.5}, {1.0, 1.5}, grid_draw(rng, 0.5, 2.5, 0.5)),
        };
        const auto response = solve_household(prices, hh);
        double real_total = 0.0;
        for (const auto& r : response.per_appliance) real_total += real_bill(prices, r.schedule);
        const double oracle = oracles::joint_min_bill(prices, hh, 0.5);
        CHECK(real_total == doctest::Approx(oracle).epsilon(1e-9));
    }
}
