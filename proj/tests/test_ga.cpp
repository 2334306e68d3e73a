#include <doctest.h>

#include <algorithm>
#include <set>

#include "gridlevel/ga.hpp"
#include "test_util.hpp"

using namespace gridlevel;
using namespace testutil;

namespace {

RetailerConstraints band_8_14() {
    RetailerConstraints c;
    c.price_min = PriceVector::uniform(Money::from_whole_pence(8));
    c.price_max = PriceVector::uniform(Money::from_whole_pence(14));
    c.hourly_supply_cap = 1e6;
    c.revenue_cap = Money::from_whole_pence(100000);
    return c;
}

Chromosome chromosome_of_genes(const std::vector<std::uint64_t>& genes, int bits_per_gene) {
    Chromosome c;
    c.bits.resize(static_cast<std::size_t>(kHorizonHours * bits_per_gene), 0);
    for (int h = 0; h < kHorizonHours && h < static_cast<int>(genes.size()); ++h)
        for (int b = 0; b < bits_per_gene; ++b)
            c.bits[static_cast<std::size_t>(h * bits_per_gene + b)] =
                (genes[static_cast<std::size_t>(h)] >> (bits_per_gene - 1 - b)) & 1u;
    return c;
}

EvaluatedPricing eval_with(double profit_pence, bool feasible, double violation = 0.0) {
    EvaluatedPricing e;
    e.profit = Money::from_pence(profit_pence);
    e.feasible = feasible;
    e.violation = feasible ? 0.0 : violation;
    return e;
}

Island island_of(std::vector<EvaluatedPricing> evals) {
    Island island;
    for (auto& e : evals) {
        Chromosome c;
        c.bits.assign(24, 0);
        c.eval = std::move(e);
        island.members.push_back(std::move(c));
    }
    return island;
}

// Price-elastic toy demand: load falls linearly with price. Deterministic and
// cheap, so GA mechanics can be tested without the meter harness.
PricingEvaluator elastic_evaluator(const RetailerConstraints& constraints, const CostParams& cost) {
    return [constraints, cost](const std::vector<PriceVector>& batch) {
        std::vector<EvaluatedPricing> out;
        out.reserve(batch.size());
        for (const PriceVector& prices : batch) {
            ConsumptionSchedule load;
            for (int h = 0; h < kHorizonHours; ++h)
                load.load[h] = std::max(0.0, 30.0 - 1.8 * prices.at_offset(h).pence());
            out.push_back(evaluate_pricing(prices, load, cost, constraints));
        }
        return out;
    };
}

CostParams flat_cost(double a) {
    CostParams p;
    p.a.fill(a);
    p.b.fill(0.0);
    p.c.fill(0.0);
    return p;
}

}  // namespace

TEST_CASE("decode maps gene extremes onto the price bounds") {
    const auto constraints = band_8_14();
    const int bits = 10;
    const auto zeros = chromosome_of_genes(std::vector<std::uint64_t>(24, 0), bits);
    const auto ones = chromosome_of_genes(std::vector<std::uint64_t>(24, 1023), bits);
    CHECK(decode(zeros, constraints).at_offset(0) == Money::from_whole_pence(8));
    CHECK(decode(ones, constraints).at_offset(0) == Money::from_whole_pence(14));

    // 8 + 511*6/1023 = 10.997... rounds to 11.00 pence
    const auto mid = chromosome_of_genes(std::vector<std::uint64_t>(24, 511), bits);
    CHECK(decode(mid, constraints).at_offset(0) == Money::from_whole_pence(11));
}

TEST_CASE("property: decoded prices always respect the band") {
    const auto constraints = band_8_14();
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        Chromosome c;
        c.bits.resize(24 * 10);
        for (auto& b : c.bits) b = rng.next_bool(0.5) ? 1 : 0;
        const PriceVector p = decode(c, constraints);
        for (int h = 0; h < kHorizonHours; ++h) {
            CHECK(p.at_offset(h) >= constraints.price_min.at_offset(h));
            CHECK(p.at_offset(h) <= constraints.price_max.at_offset(h));
        }
    }
}

TEST_CASE("full tournament always returns the island best") {
    auto island = island_of({eval_with(10, true), eval_with(50, true), eval_with(30, true),
                             eval_with(49, true)});
    Rng rng(1);
    for (int i = 0; i < 10; ++i)
        CHECK(tournament_select(island, static_cast<int>(island.members.size()), rng) == 1);
}

TEST_CASE("tournament of two prefers the feasible contestant") {
    auto island = island_of({eval_with(1, true), eval_with(1000, false, 0.5)});
    Rng rng(2);
    for (int i = 0; i < 10; ++i) CHECK(tournament_select(island, 2, rng) == 0);
}

TEST_CASE("tournament ties go to the lower member index") {
    auto island = island_of({eval_with(7, true), eval_with(7, true), eval_with(7, true)});
    Rng rng(3);
    for (int i = 0; i < 10; ++i)
        CHECK(tournament_select(island, static_cast<int>(island.members.size()), rng) == 0);
}

TEST_CASE("crossover of identical parents returns the parents") {
    Rng rng(4);
    Chromosome a;
    a.bits = {1, 0, 1, 1, 0, 0, 1, 0};
    const auto [ca, cb] = uniform_crossover(a, a, rng);
    CHECK(ca.bits == a.bits);
    CHECK(cb.bits == a.bits);
}

TEST_CASE("crossover conserves the bit multiset at every position") {
    Rng rng(6);
    for (int trial = 0; trial < 50; ++trial) {
        Chromosome a, b;
        a.bits.resize(48);
        b.bits.resize(48);
        for (std::size_t i = 0; i < a.bits.size(); ++i) {
            a.bits[i] = rng.next_bool(0.5);
            b.bits[i] = rng.next_bool(0.5);
        }
        const auto [ca, cb] = uniform_crossover(a, b, rng);
        for (std::size_t i = 0; i < a.bits.size(); ++i)
            CHECK(static_cast<int>(ca.bits[i]) + cb.bits[i] ==
                  static_cast<int>(a.bits[i]) + b.bits[i]);
    }
}

TEST_CASE("mutation probability extremes") {
    Rng rng(7);
    Chromosome a;
    a.bits = {1, 0, 1, 0, 1, 1, 0, 0};
    CHECK(bitflip_mutate(a, 0.0, rng).bits == a.bits);
    const auto flipped = bitflip_mutate(a, 1.0, rng);
    for (std::size_t i = 0; i < a.bits.size(); ++i) CHECK(flipped.bits[i] == (a.bits[i] ^ 1));
}

TEST_CASE("mutation flips about P_m * length bits over many trials") {
    Rng rng(8);
    const double pm = 0.01;
    const int trials = 2000, length = 240;
    long flips = 0;
    Chromosome a;
    a.bits.assign(length, 0);
    for (int t = 0; t < trials; ++t) {
        const auto m = bitflip_mutate(a, pm, rng);
        for (int i = 0; i < length; ++i) flips += m.bits[static_cast<std::size_t>(i)];
    }
    const double n = static_cast<double>(trials) * length;
    const double expected = n * pm;
    const double sigma = std::sqrt(n * pm * (1 - pm));
    CHECK(std::abs(flips - expected) <= 3.0 * sigma);
}

TEST_CASE("ring migration on a single island is a no-op") {
    std::vector<Island> islands(1);
    islands[0] = island_of({eval_with(1, true), eval_with(2, true)});
    const auto before = islands[0].members.size();
    ring_migrate(islands, 0.2);
    CHECK(islands[0].members.size() == before);
}

TEST_CASE("ring migration replaces each island's worst with the neighbor's best") {
    // Table II shape: rate 0.2 of 40 members -> 8 emigrants.
    std::vector<Island> islands(3);
    for (int i = 0; i < 3; ++i) {
        std::vector<EvaluatedPricing> evals;
        for (int m = 0; m < 40; ++m)
            evals.push_back(eval_with(1000.0 * i + m, true));  // island 2 is globally best
        islands[static_cast<std::size_t>(i)] = island_of(std::move(evals));
    }
    ring_migrate(islands, 0.2);
    for (const auto& island : islands) CHECK(island.members.size() == 40);

    // island 1 now holds island 0's top 8 (profits 32..39) in place of its worst
    std::multiset<double> profits;
    for (const auto& m : islands[1].members) profits.insert(m.eval->profit.pence());
    for (int top = 32; top < 40; ++top) CHECK(profits.count(top) == 1);
    for (int worst = 1000; worst < 1008; ++worst) CHECK(profits.count(worst) == 0);

    // the global best member (2039) is still present somewhere
    bool found = false;
    for (const auto& island : islands)
        for (const auto& m : island.members)
            if (m.eval->profit == Money::from_pence(2039.0)) found = true;
    CHECK(found);
}

TEST_CASE("optimize with zero generations returns the best of the initial population") {
    const auto constraints = band_8_14();
    GaParams params;
    params.num_islands = 3;
    params.island_size = 10;
    params.max_generations = 0;
    params.seed = 11;
    const auto result = optimize(params, constraints, elastic_evaluator(constraints, flat_cost(1e-3)));
    CHECK(result.history.size() == 1);
    CHECK(result.best == result.history[0].best);
}

TEST_CASE("optimize is deterministic for a fixed seed") {
    const auto constraints = band_8_14();
    GaParams params;
    params.num_islands = 4;
    params.island_size = 12;
    params.max_generations = 20;
    params.migration_interval = 5;
    params.seed = 12345;
    const auto evaluator = elastic_evaluator(constraints, flat_cost(1e-3));
    const auto a = optimize(params, constraints, evaluator);
    const auto b = optimize(params, constraints, evaluator);
    CHECK(a.best == b.best);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].best == b.history[i].best);
        CHECK(a.history[i].mean_profit_pence == b.history[i].mean_profit_pence);
        CHECK(a.history[i].feasible_fraction == b.history[i].feasible_fraction);
    }
}

TEST_CASE("optimize trace is non-decreasing and has max_generations + 1 entries") {
    const auto constraints = band_8_14();
    GaParams params;
    params.num_islands = 5;
    params.island_size = 10;
    params.max_generations = 30;
    params.seed = 99;
    int telemetry_lines = 0;
    const auto result = optimize(params, constraints, elastic_evaluator(constraints, flat_cost(1e-3)),
                                 [&](const GenerationStats&) { ++telemetry_lines; });
    CHECK(result.history.size() == 31);
    CHECK(telemetry_lines == 31);
    Money prev = Money::from_pence(-1e15);
    for (const auto& g : result.history) {
        REQUIRE(g.best.feasible);  // toy demand keeps everything feasible
        CHECK(g.best.profit >= prev);
        prev = g.best.profit;
        CHECK(g.generation >= 0);
        CHECK(g.feasible_fraction == 1.0);
    }
}

TEST_CASE("tiny lattice: GA reaches the enumerated optimum") {
    // Two free hours, 3 bits each; everything else pinned at 10 pence.
    RetailerConstraints constraints = band_8_14();
    for (int h = 2; h < kHorizonHours; ++h) {
        constraints.price_min.at_offset(h) = Money::from_whole_pence(10);
        constraints.price_max.at_offset(h) = Money::from_whole_pence(10);
    }
    constraints.revenue_cap = Money::from_whole_pence(7000);
    const auto cost = flat_cost(2e-3);
    const auto evaluator = elastic_evaluator(constraints, cost);

    // Exhaustive sweep of the 8x8 decoded lattice.
    EvaluatedPricing lattice_best;
    bool first = true;
    for (std::uint64_t v1 = 0; v1 < 8; ++v1) {
        for (std::uint64_t v2 = 0; v2 < 8; ++v2) {
            const auto chrom = chromosome_of_genes({v1, v2}, 3);
            const auto evals = evaluator({decode(chrom, constraints)});
            if (first || deb_better(evals[0], lattice_best)) lattice_best = evals[0];
            first = false;
        }
    }
    REQUIRE(lattice_best.feasible);

    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GaParams params;
        params.num_islands = 2;
        params.island_size = 12;
        params.bits_per_gene = 3;
        params.max_generations = 15;
        params.migration_interval = 5;
        params.seed = seed;
        const auto result = optimize(params, constraints, evaluator);
        if (result.best.feasible &&
            result.best.profit.pence() >= 0.995 * lattice_best.profit.pence())
            ++hits;
    }
    CHECK(hits >= 4);
}
