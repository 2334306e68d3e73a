#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gridlevel/retailer.hpp"
#include "gridlevel/rng.hpp"

namespace gridlevel {

struct GaParams {
    int num_islands = 15;
    int island_size = 40;
    double migration_rate = 0.2;
    int migration_interval = 10;  // generations between migrations
    int bits_per_gene = 10;       // per hourly price
    double mutation_prob = 0.01;  // per bit
    double crossover_prob = 0.9;  // per pair
    int tournament_size = 2;
    int elitism = 1;  // members copied unchanged per island
    int max_generations = 100;
    std::uint64_t seed = 0;

    friend bool operator==(const GaParams&, const GaParams&) = default;
};

/// Binary-encoded candidate pricing: 24 genes of bits_per_gene bits each.
struct Chromosome {
    std::vector<std::uint8_t> bits;
    std::optional<EvaluatedPricing> eval;  // cached; cleared by variation
};

/// One sub-population of the island model.
struct Island {
    std::vector<Chromosome> members;
    std::uint64_t rng_stream = 0;
};

/// Maps gene g (big-endian integer v) to price p_min + v*(p_max-p_min)/(2^bits-1),
/// rounded to money resolution; decoded prices always respect the bounds.
PriceVector decode(const Chromosome& chrom, const RetailerConstraints& constraints);

/// Draws k distinct members uniformly and returns the index of the best by
/// the feasibility rules; ties go to the lowest member index.
int tournament_select(const Island& island, int k, Rng& rng);

/// With probability 0.5 per position, swaps the parents' bits.
std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                    Rng& rng);

/// Flips each bit independently with probability mutation_prob.
Chromosome bitflip_mutate(const Chromosome& chrom, double mutation_prob, Rng& rng);

/// Ring migration: island i copies its top ceil(rate*size) members into
/// island (i+1) mod n, replacing that island's worst members.
void ring_migrate(std::vector<Island>& islands, double migration_rate);

/// Batch fitness contract: decoded candidate prices in, one evaluation per
/// candidate out, same order.
using PricingEvaluator =
    std::function<std::vector<EvaluatedPricing>(const std::vector<PriceVector>&)>;

struct GenerationStats {
    int generation = 0;
    EvaluatedPricing best;  // global best by the feasibility rules
    double mean_profit_pence = 0.0;
    double feasible_fraction = 0.0;
};

struct GaResult {
    EvaluatedPricing best;
    std::vector<GenerationStats> history;  // one entry per generation, including generation 0
};

using TelemetrySink = std::function<void(const GenerationStats&)>;

/// Runs the island-model GA: per-island selection/crossover/mutation with
/// elitism, periodic ring migration, fixed-generation stop. Deterministic for
/// a fixed seed; evaluator failures propagate.
GaResult optimize(const GaParams& params, const RetailerConstraints& constraints,
                  const PricingEvaluator& evaluator, const TelemetrySink& telemetry = {});

}  // namespace gridlevel
