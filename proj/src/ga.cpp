#include "gridlevel/ga.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gridlevel {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
}

void validate(const GaParams& p) {
    require(p.num_islands >= 1, "num_islands must be >= 1");
    require(p.island_size >= 2, "island_size must be >= 2");
    require(p.migration_rate > 0.0 && p.migration_rate < 1.0, "migration_rate must be in (0,1)");
    require(p.migration_interval >= 1, "migration_interval must be >= 1");
    require(p.bits_per_gene >= 1 && p.bits_per_gene <= 30, "bits_per_gene must be in [1,30]");
    require(p.mutation_prob >= 0.0 && p.mutation_prob <= 1.0, "mutation_prob must be in [0,1]");
    require(p.crossover_prob >= 0.0 && p.crossover_prob <= 1.0, "crossover_prob must be in [0,1]");
    require(p.tournament_size >= 1 && p.tournament_size <= p.island_size,
            "tournament_size must be in [1, island_size]");
    require(p.elitism >= 0 && p.elitism < p.island_size, "elitism must be in [0, island_size)");
    require(p.max_generations >= 0, "max_generations must be >= 0");
}

// Member indices sorted best-first by the feasibility rules, stable so that
// equal members keep their island order.
std::vector<int> ranked_indices(const Island& island) {
    std::vector<int> idx(island.members.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return deb_better(*island.members[static_cast<std::size_t>(a)].eval,
                          *island.members[static_cast<std::size_t>(b)].eval);
    });
    return idx;
}

Chromosome random_chromosome(int bits, Rng& rng) {
    Chromosome c;
    c.bits.resize(static_cast<std::size_t>(bits));
    for (auto& b : c.bits) b = rng.next_bool(0.5) ? 1 : 0;
    return c;
}

}  // namespace

PriceVector decode(const Chromosome& chrom, const RetailerConstraints& constraints) {
    require(!chrom.bits.empty() && chrom.bits.size() % kHorizonHours == 0,
            "chromosome length must be a positive multiple of 24");
    const int bits_per_gene = static_cast<int>(chrom.bits.size()) / kHorizonHours;
    const double levels = std::ldexp(1.0, bits_per_gene) - 1.0;  // 2^bits - 1
    PriceVector prices;
    for (int h = 0; h < kHorizonHours; ++h) {
        std::uint64_t v = 0;
        for (int b = 0; b < bits_per_gene; ++b)
            v = (v << 1) | chrom.bits[static_cast<std::size_t>(h * bits_per_gene + b)];
        const std::int64_t lo = constraints.price_min.at_offset(h).centipence();
        const std::int64_t hi = constraints.price_max.at_offset(h).centipence();
        const double cp = static_cast<double>(lo) +
                          static_cast<double>(v) * static_cast<double>(hi - lo) / levels;
        prices.at_offset(h) = Money::from_centipence(
            std::clamp<std::int64_t>(std::llround(cp), lo, hi));
    }
    return prices;
}

int tournament_select(const Island& island, int k, Rng& rng) {
    const int n = static_cast<int>(island.members.size());
    require(k >= 1 && k <= n, "tournament size must be in [1, island size]");
    // Partial Fisher-Yates over index array: k distinct contestants.
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    int best = -1;
    for (int i = 0; i < k; ++i) {
        const int j = static_cast<int>(rng.next_int(i, n - 1));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
        const int cand = idx[static_cast<std::size_t>(i)];
        if (best < 0) {
            best = cand;
            continue;
        }
        const int cmp = deb_compare(*island.members[static_cast<std::size_t>(cand)].eval,
                                    *island.members[static_cast<std::size_t>(best)].eval);
        if (cmp > 0 || (cmp == 0 && cand < best)) best = cand;
    }
    return best;
}

std::pair<Chromosome, Chromosome> uniform_crossover(const Chromosome& a, const Chromosome& b,
                                                    Rng& rng) {
    require(a.bits.size() == b.bits.size(), "crossover parents must have equal length");
    Chromosome ca = a, cb = b;
    bool changed = false;
    for (std::size_t i = 0; i < ca.bits.size(); ++i)
        if (rng.next_bool(0.5)) {
            changed |= ca.bits[i] != cb.bits[i];
            std::swap(ca.bits[i], cb.bits[i]);
        }
    if (changed) {  // cached fitness stays valid only when no bit moved
        ca.eval.reset();
        cb.eval.reset();
    }
    return {std::move(ca), std::move(cb)};
}

Chromosome bitflip_mutate(const Chromosome& chrom, double mutation_prob, Rng& rng) {
    Chromosome out = chrom;
    bool changed = false;
    for (auto& b : out.bits)
        if (rng.next_bool(mutation_prob)) {
            b ^= 1;
            changed = true;
        }
    if (changed) out.eval.reset();
    return out;
}

void ring_migrate(std::vector<Island>& islands, double migration_rate) {
    const std::size_t n = islands.size();
    if (n <= 1) return;
    const int size = static_cast<int>(islands[0].members.size());
    const int count = std::min(size - 1, static_cast<int>(std::ceil(migration_rate * size)));
    if (count <= 0) return;

    // Emigrants are copied from a pre-migration snapshot so every island
    // sends its own top members, not freshly received ones.
    std::vector<std::vector<Chromosome>> emigrants(n);
    std::vector<std::vector<int>> ranks(n);
    for (std::size_t i = 0; i < n; ++i) {
        ranks[i] = ranked_indices(islands[i]);
        emigrants[i].reserve(static_cast<std::size_t>(count));
        for (int r = 0; r < count; ++r)
            emigrants[i].push_back(islands[i].members[static_cast<std::size_t>(ranks[i][static_cast<std::size_t>(r)])]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t dest = (i + 1) % n;
        for (int r = 0; r < count; ++r) {
            const int victim = ranks[dest][static_cast<std::size_t>(size - 1 - r)];
            islands[dest].members[static_cast<std::size_t>(victim)] = emigrants[i][static_cast<std::size_t>(r)];
        }
    }
}

GaResult optimize(const GaParams& params, const RetailerConstraints& constraints,
                  const PricingEvaluator& evaluator, const TelemetrySink& telemetry) {
    validate(params);
    const int chrom_bits = kHorizonHours * params.bits_per_gene;

    std::vector<Island> islands(static_cast<std::size_t>(params.num_islands));
    for (int i = 0; i < params.num_islands; ++i) {
        auto& island = islands[static_cast<std::size_t>(i)];
        island.rng_stream = static_cast<std::uint64_t>(i);
        Rng rng(derive_seed(params.seed, island.rng_stream, 0));
        island.members.reserve(static_cast<std::size_t>(params.island_size));
        for (int m = 0; m < params.island_size; ++m)
            island.members.push_back(random_chromosome(chrom_bits, rng));
    }

    // Evaluates every member without a cached fitness, one batch per
    // generation across all islands.
    auto evaluate_pending = [&]() {
        std::vector<Chromosome*> pending;
        for (auto& island : islands)
            for (auto& member : island.members)
                if (!member.eval) pending.push_back(&member);
        if (pending.empty()) return;
        std::vector<PriceVector> batch;
        batch.reserve(pending.size());
        for (Chromosome* c : pending) batch.push_back(decode(*c, constraints));
        std::vector<EvaluatedPricing> evals = evaluator(batch);
        if (evals.size() != pending.size())
            throw std::runtime_error("evaluator returned wrong batch size");
        for (std::size_t i = 0; i < pending.size(); ++i) pending[i]->eval = std::move(evals[i]);
    };

    GaResult result;
    auto record = [&](int generation) {
        GenerationStats stats;
        stats.generation = generation;
        const EvaluatedPricing* best = nullptr;
        double profit_sum = 0.0;
        int feasible = 0, total = 0;
        for (const auto& island : islands) {
            for (const auto& member : island.members) {
                const EvaluatedPricing& e = *member.eval;
                if (!best || deb_better(e, *best)) best = &e;
                profit_sum += e.profit.pence();
                feasible += e.feasible ? 1 : 0;
                ++total;
            }
        }
        stats.best = *best;
        stats.mean_profit_pence = profit_sum / total;
        stats.feasible_fraction = static_cast<double>(feasible) / total;
        if (telemetry) telemetry(stats);
        result.history.push_back(std::move(stats));
    };

    evaluate_pending();
    record(0);

    for (int gen = 1; gen <= params.max_generations; ++gen) {
        for (std::size_t i = 0; i < islands.size(); ++i) {
            Island& island = islands[i];
            Rng rng(derive_seed(params.seed, island.rng_stream, static_cast<std::uint64_t>(gen)));
            const std::vector<int> ranks = ranked_indices(island);

            std::vector<Chromosome> next;
            next.reserve(island.members.size());
            for (int e = 0; e < params.elitism; ++e)
                next.push_back(island.members[static_cast<std::size_t>(ranks[static_cast<std::size_t>(e)])]);

            while (next.size() < island.members.size()) {
                const int pa = tournament_select(island, params.tournament_size, rng);
                const int pb = tournament_select(island, params.tournament_size, rng);
                Chromosome ca, cb;
                if (rng.next_bool(params.crossover_prob)) {
                    std::tie(ca, cb) =
                        uniform_crossover(island.members[static_cast<std::size_t>(pa)],
                                          island.members[static_cast<std::size_t>(pb)], rng);
                } else {
                    ca = island.members[static_cast<std::size_t>(pa)];
                    cb = island.members[static_cast<std::size_t>(pb)];
                }
                ca = bitflip_mutate(ca, params.mutation_prob, rng);
                next.push_back(std::move(ca));
                if (next.size() < island.members.size()) {
                    cb = bitflip_mutate(cb, params.mutation_prob, rng);
                    next.push_back(std::move(cb));
                }
            }
            island.members = std::move(next);
        }

        evaluate_pending();
        if (params.num_islands > 1 && gen % params.migration_interval == 0)
            ring_migrate(islands, params.migration_rate);
        record(gen);
    }

    result.best = result.history.back().best;
    // With elitism the final generation holds the best ever seen; without it,
    // fall back to the best of the recorded trace.
    for (const auto& stats : result.history)
        if (deb_better(stats.best, result.best)) result.best = stats.best;
    return result;
}

}  // namespace gridlevel
