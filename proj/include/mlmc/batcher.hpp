#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mlmc/estimator.hpp"

// Epoch planning: per-batch index sets for every level under random or nested
// sub-sampling, reshuffled every epoch, plus the level-grouped prefetch order.

namespace mlmc {

struct BatchPlan {
    std::uint64_t epoch_seed = 0;
    // batches[k][i] = index set for schedule level i+1 of batch k
    std::vector<BatchEntry> batches;
};

// Per-epoch pools: one permutation of {0..pool_size-1}; level i's pool is its
// first N_i entries, so pools nest by construction.
std::vector<std::vector<std::uint32_t>> pool_assignment(std::size_t pool_size,
                                                        const std::vector<std::size_t>& sample_counts,
                                                        std::uint64_t epoch_seed);

// K = floor(N_1/B_1) batches. Level-1 sets partition a fresh permutation of
// the level-1 pool. Random strategy draws deeper sets uniformly without
// replacement from that level's pool; nested draws them from the set one
// level up. Deterministic in (schedule, epoch_seed).
BatchPlan plan_epoch(const LevelSchedule& schedule, std::uint64_t epoch_seed);

// Deduplicated (level, sample) reads per batch, grouped by level and sorted
// by index so each level's storage is traversed contiguously once per batch.
// Levels are schedule levels (0-based); corrections add the level-(i-1) copy
// of every level-i index.
struct PrefetchLayout {
    std::vector<std::vector<std::pair<int, std::uint32_t>>> reads;  // per batch
};

PrefetchLayout prefetch_layout(const BatchPlan& plan);

// One line per batch: "k: [i ...] | [i ...] | ..." (golden-file format).
std::string dump_plan(const BatchPlan& plan);

}  // namespace mlmc
