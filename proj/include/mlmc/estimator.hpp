#pragma once

#include <cstdint>
#include <vector>

#include "mlmc/dataset.hpp"
#include "mlmc/model.hpp"

// Telescopic multi-level loss/gradient estimator and the sample/batch
// allocation rules that drive it. The estimator for a batch B = [B_1..B_m] is
//   total = mean_{j in B_1} X^1(j) + sum_{i=2..m} [ mean_{B_i} X^i(j) - mean_{B_i} X^{i-1}(j) ]
// where X^i evaluates the model loss on the stored level-i copy of sample j.
// Correction pairs reuse the stored coarse copies, which equal the restriction
// of the fine sample by the dataset invariant.

namespace mlmc {

enum class AllocationStrategy { geometric, prescribed, optimal };
enum class SamplingStrategy { random, nested };

struct LevelSchedule {
    int m = 1;
    Hierarchy levels;                      // the m resolutions used, coarsest first
    std::vector<int> level_indices;        // dataset level index per schedule level
    std::vector<std::size_t> sample_counts;  // N_i, non-increasing in i
    std::vector<std::size_t> batch_sizes;    // B_i, non-increasing in i
    std::size_t pool_size = 0;               // size of the train index pool
    AllocationStrategy allocation = AllocationStrategy::geometric;
    SamplingStrategy sampling = SamplingStrategy::random;
    double delta = 2.0;
};

// Per-level sample counts. Geometric: ratio delta; optimal: ratio
// 2^((2k+d)/2); prescribed: validated pass-through. For geometric/optimal the
// coarsest-multiplier solve is floored per level and the remainder goes to
// N_1, so the counts always sum to n_total exactly.
std::vector<std::size_t> allocate_samples(AllocationStrategy strategy, std::size_t n_total,
                                          int m, double delta, int k, int d,
                                          const std::vector<std::size_t>& prescribed = {});

// B_i = round(delta^(m-i) * b_m), round-half-to-even.
std::vector<std::size_t> batch_sizes(std::size_t b_m, double delta, int m);

// Assembles a schedule over the last `m` levels of `dataset_levels` (or over
// explicit indices). pool_size is the number of training samples the epoch
// pools draw from.
LevelSchedule make_schedule(const Hierarchy& dataset_levels, const std::vector<int>& level_indices,
                            std::size_t pool_size, AllocationStrategy allocation,
                            SamplingStrategy sampling, double delta, std::size_t b_m, int k = 1,
                            int d = 2, const std::vector<std::size_t>& prescribed = {});

struct MlmcLossReport {
    double total = 0.0;
    double coarse_term = 0.0;
    std::vector<double> pair_terms;  // m-1 entries, level 2..m
};

// One batch entry: per schedule level, the dataset indices to evaluate.
using BatchEntry = std::vector<std::vector<std::uint32_t>>;

struct MlmcEval {
    MlmcLossReport report;
    model::GradVector grad;
};

MlmcLossReport mlmc_loss(const model::ModelParams& params, const MultiResDataset& dataset,
                         const BatchEntry& batch, const std::vector<int>& level_indices,
                         model::WorkspaceGroup& group);

// Loss report plus the exact gradient of report.total.
MlmcEval mlmc_eval(const model::ModelParams& params, const MultiResDataset& dataset,
                   const BatchEntry& batch, const std::vector<int>& level_indices,
                   model::WorkspaceGroup& group);

model::GradVector mlmc_grad(const model::ModelParams& params, const MultiResDataset& dataset,
                            const BatchEntry& batch, const std::vector<int>& level_indices,
                            model::WorkspaceGroup& group);

// Empirical variance (over the first n_probe samples) of the per-sample
// gradient-difference norm between dataset levels i and i-1 (1-based,
// 2 <= i <= number of levels).
double level_difference_variance(const model::ModelParams& params, const MultiResDataset& dataset,
                                 int i, std::size_t n_probe, model::WorkspaceGroup& group);

}  // namespace mlmc
