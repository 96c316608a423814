#include "mlmc/estimator.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/kernels.hpp"
#include "mlmc/parallel.hpp"

namespace mlmc {

std::vector<std::size_t> allocate_samples(AllocationStrategy strategy, std::size_t n_total,
                                          int m, double delta, int k, int d,
                                          const std::vector<std::size_t>& prescribed) {
    if (m < 1) throw ConfigError("allocate_samples: m must be >= 1");
    if (n_total < static_cast<std::size_t>(m))
        throw ConfigError("allocate_samples: n_total must be >= m");

    if (strategy == AllocationStrategy::prescribed) {
        if (static_cast<int>(prescribed.size()) != m)
            throw ConfigError("allocate_samples: prescribed list must have m entries");
        std::size_t sum = 0;
        for (int i = 0; i + 1 < m; ++i)
            if (prescribed[i] < prescribed[i + 1])
                throw ConfigError("allocate_samples: prescribed counts must be non-increasing");
        for (auto v : prescribed) sum += v;
        if (sum != n_total)
            throw ConfigError("allocate_samples: prescribed counts must sum to n_total");
        return prescribed;
    }

    double ratio;
    if (strategy == AllocationStrategy::geometric) {
        if (delta < 1.0) throw ConfigError("allocate_samples: delta must be >= 1");
        ratio = delta;
    } else {
        if (k < 1 || d < 1) throw ConfigError("allocate_samples: k and d must be >= 1");
        ratio = std::pow(2.0, (2.0 * k + d) / 2.0);
    }

    double weight_sum = 0.0;
    for (int i = 0; i < m; ++i) weight_sum += std::pow(ratio, i);
    const std::size_t n_m = static_cast<std::size_t>(std::floor(n_total / weight_sum));
    if (n_m == 0) throw ConfigError("allocate_samples: allocation leaves the finest level empty");

    std::vector<std::size_t> counts(m);
    std::size_t used = 0;
    for (int i = 0; i < m; ++i) {
        // level i (0-based coarsest first) gets ratio^(m-1-i) * N_m, floored
        counts[i] = static_cast<std::size_t>(std::floor(std::pow(ratio, m - 1 - i) * n_m));
        used += counts[i];
    }
    counts[0] += n_total - used;  // remainder to the coarsest (cheapest) level
    return counts;
}

std::vector<std::size_t> batch_sizes(std::size_t b_m, double delta, int m) {
    if (b_m < 1) throw ConfigError("batch_sizes: b_m must be >= 1");
    if (delta < 1.0) throw ConfigError("batch_sizes: delta must be >= 1");
    if (m < 1) throw ConfigError("batch_sizes: m must be >= 1");
    std::vector<std::size_t> sizes(m);
    const int saved_mode = std::fegetround();
    std::fesetround(FE_TONEAREST);  // round-half-to-even
    for (int i = 0; i < m; ++i)
        sizes[i] = static_cast<std::size_t>(
            std::nearbyint(std::pow(delta, m - 1 - i) * static_cast<double>(b_m)));
    std::fesetround(saved_mode);
    return sizes;
}

LevelSchedule make_schedule(const Hierarchy& dataset_levels, const std::vector<int>& level_indices,
                            std::size_t pool_size, AllocationStrategy allocation,
                            SamplingStrategy sampling, double delta, std::size_t b_m, int k, int d,
                            const std::vector<std::size_t>& prescribed) {
    if (level_indices.empty()) throw ConfigError("make_schedule: no levels selected");
    LevelSchedule s;
    s.m = static_cast<int>(level_indices.size());
    s.level_indices = level_indices;
    for (std::size_t i = 0; i < level_indices.size(); ++i) {
        const int li = level_indices[i];
        if (li < 0 || li >= static_cast<int>(dataset_levels.size()))
            throw ConfigError("make_schedule: level index out of range");
        if (i > 0 && level_indices[i] <= level_indices[i - 1])
            throw ConfigError("make_schedule: level indices must be strictly increasing");
        s.levels.push_back(dataset_levels[li]);
    }
    s.pool_size = pool_size;
    s.allocation = allocation;
    s.sampling = sampling;
    s.delta = delta;
    s.sample_counts = allocate_samples(allocation, pool_size, s.m, delta, k, d, prescribed);
    s.batch_sizes = batch_sizes(b_m, delta, s.m);
    for (int i = 0; i < s.m; ++i) {
        if (s.batch_sizes[i] > s.sample_counts[i])
            throw ConfigError("make_schedule: batch size exceeds sample count at level " +
                              std::to_string(i + 1));
    }
    return s;
}

namespace {

std::vector<model::SamplePair> collect_pairs(const MultiResDataset& ds, int dataset_level,
                                             const std::vector<std::uint32_t>& indices) {
    std::vector<model::SamplePair> pairs;
    pairs.reserve(indices.size());
    const auto& ins = ds.inputs[static_cast<std::size_t>(dataset_level)];
    const auto& outs = ds.outputs[static_cast<std::size_t>(dataset_level)];
    for (auto idx : indices) {
        if (idx >= ds.n_samples)
            throw ConfigError("mlmc estimator: sample index out of range");
        pairs.emplace_back(&ins[idx], &outs[idx]);
    }
    return pairs;
}

void validate_batch(const BatchEntry& batch, const std::vector<int>& level_indices,
                    const MultiResDataset& ds) {
    if (batch.empty() || batch.size() != level_indices.size())
        throw ConfigError("mlmc estimator: batch entry does not match schedule levels");
    for (int li : level_indices)
        if (li < 0 || li >= ds.levels())
            throw ConfigError("mlmc estimator: schedule level missing from dataset");
    for (const auto& set : batch)
        if (set.empty()) throw ConfigError("mlmc estimator: empty index set");
}

}  // namespace

MlmcEval mlmc_eval(const model::ModelParams& params, const MultiResDataset& dataset,
                   const BatchEntry& batch, const std::vector<int>& level_indices,
                   model::WorkspaceGroup& group) {
    validate_batch(batch, level_indices, dataset);
    const int m = static_cast<int>(batch.size());

    MlmcEval out;
    // Coarse term over B_1 at the first schedule level.
    auto coarse = model::batch_loss_grad(params, collect_pairs(dataset, level_indices[0], batch[0]),
                                         group);
    out.report.coarse_term = coarse.mean_loss;
    out.report.total = coarse.mean_loss;
    out.grad = std::move(coarse.grad);

    const std::size_t p = out.grad.data.size();
    for (int i = 1; i < m; ++i) {
        auto fine = model::batch_loss_grad(params, collect_pairs(dataset, level_indices[i], batch[i]),
                                           group);
        auto coarse_copy = model::batch_loss_grad(
            params, collect_pairs(dataset, level_indices[i - 1], batch[i]), group);
        const double term = fine.mean_loss - coarse_copy.mean_loss;
        out.report.pair_terms.push_back(term);
        out.report.total += term;
        kernels::axpy(1.0, fine.grad.data.data(), out.grad.data.data(), p);
        kernels::axpy(-1.0, coarse_copy.grad.data.data(), out.grad.data.data(), p);
    }
    return out;
}

MlmcLossReport mlmc_loss(const model::ModelParams& params, const MultiResDataset& dataset,
                         const BatchEntry& batch, const std::vector<int>& level_indices,
                         model::WorkspaceGroup& group) {
    validate_batch(batch, level_indices, dataset);
    const int m = static_cast<int>(batch.size());

    MlmcLossReport report;
    report.coarse_term = model::batch_mean_loss(
        params, collect_pairs(dataset, level_indices[0], batch[0]), group);
    report.total = report.coarse_term;
    for (int i = 1; i < m; ++i) {
        const double fine = model::batch_mean_loss(
            params, collect_pairs(dataset, level_indices[i], batch[i]), group);
        const double coarse = model::batch_mean_loss(
            params, collect_pairs(dataset, level_indices[i - 1], batch[i]), group);
        report.pair_terms.push_back(fine - coarse);
        report.total += fine - coarse;
    }
    return report;
}

model::GradVector mlmc_grad(const model::ModelParams& params, const MultiResDataset& dataset,
                            const BatchEntry& batch, const std::vector<int>& level_indices,
                            model::WorkspaceGroup& group) {
    return mlmc_eval(params, dataset, batch, level_indices, group).grad;
}

double level_difference_variance(const model::ModelParams& params, const MultiResDataset& dataset,
                                 int i, std::size_t n_probe, model::WorkspaceGroup& group) {
    if (i < 2 || i > dataset.levels())
        throw ConfigError("level_difference_variance: level must satisfy 2 <= i <= m");
    if (n_probe < 2)
        throw ConfigError("level_difference_variance: unbiased variance needs n_probe >= 2");
    if (n_probe > dataset.n_samples)
        throw ConfigError("level_difference_variance: not enough samples at level");

    const model::ParamLayout lay(params.config);
    std::vector<double> norms(n_probe, 0.0);

    const int chunks =
        static_cast<int>(std::min<std::size_t>(model::WorkspaceGroup::kChunks, n_probe));
    parallel_for(static_cast<std::size_t>(chunks), [&](std::size_t c) {
        model::Workspace& ws = group.workspace(static_cast<int>(c));
        std::vector<double> gf(lay.total), gc(lay.total), diff(lay.total);
        const std::size_t lo = n_probe * c / chunks;
        const std::size_t hi = n_probe * (c + 1) / chunks;
        for (std::size_t s = lo; s < hi; ++s) {
            std::fill(gf.begin(), gf.end(), 0.0);
            std::fill(gc.begin(), gc.end(), 0.0);
            model::loss_and_accum_grad(params, dataset.input(i - 1, s), dataset.output(i - 1, s),
                                       ws, gf.data());
            model::loss_and_accum_grad(params, dataset.input(i - 2, s), dataset.output(i - 2, s),
                                       ws, gc.data());
            kernels::sub(gf.data(), gc.data(), diff.data(), lay.total);
            norms[s] = std::sqrt(kernels::sumsq(diff.data(), lay.total));
        }
    });

    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(n_probe);
    double var = 0.0;
    for (double v : norms) var += (v - mean) * (v - mean);
    return var / static_cast<double>(n_probe - 1);
}

}  // namespace mlmc
