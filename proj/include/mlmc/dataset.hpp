#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlmc/grid.hpp"

namespace mlmc {

// Generation settings recorded alongside a dataset (sidecar JSON).
struct Provenance {
    std::string kind;  // "darcy" or "synthetic1d"
    std::uint64_t seed = 0;
    double grf_shift = 9.0;
    double grf_exponent = 2.0;
    double solver_tol = 1e-10;
    int solver_max_iter_factor = 50;
};

// N input/output pairs stored at every level of a nested hierarchy.
// Invariant: for levels i < j, inputs[i][s] == restrict_field(inputs[j][s])
// exactly (same for outputs); all N samples present at all levels.
struct MultiResDataset {
    Hierarchy hierarchy;
    int dim = 2;
    std::size_t n_samples = 0;
    std::vector<std::vector<GridField>> inputs;   // [level][sample]
    std::vector<std::vector<GridField>> outputs;  // [level][sample]
    Provenance provenance;

    int levels() const { return static_cast<int>(hierarchy.size()); }
    const GridField& input(int level_index, std::size_t sample) const {
        return inputs[static_cast<std::size_t>(level_index)][sample];
    }
    const GridField& output(int level_index, std::size_t sample) const {
        return outputs[static_cast<std::size_t>(level_index)][sample];
    }
};

// Binary container with magic "MLMCDS01", little-endian header, raw f64
// payload and trailing CRC32; metadata goes to <path>.meta.json.
void save_dataset(const MultiResDataset& ds, const std::string& path);
MultiResDataset load_dataset(const std::string& path);

}  // namespace mlmc
