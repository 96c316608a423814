#pragma once

#include <cstddef>
#include <vector>

// Nested uniform-grid hierarchy on the unit interval/square. Level 1 is the
// coarsest. Grids have 2^p + 1 nodes per side so that stride-2 injection maps
// a fine grid exactly onto the next coarser one.

namespace mlmc {

struct ResolutionLevel {
    int index = 0;            // 1-based level number, 1 = coarsest
    int points_per_side = 0;  // R_i
    double spacing = 0.0;     // h_i = 1/(R_i - 1)

    friend bool operator==(const ResolutionLevel& a, const ResolutionLevel& b) {
        return a.index == b.index && a.points_per_side == b.points_per_side;
    }
};

using Hierarchy = std::vector<ResolutionLevel>;

struct GridField {
    ResolutionLevel level;
    int dim = 2;  // 1 or 2
    std::vector<double> values;  // row-major, length R^dim

    GridField() = default;
    GridField(ResolutionLevel lvl, int d);
    GridField(ResolutionLevel lvl, int d, std::vector<double> vals);

    std::size_t size() const { return values.size(); }
    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * level.points_per_side + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * level.points_per_side + j]; }
};

// True iff r = 2^p + 1 for some p >= 1.
bool is_pow2_plus_one(int r);

// m levels, coarsest first, fine side R_m = fine_points_per_side.
// Throws ConfigError if fine_points_per_side is not 2^p + 1, m < 1, or the
// coarsest level would drop below 3 points per side.
Hierarchy build_hierarchy(int fine_points_per_side, int m);

// Nodal injection onto a coarser (or equal) nested level. Throws ConfigError
// if target is finer than the field or the resolutions do not nest.
GridField restrict_field(const GridField& field, const ResolutionLevel& target);

// h^d * sum(values^2): discrete squared L2 norm.
double grid_norm_sq(const GridField& field);

double grid_norm_sq(const double* values, std::size_t n, double spacing, int dim);

}  // namespace mlmc
