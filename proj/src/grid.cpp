#include "mlmc/grid.hpp"

#include <cmath>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/kernels.hpp"

namespace mlmc {

GridField::GridField(ResolutionLevel lvl, int d) : level(lvl), dim(d) {
    std::size_t n = static_cast<std::size_t>(lvl.points_per_side);
    if (d == 2) n *= static_cast<std::size_t>(lvl.points_per_side);
    values.assign(n, 0.0);
}

GridField::GridField(ResolutionLevel lvl, int d, std::vector<double> vals)
    : level(lvl), dim(d), values(std::move(vals)) {
    std::size_t expect = static_cast<std::size_t>(lvl.points_per_side);
    if (d == 2) expect *= static_cast<std::size_t>(lvl.points_per_side);
    if (values.size() != expect)
        throw ConfigError("GridField: value count " + std::to_string(values.size()) +
                          " does not match R^d = " + std::to_string(expect));
}

bool is_pow2_plus_one(int r) {
    if (r < 3) return false;
    const int n = r - 1;
    return (n & (n - 1)) == 0;
}

Hierarchy build_hierarchy(int fine_points_per_side, int m) {
    if (m < 1) throw ConfigError("build_hierarchy: m must be >= 1");
    if (!is_pow2_plus_one(fine_points_per_side))
        throw ConfigError("build_hierarchy: points per side must be 2^p + 1, got " +
                          std::to_string(fine_points_per_side));
    Hierarchy levels(m);
    for (int i = m; i >= 1; --i) {
        const int shift = m - i;
        const int n = (fine_points_per_side - 1) >> shift;
        if ((n << shift) != fine_points_per_side - 1 || n + 1 < 3)
            throw ConfigError("build_hierarchy: coarsest level would fall below 3 points per side");
        levels[i - 1] = ResolutionLevel{i, n + 1, 1.0 / n};
    }
    return levels;
}

GridField restrict_field(const GridField& field, const ResolutionLevel& target) {
    const int rf = field.level.points_per_side;
    const int rc = target.points_per_side;
    if (rc > rf)
        throw ConfigError("restrict_field: target level is finer than the source");
    if ((rf - 1) % (rc - 1) != 0)
        throw ConfigError("restrict_field: resolutions do not nest");
    const int stride = (rf - 1) / (rc - 1);
    if ((stride & (stride - 1)) != 0)
        throw ConfigError("restrict_field: resolutions do not nest");
    if (stride == 1) {
        GridField out = field;
        out.level = target;
        return out;
    }

    GridField out(target, field.dim);
    if (field.dim == 1) {
        for (int i = 0; i < rc; ++i) out.values[i] = field.values[static_cast<std::size_t>(i) * stride];
    } else {
        for (int i = 0; i < rc; ++i) {
            const double* src = field.values.data() + static_cast<std::size_t>(i) * stride * rf;
            double* dst = out.values.data() + static_cast<std::size_t>(i) * rc;
            for (int j = 0; j < rc; ++j) dst[j] = src[static_cast<std::size_t>(j) * stride];
        }
    }
    return out;
}

double grid_norm_sq(const double* values, std::size_t n, double spacing, int dim) {
    const double hd = dim == 1 ? spacing : spacing * spacing;
    return hd * kernels::sumsq(values, n);
}

double grid_norm_sq(const GridField& field) {
    return grid_norm_sq(field.values.data(), field.values.size(), field.level.spacing, field.dim);
}

}  // namespace mlmc
