#include "mlmc/datagen.hpp"

#include <cmath>
#include <string>

#include "mlmc/errors.hpp"
#include "mlmc/fft.hpp"
#include "mlmc/kernels.hpp"
#include "mlmc/parallel.hpp"
#include "mlmc/rng.hpp"

namespace mlmc {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Orthonormalization factor of cos(j*pi*x) on [0,1].
inline double beta(int j) { return j == 0 ? 1.0 : 1.4142135623730950488; }

// REDFT00 synthesis weight: Y_a = X_0 + (-1)^a X_N + 2 sum_{1<=j<=N-1} X_j cos(..)
inline double dct_weight(int j, int n_last) { return (j == 0 || j == n_last) ? 1.0 : 2.0; }

}  // namespace

GridField sample_grf(const GrfSpec& spec) {
    if (spec.shift <= 0.0 || spec.exponent <= 0.0)
        throw ConfigError("sample_grf: shift and exponent must be positive");
    const int r = spec.resolution.points_per_side;
    const int n_last = r - 1;
    Rng rng(derive_seed(spec.seed, 0x67726633ULL));

    fft::AlignedVec<double> coeff(static_cast<std::size_t>(r) * r);
    for (int j = 0; j < r; ++j) {
        const double wj = beta(j) / dct_weight(j, n_last);
        for (int k = 0; k < r; ++k) {
            const double lambda = kPi * kPi * (static_cast<double>(j) * j + static_cast<double>(k) * k);
            const double sigma = std::pow(lambda + spec.shift, -spec.exponent);
            const double wk = beta(k) / dct_weight(k, n_last);
            coeff[static_cast<std::size_t>(j) * r + k] = rng.next_gaussian() * sigma * wj * wk;
        }
    }

    fft::AlignedVec<double> grid(static_cast<std::size_t>(r) * r);
    fft::dct1_2d(r, coeff.data(), grid.data());

    GridField out(spec.resolution, 2);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = grid[i];
    return out;
}

GrfModeProjector::GrfModeProjector(const ResolutionLevel& level, int j, int k) {
    const int r = level.points_per_side;
    const int n_last = r - 1;
    if (j < 0 || k < 0 || j > n_last || k > n_last)
        throw ConfigError("GrfModeProjector: mode outside grid range");
    mask_.resize(static_cast<std::size_t>(r) * r);
    // Trapezoid-weighted discrete orthogonality of sampled cosines:
    // sum'' cos^2 = N/2 for 0<j<N and N for j in {0, N}, so the synthesis
    // coefficient c_jk is recovered as sum'' mu * cos*cos / (beta_j beta_k S_j S_k).
    const double sj = (j == 0 || j == n_last) ? n_last : n_last / 2.0;
    const double sk = (k == 0 || k == n_last) ? n_last : n_last / 2.0;
    const double norm = 1.0 / (beta(j) * sj * beta(k) * sk);
    for (int a = 0; a < r; ++a) {
        const double wa = (a == 0 || a == n_last) ? 0.5 : 1.0;
        const double ca = std::cos(kPi * j * a / n_last);
        for (int b = 0; b < r; ++b) {
            const double wb = (b == 0 || b == n_last) ? 0.5 : 1.0;
            const double cb = std::cos(kPi * k * b / n_last);
            mask_[static_cast<std::size_t>(a) * r + b] = wa * wb * ca * cb * norm;
        }
    }
}

double GrfModeProjector::coefficient(const GridField& field) const {
    if (field.values.size() != mask_.size())
        throw ConfigError("GrfModeProjector: field resolution mismatch");
    return kernels::dot(field.values.data(), mask_.data(), mask_.size());
}

GridField threshold_coefficient(const GridField& mu, double high, double low) {
    GridField out(mu.level, mu.dim);
    for (std::size_t i = 0; i < mu.values.size(); ++i)
        out.values[i] = mu.values[i] >= 0.0 ? high : low;
    return out;
}

GridField solve_darcy(const GridField& a, const GridField& rhs, double tol, int max_iter_factor) {
    const int r = a.level.points_per_side;
    const std::size_t n = a.values.size();
    if (a.dim != 2) throw ConfigError("solve_darcy: expected a 2D field");
    if (rhs.values.size() != n) throw ConfigError("solve_darcy: rhs resolution mismatch");
    if (tol <= 0.0) throw ConfigError("solve_darcy: tol must be positive");
    for (std::size_t i = 0; i < n; ++i)
        if (!(a.values[i] > 0.0)) throw ConfigError("solve_darcy: coefficient must be strictly positive");

    const double h = a.level.spacing;
    const double inv_h2 = 1.0 / (h * h);
    const double* av = a.values.data();

    // A x, conservative 5-point stencil with arithmetic face averages.
    // Boundary rows stay identically zero (homogeneous Dirichlet).
    auto apply = [&](const double* x, double* y) {
        for (int i = 1; i < r - 1; ++i) {
            const std::size_t row = static_cast<std::size_t>(i) * r;
            for (int j = 1; j < r - 1; ++j) {
                const std::size_t p = row + j;
                const double ac = av[p];
                const double ae = 0.5 * (ac + av[p + 1]);
                const double aw = 0.5 * (ac + av[p - 1]);
                const double an = 0.5 * (ac + av[p + r]);
                const double as = 0.5 * (ac + av[p - r]);
                y[p] = inv_h2 * ((ae + aw + an + as) * x[p] - ae * x[p + 1] - aw * x[p - 1] -
                                 an * x[p + r] - as * x[p - r]);
            }
        }
    };

    std::vector<double> b(n, 0.0);
    for (int i = 1; i < r - 1; ++i)
        for (int j = 1; j < r - 1; ++j)
            b[static_cast<std::size_t>(i) * r + j] = rhs.values[static_cast<std::size_t>(i) * r + j];

    GridField u(a.level, 2);
    const double bnorm = std::sqrt(kernels::sumsq(b.data(), n));
    if (bnorm == 0.0) return u;

    // Jacobi preconditioner: inverse stencil diagonal on interior nodes.
    std::vector<double> dinv(n, 0.0);
    for (int i = 1; i < r - 1; ++i) {
        for (int j = 1; j < r - 1; ++j) {
            const std::size_t p = static_cast<std::size_t>(i) * r + j;
            const double ac = av[p];
            const double diag = inv_h2 * (0.5 * (ac + av[p + 1]) + 0.5 * (ac + av[p - 1]) +
                                          0.5 * (ac + av[p + r]) + 0.5 * (ac + av[p - r]));
            dinv[p] = 1.0 / diag;
        }
    }

    std::vector<double> res(b), z(n, 0.0), p(n, 0.0), q(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * res[i];
    p = z;
    double rho = kernels::dot(res.data(), z.data(), n);

    const long max_iter = static_cast<long>(max_iter_factor) * r;
    double* x = u.values.data();
    for (long it = 0; it < max_iter; ++it) {
        apply(p.data(), q.data());
        const double alpha = rho / kernels::dot(p.data(), q.data(), n);
        kernels::axpy(alpha, p.data(), x, n);
        kernels::axpy(-alpha, q.data(), res.data(), n);
        if (std::sqrt(kernels::sumsq(res.data(), n)) <= tol * bnorm) return u;
        for (std::size_t i = 0; i < n; ++i) z[i] = dinv[i] * res[i];
        const double rho_next = kernels::dot(res.data(), z.data(), n);
        const double beta_cg = rho_next / rho;
        rho = rho_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta_cg * p[i];
    }
    throw NumericError("solve_darcy: CG did not converge within " + std::to_string(max_iter) +
                       " iterations");
}

GridField solve_darcy(const GridField& a, double tol, int max_iter_factor) {
    GridField one(a.level, 2);
    for (auto& v : one.values) v = 1.0;
    return solve_darcy(a, one, tol, max_iter_factor);
}

GridField solve_diffusion1d(const GridField& a, const std::vector<double>& rhs) {
    const int r = a.level.points_per_side;
    if (a.dim != 1) throw ConfigError("solve_diffusion1d: expected a 1D field");
    if (rhs.size() != a.values.size()) throw ConfigError("solve_diffusion1d: rhs size mismatch");
    for (double v : a.values)
        if (!(v > 0.0)) throw ConfigError("solve_diffusion1d: coefficient must be strictly positive");

    const double h = a.level.spacing;
    const double inv_h2 = 1.0 / (h * h);
    const int m = r - 2;  // interior unknowns
    GridField u(a.level, 1);
    if (m <= 0) return u;

    // Thomas algorithm on the tridiagonal system.
    std::vector<double> diag(m), upper(m), rhs_i(m);
    for (int i = 0; i < m; ++i) {
        const int g = i + 1;
        const double aw = 0.5 * (a.values[g] + a.values[g - 1]);
        const double ae = 0.5 * (a.values[g] + a.values[g + 1]);
        diag[i] = inv_h2 * (aw + ae);
        upper[i] = -inv_h2 * ae;
        rhs_i[i] = rhs[g];
    }
    for (int i = 1; i < m; ++i) {
        const int g = i + 1;
        const double lower = -inv_h2 * 0.5 * (a.values[g] + a.values[g - 1]);
        const double w = lower / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs_i[i] -= w * rhs_i[i - 1];
    }
    u.values[m] = rhs_i[m - 1] / diag[m - 1];
    for (int i = m - 2; i >= 0; --i)
        u.values[i + 1] = (rhs_i[i] - upper[i] * u.values[i + 2]) / diag[i];
    return u;
}

MultiResDataset build_dataset(std::size_t n, const Hierarchy& hierarchy, const GrfSpec& grf,
                              double tol, std::uint64_t seed) {
    if (n < 1) throw ConfigError("build_dataset: n must be >= 1");
    if (hierarchy.empty()) throw ConfigError("build_dataset: empty hierarchy");
    const ResolutionLevel fine = hierarchy.back();
    const int m = static_cast<int>(hierarchy.size());

    MultiResDataset ds;
    ds.hierarchy = hierarchy;
    ds.dim = 2;
    ds.n_samples = n;
    ds.provenance = Provenance{"darcy", seed, grf.shift, grf.exponent, tol, 50};
    ds.inputs.assign(m, std::vector<GridField>(n));
    ds.outputs.assign(m, std::vector<GridField>(n));

    parallel_for(n, [&](std::size_t s) {
        GrfSpec local = grf;
        local.resolution = fine;
        local.seed = derive_seed(seed, s);
        const GridField mu = sample_grf(local);
        const GridField a = threshold_coefficient(mu);
        const GridField u = solve_darcy(a, tol);
        for (int li = 0; li < m; ++li) {
            ds.inputs[li][s] = restrict_field(a, hierarchy[li]);
            ds.outputs[li][s] = restrict_field(u, hierarchy[li]);
        }
    });
    return ds;
}

MultiResDataset synthetic1d_dataset(std::size_t n, const Hierarchy& hierarchy,
                                    std::uint64_t seed) {
    if (n < 1) throw ConfigError("synthetic1d_dataset: n must be >= 1");
    if (hierarchy.empty()) throw ConfigError("synthetic1d_dataset: empty hierarchy");
    const ResolutionLevel fine = hierarchy.back();
    const int m = static_cast<int>(hierarchy.size());
    const int r = fine.points_per_side;

    MultiResDataset ds;
    ds.hierarchy = hierarchy;
    ds.dim = 1;
    ds.n_samples = n;
    ds.provenance = Provenance{"synthetic1d", seed, 0.0, 0.0, 0.0, 0};
    ds.inputs.assign(m, std::vector<GridField>(n));
    ds.outputs.assign(m, std::vector<GridField>(n));

    parallel_for(n, [&](std::size_t s) {
        Rng rng(derive_seed(seed, s));
        // Smooth strictly positive coefficient from a few low cosine/sine modes.
        constexpr int kModes = 6;
        double amp_cos[kModes], amp_sin[kModes];
        for (int q = 0; q < kModes; ++q) {
            const double scale = 0.25 / ((q + 1.0) * (q + 1.0));
            amp_cos[q] = scale * rng.uniform(-1.0, 1.0);
            amp_sin[q] = scale * rng.uniform(-1.0, 1.0);
        }
        GridField a(fine, 1);
        for (int i = 0; i < r; ++i) {
            const double x = i * fine.spacing;
            double v = 1.5;
            for (int q = 0; q < kModes; ++q) {
                v += amp_cos[q] * std::cos((q + 1) * kPi * x);
                v += amp_sin[q] * std::sin((q + 1) * kPi * x);
            }
            a.values[i] = v;
        }
        const GridField u = solve_diffusion1d(a, std::vector<double>(a.values.size(), 1.0));
        for (int li = 0; li < m; ++li) {
            ds.inputs[li][s] = restrict_field(a, hierarchy[li]);
            ds.outputs[li][s] = restrict_field(u, hierarchy[li]);
        }
    });
    return ds;
}

}  // namespace mlmc
