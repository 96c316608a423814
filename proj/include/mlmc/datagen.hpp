#pragma once

#include <cstdint>
#include <vector>

#include "mlmc/dataset.hpp"
#include "mlmc/grid.hpp"

namespace mlmc {

// Gaussian random field with covariance (-Laplace + shift*I)^(-2*exponent/2)
// under zero Neumann conditions, sampled in the cosine eigenbasis.
struct GrfSpec {
    ResolutionLevel resolution;
    double shift = 9.0;     // tau
    double exponent = 2.0;  // s
    std::uint64_t seed = 0;
};

// Draws the field on the grid: mode (j,k) gets an independent N(0, sigma^2)
// coefficient with sigma = (pi^2 (j^2+k^2) + shift)^(-exponent) in the
// L2-orthonormal cosine basis, assembled by an inverse DCT-I.
GridField sample_grf(const GrfSpec& spec);

// Projects a field onto one orthonormal cosine mode (test/diagnostic use).
// Exact inverse of sample_grf's synthesis for modes below the grid Nyquist.
class GrfModeProjector {
  public:
    GrfModeProjector(const ResolutionLevel& level, int j, int k);
    double coefficient(const GridField& field) const;

  private:
    std::vector<double> mask_;
};

// Pointwise map: high where mu >= 0, low otherwise (defaults 12 / 3).
GridField threshold_coefficient(const GridField& mu, double high = 12.0, double low = 3.0);

// Conservative 5-point finite differences for -div(a grad u) = rhs with zero
// Dirichlet boundary, arithmetic face averages, Jacobi-preconditioned CG run
// to ||r||/||b|| <= tol. Throws NumericError if CG exceeds max_iter_factor*R
// iterations, ConfigError if a is not strictly positive.
GridField solve_darcy(const GridField& a, const GridField& rhs, double tol,
                      int max_iter_factor = 50);
// rhs == 1 variant used by the data pipeline.
GridField solve_darcy(const GridField& a, double tol, int max_iter_factor = 50);

// 1D analog -(a u')' = rhs, zero Dirichlet, direct tridiagonal solve.
GridField solve_diffusion1d(const GridField& a, const std::vector<double>& rhs);

// Full pipeline: draw GRF at the finest level, threshold, solve, restrict
// inputs and outputs to every coarser level. Deterministic in (n, seed) and
// independent of worker count (per-sample seeds).
MultiResDataset build_dataset(std::size_t n, const Hierarchy& hierarchy,
                              const GrfSpec& grf, double tol, std::uint64_t seed);

// Fast 1D fixture: random smooth positive a(x), -(a u')' = 1, restricted
// across levels like the 2D pipeline.
MultiResDataset synthetic1d_dataset(std::size_t n, const Hierarchy& hierarchy,
                                    std::uint64_t seed);

}  // namespace mlmc
