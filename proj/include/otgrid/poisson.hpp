#pragma once

#include <memory>

#include "otgrid/grid.hpp"

namespace otgrid {

/// Neumann space-time Laplacian gradient_adjoint(gradient(phi)) as one
/// fused stencil; used for residual checks of the spectral solve.
CenteredField laplacian(const CenteredField& phi);

/// Spectral solver for the singular Neumann system
///     gradient_adjoint(gradient(phi)) = b - mean(b),
/// returning the unique zero-mean solution. Diagonalizes each axis with the
/// type-II cosine transform on n_d+1 nodes, whose basis vectors are the
/// eigenvectors of the one-dimensional second-difference matrix with
/// eigenvalues (4/h_d^2) sin^2(pi k / (2(n_d+1))); the all-zero mode is
/// annihilated. Plans are cached per grid; solve() is safe to call
/// concurrently on distinct output fields.
class NeumannPoisson {
public:
    explicit NeumannPoisson(GridSpec grid);
    ~NeumannPoisson();
    NeumannPoisson(const NeumannPoisson&) = delete;
    NeumannPoisson& operator=(const NeumannPoisson&) = delete;

    const GridSpec& grid() const { return grid_; }

    CenteredField solve(const CenteredField& b) const;
    /// Allocation-free path; `phi` must be shaped for the grid and may not
    /// alias `b`.
    void solve_into(const CenteredField& b, CenteredField& phi) const;

private:
    struct Plans;
    GridSpec grid_;
    std::vector<double> spectral_scale_;  // 1/eigenvalue with transform normalization folded in
    std::unique_ptr<Plans> plans_;
};

/// One-shot convenience wrapper around NeumannPoisson.
CenteredField solve_neumann(const CenteredField& b);

}  // namespace otgrid
