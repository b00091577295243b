#pragma once

#include <span>

#include "otgrid/grid.hpp"

namespace otgrid {

/// Discrete space-time gradient: block d holds the forward difference of
/// `phi` along axis d, scaled by 1/h_d, landing on the axis-d staggered
/// nodes. Its kernel is exactly the constant fields.
StaggeredField gradient(const CenteredField& phi);
void gradient_into(const CenteredField& phi, StaggeredField& out);

/// Euclidean adjoint of `gradient` (minus the discrete divergence with
/// no-flux truncation at the boundary).
CenteredField gradient_adjoint(const StaggeredField& q);
void gradient_adjoint_into(const StaggeredField& q, CenteredField& out);

/// The four (time, axis-d) corner shifts that decouple the time/space
/// averaging between the axis-d staggered nodes and the constraint lattice.
/// Reads out of range along axis d yield zero. Variants, in block order:
///   0: (t,   j-1)   1: (t,   j)   2: (t+1, j-1)   3: (t+1, j)
/// where t is the time offset of the constraint node and j its axis-d
/// coordinate; the shifted pair addresses the staggered source node.
void shift_to_constraint(const GridSpec& g, int axis, int variant,
                         std::span<const double> staggered, std::span<double> out);

/// Adjoint scatter of `shift_to_constraint`; each staggered node receives
/// from at most one constraint node, unreached nodes are zeroed.
void shift_from_constraint(const GridSpec& g, int axis, int variant,
                           std::span<const double> constraint, std::span<double> out);

/// Composition (time average) o (space average adjoint): carries the spatial
/// staggered blocks s_1..s_D onto the constraint lattice. Identical to the
/// quarter-weighted sum of the four corner shifts over all axes.
std::vector<double> average_to_constraint(const GridSpec& g,
                                          std::span<const std::vector<double>> spatial_blocks);

/// Adjoint of `average_to_constraint`: spreads a constraint-lattice array
/// back onto the spatial staggered blocks.
std::vector<std::vector<double>> average_from_constraint(const GridSpec& g,
                                                         std::span<const double> a);

/// Cone embedding of a staggered field: block 0 is -q_0, block 4D+1 is q_0,
/// and the 4D middle blocks are the corner shifts of the spatial components
/// scaled by sqrt(2)/2. `scale`, when non-empty, multiplies the middle
/// blocks pointwise on the constraint lattice (weighted transport).
ConeField cone_embed(const StaggeredField& q, std::span<const double> scale = {});
void cone_embed_into(const StaggeredField& q, ConeField& out,
                     std::span<const double> scale = {});

/// Exact adjoint of `cone_embed`.
StaggeredField cone_embed_adjoint(const ConeField& w, std::span<const double> scale = {});
void cone_embed_adjoint_into(const ConeField& w, StaggeredField& out,
                             std::span<const double> scale = {});

/// Diagonal of cone_embed_adjoint o cone_embed as a staggered field:
/// the temporal block is identically 2; spatial blocks are 1 on the first
/// and last time layer and 2 in between. With weights `omega` on the
/// constraint lattice the spatial entries become half the sum of the
/// weights gathered by the four corner shifts.
StaggeredField cone_gram_diagonal(const GridSpec& g, std::span<const double> omega = {});

}  // namespace otgrid
