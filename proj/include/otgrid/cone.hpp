#pragma once

#include <span>
#include <vector>

#include "otgrid/grid.hpp"

namespace otgrid {

/// One point (y_0; ybar) of R^{1+n}.
struct ConePoint {
    double head = 0.0;
    std::vector<double> tail;
};

/// Membership test y_0 >= ||ybar|| with an absolute slack for boundary
/// checks; `tol` = 0 is the strict predicate.
bool in_soc(double head, std::span<const double> tail, double tol = 0.0);
inline bool in_soc(const ConePoint& y, double tol = 0.0) { return in_soc(y.head, y.tail, tol); }

/// Closed-form Euclidean projection onto the second-order cone. Total
/// (no division by zero for vanishing tails), idempotent, 1-Lipschitz.
ConePoint project_soc_point(const ConePoint& y);

/// In-place tuple projection used by the field sweep: heads/tails given as
/// one span (head first).
void project_soc_tuple(std::span<double> y);

/// Projects every per-node tuple of a cone field independently.
ConeField project_cone_field(const ConeField& y);
void project_cone_field_into(const ConeField& y, ConeField& out);

/// True when every per-node tuple lies in the cone (up to `tol`).
bool cone_field_feasible(const ConeField& y, double tol = 0.0);

/// Pointwise multiplier sqrt(omega) that folds positive transport weights
/// into the cone embedding, so the weighted constraint becomes membership
/// of the standard cone. Rejects nonpositive weights.
std::vector<double> build_weighted_embed_scale(std::span<const double> omega, const GridSpec& g);

}  // namespace otgrid
