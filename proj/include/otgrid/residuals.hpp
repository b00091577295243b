#pragma once

#include <span>

#include "otgrid/grid.hpp"
#include "otgrid/problem.hpp"

namespace otgrid {

/// sqrt(cell volume * sum of squares); multi-block fields sum blockwise
/// with the same per-grid volume.
double discrete_l2(const GridSpec& g, std::span<const double> values);
double discrete_l2(const CenteredField& f);
double discrete_l2(const StaggeredField& f);
double discrete_l2(const ConeField& f);

/// Normalized optimality measures of the lifted cone formulation; the
/// primal/dual split drives the penalty adaptation.
struct SocResiduals {
    double proj = 0.0;    // multiplier/slack complementarity
    double primal = 0.0;  // max of the two coupling constraint violations
    double dual = 0.0;    // max of the two stationarity violations
    double max() const { return std::max(proj, std::max(primal, dual)); }
};

/// Normalized optimality measures of the original transport system; their
/// max is the stopping metric. Weighted problems fold omega into the
/// constraint value and the momentum recovery.
struct DotResiduals {
    double eta_d = 0.0;     // gradient coupling (potential vs slope)
    double eta_p = 0.0;     // mass balance (divergence of the transport plus cost)
    double eta_proj = 0.0;  // density/constraint complementarity
    double eta_s = 0.0;     // momentum recovery consistency
    double objective = 0.0;
    double max() const {
        return std::max(std::max(eta_d, eta_p), std::max(eta_proj, eta_s));
    }
};

/// Everything the logs carry, bundled.
struct ResidualReport {
    DotResiduals dot;
    SocResiduals soc;
    double eta_dot = 0.0;
    double eta_soc = 0.0;
};

SocResiduals socp_residuals(const Problem& p, const CenteredField& phi, const ConeField& lifted,
                            const StaggeredField& slope, const StaggeredField& transport,
                            const ConeField& lifted_dual);

DotResiduals transport_residuals(const Problem& p, const CenteredField& phi,
                                 const StaggeredField& slope, const StaggeredField& transport);

/// Pointwise constraint value q_0 + (omega/2) * averaged squared spatial
/// slopes on the constraint lattice; nonpositive at feasible points.
std::vector<double> constraint_value(const Problem& p, const StaggeredField& slope);

}  // namespace otgrid
