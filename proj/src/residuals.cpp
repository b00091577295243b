#include "otgrid/residuals.hpp"

#include <cmath>

#include "otgrid/cone.hpp"
#include "otgrid/operators.hpp"

namespace otgrid {
namespace {

double sq_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double sq_diff_sum(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace

double discrete_l2(const GridSpec& g, std::span<const double> values) {
    return std::sqrt(g.cell_volume() * sq_sum(values));
}

double discrete_l2(const CenteredField& f) { return discrete_l2(f.grid, f.values); }

double discrete_l2(const StaggeredField& f) {
    double s = 0.0;
    for (const auto& b : f.blocks) s += sq_sum(b);
    return std::sqrt(f.grid.cell_volume() * s);
}

double discrete_l2(const ConeField& f) {
    double s = 0.0;
    for (const auto& b : f.blocks) s += sq_sum(b);
    return std::sqrt(f.grid.cell_volume() * s);
}

std::vector<double> constraint_value(const Problem& p, const StaggeredField& slope) {
    const GridSpec& g = p.grid;
    std::vector<std::vector<double>> squares;
    squares.reserve(static_cast<std::size_t>(g.spatial_dims()));
    for (int d = 1; d < g.axes(); ++d) {
        const auto& blk = slope.blocks[static_cast<std::size_t>(d)];
        std::vector<double> sq(blk.size());
        for (std::size_t i = 0; i < blk.size(); ++i) sq[i] = blk[i] * blk[i];
        squares.push_back(std::move(sq));
    }
    std::vector<double> f = average_to_constraint(g, squares);
    const auto& q0 = slope.blocks[0];
    if (p.weighted())
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = q0[i] + 0.5 * p.omega[i] * f[i];
    else
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = q0[i] + 0.5 * f[i];
    return f;
}

SocResiduals socp_residuals(const Problem& p, const CenteredField& phi, const ConeField& lifted,
                            const StaggeredField& slope, const StaggeredField& transport,
                            const ConeField& lifted_dual) {
    const GridSpec& g = p.grid;
    require(phi.grid == g && lifted.grid == g && slope.grid == g && transport.grid == g &&
                lifted_dual.grid == g,
            "socp_residuals: grid mismatch");
    const double vol = g.cell_volume();
    std::vector<double> scale;
    if (p.weighted()) scale = build_weighted_embed_scale(p.omega, g);

    SocResiduals out;

    // Complementarity: z vs its projection after the dual step.
    {
        ConeField step = lifted;
        for (int b = 0; b < g.cone_blocks(); ++b) {
            auto& sb = step.blocks[static_cast<std::size_t>(b)];
            const auto& db = lifted_dual.blocks[static_cast<std::size_t>(b)];
            for (std::size_t i = 0; i < sb.size(); ++i) sb[i] -= db[i];
        }
        ConeField proj = project_cone_field(step);
        double num = 0.0;
        for (int b = 0; b < g.cone_blocks(); ++b)
            num += sq_diff_sum(lifted.blocks[static_cast<std::size_t>(b)],
                               proj.blocks[static_cast<std::size_t>(b)]);
        out.proj = std::sqrt(vol * num) /
                   (1.0 + discrete_l2(lifted) + discrete_l2(lifted_dual));
    }

    // Primal: gradient coupling and the lifted affine constraint.
    {
        StaggeredField grad = gradient(phi);
        double num = 0.0, ngrad = 0.0, nslope = 0.0;
        for (int d = 0; d < g.axes(); ++d) {
            num += sq_diff_sum(grad.blocks[static_cast<std::size_t>(d)],
                               slope.blocks[static_cast<std::size_t>(d)]);
            ngrad += sq_sum(grad.blocks[static_cast<std::size_t>(d)]);
            nslope += sq_sum(slope.blocks[static_cast<std::size_t>(d)]);
        }
        const double r1 = std::sqrt(vol * num) /
                          (1.0 + std::sqrt(vol * ngrad) + std::sqrt(vol * nslope));

        ConeField embedded = cone_embed(slope, scale);
        const int last = g.cone_blocks() - 1;
        double num2 = 0.0;
        for (int b = 0; b < g.cone_blocks(); ++b) {
            const double off = (b == 0 || b == last) ? 1.0 : 0.0;
            const auto& zb = lifted.blocks[static_cast<std::size_t>(b)];
            const auto& eb = embedded.blocks[static_cast<std::size_t>(b)];
            for (std::size_t i = 0; i < zb.size(); ++i) {
                const double d = zb[i] - eb[i] - off;
                num2 += d * d;
            }
        }
        const double norm_d = std::sqrt(vol * 2.0 * static_cast<double>(g.constraint_size()));
        out.primal = std::max(r1, std::sqrt(vol * num2) / (1.0 + norm_d));
    }

    // Dual: divergence stationarity and the lifted multiplier recovery.
    {
        CenteredField div = gradient_adjoint(transport);
        double num1 = 0.0;
        for (std::size_t i = 0; i < div.values.size(); ++i) {
            const double v = div.values[i] + p.cost.values[i];
            num1 += v * v;
        }
        const double r1 = std::sqrt(vol * num1) / (1.0 + discrete_l2(p.cost));
        StaggeredField pull = cone_embed_adjoint(lifted_dual, scale);
        double num = 0.0, npull = 0.0;
        for (int d = 0; d < g.axes(); ++d) {
            const auto& pb = pull.blocks[static_cast<std::size_t>(d)];
            const auto& tb = transport.blocks[static_cast<std::size_t>(d)];
            for (std::size_t i = 0; i < pb.size(); ++i) {
                const double v = pb[i] + tb[i];
                num += v * v;
            }
            npull += sq_sum(pb);
        }
        const double r2 = std::sqrt(vol * num) /
                          (1.0 + std::sqrt(vol * npull) + discrete_l2(transport));
        out.dual = std::max(r1, r2);
    }
    return out;
}

DotResiduals transport_residuals(const Problem& p, const CenteredField& phi,
                                 const StaggeredField& slope, const StaggeredField& transport) {
    const GridSpec& g = p.grid;
    require(phi.grid == g && slope.grid == g && transport.grid == g,
            "transport_residuals: grid mismatch");
    const double vol = g.cell_volume();
    DotResiduals out;

    {
        StaggeredField grad = gradient(phi);
        double num = 0.0, ngrad = 0.0, nslope = 0.0;
        for (int d = 0; d < g.axes(); ++d) {
            num += sq_diff_sum(grad.blocks[static_cast<std::size_t>(d)],
                               slope.blocks[static_cast<std::size_t>(d)]);
            ngrad += sq_sum(grad.blocks[static_cast<std::size_t>(d)]);
            nslope += sq_sum(slope.blocks[static_cast<std::size_t>(d)]);
        }
        out.eta_d = std::sqrt(vol * num) /
                    (1.0 + std::sqrt(vol * ngrad) + std::sqrt(vol * nslope));
    }
    {
        CenteredField div = gradient_adjoint(transport);
        double num = 0.0;
        for (std::size_t i = 0; i < div.values.size(); ++i) {
            const double v = div.values[i] + p.cost.values[i];
            num += v * v;
        }
        out.eta_p = std::sqrt(vol * num) / (1.0 + discrete_l2(p.cost));
    }
    {
        // Complementarity between the density multiplier and the constraint.
        const std::vector<double> f = constraint_value(p, slope);
        const auto& density = transport.blocks[0];
        double num = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double v = density[i] - std::max(0.0, f[i] + density[i]);
            num += v * v;
        }
        out.eta_proj = std::sqrt(vol * num) /
                       (1.0 + discrete_l2(g, density) + discrete_l2(g, f));
    }
    {
        // Momentum must equal the averaged density times the spatial slope.
        std::vector<double> weighted_density(transport.blocks[0]);
        if (p.weighted())
            for (std::size_t i = 0; i < weighted_density.size(); ++i)
                weighted_density[i] *= p.omega[i];
        const std::vector<std::vector<double>> avg = average_from_constraint(g, weighted_density);
        double num = 0.0, nmom = 0.0, ng = 0.0;
        for (int d = 1; d < g.axes(); ++d) {
            const auto& momentum = transport.blocks[static_cast<std::size_t>(d)];
            const auto& qd = slope.blocks[static_cast<std::size_t>(d)];
            const auto& ad = avg[static_cast<std::size_t>(d - 1)];
            for (std::size_t i = 0; i < momentum.size(); ++i) {
                const double gi = ad[i] * qd[i];
                const double v = momentum[i] - gi;
                num += v * v;
                ng += gi * gi;
                nmom += momentum[i] * momentum[i];
            }
        }
        out.eta_s = std::sqrt(vol * num) /
                    (1.0 + std::sqrt(vol * nmom) + std::sqrt(vol * ng));
    }
    {
        double obj = 0.0;
        for (std::size_t i = 0; i < phi.values.size(); ++i)
            obj += p.cost.values[i] * phi.values[i];
        out.objective = obj;
    }
    return out;
}

}  // namespace otgrid
