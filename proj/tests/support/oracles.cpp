#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "otgrid/operators.hpp"

namespace otgrid::test {
namespace {

std::int64_t staggered_total(const GridSpec& g) {
    std::int64_t s = 0;
    for (int d = 0; d < g.axes(); ++d) s += g.staggered_size(d);
    return s;
}

void check_probe_budget(std::int64_t rows, std::int64_t cols) {
    if (rows > 10000 || cols > 10000)
        throw std::invalid_argument("densify: grid too large for dense probing");
}

}  // namespace

Eigen::VectorXd flatten(const CenteredField& f) {
    return Eigen::Map<const Eigen::VectorXd>(f.values.data(),
                                             static_cast<Eigen::Index>(f.values.size()));
}

Eigen::VectorXd flatten(const StaggeredField& f) {
    Eigen::VectorXd v(staggered_total(f.grid));
    Eigen::Index at = 0;
    for (const auto& b : f.blocks) {
        for (double x : b) v[at++] = x;
    }
    return v;
}

Eigen::VectorXd flatten(const ConeField& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.blocks.size()) *
                      static_cast<Eigen::Index>(f.grid.constraint_size()));
    Eigen::Index at = 0;
    for (const auto& b : f.blocks)
        for (double x : b) v[at++] = x;
    return v;
}

StaggeredField unflatten_staggered(const GridSpec& g, const Eigen::VectorXd& v) {
    StaggeredField f = StaggeredField::zeros(g);
    Eigen::Index at = 0;
    for (auto& b : f.blocks)
        for (double& x : b) x = v[at++];
    return f;
}

DenseOperator densify(OpTag tag, const GridSpec& g) {
    const std::int64_t n_cent = g.centered_size();
    const std::int64_t n_stag = staggered_total(g);
    const std::int64_t n_cons = g.constraint_size();
    const std::int64_t n_cone = n_cons * g.cone_blocks();
    const std::int64_t n_spatial_stag = n_stag - n_cons;

    auto probe = [](std::int64_t rows, std::int64_t cols, auto&& apply) {
        check_probe_budget(rows, cols);
        Eigen::MatrixXd m(rows, cols);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(cols);
        for (std::int64_t j = 0; j < cols; ++j) {
            e[j] = 1.0;
            m.col(j) = apply(e);
            e[j] = 0.0;
        }
        return m;
    };

    Eigen::MatrixXd m;
    switch (tag) {
        case OpTag::Gradient:
            m = probe(n_stag, n_cent, [&](const Eigen::VectorXd& e) {
                CenteredField phi = CenteredField::zeros(g);
                for (std::size_t i = 0; i < phi.values.size(); ++i) phi.values[i] = e[i];
                return flatten(gradient(phi));
            });
            break;
        case OpTag::GradientAdjoint:
            m = probe(n_cent, n_stag, [&](const Eigen::VectorXd& e) {
                return flatten(gradient_adjoint(unflatten_staggered(g, e)));
            });
            break;
        case OpTag::Decouple: {
            // All 4D corner shifts stacked, acting on the spatial blocks.
            m = probe(4 * g.spatial_dims() * n_cons, n_spatial_stag, [&](const Eigen::VectorXd& e) {
                StaggeredField q = StaggeredField::zeros(g);
                Eigen::Index at = 0;
                for (int d = 1; d < g.axes(); ++d)
                    for (double& x : q.blocks[static_cast<std::size_t>(d)]) x = e[at++];
                Eigen::VectorXd out(4 * g.spatial_dims() * n_cons);
                std::vector<double> blk(static_cast<std::size_t>(n_cons));
                Eigen::Index w = 0;
                for (int d = 1; d < g.axes(); ++d)
                    for (int v = 0; v < 4; ++v) {
                        shift_to_constraint(g, d, v, q.blocks[static_cast<std::size_t>(d)], blk);
                        for (double x : blk) out[w++] = x;
                    }
                return out;
            });
            break;
        }
        case OpTag::Embed:
            m = probe(n_cone, n_stag, [&](const Eigen::VectorXd& e) {
                return flatten(cone_embed(unflatten_staggered(g, e)));
            });
            break;
        case OpTag::EmbedGram:
            m = probe(n_stag, n_stag, [&](const Eigen::VectorXd& e) {
                return flatten(cone_embed_adjoint(cone_embed(unflatten_staggered(g, e))));
            });
            break;
        case OpTag::AverageToConstraint:
            m = probe(n_cons, n_spatial_stag, [&](const Eigen::VectorXd& e) {
                std::vector<std::vector<double>> blocks;
                Eigen::Index at = 0;
                for (int d = 1; d < g.axes(); ++d) {
                    std::vector<double> b(static_cast<std::size_t>(g.staggered_size(d)));
                    for (double& x : b) x = e[at++];
                    blocks.push_back(std::move(b));
                }
                const std::vector<double> out = average_to_constraint(g, blocks);
                return Eigen::Map<const Eigen::VectorXd>(out.data(),
                                                         static_cast<Eigen::Index>(out.size()))
                    .eval();
            });
            break;
    }
    return DenseOperator{tag, g, std::move(m)};
}

std::vector<double> project_parabola_point(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    double tail_sq = 0.0;
    for (std::size_t v = 1; v < x.size(); ++v) tail_sq += x[v] * x[v];
    const double violation = x[0] + 0.125 * tail_sq;
    if (violation <= 0.0) return out;

    // Multiplier equation g(lam) = x0 - lam + (tail_sq/8) / (1 + lam/4)^2,
    // strictly decreasing with g(0) = violation > 0; bracket then refine.
    auto value = [&](double lam) {
        const double s = 1.0 + 0.25 * lam;
        return x[0] - lam + 0.125 * tail_sq / (s * s);
    };
    double lo = 0.0;
    double hi = violation + 1.0;  // g(hi) <= x0 + tail_sq/8 - hi < 0
    double lam = 0.5 * hi;
    for (int it = 0; it < 200; ++it) {
        const double f = value(lam);
        if (f > 0.0)
            lo = lam;
        else
            hi = lam;
        const double s = 1.0 + 0.25 * lam;
        const double deriv = -1.0 - 0.0625 * tail_sq / (s * s * s);
        double next = lam - f / deriv;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - lam) < 1e-16 * (1.0 + std::abs(lam)) && std::abs(f) < 1e-14) {
            lam = next;
            break;
        }
        lam = next;
    }
    out[0] = x[0] - lam;
    const double shrink = 1.0 / (1.0 + 0.25 * lam);
    for (std::size_t v = 1; v < out.size(); ++v) out[v] = x[v] * shrink;
    return out;
}

bool cone_vs_parabola_consistency(std::span<const double> x) {
    double tail_sq = 0.0;
    for (std::size_t v = 1; v < x.size(); ++v) tail_sq += x[v] * x[v];
    const bool parabola_ok = x[0] + 0.125 * tail_sq <= 0.0;

    // Scalar embedding with offset: head 1 - x0, middle sqrt(2)/2 * xv,
    // last 1 + x0.
    const double head = 1.0 - x[0];
    double norm_sq = 0.5 * tail_sq + (1.0 + x[0]) * (1.0 + x[0]);
    const bool cone_ok = head >= std::sqrt(norm_sq);
    return parabola_ok == cone_ok;
}

std::vector<double> analytic_gaussian(double t, const GridSpec& g, double chi, double mu1,
                                      double mu2) {
    if (g.spatial_dims() != 2)
        throw std::invalid_argument("analytic_gaussian: two spatial dimensions expected");
    const double m1 = (1.0 - t) * mu1 + t * mu2;
    const double m2 = (1.0 - t) * mu2 + t * mu1;
    const int n1 = g.segments(1), n2 = g.segments(2);
    std::vector<double> v(static_cast<std::size_t>((n1 + 1) * (n2 + 1)));
    double sum = 0.0;
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) {
            const double x1 = i * g.step(1), x2 = j * g.step(2);
            const double e =
                std::exp(-((x1 - m1) * (x1 - m1) + (x2 - m2) * (x2 - m2)) / (2.0 * chi * chi));
            v[static_cast<std::size_t>(i * (n2 + 1) + j)] = e;
            sum += e;
        }
    for (double& e : v) e /= sum;
    return v;
}

UniformKkt exact_uniform_kkt(const GridSpec& g, double sigma) {
    const std::vector<double> rho(static_cast<std::size_t>(g.spatial_size()), 1.0);
    Problem p{g, build_cost_vector(rho, rho, g), {}, "uniform"};
    SolverState s = SolverState::zeros(g, sigma);
    // Constant density multiplier h0 * c matches the cost slices; the cone
    // multiplier splits it between the first and last blocks.
    const double level = g.step(0) * p.cost.values[0];
    for (double& v : s.transport.blocks[0]) v = level;
    for (double& v : s.lifted_dual.blocks[0]) v = 0.5 * level;
    for (double& v : s.lifted_dual.blocks[static_cast<std::size_t>(g.cone_blocks() - 1)])
        v = -0.5 * level;
    // The lifted state is the pure offset (slope is zero).
    for (double& v : s.lifted.blocks[0]) v = 1.0;
    for (double& v : s.lifted.blocks[static_cast<std::size_t>(g.cone_blocks() - 1)]) v = 1.0;
    return {std::move(p), std::move(s)};
}

double uniform(std::mt19937_64& gen, double lo, double hi) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(gen, lo, hi);
    return v;
}

CenteredField random_centered(std::mt19937_64& gen, const GridSpec& g) {
    CenteredField f = CenteredField::zeros(g);
    for (double& x : f.values) x = uniform(gen, -1.0, 1.0);
    return f;
}

StaggeredField random_staggered(std::mt19937_64& gen, const GridSpec& g) {
    StaggeredField f = StaggeredField::zeros(g);
    for (auto& b : f.blocks)
        for (double& x : b) x = uniform(gen, -1.0, 1.0);
    return f;
}

ConeField random_cone(std::mt19937_64& gen, const GridSpec& g) {
    ConeField f = ConeField::zeros(g);
    for (auto& b : f.blocks)
        for (double& x : b) x = uniform(gen, -1.0, 1.0);
    return f;
}

}  // namespace otgrid::test
