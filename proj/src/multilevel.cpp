#include "otgrid/multilevel.hpp"

#include <chrono>
#include <cmath>

#include "otgrid/cone.hpp"
#include "otgrid/operators.hpp"

namespace otgrid {
namespace {

// 1-D prolongation of a line of samples at centered nodes (j -> coordinates
// j*H) onto the doubled grid: even fine nodes coincide, odd fine nodes are
// midpoints.
void refine_centered_line(const double* in, int n_coarse_nodes, double* out, std::int64_t stride_in,
                          std::int64_t stride_out) {
    const int nc = n_coarse_nodes;
    for (int j = 0; j < nc; ++j) out[2 * j * stride_out] = in[j * stride_in];
    for (int j = 0; j + 1 < nc; ++j)
        out[(2 * j + 1) * stride_out] =
            0.5 * (in[j * stride_in] + in[(j + 1) * stride_in]);
}

// 1-D prolongation at staggered nodes: coarse samples sit at (j+1/2)*H,
// fine ones at (k+1/2)*h with H = 2h. Interior points interpolate with
// weights 3/4, 1/4; the first/last half-cells extend linearly.
void refine_staggered_line(const double* in, int n_coarse, double* out, std::int64_t stride_in,
                           std::int64_t stride_out) {
    const int n = n_coarse;
    if (n == 1) {
        out[0] = in[0];
        out[stride_out] = in[0];
        return;
    }
    out[0] = 1.25 * in[0] - 0.25 * in[stride_in];
    for (int m = 0; m + 1 < n; ++m) {
        out[(2 * m + 1) * stride_out] = 0.75 * in[m * stride_in] + 0.25 * in[(m + 1) * stride_in];
        out[(2 * m + 2) * stride_out] = 0.25 * in[m * stride_in] + 0.75 * in[(m + 1) * stride_in];
    }
    out[(2 * n - 1) * stride_out] =
        1.25 * in[(n - 1) * stride_in] - 0.25 * in[(n - 2) * stride_in];
}

// Prolongs one array along a single axis; the other axes keep their extents.
std::vector<double> refine_axis(const std::vector<double>& in, const std::vector<int>& shape,
                                int axis, bool staggered, std::vector<int>& shape_out) {
    shape_out = shape;
    const int n_in = shape[static_cast<std::size_t>(axis)];
    const int n_out = staggered ? 2 * n_in : 2 * (n_in - 1) + 1;
    shape_out[static_cast<std::size_t>(axis)] = n_out;

    std::int64_t outer = 1, inner = 1;
    for (int d = 0; d < axis; ++d) outer *= shape[static_cast<std::size_t>(d)];
    for (int d = axis + 1; d < static_cast<int>(shape.size()); ++d)
        inner *= shape[static_cast<std::size_t>(d)];

    std::vector<double> out(static_cast<std::size_t>(outer) * n_out * inner);
    for (std::int64_t o = 0; o < outer; ++o)
        for (std::int64_t i = 0; i < inner; ++i) {
            const double* src = in.data() + (o * n_in) * inner + i;
            double* dst = out.data() + (o * n_out) * inner + i;
            if (staggered)
                refine_staggered_line(src, n_in, dst, inner, inner);
            else
                refine_centered_line(src, n_in, dst, inner, inner);
        }
    return out;
}

// Doubles every axis of a field; `staggered_axis` < 0 means all axes carry
// centered nodes.
std::vector<double> refine_all_axes(std::vector<double> data, std::vector<int> shape,
                                    int staggered_axis) {
    for (int axis = 0; axis < static_cast<int>(shape.size()); ++axis) {
        std::vector<int> next_shape;
        data = refine_axis(data, shape, axis, axis == staggered_axis, next_shape);
        shape = std::move(next_shape);
    }
    return data;
}

}  // namespace

std::vector<Level> build_schedule(const GridSpec& target, int depth, double tol) {
    if (depth < 0) throw std::invalid_argument("build_schedule: depth must be >= 0");
    std::vector<Level> levels;
    for (int v = depth; v >= 0; --v) {
        std::vector<int> n = target.segments();
        for (int& e : n) {
            const int div = 1 << v;
            if (e % div != 0)
                throw std::invalid_argument(
                    "build_schedule: grid not divisible by 2^depth on every axis");
            e /= div;
        }
        const double level_tol = (v == 0) ? tol : std::max(tol * std::pow(10.0, -v), 1e-6);
        levels.push_back({GridSpec(std::move(n)), level_tol});
    }
    return levels;
}

SolverState prolong_state(const SolverState& coarse, const GridSpec& coarse_grid,
                          const GridSpec& fine_grid, const Problem& fine_problem) {
    for (int d = 0; d < coarse_grid.axes(); ++d)
        require(fine_grid.segments(d) == 2 * coarse_grid.segments(d),
                "prolong_state: fine grid must double every axis");
    require(fine_problem.grid == fine_grid, "prolong_state: problem/grid mismatch");
    require(coarse.potential.grid == coarse_grid, "prolong_state: state grid mismatch");

    SolverState fine = SolverState::zeros(fine_grid, coarse.penalty);
    fine.iter = coarse.iter;

    fine.potential.values =
        refine_all_axes(coarse.potential.values, coarse_grid.centered_shape(), -1);
    // The potential and slope are node samples of mesh-independent
    // functions and interpolate as they are. The multipliers are measure
    // weights: the density block carries h_0 * density values, so the whole
    // dual pair rescales by the time-step ratio when the mesh refines.
    const double dual_scale = fine_grid.step(0) / coarse_grid.step(0);
    for (int d = 0; d < coarse_grid.axes(); ++d) {
        fine.slope.blocks[static_cast<std::size_t>(d)] = refine_all_axes(
            coarse.slope.blocks[static_cast<std::size_t>(d)], coarse_grid.staggered_shape(d), d);
        auto dual = refine_all_axes(coarse.transport.blocks[static_cast<std::size_t>(d)],
                                    coarse_grid.staggered_shape(d), d);
        for (double& v : dual) v *= dual_scale;
        fine.transport.blocks[static_cast<std::size_t>(d)] = std::move(dual);
    }
    for (int b = 0; b < coarse_grid.cone_blocks(); ++b) {
        auto dual = refine_all_axes(coarse.lifted_dual.blocks[static_cast<std::size_t>(b)],
                                    coarse_grid.constraint_shape(), 0);
        for (double& v : dual) v *= dual_scale;
        fine.lifted_dual.blocks[static_cast<std::size_t>(b)] = std::move(dual);
    }

    // Interpolation can push the multiplier tuples slightly outside the
    // cone; one projection restores an admissible start.
    project_cone_field_into(fine.lifted_dual, fine.lifted_dual);

    // Rebuild the cone state consistently with the prolonged slope.
    std::vector<double> scale;
    if (fine_problem.weighted())
        scale = build_weighted_embed_scale(fine_problem.omega, fine_grid);
    ConeField arg = cone_embed(fine.slope, scale);
    const int last = fine_grid.cone_blocks() - 1;
    const double inv_sigma = 1.0 / fine.penalty;
    for (int b = 0; b <= last; ++b) {
        auto& ab = arg.blocks[static_cast<std::size_t>(b)];
        const auto& db = fine.lifted_dual.blocks[static_cast<std::size_t>(b)];
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < ab.size(); ++i) ab[i] += off - inv_sigma * db[i];
    }
    project_cone_field_into(arg, fine.lifted);
    return fine;
}

RunOutcome solve_multilevel(const ProblemDef& def, const GridSpec& target,
                            const SolverConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto remaining = [&] {
        return cfg.max_time_seconds -
               std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const std::vector<Level> levels = build_schedule(target, cfg.multilevel.depth, cfg.tol);

    RunOutcome outcome;
    std::optional<SolverState> warm;
    GridSpec prev_grid = levels.front().grid;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        const Level& level = levels[li];
        Problem problem = def.materialize(level.grid);
        if (warm) warm = prolong_state(*warm, prev_grid, level.grid, problem);

        SolverConfig level_cfg = cfg;
        level_cfg.tol = level.tol;
        level_cfg.multilevel.depth = 0;
        level_cfg.max_time_seconds = remaining();

        SolverEngine engine(problem);
        Solution sol = engine.run(level_cfg, std::move(warm));
        outcome.levels.push_back({level.grid, level.tol, sol.iterations, sol.status,
                                  sol.elapsed_seconds, sol.state.penalty, sol.history,
                                  sol.sigma_trace});

        const bool last_level = li + 1 == levels.size();
        if (last_level || sol.status == SolveStatus::Aborted) {
            outcome.solution = std::move(sol);
            outcome.problem = std::move(problem);
            if (!last_level) break;
        } else {
            warm = std::move(sol.state);
            prev_grid = level.grid;
        }
    }
    outcome.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return outcome;
}

}  // namespace otgrid
