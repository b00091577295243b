#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "otgrid/cone.hpp"
#include "otgrid/multilevel.hpp"
#include "otgrid/operators.hpp"

using namespace otgrid;
using namespace otgrid::test;

namespace {

Problem uniform_problem(const GridSpec& g) { return exact_uniform_kkt(g).problem; }

}  // namespace

TEST_SUITE_BEGIN("multilevel");

TEST_CASE("schedule grids and tolerances") {
    {
        const auto levels = build_schedule(GridSpec({64, 256, 256}), 3, 1e-4);
        REQUIRE(levels.size() == 4);
        CHECK(levels[0].grid == GridSpec({8, 32, 32}));
        CHECK(levels[1].grid == GridSpec({16, 64, 64}));
        CHECK(levels[2].grid == GridSpec({32, 128, 128}));
        CHECK(levels[3].grid == GridSpec({64, 256, 256}));
        CHECK(levels[0].tol == doctest::Approx(1e-6).epsilon(1e-12));
        CHECK(levels[1].tol == doctest::Approx(1e-6).epsilon(1e-12));
        CHECK(levels[2].tol == doctest::Approx(1e-5).epsilon(1e-12));
        CHECK(levels[3].tol == 1e-4);
    }
    {
        const auto levels = build_schedule(GridSpec({32, 128, 128}), 0, 1e-3);
        REQUIRE(levels.size() == 1);
        CHECK(levels[0].tol == 1e-3);
    }
    {
        // tol 1e-3 two levels up: max(1e-5, 1e-6).
        const auto levels = build_schedule(GridSpec({32, 128, 128}), 2, 1e-3);
        CHECK(levels[0].tol == doctest::Approx(1e-5).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_schedule(GridSpec({6, 10}), 2, 1e-4), std::invalid_argument);
}

TEST_CASE("prolongation reproduces constants and multilinear fields") {
    const GridSpec coarse({2, 4});
    const GridSpec fine({4, 8});
    const Problem fine_problem = uniform_problem(fine);
    SolverState s = SolverState::zeros(coarse, 1.0);

    // Constant everywhere.
    for (double& v : s.potential.values) v = 3.25;
    for (auto& b : s.slope.blocks)
        for (double& v : b) v = -1.5;
    for (auto& b : s.transport.blocks)
        for (double& v : b) v = 0.75;
    SolverState f = prolong_state(s, coarse, fine, fine_problem);
    for (double v : f.potential.values) CHECK(v == doctest::Approx(3.25).epsilon(1e-15));
    for (const auto& b : f.slope.blocks)
        for (double v : b) CHECK(v == doctest::Approx(-1.5).epsilon(1e-15));
    // Multipliers are measure weights: constants survive up to the
    // time-step ratio.
    for (const auto& b : f.transport.blocks)
        for (double v : b) CHECK(v == doctest::Approx(0.375).epsilon(1e-15));

    // Affine in the physical coordinates, evaluated at each block's own
    // node positions; multilinear interpolation must reproduce it exactly.
    auto fill_affine = [](const GridSpec& g, SolverState& st) {
        auto coord = [&](int axis, int idx, bool staggered) {
            return staggered ? (idx + 0.5) * g.step(axis) : idx * g.step(axis);
        };
        // potential: a + 2 t - x
        {
            const int n0 = g.segments(0), n1 = g.segments(1);
            for (int i0 = 0; i0 <= n0; ++i0)
                for (int i1 = 0; i1 <= n1; ++i1)
                    st.potential.values[static_cast<std::size_t>(i0 * (n1 + 1) + i1)] =
                        1.0 + 2.0 * coord(0, i0, false) - coord(1, i1, false);
        }
        // slope block 0 on (staggered t, centered x)
        {
            const int n0 = g.segments(0), n1 = g.segments(1);
            for (int t = 0; t < n0; ++t)
                for (int i1 = 0; i1 <= n1; ++i1)
                    st.slope.blocks[0][static_cast<std::size_t>(t * (n1 + 1) + i1)] =
                        -0.5 + coord(0, t, true) + 2.5 * coord(1, i1, false);
        }
        // slope block 1 on (centered t, staggered x)
        {
            const int n0 = g.segments(0), n1 = g.segments(1);
            for (int i0 = 0; i0 <= n0; ++i0)
                for (int sx = 0; sx < n1; ++sx)
                    st.slope.blocks[1][static_cast<std::size_t>(i0 * n1 + sx)] =
                        2.0 - coord(0, i0, false) + 0.25 * coord(1, sx, true);
        }
    };
    SolverState affine_coarse = SolverState::zeros(coarse, 1.0);
    fill_affine(coarse, affine_coarse);
    SolverState affine_fine_expected = SolverState::zeros(fine, 1.0);
    fill_affine(fine, affine_fine_expected);
    const SolverState affine_fine = prolong_state(affine_coarse, coarse, fine, fine_problem);
    for (std::size_t i = 0; i < affine_fine.potential.values.size(); ++i)
        CHECK(std::abs(affine_fine.potential.values[i] -
                       affine_fine_expected.potential.values[i]) <= 1e-13);
    for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t i = 0; i < affine_fine.slope.blocks[d].size(); ++i)
            CHECK(std::abs(affine_fine.slope.blocks[d][i] -
                           affine_fine_expected.slope.blocks[d][i]) <= 1e-13);
}

TEST_CASE("prolonged states are admissible warm starts") {
    const GridSpec coarse({2, 4, 4});
    const GridSpec fine({4, 8, 8});
    const Problem fine_problem = make_example(ExampleId::Ex1, 0.1).materialize(fine);
    auto gen = rng(601);
    SolverState s = SolverState::zeros(coarse, 2.0);
    s.potential = random_centered(gen, coarse);
    s.slope = random_staggered(gen, coarse);
    s.transport = random_staggered(gen, coarse);
    s.lifted = random_cone(gen, coarse);
    s.lifted_dual = random_cone(gen, coarse);
    const SolverState f = prolong_state(s, coarse, fine, fine_problem);
    CHECK(f.penalty == 2.0);
    // The cone multiplier is feasible and the cone state was rebuilt from
    // the prolonged slope.
    CHECK(cone_field_feasible(f.lifted_dual, 1e-12));
    ConeField arg = cone_embed(f.slope);
    const int last = fine.cone_blocks() - 1;
    for (int b = 0; b <= last; ++b) {
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        auto& ab = arg.blocks[static_cast<std::size_t>(b)];
        const auto& db = f.lifted_dual.blocks[static_cast<std::size_t>(b)];
        for (std::size_t i = 0; i < ab.size(); ++i) ab[i] += off - db[i] / f.penalty;
    }
    const ConeField expect = project_cone_field(arg);
    for (int b = 0; b <= last; ++b)
        for (std::size_t i = 0; i < expect.blocks[0].size(); ++i)
            CHECK(f.lifted.blocks[static_cast<std::size_t>(b)][i] ==
                  expect.blocks[static_cast<std::size_t>(b)][i]);

    CHECK_THROWS_AS(prolong_state(s, coarse, GridSpec({4, 8, 12}), fine_problem),
                    std::invalid_argument);
}

TEST_CASE("multilevel runs converge and report one entry per level") {
    const GridSpec g({4, 16, 16});
    const ProblemDef def = make_example(ExampleId::Ex1, 0.1);
    SolverConfig cfg;
    cfg.tol = 1e-4;
    cfg.multilevel.depth = 1;
    const RunOutcome out = solve_multilevel(def, g, cfg);
    REQUIRE(out.levels.size() == 2);
    CHECK(out.levels[0].grid == GridSpec({2, 8, 8}));
    CHECK(out.levels[1].grid == GridSpec({4, 16, 16}));
    CHECK(out.solution.status == SolveStatus::Converged);
    CHECK(out.solution.residuals.eta_dot <= 1e-4);
}

TEST_CASE("warm starts cut the fine-grid iteration count") {
    // delta = 0 keeps the cold baseline well above the stopping cadence, so
    // the cut is measurable.
    const GridSpec g({32, 128, 128});
    const ProblemDef def = make_example(ExampleId::Ex1, 0.0);
    SolverConfig cold;
    cold.tol = 1e-4;
    cold.max_iter = 50000;
    const Solution cold_sol = run(def.materialize(g), cold);
    REQUIRE(cold_sol.status == SolveStatus::Converged);

    SolverConfig warm = cold;
    warm.multilevel.depth = 2;
    const RunOutcome warm_out = solve_multilevel(def, g, warm);
    REQUIRE(warm_out.solution.status == SolveStatus::Converged);
    const long warm_finest = warm_out.levels.back().iterations;
    CHECK(warm_finest * 3 <= cold_sol.iterations);
}

TEST_SUITE_END();
