#pragma once

#include "otgrid/problem.hpp"
#include "otgrid/solver.hpp"

namespace otgrid {

struct Level {
    GridSpec grid;
    double tol;
};

/// Coarse-to-fine schedule: `depth` dyadic coarsenings of `target`, solved
/// at tolerance max(tol * 10^-v, 1e-6) on level v >= 1 and `tol` on the
/// target grid. Every segment count must stay an integer >= 1 after
/// halving.
std::vector<Level> build_schedule(const GridSpec& target, int depth, double tol);

/// Multilinear prolongation of an iterate onto the doubled grid. Each
/// field block is interpolated at its own node positions (staggered axes
/// included, with linear extension at the half-cell boundary); the cone
/// multiplier is re-projected into the feasible set and the cone state is
/// rebuilt from the prolonged slope so the warm start is admissible.
SolverState prolong_state(const SolverState& coarse, const GridSpec& coarse_grid,
                          const GridSpec& fine_grid, const Problem& fine_problem);

struct LevelReport {
    GridSpec grid;
    double tol = 0.0;
    long iterations = 0;
    SolveStatus status = SolveStatus::IterBudget;
    double seconds = 0.0;
    double sigma_final = 0.0;
    std::vector<HistoryRow> history;
    std::vector<SigmaEvent> sigma_trace;
};

struct RunOutcome {
    Solution solution;               // finest-level result
    std::vector<LevelReport> levels; // coarse to fine
    Problem problem;                 // finest-level problem
    double elapsed_seconds = 0.0;
};

/// Runs the whole schedule: each level's problem is rebuilt from the
/// definition on that level's grid, solved to the level tolerance, and
/// prolonged as the next warm start. The time budget spans all levels.
RunOutcome solve_multilevel(const ProblemDef& def, const GridSpec& target,
                            const SolverConfig& cfg);

}  // namespace otgrid
