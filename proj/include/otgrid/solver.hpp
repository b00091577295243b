#pragma once

#include <limits>
#include <memory>
#include <optional>

#include "otgrid/grid.hpp"
#include "otgrid/poisson.hpp"
#include "otgrid/problem.hpp"
#include "otgrid/residuals.hpp"

namespace otgrid {

enum class Algorithm { InexactPALM, PALM, Alg2, AcceleratedADMM };

std::optional<Algorithm> parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);

enum class StopMetric { TransportKKT, SocpKKT };

struct SigmaAdaptConfig {
    bool enabled = true;
    int interval = 50;     // iterations between checks
    double ratio = 5.0;    // imbalance threshold
    double factor = 2.0;   // multiplicative update
};

struct AccelConfig {
    double theta = 2.0;        // momentum horizon, >= 2
    double rho = 2.0;          // relaxation, in (0, 2]
    int restart_period = 200;  // momentum reset cadence
};

struct MultilevelConfig {
    int depth = 0;  // number of dyadic coarsenings before the target grid
};

struct SolverConfig {
    Algorithm algorithm = Algorithm::InexactPALM;
    double dual_step = 1.9;  // tau; fixed to 1 for Alg2
    double sigma0 = 1.0;
    double tol = 1e-4;
    StopMetric stop_metric = StopMetric::TransportKKT;
    long max_iter = 200000;
    double max_time_seconds = std::numeric_limits<double>::infinity();
    int residual_interval = 10;
    SigmaAdaptConfig sigma_adapt;
    AccelConfig accel;
    MultilevelConfig multilevel;

    double effective_dual_step() const { return algorithm == Algorithm::Alg2 ? 1.0 : dual_step; }
    void validate() const;
};

/// One iterate of the splitting schemes. The transport multiplier carries
/// the recovered solution: block 0 is the density on the constraint
/// lattice, blocks 1..D the momentum.
struct SolverState {
    CenteredField potential;   // phi
    StaggeredField slope;      // q
    StaggeredField transport;  // alpha
    ConeField lifted;          // z
    ConeField lifted_dual;     // beta
    double penalty = 1.0;      // sigma
    long iter = 0;

    static SolverState zeros(const GridSpec& g, double sigma0 = 1.0);
};

enum class SolveStatus { Converged, IterBudget, TimeBudget, Aborted };
std::string status_name(SolveStatus s);

struct HistoryRow {
    long iter = 0;
    double eta_d = 0, eta_p = 0, eta_proj = 0, eta_s = 0;
    double eta_dot = 0, eta_soc = 0;
    double sigma = 0;
    double elapsed_s = 0;
};

struct SigmaEvent {
    long iter;
    double sigma;
};

struct Solution {
    SolverState state;
    ResidualReport residuals;
    SolveStatus status = SolveStatus::IterBudget;
    long iterations = 0;
    double elapsed_seconds = 0.0;
    double objective = 0.0;
    std::vector<HistoryRow> history;
    std::vector<SigmaEvent> sigma_trace;
};

/// Owns the per-problem machinery (spectral solver, gram diagonal, embed
/// scale, scratch buffers) and runs the iteration schemes without per-step
/// allocation. One engine serves one problem; distinct runs need distinct
/// engines or exclusive use.
class SolverEngine {
public:
    explicit SolverEngine(const Problem& p);
    ~SolverEngine();
    SolverEngine(const SolverEngine&) = delete;
    SolverEngine& operator=(const SolverEngine&) = delete;

    const Problem& problem() const { return problem_; }

    /// One sweep of the selected scheme; dispatches on cfg.algorithm.
    void step(SolverState& s, const SolverConfig& cfg);

    void step_inexact_palm(SolverState& s, double tau);
    void step_palm(SolverState& s, double tau);
    void step_accelerated_admm(SolverState& s, const AccelConfig& accel);

    /// Residual-balancing penalty update; returns true when sigma changed.
    /// An accelerated run restarts its momentum whenever this fires.
    bool update_sigma(SolverState& s, const SocResiduals& parts, const SigmaAdaptConfig& cfg);

    /// Resets the acceleration companions (restart); cheap for the other
    /// schemes.
    void reset_momentum();

    Solution run(const SolverConfig& cfg, std::optional<SolverState> initial = std::nullopt);

    ResidualReport evaluate(const SolverState& s) const;

    struct Impl;

private:
    Problem problem_;
    std::unique_ptr<Impl> impl_;
};

/// Convenience single-level run from the default zero start.
Solution run(const Problem& p, const SolverConfig& cfg,
             std::optional<SolverState> initial = std::nullopt);

/// Per-time-slice view of the recovered solution, plus the nonnegativity
/// diagnostics behind the violation histograms.
struct DensityTrajectory {
    int time_slices = 0;                  // n_0
    std::int64_t slice_size = 0;          // spatial node count
    std::vector<std::vector<double>> density;   // one spatial array per slice
    std::vector<std::vector<double>> momentum;  // spatial staggered blocks
    std::vector<long> negative_counts;          // per slice
    std::vector<double> most_negative;          // per slice (0 when none)
};

DensityTrajectory extract_density(const SolverState& s);
inline DensityTrajectory extract_density(const Solution& s) { return extract_density(s.state); }

}  // namespace otgrid
