#include "otgrid/solver.hpp"

#include <chrono>
#include <cmath>

#include "otgrid/cone.hpp"
#include "otgrid/operators.hpp"

namespace otgrid {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_state(const SolverState& s, const GridSpec& g) {
    require(s.potential.grid == g && s.potential.shape_ok(), "solver: potential shape mismatch");
    require(s.slope.grid == g && s.slope.shape_ok(), "solver: slope shape mismatch");
    require(s.transport.grid == g && s.transport.shape_ok(), "solver: transport shape mismatch");
    require(s.lifted.grid == g && s.lifted.shape_ok(), "solver: lifted shape mismatch");
    require(s.lifted_dual.grid == g && s.lifted_dual.shape_ok(),
            "solver: lifted dual shape mismatch");
    require(s.penalty > 0.0, "solver: penalty must be positive");
}

}  // namespace

std::optional<Algorithm> parse_algorithm(const std::string& name) {
    if (name == "inpalm") return Algorithm::InexactPALM;
    if (name == "palm") return Algorithm::PALM;
    if (name == "alg2") return Algorithm::Alg2;
    if (name == "accadmm") return Algorithm::AcceleratedADMM;
    return std::nullopt;
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::InexactPALM: return "inpalm";
        case Algorithm::PALM: return "palm";
        case Algorithm::Alg2: return "alg2";
        case Algorithm::AcceleratedADMM: return "accadmm";
    }
    return "?";
}

std::string status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::IterBudget: return "max_iter";
        case SolveStatus::TimeBudget: return "max_time";
        case SolveStatus::Aborted: return "aborted";
    }
    return "?";
}

void SolverConfig::validate() const {
    if (algorithm == Algorithm::InexactPALM || algorithm == Algorithm::PALM) {
        if (!(dual_step > 0.0 && dual_step < 2.0))
            throw std::invalid_argument("solver config: dual step must lie in (0, 2)");
    }
    if (algorithm == Algorithm::AcceleratedADMM) {
        if (!(accel.theta >= 2.0))
            throw std::invalid_argument("solver config: acceleration theta must be >= 2");
        if (!(accel.rho > 0.0 && accel.rho <= 2.0))
            throw std::invalid_argument("solver config: relaxation rho must lie in (0, 2]");
        if (accel.restart_period < 1)
            throw std::invalid_argument("solver config: restart period must be >= 1");
    }
    if (!(sigma0 > 0.0)) throw std::invalid_argument("solver config: sigma0 must be positive");
    if (!(tol >= 0.0)) throw std::invalid_argument("solver config: tolerance must be >= 0");
    if (max_iter < 0) throw std::invalid_argument("solver config: max_iter must be >= 0");
    if (residual_interval < 1)
        throw std::invalid_argument("solver config: residual interval must be >= 1");
    if (sigma_adapt.enabled) {
        if (sigma_adapt.interval < 1)
            throw std::invalid_argument("solver config: sigma interval must be >= 1");
        if (!(sigma_adapt.ratio > 1.0))
            throw std::invalid_argument("solver config: sigma ratio must be > 1");
        if (!(sigma_adapt.factor > 1.0))
            throw std::invalid_argument("solver config: sigma factor must be > 1");
    }
    if (multilevel.depth < 0)
        throw std::invalid_argument("solver config: multilevel depth must be >= 0");
}

SolverState SolverState::zeros(const GridSpec& g, double sigma0) {
    SolverState s{CenteredField::zeros(g), StaggeredField::zeros(g), StaggeredField::zeros(g),
                  ConeField::zeros(g),     ConeField::zeros(g),      sigma0,
                  0};
    return s;
}

struct SolverEngine::Impl {
    NeumannPoisson poisson;
    std::vector<double> scale;           // sqrt(omega), empty when unweighted
    StaggeredField inv_gram;             // 1 / (1 + gram diagonal)
    StaggeredField stag_a, stag_b;
    CenteredField cent_a;
    ConeField cone_a;
    // Acceleration companions.
    std::unique_ptr<SolverState> tilde, bar;
    long momentum_k = 0;

    explicit Impl(const Problem& p)
        : poisson(p.grid),
          inv_gram(StaggeredField::zeros(p.grid)),
          stag_a(StaggeredField::zeros(p.grid)),
          stag_b(StaggeredField::zeros(p.grid)),
          cent_a(CenteredField::zeros(p.grid)),
          cone_a(ConeField::zeros(p.grid)) {
        if (p.weighted()) scale = build_weighted_embed_scale(p.omega, p.grid);
        StaggeredField diag = cone_gram_diagonal(p.grid, p.omega);
        for (int d = 0; d < p.grid.axes(); ++d) {
            auto& inv = inv_gram.blocks[static_cast<std::size_t>(d)];
            const auto& dd = diag.blocks[static_cast<std::size_t>(d)];
            for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / (1.0 + dd[i]);
        }
    }
};

SolverEngine::SolverEngine(const Problem& p)
    : problem_(p), impl_(std::make_unique<Impl>(p)) {
    require(p.grid == p.cost.grid && p.cost.shape_ok(), "SolverEngine: cost shape mismatch");
    if (p.weighted())
        require(static_cast<std::int64_t>(p.omega.size()) == p.grid.constraint_size(),
                "SolverEngine: weight size mismatch");
}

SolverEngine::~SolverEngine() = default;

namespace {

// z_target <- project(embedded + d - dual/sigma), with `embedded` prebuilt in
// `work`; offsets of d fold into the first/last blocks.
void add_offset_minus_dual(ConeField& work, const ConeField& dual, double inv_sigma) {
    const int last = work.grid.cone_blocks() - 1;
    for (int b = 0; b <= last; ++b) {
        auto& wb = work.blocks[static_cast<std::size_t>(b)];
        const auto& db = dual.blocks[static_cast<std::size_t>(b)];
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < wb.size(); ++i) wb[i] += off - inv_sigma * db[i];
    }
}

// work <- lifted - d + dual/sigma (argument of the embed adjoint in the
// slope update).
void lifted_minus_offset_plus_dual(ConeField& work, const ConeField& lifted, const ConeField& dual,
                                   double inv_sigma) {
    const int last = work.grid.cone_blocks() - 1;
    for (int b = 0; b <= last; ++b) {
        auto& wb = work.blocks[static_cast<std::size_t>(b)];
        const auto& zb = lifted.blocks[static_cast<std::size_t>(b)];
        const auto& db = dual.blocks[static_cast<std::size_t>(b)];
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < wb.size(); ++i) wb[i] = zb[i] - off + inv_sigma * db[i];
    }
}

}  // namespace

void SolverEngine::step_inexact_palm(SolverState& s, double tau) {
    Impl& im = *impl_;
    const GridSpec& g = problem_.grid;
    const double sigma = s.penalty;
    const double inv_sigma = 1.0 / sigma;

    // Potential update: solve the Neumann system driven by the current
    // slope/multiplier splitting.
    for (int d = 0; d < g.axes(); ++d) {
        auto& w = im.stag_a.blocks[static_cast<std::size_t>(d)];
        const auto& q = s.slope.blocks[static_cast<std::size_t>(d)];
        const auto& al = s.transport.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = q[i] - inv_sigma * al[i];
    }
    gradient_adjoint_into(im.stag_a, im.cent_a);
    for (std::size_t i = 0; i < im.cent_a.values.size(); ++i)
        im.cent_a.values[i] -= inv_sigma * problem_.cost.values[i];
    im.poisson.solve_into(im.cent_a, s.potential);

    // Cone update from the pre-update slope.
    cone_embed_into(s.slope, im.cone_a, im.scale);
    add_offset_minus_dual(im.cone_a, s.lifted_dual, inv_sigma);
    project_cone_field_into(im.cone_a, s.lifted);

    // Slope update through the diagonal gram system.
    lifted_minus_offset_plus_dual(im.cone_a, s.lifted, s.lifted_dual, inv_sigma);
    cone_embed_adjoint_into(im.cone_a, im.stag_a, im.scale);
    gradient_into(s.potential, im.stag_b);
    for (int d = 0; d < g.axes(); ++d) {
        auto& q = s.slope.blocks[static_cast<std::size_t>(d)];
        const auto& grad = im.stag_b.blocks[static_cast<std::size_t>(d)];
        const auto& al = s.transport.blocks[static_cast<std::size_t>(d)];
        const auto& pull = im.stag_a.blocks[static_cast<std::size_t>(d)];
        const auto& inv = im.inv_gram.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] = (grad[i] + inv_sigma * al[i] + pull[i]) * inv[i];
    }

    // Dual ascent with step tau * sigma.
    const double ts = tau * sigma;
    for (int d = 0; d < g.axes(); ++d) {
        auto& al = s.transport.blocks[static_cast<std::size_t>(d)];
        const auto& grad = im.stag_b.blocks[static_cast<std::size_t>(d)];
        const auto& q = s.slope.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < al.size(); ++i) al[i] += ts * (grad[i] - q[i]);
    }
    cone_embed_into(s.slope, im.cone_a, im.scale);
    const int last = g.cone_blocks() - 1;
    for (int b = 0; b <= last; ++b) {
        auto& be = s.lifted_dual.blocks[static_cast<std::size_t>(b)];
        const auto& z = s.lifted.blocks[static_cast<std::size_t>(b)];
        const auto& e = im.cone_a.blocks[static_cast<std::size_t>(b)];
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < be.size(); ++i) be[i] += ts * (z[i] - e[i] - off);
    }
}

namespace {

// Shared tail of the PALM-style slope minimization: q <- inv_gram *
// (gradient + transport/sigma + embed_adjoint(lifted - d + dual/sigma)).
void slope_minimize_impl(SolverEngine::Impl& im, const GridSpec& g,
                         const std::vector<double>& scale, const CenteredField& potential,
                         const ConeField& lifted, const ConeField& lifted_dual,
                         const StaggeredField& transport, double inv_sigma,
                         StaggeredField& slope_out) {
    lifted_minus_offset_plus_dual(im.cone_a, lifted, lifted_dual, inv_sigma);
    cone_embed_adjoint_into(im.cone_a, im.stag_a, scale);
    gradient_into(potential, im.stag_b);
    for (int d = 0; d < g.axes(); ++d) {
        auto& q = slope_out.blocks[static_cast<std::size_t>(d)];
        const auto& grad = im.stag_b.blocks[static_cast<std::size_t>(d)];
        const auto& al = transport.blocks[static_cast<std::size_t>(d)];
        const auto& pull = im.stag_a.blocks[static_cast<std::size_t>(d)];
        const auto& inv = im.inv_gram.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < q.size(); ++i)
            q[i] = (grad[i] + inv_sigma * al[i] + pull[i]) * inv[i];
    }
}

}  // namespace

void SolverEngine::step_palm(SolverState& s, double tau) {
    Impl& im = *impl_;
    const GridSpec& g = problem_.grid;
    const double sigma = s.penalty;
    const double inv_sigma = 1.0 / sigma;

    // Provisional slope minimization at the current potential and cone state.
    slope_minimize_impl(im, g, im.scale, s.potential, s.lifted, s.lifted_dual, s.transport,
                        inv_sigma, s.slope);

    // Potential / cone block minimization at the provisional slope.
    for (int d = 0; d < g.axes(); ++d) {
        auto& w = im.stag_a.blocks[static_cast<std::size_t>(d)];
        const auto& q = s.slope.blocks[static_cast<std::size_t>(d)];
        const auto& al = s.transport.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = q[i] - inv_sigma * al[i];
    }
    gradient_adjoint_into(im.stag_a, im.cent_a);
    for (std::size_t i = 0; i < im.cent_a.values.size(); ++i)
        im.cent_a.values[i] -= inv_sigma * problem_.cost.values[i];
    im.poisson.solve_into(im.cent_a, s.potential);

    cone_embed_into(s.slope, im.cone_a, im.scale);
    add_offset_minus_dual(im.cone_a, s.lifted_dual, inv_sigma);
    project_cone_field_into(im.cone_a, s.lifted);

    // Second slope minimization at the refreshed blocks.
    slope_minimize_impl(im, g, im.scale, s.potential, s.lifted, s.lifted_dual, s.transport,
                        inv_sigma, s.slope);

    // Dual ascent.
    const double ts = tau * sigma;
    for (int d = 0; d < g.axes(); ++d) {
        auto& al = s.transport.blocks[static_cast<std::size_t>(d)];
        const auto& grad = im.stag_b.blocks[static_cast<std::size_t>(d)];
        const auto& q = s.slope.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < al.size(); ++i) al[i] += ts * (grad[i] - q[i]);
    }
    cone_embed_into(s.slope, im.cone_a, im.scale);
    const int last = g.cone_blocks() - 1;
    for (int b = 0; b <= last; ++b) {
        auto& be = s.lifted_dual.blocks[static_cast<std::size_t>(b)];
        const auto& z = s.lifted.blocks[static_cast<std::size_t>(b)];
        const auto& e = im.cone_a.blocks[static_cast<std::size_t>(b)];
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < be.size(); ++i) be[i] += ts * (z[i] - e[i] - off);
    }
}

void SolverEngine::step_accelerated_admm(SolverState& s, const AccelConfig& accel) {
    Impl& im = *impl_;
    const GridSpec& g = problem_.grid;
    if (!im.tilde) im.tilde = std::make_unique<SolverState>(SolverState::zeros(g, s.penalty));
    if (!im.bar) {
        im.bar = std::make_unique<SolverState>(s);
        im.momentum_k = 0;
    }
    SolverState& tilde = *im.tilde;
    SolverState& bar = *im.bar;
    const double sigma = s.penalty;
    const double inv_sigma = 1.0 / sigma;

    // Provisional slope at the current iterate.
    slope_minimize_impl(im, g, im.scale, s.potential, s.lifted, s.lifted_dual, s.transport,
                        inv_sigma, tilde.slope);

    // Intermediate multipliers take the full penalty step.
    gradient_into(s.potential, im.stag_b);
    for (int d = 0; d < g.axes(); ++d) {
        auto& out = tilde.transport.blocks[static_cast<std::size_t>(d)];
        const auto& al = s.transport.blocks[static_cast<std::size_t>(d)];
        const auto& grad = im.stag_b.blocks[static_cast<std::size_t>(d)];
        const auto& q = tilde.slope.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = al[i] + sigma * (grad[i] - q[i]);
    }
    cone_embed_into(tilde.slope, im.cone_a, im.scale);
    const int last = g.cone_blocks() - 1;
    for (int b = 0; b <= last; ++b) {
        auto& out = tilde.lifted_dual.blocks[static_cast<std::size_t>(b)];
        const auto& be = s.lifted_dual.blocks[static_cast<std::size_t>(b)];
        const auto& z = s.lifted.blocks[static_cast<std::size_t>(b)];
        const auto& e = im.cone_a.blocks[static_cast<std::size_t>(b)];
        const double off = (b == 0 || b == last) ? 1.0 : 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = be[i] + sigma * (z[i] - e[i] - off);
    }

    // Potential / cone minimization at the provisional slope and multipliers.
    for (int d = 0; d < g.axes(); ++d) {
        auto& w = im.stag_a.blocks[static_cast<std::size_t>(d)];
        const auto& q = tilde.slope.blocks[static_cast<std::size_t>(d)];
        const auto& al = tilde.transport.blocks[static_cast<std::size_t>(d)];
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = q[i] - inv_sigma * al[i];
    }
    gradient_adjoint_into(im.stag_a, im.cent_a);
    for (std::size_t i = 0; i < im.cent_a.values.size(); ++i)
        im.cent_a.values[i] -= inv_sigma * problem_.cost.values[i];
    im.poisson.solve_into(im.cent_a, tilde.potential);

    // cone_a still holds the embedded provisional slope.
    add_offset_minus_dual(im.cone_a, tilde.lifted_dual, inv_sigma);
    project_cone_field_into(im.cone_a, tilde.lifted);

    // Relaxation followed by the two-term momentum combination.
    const double k = static_cast<double>(im.momentum_k);
    const double c1 = accel.theta / (2.0 * (k + accel.theta));
    const double c2 = k / (k + accel.theta);
    const double rho = accel.rho;
    auto combine = [&](std::vector<double>& cur, const std::vector<double>& til,
                       std::vector<double>& br) {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            const double relaxed = (1.0 - rho) * cur[i] + rho * til[i];
            cur[i] += c1 * (relaxed - cur[i]) + c2 * (relaxed - br[i]);
            br[i] = relaxed;
        }
    };
    combine(s.potential.values, tilde.potential.values, bar.potential.values);
    for (int d = 0; d < g.axes(); ++d) {
        combine(s.slope.blocks[static_cast<std::size_t>(d)],
                tilde.slope.blocks[static_cast<std::size_t>(d)],
                bar.slope.blocks[static_cast<std::size_t>(d)]);
        combine(s.transport.blocks[static_cast<std::size_t>(d)],
                tilde.transport.blocks[static_cast<std::size_t>(d)],
                bar.transport.blocks[static_cast<std::size_t>(d)]);
    }
    for (int b = 0; b <= last; ++b) {
        combine(s.lifted.blocks[static_cast<std::size_t>(b)],
                tilde.lifted.blocks[static_cast<std::size_t>(b)],
                bar.lifted.blocks[static_cast<std::size_t>(b)]);
        combine(s.lifted_dual.blocks[static_cast<std::size_t>(b)],
                tilde.lifted_dual.blocks[static_cast<std::size_t>(b)],
                bar.lifted_dual.blocks[static_cast<std::size_t>(b)]);
    }
    ++im.momentum_k;
}

void SolverEngine::step(SolverState& s, const SolverConfig& cfg) {
    require_state(s, problem_.grid);
    switch (cfg.algorithm) {
        case Algorithm::InexactPALM:
            step_inexact_palm(s, cfg.effective_dual_step());
            break;
        case Algorithm::Alg2:
            step_inexact_palm(s, 1.0);
            break;
        case Algorithm::PALM:
            step_palm(s, cfg.effective_dual_step());
            break;
        case Algorithm::AcceleratedADMM:
            step_accelerated_admm(s, cfg.accel);
            break;
    }
}

bool SolverEngine::update_sigma(SolverState& s, const SocResiduals& parts,
                                const SigmaAdaptConfig& cfg) {
    if (!cfg.enabled) return false;
    double r;
    if (parts.dual == 0.0) {
        if (parts.primal == 0.0) return false;
        r = std::numeric_limits<double>::infinity();
    } else {
        r = parts.primal / parts.dual;
    }
    if (r > cfg.ratio) {
        s.penalty *= cfg.factor;
        return true;
    }
    if (r < 1.0 / cfg.ratio) {
        s.penalty /= cfg.factor;
        return true;
    }
    return false;
}

void SolverEngine::reset_momentum() {
    impl_->bar.reset();
    impl_->momentum_k = 0;
}

ResidualReport SolverEngine::evaluate(const SolverState& s) const {
    ResidualReport r;
    r.dot = transport_residuals(problem_, s.potential, s.slope, s.transport);
    r.soc = socp_residuals(problem_, s.potential, s.lifted, s.slope, s.transport, s.lifted_dual);
    r.eta_dot = r.dot.max();
    r.eta_soc = r.soc.max();
    return r;
}

Solution SolverEngine::run(const SolverConfig& cfg, std::optional<SolverState> initial) {
    cfg.validate();
    const auto t0 = Clock::now();
    Solution sol;
    sol.state = initial ? std::move(*initial) : SolverState::zeros(problem_.grid, cfg.sigma0);
    require_state(sol.state, problem_.grid);
    reset_momentum();

    auto record = [&](const ResidualReport& r, long k) {
        sol.history.push_back(HistoryRow{k, r.dot.eta_d, r.dot.eta_p, r.dot.eta_proj, r.dot.eta_s,
                                         r.eta_dot, r.eta_soc, sol.state.penalty,
                                         seconds_since(t0)});
    };
    auto stop_value = [&](const ResidualReport& r) {
        return cfg.stop_metric == StopMetric::TransportKKT ? r.eta_dot : r.eta_soc;
    };

    ResidualReport report = evaluate(sol.state);
    record(report, 0);
    sol.residuals = report;
    sol.status = SolveStatus::IterBudget;
    if (!std::isfinite(report.eta_dot) || !std::isfinite(report.eta_soc)) {
        sol.status = SolveStatus::Aborted;
    } else if (stop_value(report) <= cfg.tol) {
        sol.status = SolveStatus::Converged;
    } else if (seconds_since(t0) >= cfg.max_time_seconds) {
        sol.status = SolveStatus::TimeBudget;
    } else {
        long k = 0;
        while (k < cfg.max_iter) {
            step(sol.state, cfg);
            ++k;
            ++sol.state.iter;
            const bool eval_point = (k % cfg.residual_interval == 0) || k == cfg.max_iter;
            const bool sigma_point =
                cfg.sigma_adapt.enabled && (k % cfg.sigma_adapt.interval == 0);
            if (!(eval_point || sigma_point)) continue;

            const ResidualReport r = evaluate(sol.state);
            if (!std::isfinite(r.eta_dot) || !std::isfinite(r.eta_soc)) {
                // Keep the last good residuals in the solution.
                sol.status = SolveStatus::Aborted;
                break;
            }
            record(r, k);
            sol.residuals = r;
            if (stop_value(r) <= cfg.tol) {
                sol.status = SolveStatus::Converged;
                break;
            }
            if (seconds_since(t0) >= cfg.max_time_seconds) {
                sol.status = SolveStatus::TimeBudget;
                break;
            }
            if (k == cfg.max_iter) break;
            if (sigma_point && update_sigma(sol.state, r.soc, cfg.sigma_adapt)) {
                sol.sigma_trace.push_back({k, sol.state.penalty});
                if (cfg.algorithm == Algorithm::AcceleratedADMM) reset_momentum();
            }
            if (cfg.algorithm == Algorithm::AcceleratedADMM &&
                impl_->momentum_k >= cfg.accel.restart_period)
                reset_momentum();
        }
        sol.iterations = k;
    }
    sol.elapsed_seconds = seconds_since(t0);
    sol.objective = sol.residuals.dot.objective;
    return sol;
}

Solution run(const Problem& p, const SolverConfig& cfg, std::optional<SolverState> initial) {
    SolverEngine engine(p);
    return engine.run(cfg, std::move(initial));
}

DensityTrajectory extract_density(const SolverState& s) {
    const GridSpec& g = s.potential.grid;
    DensityTrajectory out;
    out.time_slices = g.segments(0);
    out.slice_size = g.spatial_size();
    const auto& density = s.transport.blocks[0];
    out.density.reserve(static_cast<std::size_t>(out.time_slices));
    out.negative_counts.resize(static_cast<std::size_t>(out.time_slices), 0);
    out.most_negative.resize(static_cast<std::size_t>(out.time_slices), 0.0);
    for (int t = 0; t < out.time_slices; ++t) {
        const double* begin = density.data() + static_cast<std::size_t>(t) * out.slice_size;
        out.density.emplace_back(begin, begin + out.slice_size);
        long neg = 0;
        double worst = 0.0;
        for (std::int64_t i = 0; i < out.slice_size; ++i) {
            if (begin[i] < 0.0) {
                ++neg;
                worst = std::min(worst, begin[i]);
            }
        }
        out.negative_counts[static_cast<std::size_t>(t)] = neg;
        out.most_negative[static_cast<std::size_t>(t)] = worst;
    }
    for (int d = 1; d < g.axes(); ++d)
        out.momentum.push_back(s.transport.blocks[static_cast<std::size_t>(d)]);
    return out;
}

}  // namespace otgrid
