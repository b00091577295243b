// Command-line front end: solve single problems, compare the iteration
// schemes on one problem, and generate benchmark density rasters.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "otgrid/io.hpp"
#include "otgrid/multilevel.hpp"
#include "otgrid/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace otgrid;

namespace {

constexpr int kExitConverged = 0;
constexpr int kExitBudget = 1;
constexpr int kExitConfig = 2;
constexpr int kExitAborted = 3;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.contains(key))
            throw ConfigError("unknown key '" + key + "' in " + where);
}

struct OutputConfig {
    bool all_snapshots = true;
    std::vector<double> snapshot_times;  // used when all_snapshots is false
};

struct RunConfig {
    GridSpec grid;
    ProblemDef def;
    std::string problem_label;
    double delta = 0.0;
    SolverConfig solver;
    OutputConfig output;
};

GridSpec parse_grid(const json& j) {
    if (!j.is_array() || j.size() < 2) throw ConfigError("problem.grid must be [n0, n1, ...]");
    std::vector<int> n;
    for (const auto& e : j) {
        if (!e.is_number_integer() || e.get<int>() < 1)
            throw ConfigError("problem.grid entries must be positive integers");
        n.push_back(e.get<int>());
    }
    return GridSpec(std::move(n));
}

SolverConfig parse_solver(const json& j) {
    SolverConfig cfg;
    reject_unknown_keys(j, {"algorithm", "tau", "sigma0", "tol", "stop_metric", "max_iter",
                            "max_time_seconds", "residual_interval", "sigma_adapt", "accel",
                            "multilevel"},
                        "solver");
    if (j.contains("algorithm")) {
        const auto alg = parse_algorithm(j.at("algorithm").get<std::string>());
        if (!alg) throw ConfigError("unknown solver.algorithm");
        cfg.algorithm = *alg;
    }
    if (j.contains("tau")) cfg.dual_step = j.at("tau").get<double>();
    if (j.contains("sigma0")) cfg.sigma0 = j.at("sigma0").get<double>();
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("stop_metric")) {
        const std::string m = j.at("stop_metric").get<std::string>();
        if (m == "dot")
            cfg.stop_metric = StopMetric::TransportKKT;
        else if (m == "soc")
            cfg.stop_metric = StopMetric::SocpKKT;
        else
            throw ConfigError("solver.stop_metric must be 'dot' or 'soc'");
    }
    if (j.contains("max_iter")) cfg.max_iter = j.at("max_iter").get<long>();
    if (j.contains("max_time_seconds"))
        cfg.max_time_seconds = j.at("max_time_seconds").get<double>();
    if (j.contains("residual_interval"))
        cfg.residual_interval = j.at("residual_interval").get<int>();
    if (j.contains("sigma_adapt")) {
        const json& s = j.at("sigma_adapt");
        reject_unknown_keys(s, {"enabled", "interval", "ratio", "factor"}, "solver.sigma_adapt");
        if (s.contains("enabled")) cfg.sigma_adapt.enabled = s.at("enabled").get<bool>();
        if (s.contains("interval")) cfg.sigma_adapt.interval = s.at("interval").get<int>();
        if (s.contains("ratio")) cfg.sigma_adapt.ratio = s.at("ratio").get<double>();
        if (s.contains("factor")) cfg.sigma_adapt.factor = s.at("factor").get<double>();
    }
    if (j.contains("accel")) {
        const json& a = j.at("accel");
        reject_unknown_keys(a, {"theta", "rho", "restart_period"}, "solver.accel");
        if (a.contains("theta")) cfg.accel.theta = a.at("theta").get<double>();
        if (a.contains("rho")) cfg.accel.rho = a.at("rho").get<double>();
        if (a.contains("restart_period"))
            cfg.accel.restart_period = a.at("restart_period").get<int>();
    }
    if (j.contains("multilevel")) {
        const json& m = j.at("multilevel");
        reject_unknown_keys(m, {"depth"}, "solver.multilevel");
        if (m.contains("depth")) cfg.multilevel.depth = m.at("depth").get<int>();
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig parse_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed JSON: ") + e.what());
    }
    reject_unknown_keys(j, {"problem", "solver", "output"}, "config");
    if (!j.contains("problem")) throw ConfigError("config requires a 'problem' section");

    RunConfig rc;
    const json& p = j.at("problem");
    reject_unknown_keys(p, {"example", "grid", "delta", "seed", "dirac_count", "density0",
                            "density1", "weights"},
                        "problem");
    if (!p.contains("grid")) throw ConfigError("problem.grid is required");
    rc.grid = parse_grid(p.at("grid"));
    if (p.contains("delta")) rc.delta = p.at("delta").get<double>();

    const bool example_mode = p.contains("example");
    const bool file_mode = p.contains("density0") || p.contains("density1");
    if (example_mode == file_mode)
        throw ConfigError("problem needs either 'example' or a density file pair");
    if (example_mode) {
        const auto id = parse_example_id(p.at("example").get<std::string>());
        if (!id) throw ConfigError("unknown problem.example");
        const unsigned seed = p.contains("seed") ? p.at("seed").get<unsigned>() : 0u;
        const int diracs = p.contains("dirac_count") ? p.at("dirac_count").get<int>() : 30;
        try {
            rc.def = make_example(*id, rc.delta, seed, diracs);
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
        rc.problem_label = example_name(*id);
    } else {
        if (!p.contains("density0") || !p.contains("density1"))
            throw ConfigError("file mode requires both density0 and density1");
        rc.def.rho0.kind = DensityKind::RasterFile;
        rc.def.rho0.raster_path = p.at("density0").get<std::string>();
        rc.def.rho0.delta = rc.delta;
        rc.def.rho1.kind = DensityKind::RasterFile;
        rc.def.rho1.raster_path = p.at("density1").get<std::string>();
        rc.def.rho1.delta = rc.delta;
        if (p.contains("weights")) {
            ObstacleSpec obs;
            obs.raster_path = p.at("weights").get<std::string>();
            rc.def.obstacles = std::move(obs);
        }
        rc.def.label = "files";
        rc.problem_label = "files";
    }

    if (j.contains("solver")) rc.solver = parse_solver(j.at("solver"));
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown_keys(o, {"snapshots"}, "output");
        if (o.contains("snapshots")) {
            const json& s = o.at("snapshots");
            if (s.is_string()) {
                const std::string v = s.get<std::string>();
                if (v == "all")
                    rc.output.all_snapshots = true;
                else if (v == "none") {
                    rc.output.all_snapshots = false;
                    rc.output.snapshot_times.clear();
                } else
                    throw ConfigError("output.snapshots must be 'all', 'none', or a time list");
            } else if (s.is_array()) {
                rc.output.all_snapshots = false;
                for (const auto& e : s) rc.output.snapshot_times.push_back(e.get<double>());
            } else {
                throw ConfigError("output.snapshots must be 'all', 'none', or a time list");
            }
        }
    }
    return rc;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

int status_exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return kExitConverged;
        case SolveStatus::IterBudget:
        case SolveStatus::TimeBudget: return kExitBudget;
        case SolveStatus::Aborted: return kExitAborted;
    }
    return kExitAborted;
}

void write_residual_log(const fs::path& path, const RunOutcome& out) {
    std::ofstream csv(path);
    csv << "iter,eta_d,eta_p,eta_proj,eta_s,eta_dot,eta_soc,sigma,elapsed_s\n";
    long base = 0;
    double time_base = 0.0;
    for (const auto& level : out.levels) {
        for (const auto& row : level.history)
            csv << base + row.iter << ',' << fmt(row.eta_d) << ',' << fmt(row.eta_p) << ','
                << fmt(row.eta_proj) << ',' << fmt(row.eta_s) << ',' << fmt(row.eta_dot) << ','
                << fmt(row.eta_soc) << ',' << fmt(row.sigma) << ','
                << fmt(time_base + row.elapsed_s) << '\n';
        base += level.iterations;
        time_base += level.seconds;
    }
}

void write_summary(const fs::path& path, const RunConfig& rc, const RunOutcome& out) {
    const Solution& sol = out.solution;
    std::ofstream txt(path);
    txt << "status=" << status_name(sol.status) << "\n";
    txt << "problem=" << rc.problem_label << "\n";
    txt << "grid=" << out.problem.grid.describe() << "\n";
    txt << "delta=" << fmt(rc.delta) << "\n";
    txt << "algorithm=" << algorithm_name(rc.solver.algorithm) << "\n";
    txt << "tol=" << fmt(rc.solver.tol) << "\n";
    txt << "levels=" << out.levels.size() << "\n";
    for (std::size_t i = 0; i < out.levels.size(); ++i) {
        const auto& lv = out.levels[i];
        txt << "level_" << i << "_grid=" << lv.grid.describe() << "\n";
        txt << "level_" << i << "_tol=" << fmt(lv.tol) << "\n";
        txt << "level_" << i << "_iterations=" << lv.iterations << "\n";
        txt << "level_" << i << "_status=" << status_name(lv.status) << "\n";
        txt << "level_" << i << "_seconds=" << fmt(lv.seconds) << "\n";
    }
    txt << "finest_iterations=" << (out.levels.empty() ? 0 : out.levels.back().iterations) << "\n";
    txt << "eta_dot=" << fmt(sol.residuals.eta_dot) << "\n";
    txt << "eta_d=" << fmt(sol.residuals.dot.eta_d) << "\n";
    txt << "eta_p=" << fmt(sol.residuals.dot.eta_p) << "\n";
    txt << "eta_proj=" << fmt(sol.residuals.dot.eta_proj) << "\n";
    txt << "eta_s=" << fmt(sol.residuals.dot.eta_s) << "\n";
    txt << "eta_soc=" << fmt(sol.residuals.eta_soc) << "\n";
    txt << "objective=" << fmt(sol.objective) << "\n";
    txt << "sigma_final=" << fmt(sol.state.penalty) << "\n";
    std::ostringstream trace;
    long base = 0;
    for (const auto& level : out.levels) {
        for (const auto& ev : level.sigma_trace)
            trace << (trace.tellp() > 0 ? " " : "") << (base + ev.iter) << ':' << fmt(ev.sigma);
        base += level.iterations;
    }
    txt << "sigma_trace=" << trace.str() << "\n";
    txt << "elapsed_seconds=" << fmt(out.elapsed_seconds) << "\n";
}

void write_snapshots(const fs::path& dir, const RunConfig& rc, const RunOutcome& out) {
    const GridSpec& g = out.problem.grid;
    const DensityTrajectory traj = extract_density(out.solution);
    std::vector<int> slices;
    if (rc.output.all_snapshots) {
        for (int k = 0; k < traj.time_slices; ++k) slices.push_back(k);
    } else {
        for (double t : rc.output.snapshot_times) {
            int k = static_cast<int>(std::floor(t / g.step(0)));
            slices.push_back(std::clamp(k, 0, traj.time_slices - 1));
        }
    }
    std::vector<int> shape;
    for (int d = 1; d < g.axes(); ++d) shape.push_back(g.segments(d) + 1);
    std::ofstream manifest(dir / "density_manifest.txt");
    manifest << "slices=" << slices.size() << "\nshape=";
    for (std::size_t i = 0; i < shape.size(); ++i) manifest << (i ? " " : "") << shape[i];
    manifest << "\norder=row-major\ndtype=float64\n";
    for (std::size_t s = 0; s < slices.size(); ++s) {
        const int k = slices[s];
        const double t = (k + 0.5) * g.step(0);
        char name[32];
        std::snprintf(name, sizeof(name), "density_%04zu", s);
        Raster r{shape, traj.density[static_cast<std::size_t>(k)], {{"t", fmt(t)}}};
        write_raster(dir / name, r);
        manifest << "file_" << s << "=" << name << ".raw t=" << fmt(t) << "\n";
    }

    // Nonnegativity violation histogram of the density multiplier, fixed
    // logarithmic bins.
    std::vector<double> edges = {0.0};
    for (int e = -12; e <= -1; ++e) edges.push_back(std::pow(10.0, e));
    std::vector<long> counts(edges.size(), 0);
    for (const auto& slice : traj.density)
        for (double v : slice) {
            if (v >= 0.0) continue;
            const double mag = -v;
            std::size_t bin = 0;
            for (std::size_t b = 0; b < edges.size(); ++b)
                if (mag >= edges[b]) bin = b;
            ++counts[bin];
        }
    std::ofstream hist(dir / "lambda0_negativity.csv");
    hist << "bin_lower,count\n";
    for (std::size_t b = 0; b < edges.size(); ++b)
        hist << fmt(edges[b]) << ',' << counts[b] << '\n';
}

int cmd_solve(const fs::path& config_path, const fs::path& out_dir) {
    RunConfig rc;
    try {
        rc = parse_config(config_path);
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    RunOutcome out;
    try {
        out = solve_multilevel(rc.def, rc.grid, rc.solver);
    } catch (const std::exception& e) {
        std::cerr << "solver setup failed: " << e.what() << "\n";
        return kExitConfig;
    }
    write_summary(out_dir / "summary.txt", rc, out);
    write_residual_log(out_dir / "residuals.csv", out);
    write_snapshots(out_dir, rc, out);
    std::cout << "status=" << status_name(out.solution.status)
              << " eta_dot=" << fmt(out.solution.residuals.eta_dot)
              << " elapsed_s=" << fmt(out.elapsed_seconds) << "\n";
    return status_exit_code(out.solution.status);
}

int cmd_compare(const fs::path& config_path, const std::string& algorithms,
                const fs::path& out_dir) {
    RunConfig rc;
    std::vector<Algorithm> algs;
    try {
        rc = parse_config(config_path);
        std::stringstream ss(algorithms);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            const auto a = parse_algorithm(tok);
            if (!a) throw ConfigError("unknown algorithm '" + tok + "'");
            algs.push_back(*a);
        }
        if (algs.empty()) throw ConfigError("no algorithms given");
        fs::create_directories(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::ofstream csv(out_dir / "compare.csv");
    csv << "problem,grid,delta,algorithm,eta_dot,finest_iter,time_s\n";
    int exit_code = kExitConverged;
    for (Algorithm a : algs) {
        SolverConfig cfg = rc.solver;
        cfg.algorithm = a;
        if (a == Algorithm::Alg2) cfg.dual_step = 1.0;
        RunOutcome out;
        try {
            out = solve_multilevel(rc.def, rc.grid, cfg);
        } catch (const std::exception& e) {
            std::cerr << "solver setup failed: " << e.what() << "\n";
            return kExitConfig;
        }
        csv << rc.problem_label << ',' << rc.grid.describe() << ',' << fmt(rc.delta) << ','
            << algorithm_name(a) << ',' << fmt(out.solution.residuals.eta_dot) << ','
            << (out.levels.empty() ? 0 : out.levels.back().iterations) << ','
            << fmt(out.elapsed_seconds) << '\n';
        exit_code = std::max(exit_code, status_exit_code(out.solution.status));
        std::cout << algorithm_name(a) << ": " << status_name(out.solution.status)
                  << " eta_dot=" << fmt(out.solution.residuals.eta_dot) << "\n";
    }
    return exit_code;
}

int cmd_example(const std::string& id_name, const std::string& grid_csv, double delta,
                unsigned seed, int dirac_count, const fs::path& out_dir) {
    try {
        const auto id = parse_example_id(id_name);
        if (!id) throw ConfigError("unknown example id '" + id_name + "'");
        std::vector<int> n;
        std::stringstream ss(grid_csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) n.push_back(std::stoi(tok));
        const GridSpec grid(n);
        const ProblemDef def = make_example(*id, delta, seed, dirac_count);

        fs::create_directories(out_dir);
        std::vector<int> shape;
        for (int d = 1; d < grid.axes(); ++d) shape.push_back(grid.segments(d) + 1);
        write_raster(out_dir / "density0", {shape, rasterize_density(def.rho0, grid), {}});
        write_raster(out_dir / "density1", {shape, rasterize_density(def.rho1, grid), {}});
        if (def.obstacles) {
            // Materialize once to reuse the weight assembly, then save the
            // spatial layer (weights are constant in time).
            const Problem p = def.materialize(grid);
            const std::size_t spatial = static_cast<std::size_t>(grid.spatial_size());
            std::vector<double> layer(p.omega.begin(), p.omega.begin() + spatial);
            write_raster(out_dir / "weights", {shape, layer, {}});
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "example generation failed: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic transport solver on staggered space-time grids"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* solve = app.add_subcommand("solve", "solve one problem from a JSON config");
    solve->add_option("--config", config_path, "JSON config file")->required();
    solve->add_option("--out", out_dir, "output directory")->required();

    std::string algorithms;
    auto* compare = app.add_subcommand("compare", "run several schemes on one problem");
    compare->add_option("--config", config_path, "JSON config file")->required();
    compare->add_option("--algorithms", algorithms, "comma list: inpalm,palm,alg2,accadmm")
        ->required();
    compare->add_option("--out", out_dir, "output directory")->required();

    std::string example_id, grid_csv;
    double delta = 0.0;
    unsigned seed = 0;
    int dirac_count = 30;
    auto* example = app.add_subcommand("example", "write benchmark density rasters");
    example->add_option("--id", example_id, "ex1..ex7")->required();
    example->add_option("--grid", grid_csv, "n0,n1[,n2]")->required();
    example->add_option("--delta", delta, "density lower-bound shift");
    example->add_option("--seed", seed, "random seed (ex7)");
    example->add_option("--dirac-count", dirac_count, "point masses (ex7)");
    example->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (solve->parsed()) return cmd_solve(config_path, out_dir);
    if (compare->parsed()) return cmd_compare(config_path, algorithms, out_dir);
    if (example->parsed())
        return cmd_example(example_id, grid_csv, delta, seed, dirac_count, out_dir);
    return kExitConfig;
}
