#include "otgrid/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstdlib>
#include <mutex>

namespace otgrid {
namespace {

constexpr double kPi = 3.14159265358979323846;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

#ifdef OTGRID_HAVE_FFTW_THREADS
int env_thread_count() {
    const char* s = std::getenv("OTGRID_THREADS");
    if (!s) return 1;
    const int n = std::atoi(s);
    return n > 1 ? n : 1;
}
#endif

}  // namespace

CenteredField laplacian(const CenteredField& phi) {
    require(phi.shape_ok(), "laplacian: shape mismatch");
    const GridSpec& g = phi.grid;
    CenteredField out = CenteredField::zeros(g);
    for (int d = 0; d < g.axes(); ++d) {
        const int n = g.segments(d);
        const double w = static_cast<double>(n) * static_cast<double>(n);  // 1/h^2
        std::int64_t outer = 1, inner = 1;
        for (int j = 0; j < d; ++j) outer *= g.segments(j) + 1;
        for (int j = d + 1; j < g.axes(); ++j) inner *= g.segments(j) + 1;
        for (std::int64_t o = 0; o < outer; ++o) {
            const double* in_o = phi.values.data() + o * (n + 1) * inner;
            double* out_o = out.values.data() + o * (n + 1) * inner;
            for (int j = 0; j <= n; ++j) {
                const double* c = in_o + j * inner;
                double* r = out_o + j * inner;
                const double* lo = (j > 0) ? c - inner : nullptr;
                const double* hi = (j < n) ? c + inner : nullptr;
                for (std::int64_t i = 0; i < inner; ++i) {
                    double v = 0.0;
                    if (lo) v += c[i] - lo[i];
                    if (hi) v += c[i] - hi[i];
                    r[i] += w * v;
                }
            }
        }
    }
    return out;
}

struct NeumannPoisson::Plans {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
    ~Plans() {
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

NeumannPoisson::NeumannPoisson(GridSpec grid)
    : grid_(std::move(grid)), plans_(std::make_unique<Plans>()) {
    const int rank = grid_.axes();
    std::vector<int> dims(static_cast<std::size_t>(rank));
    for (int d = 0; d < rank; ++d) dims[static_cast<std::size_t>(d)] = grid_.segments(d) + 1;

    // Per-axis eigenvalues of the second-difference matrix, then the full
    // tensor sum with the round-trip transform normalization folded in.
    std::vector<std::vector<double>> axis_eigs(static_cast<std::size_t>(rank));
    double norm = 1.0;
    for (int d = 0; d < rank; ++d) {
        const int m = dims[static_cast<std::size_t>(d)];
        norm *= 2.0 * m;
        auto& ev = axis_eigs[static_cast<std::size_t>(d)];
        ev.resize(static_cast<std::size_t>(m));
        const double inv_h2 =
            static_cast<double>(grid_.segments(d)) * static_cast<double>(grid_.segments(d));
        for (int k = 0; k < m; ++k) {
            const double s = std::sin(kPi * k / (2.0 * m));
            ev[static_cast<std::size_t>(k)] = 4.0 * inv_h2 * s * s;
        }
    }
    const std::int64_t total = grid_.centered_size();
    spectral_scale_.assign(static_cast<std::size_t>(total), 0.0);
    std::vector<int> idx(static_cast<std::size_t>(rank), 0);
    for (std::int64_t flat = 0; flat < total; ++flat) {
        double lam = 0.0;
        for (int d = 0; d < rank; ++d)
            lam += axis_eigs[static_cast<std::size_t>(d)][static_cast<std::size_t>(
                idx[static_cast<std::size_t>(d)])];
        spectral_scale_[static_cast<std::size_t>(flat)] = (lam > 0.0) ? 1.0 / (lam * norm) : 0.0;
        for (int d = rank - 1; d >= 0; --d) {
            if (++idx[static_cast<std::size_t>(d)] < dims[static_cast<std::size_t>(d)]) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
    }

    std::vector<fftw_r2r_kind> fwd_kind(static_cast<std::size_t>(rank), FFTW_REDFT10);
    std::vector<fftw_r2r_kind> bwd_kind(static_cast<std::size_t>(rank), FFTW_REDFT01);
    std::vector<double> dummy(static_cast<std::size_t>(total));
    std::lock_guard<std::mutex> lock(planner_mutex());
#ifdef OTGRID_HAVE_FFTW_THREADS
    const int threads = env_thread_count();
    if (threads > 1) {
        static std::once_flag once;
        std::call_once(once, [] { fftw_init_threads(); });
        fftw_plan_with_nthreads(threads);
    }
#endif
    // FFTW_UNALIGNED lets the cached plans run on any caller buffer.
    plans_->fwd = fftw_plan_r2r(rank, dims.data(), dummy.data(), dummy.data(), fwd_kind.data(),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_->bwd = fftw_plan_r2r(rank, dims.data(), dummy.data(), dummy.data(), bwd_kind.data(),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plans_->fwd || !plans_->bwd) throw std::runtime_error("NeumannPoisson: planning failed");
}

NeumannPoisson::~NeumannPoisson() = default;

void NeumannPoisson::solve_into(const CenteredField& b, CenteredField& phi) const {
    require(b.shape_ok() && b.grid == grid_, "NeumannPoisson: rhs shape mismatch");
    require(phi.shape_ok() && phi.grid == grid_, "NeumannPoisson: output shape mismatch");
    require(phi.values.data() != b.values.data(), "NeumannPoisson: output may not alias rhs");
    phi.values = b.values;
    double* data = phi.values.data();
    fftw_execute_r2r(plans_->fwd, data, data);
    const std::size_t n = phi.values.size();
    for (std::size_t i = 0; i < n; ++i) data[i] *= spectral_scale_[i];
    fftw_execute_r2r(plans_->bwd, data, data);
}

CenteredField NeumannPoisson::solve(const CenteredField& b) const {
    CenteredField phi = CenteredField::zeros(grid_);
    solve_into(b, phi);
    return phi;
}

CenteredField solve_neumann(const CenteredField& b) {
    NeumannPoisson solver(b.grid);
    return solver.solve(b);
}

}  // namespace otgrid
